import pytest

from reebforge.canonical import (canonical_mesh, generate_surface,
                                 klein_solid, solid_for_label, torus_solid)
from reebforge.complexes import (boundary_surface, find_interior_tets,
                                 validate_complex)
from reebforge.graphs import euler_char
from reebforge.surfaces import (MeshError, classify_labels, classify_surface,
                                validate_surface)


@pytest.mark.parametrize("r", list(range(-6, 7)))
@pytest.mark.parametrize("k", [1, 2, 3])
def test_generate_classify_round_trip(r, k):
    mesh = generate_surface(r, k)
    comps = classify_surface(mesh)
    assert len(comps) == 1
    assert comps[0].label == r
    assert comps[0].chi == euler_char(r)


@pytest.mark.parametrize("r", list(range(-6, 7)))
def test_generated_spare_disks(r):
    mesh = generate_surface(r, 1)
    assert len(mesh.spares) >= 2
    seen = set()
    for s in mesh.spares:
        tri = mesh.triangles[s]
        assert not seen.intersection(tri)
        seen.update(tri)


def test_orientation_propagation_conflicts():
    for r in range(-6, 7):
        comp = classify_surface(generate_surface(r, 1))[0]
        assert comp.orientable == (r >= 0)


def test_klein_mesh_example():
    mesh = generate_surface(-2, 1)
    comp = classify_surface(mesh)[0]
    assert comp.chi == 0 and not comp.orientable


def test_projective_plane_example():
    mesh = generate_surface(-1, 1)
    comp = classify_surface(mesh)[0]
    assert comp.chi == 1 and not comp.orientable


@pytest.mark.parametrize("label", [0, 1, -2, 2, 3, -4])
def test_solids_are_manifolds_with_matching_boundary(label):
    s = solid_for_label(label, 1)
    validate_complex(s.cx)
    bmesh, used = boundary_surface(s.cx)
    assert classify_labels(bmesh) == [label]
    have = sorted(tuple(sorted(used[v] for v in t)) for t in bmesh.triangles)
    want = sorted(tuple(sorted(s.bmap[v] for v in t))
                  for t in s.boundary.triangles)
    assert have == want


def test_solids_reject_odd_chi():
    with pytest.raises(MeshError, match="odd-chi"):
        solid_for_label(-1, 1)
    with pytest.raises(MeshError, match="odd-chi"):
        solid_for_label(-3, 1)


@pytest.mark.parametrize("maker", [torus_solid, klein_solid])
def test_product_solids_have_interior_tets(maker):
    s = maker(1)
    assert len(find_interior_tets(s.cx)) >= 2


def test_boundary_sum_of_solids_tracks_canonical():
    s = solid_for_label(-4, 1)
    want = canonical_mesh(-4, 1)
    assert sorted(map(sorted, s.boundary.triangles)) == \
        sorted(map(sorted, want.triangles))


def test_canonical_meshes_are_valid_complexes():
    for r in range(-6, 7):
        validate_surface(canonical_mesh(r, 1))

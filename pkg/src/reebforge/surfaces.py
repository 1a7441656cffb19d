"""Triangulated closed surfaces: validity checks, classification by Euler
characteristic and orientability, and connected sums at the label and mesh
level.

Meshes are purely combinatorial; coordinates, when present, live in the
anchor metadata and are cosmetic for everything except overlay refinement.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field


class MeshError(ValueError):
    """Raised when a triangle list violates surface-mesh invariants."""


@dataclass
class SurfaceMesh:
    nv: int
    triangles: list[tuple[int, int, int]]
    anchor: object | None = None
    spares: list[int] = field(default_factory=list)   # indices of spare disk triangles

    def copy(self) -> "SurfaceMesh":
        return SurfaceMesh(self.nv, list(self.triangles), self.anchor,
                           list(self.spares))


def _edge_map(triangles):
    edges: dict[tuple[int, int], list[int]] = {}
    for ti, (a, b, c) in enumerate(triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            edges.setdefault(key, []).append(ti)
    return edges


def validate_surface(mesh: SurfaceMesh, allow_boundary: bool = False):
    """Check simplicial-surface invariants; returns the edge map.

    Closed mode requires every edge in exactly 2 triangles and every vertex
    link a single cycle.  Boundary mode additionally admits edges in one
    triangle and chain links.
    """
    seen = set()
    used = set()
    for a, b, c in mesh.triangles:
        if len({a, b, c}) != 3:
            raise MeshError(f"degenerate triangle ({a},{b},{c})")
        if not all(0 <= x < mesh.nv for x in (a, b, c)):
            raise MeshError(f"triangle vertex out of range ({a},{b},{c})")
        key = tuple(sorted((a, b, c)))
        if key in seen:
            raise MeshError(f"duplicate triangle {key}")
        seen.add(key)
        used.update(key)
    edges = _edge_map(mesh.triangles)
    for key, tris in edges.items():
        if len(tris) > 2:
            raise MeshError(f"edge {key} in {len(tris)} triangles")
        if len(tris) == 1 and not allow_boundary:
            raise MeshError(f"boundary edge {key} in closed mesh")
    # vertex links: around each vertex the incident triangles must chain into
    # a single cycle (or a single path when the vertex is on the boundary)
    star: dict[int, list[int]] = {}
    for ti, tri in enumerate(mesh.triangles):
        for v in tri:
            star.setdefault(v, []).append(ti)
    for v, tris in star.items():
        # link graph: nodes are the opposite edges' endpoints, each triangle
        # contributes one link edge
        deg: dict[int, int] = {}
        adj: dict[int, list[int]] = {}
        for ti in tris:
            a, b, c = mesh.triangles[ti]
            x, y = [w for w in (a, b, c) if w != v]
            deg[x] = deg.get(x, 0) + 1
            deg[y] = deg.get(y, 0) + 1
            adj.setdefault(x, []).append(y)
            adj.setdefault(y, []).append(x)
        ends = [w for w, d in deg.items() if d == 1]
        if any(d > 2 for d in deg.values()):
            raise MeshError(f"vertex {v} link is not a 1-manifold")
        if ends and not allow_boundary:
            raise MeshError(f"vertex {v} link is not a cycle")
        if len(ends) not in (0, 2):
            raise MeshError(f"vertex {v} link has {len(ends)} chain ends")
        # connectivity of the link
        start = next(iter(adj))
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        if len(comp) != len(adj):
            raise MeshError(f"vertex {v} link is disconnected")
    return edges


@dataclass
class SurfaceComponent:
    label: int
    chi: int
    orientable: bool
    vertices: list[int]
    triangles: list[int]   # indices into the mesh triangle list
    boundary_cycles: int = 0


def classify_surface(mesh: SurfaceMesh,
                     allow_boundary: bool = False) -> list[SurfaceComponent]:
    """Classify each connected component of a triangulated surface.

    Computes chi = V - E + F and decides orientability by propagating
    triangle orientations across shared edges; a propagation conflict means
    non-orientable.  The label is (2-chi)/2 for orientable components and
    chi-2 otherwise.
    """
    edges = validate_surface(mesh, allow_boundary=allow_boundary)
    tn = len(mesh.triangles)
    parent = list(range(tn))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tris in edges.values():
        if len(tris) == 2:
            a, b = find(tris[0]), find(tris[1])
            if a != b:
                parent[a] = b

    comps: dict[int, list[int]] = {}
    for ti in range(tn):
        comps.setdefault(find(ti), []).append(ti)

    # orientation propagation; orient[t] in {0,1}, flipping the triangle
    orient = [None] * tn
    tri_edges = []
    for a, b, c in mesh.triangles:
        tri_edges.append(((a, b), (b, c), (c, a)))

    def directed_edges(ti):
        des = tri_edges[ti]
        if orient[ti] == 0:
            return des
        return tuple((v, u) for u, v in des)

    out = []
    for root in sorted(comps):
        tris = comps[root]
        vset = set()
        eset = set()
        bedges = []
        for ti in tris:
            vset.update(mesh.triangles[ti])
            for u, v in tri_edges[ti]:
                eset.add((u, v) if u < v else (v, u))
        for key in eset:
            if len(edges[key]) == 1:
                bedges.append(key)
        # boundary cycles: connected components of the boundary edge graph
        link: dict[int, list[int]] = {}
        for u, v in bedges:
            link.setdefault(u, []).append(v)
            link.setdefault(v, []).append(u)
        bcount = 0
        unvisited = set(link)
        while unvisited:
            bcount += 1
            stack = [unvisited.pop()]
            while stack:
                x = stack.pop()
                for y in link[x]:
                    if y in unvisited:
                        unvisited.remove(y)
                        stack.append(y)
        chi = len(vset) - len(eset) + len(tris)
        orientable = True
        start = tris[0]
        orient[start] = 0
        stack = [start]
        while stack:
            ti = stack.pop()
            mine = set(directed_edges(ti))
            for u, v in list(mine):
                key = (u, v) if u < v else (v, u)
                for tj in edges[key]:
                    if tj == ti:
                        continue
                    # consistent orientation traverses the shared edge in
                    # opposite directions
                    for o in (0, 1):
                        des = tri_edges[tj] if o == 0 else tuple(
                            (y, x) for x, y in tri_edges[tj])
                        if (v, u) in des:
                            want = o
                            break
                    else:
                        want = None
                    if want is None:
                        orientable = False
                        continue
                    if orient[tj] is None:
                        orient[tj] = want
                        stack.append(tj)
                    elif orient[tj] != want:
                        orientable = False
        if bcount == 0:
            if orientable:
                if chi % 2 != 0 or chi > 2:
                    raise MeshError(
                        f"impossible closed surface: chi={chi} orientable")
                label = (2 - chi) // 2
            else:
                if chi > 1:
                    raise MeshError(
                        f"impossible closed surface: chi={chi} non-orientable")
                label = chi - 2
        else:
            label = 0   # placeholder; surfaces with boundary are internal
        out.append(SurfaceComponent(label, chi, orientable, sorted(vset),
                                    tris, boundary_cycles=bcount))
    return out


def classify_labels(mesh: SurfaceMesh) -> list[int]:
    """Sorted component labels of a closed surface mesh."""
    return sorted(c.label for c in classify_surface(mesh))


def connected_sum_label(r1: int, r2: int) -> int:
    """Label arithmetic of the connected sum.

    chi(out) = chi(r1) + chi(r2) - 2 always holds; orientability survives
    only when both summands are orientable.
    """
    if r1 >= 0 and r2 >= 0:
        return r1 + r2
    if r1 < 0 and r2 < 0:
        return r1 + r2
    if r1 < 0:
        return r1 - 2 * r2
    return r2 - 2 * r1


@dataclass
class SumRecipe:
    """Anchor metadata for meshes produced by connected sums."""
    left: object
    left_spare: int
    right: object
    right_spare: int


def connected_sum_mesh_maps(m1: SurfaceMesh, d1: int, m2: SurfaceMesh,
                            d2: int):
    """Connected sum plus the vertex maps of both summands into the result.

    Removes the spare disk triangles d1 and d2 and identifies their
    boundary 3-cycles (sorted-order correspondence).  The rims have equal
    length by construction; a length mismatch is an error.
    """
    t1 = m1.triangles[d1]
    t2 = m2.triangles[d2]
    if len(t1) != len(t2):
        raise MeshError("boundary cycle length mismatch and no refinement "
                        "directive")
    off = m1.nv
    remap2 = list(range(off, off + m2.nv))
    for a, b in zip(sorted(t1), sorted(t2)):
        remap2[b] = a
    triangles = [t for i, t in enumerate(m1.triangles) if i != d1]
    kept1 = [i for i in range(len(m1.triangles)) if i != d1]
    for i, (a, b, c) in enumerate(m2.triangles):
        if i == d2:
            continue
        triangles.append((remap2[a], remap2[b], remap2[c]))
    # compact the vertex ids
    used = sorted({v for tri in triangles for v in tri})
    pos = {v: i for i, v in enumerate(used)}
    triangles = [(pos[a], pos[b], pos[c]) for a, b, c in triangles]
    map1 = [pos[v] for v in range(m1.nv)]
    map2 = [pos[remap2[v]] for v in range(m2.nv)]
    spares = []
    index1 = {old: new for new, old in enumerate(kept1)}
    for s in m1.spares:
        if s != d1:
            spares.append(index1[s])
    base2 = len(kept1)
    kept2 = [i for i in range(len(m2.triangles)) if i != d2]
    index2 = {old: new for new, old in enumerate(kept2)}
    for s in m2.spares:
        if s != d2:
            spares.append(base2 + index2[s])
    anchor = SumRecipe(m1.anchor, d1, m2.anchor, d2)
    return SurfaceMesh(len(used), triangles, anchor, spares), map1, map2


def connected_sum_mesh(m1: SurfaceMesh, d1: int, m2: SurfaceMesh,
                       d2: int) -> SurfaceMesh:
    """Connected sum along spare disk triangles d1 of m1 and d2 of m2."""
    mesh, _, _ = connected_sum_mesh_maps(m1, d1, m2, d2)
    return mesh


def find_spare_triangles(mesh: SurfaceMesh, count: int = 4,
                         avoid_vertices=()) -> list[int]:
    """Pick pairwise vertex-disjoint triangles usable as spare disks."""
    avoid = set(avoid_vertices)
    picked = []
    for ti, tri in enumerate(mesh.triangles):
        if any(v in avoid for v in tri):
            continue
        picked.append(ti)
        avoid.update(tri)
        if len(picked) == count:
            break
    return picked


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def mesh_to_dict(mesh: SurfaceMesh) -> dict:
    doc = {
        "vertices": list(range(mesh.nv)),
        "triangles": [list(t) for t in mesh.triangles],
    }
    if mesh.spares:
        doc["spares"] = list(mesh.spares)
    anchor = getattr(mesh.anchor, "to_dict", None)
    if anchor is not None:
        doc["anchor"] = anchor()
    return doc


def mesh_from_dict(doc) -> SurfaceMesh:
    try:
        verts = doc["vertices"]
        tris = [tuple(t) for t in doc["triangles"]]
    except (KeyError, TypeError) as exc:
        raise MeshError(f"bad mesh document: {exc}") from exc
    nv = len(verts)
    for t in tris:
        if len(t) != 3:
            raise MeshError(f"triangle arity != 3: {t}")
    return SurfaceMesh(nv, tris, None, list(doc.get("spares", [])))


def mesh_to_json(mesh: SurfaceMesh) -> str:
    return json.dumps(mesh_to_dict(mesh), indent=1)


def mesh_to_off(mesh: SurfaceMesh) -> str:
    """OFF export with synthetic coordinates; topology is the authority."""
    coords = []
    for v in range(mesh.nv):
        # deterministic pseudo-embedding on a coarse spiral
        coords.append((v % 17, (v * 7) % 23, v // 17))
    lines = ["OFF", f"{mesh.nv} {len(mesh.triangles)} 0"]
    for x, y, z in coords:
        lines.append(f"{x} {y} {z}")
    for a, b, c in mesh.triangles:
        lines.append(f"3 {a} {b} {c}")
    return "\n".join(lines) + "\n"

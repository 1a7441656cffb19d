"""Local pieces of the realization: product cylinders, extremum caps,
junction blocks with one singular value, merge operations, the junction
planner, and the parabola fold for extremum vertices.

A junction block is a constant-value connector solid at the singular level
with a product cylinder hanging off each boundary surface.  The connector
of a cell is assembled from one solid per even-chi boundary component and
one thickened projective plane per pair of odd-chi ones, chained together
by interior connected sums ("bridges": remove an interior tetrahedron on
each side and join the exposed sphere sockets with a spherical shell).

Merging two blocks at the same singular value is another bridge between
their connectors (disjoint-union merge), or a vertical tunnel drilled from
one picked boundary component of each down to the connectors, glued wall
to wall, which connected-sums the picked components (sum merge).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .canonical import canonical_mesh, solid_for_label
from .complexes import (ComplexError, TetComplex, boundary_surface,
                        find_interior_tets, merge_complexes, remove_tets,
                        surface_prism, validate_complex)
from .graphs import euler_char, is_odd_chi
from .reeb import ReebGraph, reeb_graph_of
from .surfaces import (MeshError, SurfaceMesh, classify_surface,
                       connected_sum_label, connected_sum_mesh_maps)

CYL_SEGS = 2          # segments per block cylinder; layers 0..CYL_SEGS


class BlockError(ValueError):
    """Raised for inadmissible block constructions or merges."""


_TETRA_SPHERE = SurfaceMesh(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


@dataclass
class Column:
    """Vertical spare prism stack through one boundary cylinder, reserved
    for sum merges."""

    spare_tri: int                       # triangle index in the comp mesh
    tets: list[int]
    rims: list[tuple[int, int, int]]     # outer->inner, sorted by mesh id


@dataclass
class BoundaryComponent:
    side: str                            # "bottom" | "top"
    value: Fraction
    label: int
    mesh: SurfaceMesh
    cmap: list[int]                      # mesh vertex -> block vertex (outer)
    layer_ids: list[list[int]]           # outer->inner, parallel to mesh
    columns: list[Column] = field(default_factory=list)
    slot: int = -1


@dataclass
class EdgeContract:
    lo: Fraction
    hi: Fraction
    label: int


@dataclass
class StarContract:
    center: Fraction
    leaves: list[tuple[Fraction, int]]   # (boundary value, label)


@dataclass
class Block:
    cx: TetComplex
    values: list[Fraction]
    a1: Fraction
    a2: Fraction
    singular_values: list[Fraction]
    boundary: list[BoundaryComponent]
    contract: EdgeContract | StarContract
    refinement: int
    bridge_tets: list[int] = field(default_factory=list)
    kind: str = "block"

    def labels(self, side: str) -> list[int]:
        return sorted(c.label for c in self.boundary if c.side == side)

    def remap(self, vmap, tet_map):
        """Rewrite all vertex/tet references after surgery or union."""
        for comp in self.boundary:
            comp.cmap = [vmap[v] for v in comp.cmap]
            comp.layer_ids = [[vmap[v] for v in layer]
                              for layer in comp.layer_ids]
            cols = []
            for col in comp.columns:
                tets = [tet_map(t) for t in col.tets]
                if any(t is None for t in tets):
                    continue
                rims = [tuple(vmap[v] for v in rim) for rim in col.rims]
                cols.append(Column(col.spare_tri, tets, rims))
            comp.columns = cols
        self.bridge_tets = [t for t in (tet_map(t) for t in self.bridge_tets)
                            if t is not None]


# ---------------------------------------------------------------------------
# cylinders and caps
# ---------------------------------------------------------------------------

def _layer_values(lo: Fraction, hi: Fraction, nseg: int) -> list[Fraction]:
    return [lo + (hi - lo) * Fraction(j, nseg) for j in range(nseg + 1)]


def _attach_columns(comp: BoundaryComponent, prod, tet_offset: int,
                    vmap, outer_to_inner_layers):
    for spare in comp.mesh.spares[:2]:
        tri = sorted(comp.mesh.triangles[spare])
        tets = []
        for j in range(prod.nlayers - 1):
            tets += [tet_offset + t for t in prod.prism_tets[(spare, j)]]
        rims = []
        for layer in outer_to_inner_layers:
            rims.append(tuple(vmap[prod.vid(v, layer)] for v in tri))
        comp.columns.append(Column(spare, tets, rims))


def cylinder_block(label: int, a1: Fraction, a2: Fraction,
                   refinement: int = 1, segments: int = CYL_SEGS) -> Block:
    """Product of the canonical surface with an interval; no singular
    values, both ends carry the same label."""
    a1, a2 = Fraction(a1), Fraction(a2)
    if not a1 < a2:
        raise BlockError("cylinder needs a1 < a2")
    mesh = canonical_mesh(label, refinement)
    prod = surface_prism(mesh, segments)
    layer_vals = _layer_values(a1, a2, segments)
    values = []
    for j in range(segments + 1):
        values += [layer_vals[j]] * mesh.nv
    mid = segments // 2
    bottom = BoundaryComponent(
        "bottom", a1, label, mesh.copy(),
        prod.layer_vertices(0),
        [prod.layer_vertices(j) for j in range(mid + 1)])
    top = BoundaryComponent(
        "top", a2, label, mesh.copy(),
        prod.layer_vertices(segments),
        [prod.layer_vertices(j) for j in range(segments, mid - 1, -1)])
    block = Block(prod.complex, values, a1, a2, [], [bottom, top],
                  EdgeContract(a1, a2, label), refinement, kind="cylinder")
    _attach_columns(bottom, prod, 0, list(range(prod.complex.nv)),
                    list(range(segments + 1)))
    return block


def cap_block(label: int, extreme_value: Fraction, boundary_value: Fraction,
              refinement: int = 1) -> Block:
    """Solid filling of an even-chi surface, constant at the extreme value,
    with a collar cylinder out to the boundary value."""
    extreme_value, boundary_value = (Fraction(extreme_value),
                                     Fraction(boundary_value))
    if euler_char(label) % 2 != 0:
        raise BlockError(
            f"no compact 3-manifold bounds the odd-chi surface r={label}")
    if extreme_value == boundary_value:
        raise BlockError("cap needs distinct extreme and boundary values")
    solid = solid_for_label(label, refinement)
    mesh = solid.boundary
    prod = surface_prism(mesh, CYL_SEGS)
    rising = boundary_value > extreme_value
    # collar layer 0 glues onto the solid boundary
    ident = [(0, solid.bmap[v], 1, prod.vid(v, 0)) for v in range(mesh.nv)]
    cx, vmaps, toffs = merge_complexes([solid.cx, prod.complex], ident)
    values = [None] * cx.nv
    for v in range(solid.cx.nv):
        values[vmaps[0][v]] = extreme_value
    layer_vals = _layer_values(extreme_value, boundary_value, CYL_SEGS)
    for j in range(CYL_SEGS + 1):
        for v in range(mesh.nv):
            tgt = vmaps[1][prod.vid(v, j)]
            if values[tgt] is None or j > 0:
                values[tgt] = layer_vals[j]
    side = "top" if rising else "bottom"
    comp = BoundaryComponent(
        side, boundary_value, label, mesh.copy(),
        [vmaps[1][prod.vid(v, CYL_SEGS)] for v in range(mesh.nv)],
        [[vmaps[1][prod.vid(v, j)] for v in range(mesh.nv)]
         for j in range(CYL_SEGS, -1, -1)])
    lo, hi = ((extreme_value, boundary_value) if rising
              else (boundary_value, extreme_value))
    a1, a2 = lo, hi
    block = Block(cx, values, a1, a2, [extreme_value], [comp],
                  EdgeContract(lo, hi, label), refinement, kind="cap")
    block.bridge_tets = [t for t in find_interior_tets(cx)][:4]
    _attach_columns(comp, prod, toffs[1],
                    vmaps[1], list(range(CYL_SEGS, -1, -1)))
    return block


# ---------------------------------------------------------------------------
# junction cells
# ---------------------------------------------------------------------------

@dataclass
class _End:
    side: str
    slot: int
    label: int
    mesh: SurfaceMesh
    emap: list[int]        # mesh vertex -> piece vertex


@dataclass
class _Piece:
    cx: TetComplex
    ends: list[_End]


def _glue_solid(cx: TetComplex, ends: list[_End], target: int, solid):
    """Boundary-connect-sum a solid onto one end surface of a piece."""
    end = ends[target]
    sa = end.mesh.spares[0]
    sb = solid.boundary.spares[0]
    ta = end.mesh.triangles[sa]
    tb = solid.boundary.triangles[sb]
    summed, map_a, map_b = connected_sum_mesh_maps(end.mesh, sa,
                                                   solid.boundary, sb)
    ident = [(0, end.emap[x], 1, solid.bmap[y])
             for x, y in zip(sorted(ta), sorted(tb))]
    merged, vmaps, _ = merge_complexes([cx, solid.cx], ident)
    new_ends = []
    for i, e in enumerate(ends):
        if i == target:
            emap = [0] * summed.nv
            for v in range(end.mesh.nv):
                emap[map_a[v]] = vmaps[0][end.emap[v]]
            for v in range(solid.boundary.nv):
                emap[map_b[v]] = vmaps[1][solid.bmap[v]]
            new_ends.append(_End(e.side, e.slot,
                                 connected_sum_label(e.label, solid.label),
                                 summed, emap))
        else:
            new_ends.append(_End(e.side, e.slot, e.label, e.mesh,
                                 [vmaps[0][v] for v in e.emap]))
    return merged, new_ends


def _odd_pair_piece(slot_a, slot_b, refinement: int) -> _Piece:
    """Thickened projective plane whose two faces absorb solid Klein
    bottles until they reach the requested odd-chi labels."""
    rp2 = canonical_mesh(-1, refinement)
    prod = surface_prism(rp2, 3)
    cx = prod.complex
    ends = [
        _End(slot_a[0], slot_a[2], -1, rp2.copy(), prod.layer_vertices(0)),
        _End(slot_b[0], slot_b[2], -1, rp2.copy(), prod.layer_vertices(3)),
    ]
    for i, slot in enumerate((slot_a, slot_b)):
        want = slot[1]
        while ends[i].label != want:
            cx, ends = _glue_solid(cx, ends, i,
                                   solid_for_label(-2, refinement))
    return _Piece(cx, ends)


def _solid_piece(slot, refinement: int) -> _Piece:
    solid = solid_for_label(slot[1], refinement)
    return _Piece(solid.cx, [_End(slot[0], slot[2], slot[1],
                                  solid.boundary, solid.bmap)])


def _bridge_parts(pieces: list[_Piece]):
    """Chain the pieces with interior connected sums; returns the part
    complexes (bridge tets removed), shells, and identification list."""
    parts = []
    removed: list[list[tuple]] = []     # per piece: removed tet vertex sets
    budgets = []
    for i, piece in enumerate(pieces):
        need = (0 if len(pieces) == 1 else
                1 if i in (0, len(pieces) - 1) else 2)
        interior = find_interior_tets(piece.cx)
        if len(interior) < need:
            raise BlockError("piece lacks interior tets for bridging")
        chosen = interior[:need]
        verts = [tuple(sorted(piece.cx.tets[t])) for t in chosen]
        cx, _ = remove_tets(piece.cx, set(chosen))
        parts.append(cx)
        removed.append(verts)
        budgets.append(need)
    shells = []
    ident = []
    np = len(pieces)
    for i in range(np - 1):
        shell = surface_prism(_TETRA_SPHERE, 2).complex
        shell_part = np + len(shells)
        shells.append(shell)
        left_socket = removed[i][-1]
        right_socket = removed[i + 1][0]
        for k in range(4):
            ident.append((i, left_socket[k], shell_part, k))
            ident.append((i + 1, right_socket[k], shell_part, 2 * 4 + k))
    return parts + shells, ident


def junction_cell(bottom_labels, top_labels, a1: Fraction, a: Fraction,
                  a2: Fraction, refinement: int = 1) -> Block:
    """Elementary junction block: one singular value a, boundary surfaces
    with the requested labels at a1 (bottom) and a2 (top).

    Either side may be empty during intermediate planning; the final blocks
    of a plan always have both.
    """
    a1, a, a2 = Fraction(a1), Fraction(a), Fraction(a2)
    bottom_labels = list(bottom_labels)
    top_labels = list(top_labels)
    if not bottom_labels and not top_labels:
        raise BlockError("junction needs at least one boundary component")
    if bottom_labels and not a1 < a:
        raise BlockError("junction needs a1 < a")
    if top_labels and not a < a2:
        raise BlockError("junction needs a < a2")
    slots = ([("bottom", l, i) for i, l in enumerate(bottom_labels)] +
             [("top", l, len(bottom_labels) + i)
              for i, l in enumerate(top_labels)])
    odd = sorted((s for s in slots if is_odd_chi(s[1])),
                 key=lambda s: (s[1], s[0], s[2]))
    if len(odd) % 2 != 0:
        raise BlockError("odd-chi component count must be even")
    even = sorted((s for s in slots if not is_odd_chi(s[1])),
                  key=lambda s: (s[1], s[0], s[2]))
    pieces = []
    for i in range(0, len(odd), 2):
        pieces.append(_odd_pair_piece(odd[i], odd[i + 1], refinement))
    for s in even:
        pieces.append(_solid_piece(s, refinement))

    parts, ident = _bridge_parts(pieces)
    npieces = len(pieces)

    # cylinders: one per end, glued along the inner layer
    cyl_info = []
    for pi, piece in enumerate(pieces):
        for e in piece.ends:
            prod = surface_prism(e.mesh, CYL_SEGS)
            part_idx = len(parts)
            parts.append(prod.complex)
            inner = 0 if e.side == "top" else CYL_SEGS
            for v in range(e.mesh.nv):
                ident.append((pi, e.emap[v], part_idx, prod.vid(v, inner)))
            cyl_info.append((part_idx, prod, e))

    cx, vmaps, toffs = merge_complexes(parts, ident)
    values: list = [None] * cx.nv
    n_constant = len(parts) - len(cyl_info)   # pieces and bridge shells
    for pi in range(n_constant):
        for v in range(parts[pi].nv):
            values[vmaps[pi][v]] = a
    boundary = []
    for part_idx, prod, e in cyl_info:
        vmap = vmaps[part_idx]
        if e.side == "bottom":
            layer_vals = _layer_values(a1, a, CYL_SEGS)
            outer_layers = list(range(CYL_SEGS + 1))
            outer, bval = 0, a1
        else:
            layer_vals = _layer_values(a, a2, CYL_SEGS)
            outer_layers = list(range(CYL_SEGS, -1, -1))
            outer, bval = CYL_SEGS, a2
        for j in range(CYL_SEGS + 1):
            for v in range(e.mesh.nv):
                tgt = vmap[prod.vid(v, j)]
                if values[tgt] is None:
                    values[tgt] = layer_vals[j]
        comp = BoundaryComponent(
            e.side, bval, e.label, e.mesh.copy(),
            [vmap[prod.vid(v, outer)] for v in range(e.mesh.nv)],
            [[vmap[prod.vid(v, j)] for v in range(e.mesh.nv)]
             for j in outer_layers])
        _attach_columns(comp, prod, toffs[part_idx], vmap, outer_layers)
        comp.slot = e.slot
        boundary.append(comp)
    boundary.sort(key=lambda c: c.slot)
    if any(v is None for v in values):
        raise BlockError("vertex escaped value assignment")
    lo = a1 if bottom_labels else a
    hi = a2 if top_labels else a
    contract = StarContract(a, [(c.value, c.label) for c in boundary])
    block = Block(cx, values, lo, hi, [a], boundary, contract, refinement,
                  kind="junction")
    bridge = []
    for pi in range(npieces):
        off = toffs[pi]
        for t in find_interior_tets(parts[pi]):
            bridge.append(off + t)
    block.bridge_tets = bridge[:8]
    return block


JUNCTION_KINDS = {
    "sphere_split": ((0,), (0, 0)),
    "sphere_pair_pass": ((0, 0), (0, 0)),
    "sphere_to_torus": ((0,), (1,)),
    "sphere_to_klein": ((0,), (-2,)),
    "projective_pass": ((-1,), (-1,)),
    "sphere_to_projective_pair": ((0,), (-1, -1)),
}


def elementary_junction(kind: str, a1, a, a2, refinement: int = 1,
                        flip: bool = False) -> Block:
    """The named junction shapes; flip exchanges bottom and top."""
    if kind not in JUNCTION_KINDS:
        raise BlockError(f"unknown junction kind {kind!r}")
    bottom, top = JUNCTION_KINDS[kind]
    if flip:
        bottom, top = top, bottom
    return junction_cell(list(bottom), list(top), a1, a, a2, refinement)


# ---------------------------------------------------------------------------
# merges
# ---------------------------------------------------------------------------

def _as_mergeable(b: Block, a: Fraction) -> Block:
    """Cylinders have no singular value; give them a marked pass-through
    level before merging."""
    if b.singular_values:
        if b.singular_values != [a]:
            raise BlockError("blocks disagree on the singular value")
        return b
    if b.kind != "cylinder":
        raise BlockError("cannot merge a block without a singular value")
    if not b.a1 < a < b.a2:
        raise BlockError("marked level must be interior to the cylinder")
    label = b.boundary[0].label
    return junction_cell([label], [label], b.a1, a, b.a2, b.refinement)


def _merge_singular_value(b1: Block, b2: Block) -> Fraction:
    sv = set(b1.singular_values) | set(b2.singular_values)
    if len(sv) == 1:
        return next(iter(sv))
    if not sv:
        if (b1.a1, b1.a2) != (b2.a1, b2.a2):
            raise BlockError("cylinders must share their interval to merge")
        return b1.a1 + (b1.a2 - b1.a1) / 2
    raise BlockError("blocks disagree on the singular value")


def merge_disjoint_union(b1: Block, b2: Block) -> Block:
    """Join two blocks at their shared singular level; boundary components
    pass through untouched on both sides."""
    a = _merge_singular_value(b1, b2)
    b1 = _as_mergeable(b1, a)
    b2 = _as_mergeable(b2, a)
    if b1.refinement != b2.refinement:
        raise BlockError("refinement mismatch")
    if not b1.bridge_tets or not b2.bridge_tets:
        raise BlockError("no spare bridge material left")
    t1 = b1.bridge_tets[0]
    t2 = b2.bridge_tets[0]
    socket1 = tuple(sorted(b1.cx.tets[t1]))
    socket2 = tuple(sorted(b2.cx.tets[t2]))
    cx1, tmap1 = remove_tets(b1.cx, {t1})
    cx2, tmap2 = remove_tets(b2.cx, {t2})
    shell = surface_prism(_TETRA_SPHERE, 2).complex
    ident = [(0, socket1[k], 2, k) for k in range(4)]
    ident += [(1, socket2[k], 2, 8 + k) for k in range(4)]
    cx, vmaps, toffs = merge_complexes([cx1, cx2, shell], ident)

    values = [None] * cx.nv
    for v in range(cx1.nv):
        values[vmaps[0][v]] = b1.values[v]
    for v in range(cx2.nv):
        tgt = vmaps[1][v]
        if values[tgt] is not None and values[tgt] != b2.values[v]:
            raise BlockError("value clash while merging")
        values[tgt] = b2.values[v]
    for v in range(shell.nv):
        tgt = vmaps[2][v]
        if values[tgt] is None:
            values[tgt] = a

    def mk_tet_map(tmap, off):
        return lambda t: (off + tmap[t]) if t in tmap else None

    b1.remap(vmaps[0], mk_tet_map(tmap1, toffs[0]))
    b2.remap(vmaps[1], mk_tet_map(tmap2, toffs[1]))
    boundary = b1.boundary + b2.boundary
    contract = StarContract(a, [(c.value, c.label) for c in boundary])
    out = Block(cx, values, min(b1.a1, b2.a1), max(b1.a2, b2.a2), [a],
                boundary, contract, b1.refinement, kind="junction")
    out.bridge_tets = b1.bridge_tets[1:] + b2.bridge_tets[1:]
    return out


def merge_connected_sum(b1: Block, b2: Block, side: str,
                        pick1: int, pick2: int) -> Block:
    """Join two blocks and connected-sum one picked boundary component of
    each on the given side, by drilling the reserved columns down to the
    connectors and gluing the sockets wall to wall."""
    a = _merge_singular_value(b1, b2)
    b1 = _as_mergeable(b1, a)
    b2 = _as_mergeable(b2, a)
    if b1.refinement != b2.refinement:
        raise BlockError("refinement mismatch")
    try:
        c1 = b1.boundary[pick1]
        c2 = b2.boundary[pick2]
    except IndexError:
        raise BlockError("picked component does not exist") from None
    if c1.side != side or c2.side != side:
        raise BlockError(f"picked components must lie on side {side!r}")
    if c1.value != c2.value:
        raise BlockError("picked components sit at different values")
    if not c1.columns or not c2.columns:
        raise BlockError("no spare tube available on a picked component")
    col1 = c1.columns.pop(0)
    col2 = c2.columns.pop(0)
    if len(col1.rims) != len(col2.rims):
        raise BlockError("column layer counts differ")
    cx1, tmap1 = remove_tets(b1.cx, set(col1.tets))
    cx2, tmap2 = remove_tets(b2.cx, set(col2.tets))
    ident = []
    for r1, r2 in zip(col1.rims, col2.rims):
        for x, y in zip(r1, r2):
            ident.append((0, x, 1, y))
    cx, vmaps, toffs = merge_complexes([cx1, cx2], ident)
    values = [None] * cx.nv
    for v in range(cx1.nv):
        values[vmaps[0][v]] = b1.values[v]
    for v in range(cx2.nv):
        tgt = vmaps[1][v]
        if values[tgt] is not None and values[tgt] != b2.values[v]:
            raise BlockError("value clash while merging")
        values[tgt] = b2.values[v]

    def mk_tet_map(tmap, off):
        return lambda t: (off + tmap[t]) if t in tmap else None

    b1.remap(vmaps[0], mk_tet_map(tmap1, toffs[0]))
    b2.remap(vmaps[1], mk_tet_map(tmap2, toffs[1]))

    summed, map1, map2 = connected_sum_mesh_maps(
        c1.mesh, col1.spare_tri, c2.mesh, col2.spare_tri)
    cmap = [None] * summed.nv
    layer_ids = [[None] * summed.nv for _ in c1.layer_ids]
    for v in range(c1.mesh.nv):
        cmap[map1[v]] = c1.cmap[v]
        for d in range(len(layer_ids)):
            layer_ids[d][map1[v]] = c1.layer_ids[d][v]
    for v in range(c2.mesh.nv):
        cmap[map2[v]] = c2.cmap[v]
        for d in range(len(layer_ids)):
            layer_ids[d][map2[v]] = c2.layer_ids[d][v]
    merged_comp = BoundaryComponent(
        side, c1.value, connected_sum_label(c1.label, c2.label),
        summed, cmap, layer_ids, columns=[])
    boundary = [c for c in b1.boundary if c is not c1]
    boundary += [c for c in b2.boundary if c is not c2]
    boundary.append(merged_comp)
    contract = StarContract(a, [(c.value, c.label) for c in boundary])
    out = Block(cx, values, min(b1.a1, b2.a1), max(b1.a2, b2.a2), [a],
                boundary, contract, b1.refinement, kind="junction")
    out.bridge_tets = b1.bridge_tets + b2.bridge_tets
    return out


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

@dataclass
class Plan:
    """Tree of junction cells and merges with the target label multisets."""

    node: dict
    bottom: list[int]
    top: list[int]

    def to_json(self) -> str:
        return json.dumps({"bottom": self.bottom, "top": self.top,
                           "plan": self.node}, indent=2)

    @staticmethod
    def from_json(text: str) -> "Plan":
        doc = json.loads(text)
        return Plan(doc["plan"], list(doc["bottom"]), list(doc["top"]))


class PlanError(ValueError):
    pass


def _eval_node(node) -> tuple[list[int], list[int]]:
    if node["op"] == "cell":
        if node.get("kind", "cell") != "cell":
            b, t = JUNCTION_KINDS[node["kind"]]
            if node.get("flip"):
                b, t = t, b
            return sorted(b), sorted(t)
        return sorted(node["bottom"]), sorted(node["top"])
    lb, lt = _eval_node(node["left"])
    rb, rt = _eval_node(node["right"])
    if node["op"] == "disjoint":
        return sorted(lb + rb), sorted(lt + rt)
    if node["op"] == "sum":
        side = node["side"]
        i, j = node["pick_left"], node["pick_right"]
        if side == "bottom":
            l1, l2 = lb.pop(i), rb.pop(j)
            lb.append(connected_sum_label(l1, l2))
            return sorted(lb + rb), sorted(lt + rt)
        l1, l2 = lt.pop(i), rt.pop(j)
        lt.append(connected_sum_label(l1, l2))
        return sorted(lb + rb), sorted(lt + rt)
    raise PlanError(f"unknown plan op {node['op']!r}")


def evaluate_plan(plan: Plan) -> tuple[list[int], list[int]]:
    return _eval_node(plan.node)


def _named_kind_for(bottom, top):
    b, t = tuple(sorted(bottom)), tuple(sorted(top))
    for name, (kb, kt) in JUNCTION_KINDS.items():
        if (b, t) == (tuple(sorted(kb)), tuple(sorted(kt))):
            return name, False
        if (b, t) == (tuple(sorted(kt)), tuple(sorted(kb))):
            return name, True
    return None


def plan_junction(bottom, top) -> Plan:
    """Plan a junction realizing the two label multisets.

    Odd-chi components are paired (across sides first), every pair and
    every even-chi component becomes one cell, and the cells are folded
    together with disjoint-union merges.
    """
    bottom, top = sorted(bottom), sorted(top)
    if not bottom or not top:
        raise PlanError("both boundary multisets must be non-empty")
    total_odd = sum(1 for l in bottom + top if is_odd_chi(l))
    if total_odd % 2 != 0:
        raise PlanError(
            f"odd-chi component count {total_odd} is odd; the Euler "
            "characteristics of the two sides differ by an odd number")

    named = _named_kind_for(bottom, top)
    if named:
        kind, flip = named
        node = {"op": "cell", "kind": kind, "flip": flip}
        return Plan(node, list(bottom), list(top))

    dd = [l for l in bottom if is_odd_chi(l)]
    uu = [l for l in top if is_odd_chi(l)]
    ed = [l for l in bottom if not is_odd_chi(l)]
    eu = [l for l in top if not is_odd_chi(l)]
    cells: list[tuple[list[int], list[int]]] = []
    while dd and uu:
        cells.append(([dd.pop(0)], [uu.pop(0)]))
    while len(dd) >= 2:
        pair = [dd.pop(0), dd.pop(0)]
        cells.append((pair, [eu.pop(0)] if eu else []))
    while len(uu) >= 2:
        pair = [uu.pop(0), uu.pop(0)]
        cells.append(([ed.pop(0)] if ed else [], pair))
    while ed and eu:
        cells.append(([ed.pop(0)], [eu.pop(0)]))
    cells += [([l], []) for l in ed]
    cells += [([], [l]) for l in eu]

    def leaf(cell):
        named = _named_kind_for(cell[0], cell[1])
        if named and cell[0] and cell[1]:
            return {"op": "cell", "kind": named[0], "flip": named[1]}
        return {"op": "cell", "kind": "cell",
                "bottom": cell[0], "top": cell[1]}

    node = leaf(cells[0])
    for cell in cells[1:]:
        node = {"op": "disjoint", "left": node, "right": leaf(cell)}
    plan = Plan(node, list(bottom), list(top))
    got = evaluate_plan(plan)
    if got != (bottom, top):
        raise PlanError(f"planner arithmetic drifted: {got}")
    return plan


def build_junction(plan: Plan, a1, a, a2, refinement: int = 1) -> Block:
    """Evaluate a plan into a verified-shape junction block."""
    a1, a, a2 = Fraction(a1), Fraction(a), Fraction(a2)

    def build(node) -> Block:
        if node["op"] == "cell":
            if node.get("kind", "cell") != "cell":
                return elementary_junction(node["kind"], a1, a, a2,
                                           refinement,
                                           flip=bool(node.get("flip")))
            return junction_cell(node["bottom"], node["top"], a1, a, a2,
                                 refinement)
        left = build(node["left"])
        right = build(node["right"])
        if node["op"] == "disjoint":
            return merge_disjoint_union(left, right)
        return merge_connected_sum(left, right, node["side"],
                                   node["pick_left"], node["pick_right"])

    block = build(plan.node)
    want = (sorted(plan.bottom), sorted(plan.top))
    got = (block.labels("bottom"), block.labels("top"))
    if got != want:
        raise BlockError(f"junction produced {got}, plan promised {want}")
    return block


# ---------------------------------------------------------------------------
# folds
# ---------------------------------------------------------------------------

def fold_block(j: Block, vertex_value, direction: str,
               leaf_values) -> Block:
    """Remap the function of a junction monotonically on each side so the
    singular level becomes an extremum at vertex_value and every boundary
    component lands at its leaf value.  The mesh is untouched."""
    vertex_value = Fraction(vertex_value)
    leaf_values = [Fraction(v) for v in leaf_values]
    if len(leaf_values) != len(j.boundary):
        raise BlockError(
            f"{len(leaf_values)} leaf values for {len(j.boundary)} "
            "boundary components")
    if direction not in ("min", "max"):
        raise BlockError("direction must be 'min' or 'max'")
    for lv in leaf_values:
        if direction == "min" and lv <= vertex_value:
            raise BlockError(f"leaf value {lv} not above the minimum")
        if direction == "max" and lv >= vertex_value:
            raise BlockError(f"leaf value {lv} not below the maximum")
    if j.singular_values:
        center = j.singular_values[0]
    else:
        center = j.values[j.boundary[0].layer_ids[-1][0]]
    values = [vertex_value] * j.cx.nv
    boundary = []
    for comp, leaf in zip(j.boundary, leaf_values):
        outer = comp.value
        if outer == center:
            raise BlockError("cannot fold a component at the singular level")
        for layer in comp.layer_ids:
            t_old = j.values[layer[0]]
            t_new = vertex_value + (leaf - vertex_value) * \
                (t_old - center) / (outer - center)
            for v in layer:
                values[v] = t_new
        side = "top" if direction == "min" else "bottom"
        boundary.append(BoundaryComponent(
            side, leaf, comp.label, comp.mesh, comp.cmap, comp.layer_ids))
    lo = vertex_value if direction == "min" else min(leaf_values)
    hi = max(leaf_values) if direction == "min" else vertex_value
    contract = StarContract(vertex_value,
                            [(c.value, c.label) for c in boundary])
    return Block(j.cx, values, lo, hi, [vertex_value], boundary, contract,
                 j.refinement, kind="fold")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def block_to_dict(b: Block) -> dict:
    """Mesh, function values, and contract; merge resources (columns,
    bridge tets) are construction-time data and are not serialized."""
    from .graphs import format_rational
    if isinstance(b.contract, EdgeContract):
        contract = {"kind": "edge", "lo": format_rational(b.contract.lo),
                    "hi": format_rational(b.contract.hi),
                    "label": b.contract.label}
    else:
        contract = {"kind": "star",
                    "center": format_rational(b.contract.center),
                    "leaves": [[format_rational(v), l]
                               for v, l in b.contract.leaves]}
    return {
        "vertices": b.cx.nv,
        "tetrahedra": [list(t) for t in b.cx.tets],
        "values": [format_rational(v) for v in b.values],
        "interval": [format_rational(b.a1), format_rational(b.a2)],
        "singular_values": [format_rational(v) for v in b.singular_values],
        "boundary": [{"side": c.side, "value": format_rational(c.value),
                      "label": c.label, "cmap": list(c.cmap),
                      "layers": [list(l) for l in c.layer_ids],
                      "mesh": {"vertices": c.mesh.nv,
                               "triangles": [list(t)
                                             for t in c.mesh.triangles]}}
                     for c in b.boundary],
        "contract": contract,
        "refinement": b.refinement,
        "kind": b.kind,
    }


def block_from_dict(doc) -> Block:
    from .graphs import parse_rational
    cx = TetComplex(int(doc["vertices"]),
                    [tuple(t) for t in doc["tetrahedra"]])
    values = [parse_rational(v) for v in doc["values"]]
    a1, a2 = (parse_rational(v) for v in doc["interval"])
    singular = [parse_rational(v) for v in doc["singular_values"]]
    boundary = []
    for c in doc["boundary"]:
        mesh = SurfaceMesh(int(c["mesh"]["vertices"]),
                           [tuple(t) for t in c["mesh"]["triangles"]])
        boundary.append(BoundaryComponent(
            c["side"], parse_rational(c["value"]), int(c["label"]), mesh,
            list(c["cmap"]), [list(l) for l in c["layers"]]))
    cd = doc["contract"]
    if cd["kind"] == "edge":
        contract = EdgeContract(parse_rational(cd["lo"]),
                                parse_rational(cd["hi"]), int(cd["label"]))
    else:
        contract = StarContract(parse_rational(cd["center"]),
                                [(parse_rational(v), int(l))
                                 for v, l in cd["leaves"]])
    return Block(cx, values, a1, a2, singular, boundary, contract,
                 int(doc.get("refinement", 1)), kind=doc.get("kind", "block"))


def block_to_json(b: Block) -> str:
    return json.dumps(block_to_dict(b))


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class BlockReport:
    checks: list[tuple[str, bool, str]]
    reeb: ReebGraph | None = None

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def summary(self) -> str:
        return "\n".join(f"  [{'pass' if ok else 'FAIL'}] {name}: {msg}"
                         for name, ok, msg in self.checks)


def verify_block(b: Block) -> BlockReport:
    """Re-derive everything the contract promises: manifold validity,
    boundary classification, function image, and the extracted Reeb shape
    with nodes pinned at the declared singular values."""
    checks = []

    try:
        validate_complex(b.cx)
        checks.append(("manifold", True, f"{len(b.cx.tets)} tets"))
    except ComplexError as exc:
        checks.append(("manifold", False, str(exc)))
        return BlockReport(checks)

    lo, hi = min(b.values), max(b.values)
    ok = (lo, hi) == (b.a1, b.a2)
    checks.append(("image", ok, f"[{lo}, {hi}] vs [{b.a1}, {b.a2}]"))

    mesh, used = boundary_surface(b.cx)
    try:
        comps = classify_surface(mesh)
        got = sorted((b.values[used[mesh.triangles[c.triangles[0]][0]]],
                      c.label) for c in comps)
        want = sorted((c.value, c.label) for c in b.boundary)
        const = all(len({b.values[used[v]] for v in c.vertices}) == 1
                    for c in comps)
        ok = got == want and const
        checks.append(("boundary", ok, f"{got} vs declared {want}"))
    except MeshError as exc:
        checks.append(("boundary", False, str(exc)))

    reeb = reeb_graph_of(b.cx.tets, b.values, pin_values=b.singular_values)
    got_nodes = sorted(n.value for n in reeb.nodes)
    got_edges = sorted((min(reeb.nodes[e.a].value, reeb.nodes[e.b].value),
                        max(reeb.nodes[e.a].value, reeb.nodes[e.b].value),
                        e.label) for e in reeb.edges)
    if isinstance(b.contract, EdgeContract):
        want_nodes = sorted([b.contract.lo, b.contract.hi])
        want_edges = [(b.contract.lo, b.contract.hi, b.contract.label)]
    else:
        c = b.contract.center
        want_nodes = sorted([c] + [v for v, _ in b.contract.leaves])
        want_edges = sorted((min(c, v), max(c, v), l)
                            for v, l in b.contract.leaves)
    ok = got_nodes == want_nodes and got_edges == want_edges
    checks.append(("reeb", ok,
                   f"nodes {list(map(str, got_nodes))} edges {got_edges}"))

    leaf_values = {c.value for c in b.boundary}
    interior = sorted({n.value for n in reeb.nodes} - leaf_values)
    ok = interior == sorted(set(b.singular_values))
    checks.append(("singular-values", ok,
                   f"{list(map(str, interior))} vs declared "
                   f"{list(map(str, b.singular_values))}"))
    return BlockReport(checks, reeb)

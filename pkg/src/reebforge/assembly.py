"""Assemble a closed 3-manifold with a PL function realizing an input
graph: one block per vertex, one product cylinder per edge, glued along
identical canonical boundary meshes.

Vertex neighbourhoods occupy [g(v)-eps, g(v)+eps] with eps one third of
the smallest height gap to a neighbour, so intervals never collide and
every edge leaves room for its cylinder.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .anchors import common_refinement
from .blocks import (Block, BlockError, cap_block, build_junction,
                     cylinder_block, fold_block, plan_junction)
from .complexes import (ComplexError, TetComplex, boundary_faces,
                        euler_characteristic, merge_complexes,
                        validate_complex)
from .graphs import (GraphError, LabeledGraph, check_realizable,
                     euler_char, format_rational, is_odd_chi,
                     parse_rational)
from .reeb import ReebGraph, labeled_isomorphic, reeb_graph_of


class AssemblyError(ValueError):
    """Raised when a graph cannot be assembled (or an internal gluing
    invariant breaks, which indicates a planner bug)."""


@dataclass
class Manifold3:
    cx: TetComplex
    values: list[Fraction]
    provenance: list[tuple[str, int]]      # per tet: ("vertex"|"edge", index)
    vertex_values: list[Fraction] = field(default_factory=list)

    def summary(self) -> str:
        nv = self.cx.nv
        layers = len(set(self.values))
        blocks = len({p for p in self.provenance})
        return (f"tetrahedra: {len(self.cx.tets)}\nvertices: {nv}\n"
                f"layers: {layers}\nglued pieces: {blocks}")


def _vertex_epsilons(g: LabeledGraph) -> list[Fraction]:
    eps = []
    for v in range(g.n):
        gaps = [abs(g.values[e.u] - g.values[e.v])
                for e in g.edges if v in (e.u, e.v)]
        eps.append(min(gaps) / 3)
    return eps


def _split_extremum_labels(labels: list[int]) -> tuple[list[int], list[int]]:
    """Split an extremum's incident labels into two sides with equal
    odd-chi counts: alternate the odd ones, balance the rest by chi."""
    odd = sorted(l for l in labels if is_odd_chi(l))
    even = sorted((l for l in labels if not is_odd_chi(l)),
                  key=lambda l: (-abs(euler_char(l)), l))
    f1: list[int] = []
    f2: list[int] = []
    for i, l in enumerate(odd):
        (f1 if i % 2 == 0 else f2).append(l)
    c1 = sum(euler_char(l) for l in f1)
    c2 = sum(euler_char(l) for l in f2)
    for l in even:
        if (abs(c1) < abs(c2)) or (abs(c1) == abs(c2) and len(f1) <= len(f2)):
            f1.append(l)
            c1 += euler_char(l)
        else:
            f2.append(l)
            c2 += euler_char(l)
    if not f1:
        f1.append(f2.pop())
    if not f2:
        f2.append(f1.pop())
    return sorted(f1), sorted(f2)


def _vertex_block(g: LabeledGraph, v: int, eps: Fraction,
                  refinement: int) -> tuple[Block, dict[int, int]]:
    """Build the block for one vertex and assign its boundary components
    to the incident edge indices (matching labels, sorted tie-break)."""
    gv = g.values[v]
    down, up = [], []
    for ei, e in enumerate(g.edges):
        if v not in (e.u, e.v):
            continue
        other = e.v if e.u == v else e.u
        (up if g.values[other] > gv else down).append((e.label, ei))
    down.sort()
    up.sort()

    if down and up:
        plan = plan_junction([l for l, _ in down], [l for l, _ in up])
        block = build_junction(plan, gv - eps, gv, gv + eps, refinement)
        assignment = {}
        bottoms = sorted((c.label, i) for i, c in enumerate(block.boundary)
                         if c.side == "bottom")
        tops = sorted((c.label, i) for i, c in enumerate(block.boundary)
                      if c.side == "top")
        for (label, ei), (clabel, ci) in zip(down, bottoms):
            if label != clabel:
                raise AssemblyError("bottom component labels drifted")
            assignment[ei] = ci
        for (label, ei), (clabel, ci) in zip(up, tops):
            if label != clabel:
                raise AssemblyError("top component labels drifted")
            assignment[ei] = ci
        return block, assignment

    side = up if up else down
    direction = "min" if up else "max"
    leaf_value = gv + eps if up else gv - eps
    if len(side) == 1 and euler_char(side[0][0]) % 2 == 0:
        block = cap_block(side[0][0], gv, leaf_value, refinement)
        return block, {side[0][1]: 0}
    f1, f2 = _split_extremum_labels([l for l, _ in side])
    plan = plan_junction(f1, f2)
    jn = build_junction(plan, Fraction(0), Fraction(1), Fraction(2),
                        refinement)
    block = fold_block(jn, gv, direction, [leaf_value] * len(side))
    comps = sorted((c.label, i) for i, c in enumerate(block.boundary))
    assignment = {}
    for (label, ei), (clabel, ci) in zip(side, comps):
        if label != clabel:
            raise AssemblyError("folded component labels drifted")
        assignment[ei] = ci
    return block, assignment


def _identify_components(comp_a, comp_b):
    """Vertex pairs gluing two block boundary components, via the common
    refinement of their anchored meshes (identical meshes by design, so
    the refinement is an exact bijection)."""
    if sorted(map(sorted, comp_a.mesh.triangles)) != \
            sorted(map(sorted, comp_b.mesh.triangles)):
        raise AssemblyError(
            "anchor mismatch between glued components (planner bug)")
    from .anchors import SchemeAnchor
    if isinstance(comp_a.mesh.anchor, SchemeAnchor) and \
            isinstance(comp_b.mesh.anchor, SchemeAnchor):
        _, m1, m2 = common_refinement(comp_a.mesh, comp_b.mesh)
        inv = {r: v for v, r in enumerate(m2)}
        return [(comp_a.cmap[v], comp_b.cmap[inv[r]])
                for v, r in enumerate(m1)]
    # recipe-anchored composites: identical complexes, identity matching
    return [(comp_a.cmap[v], comp_b.cmap[v])
            for v in range(comp_a.mesh.nv)]


def assemble(g: LabeledGraph, refinement: int = 1) -> Manifold3:
    """Build the closed manifold realizing g."""
    report = check_realizable(g)
    if not report.ok:
        raise AssemblyError("graph fails the parity conditions:\n" +
                            report.summary())
    eps = _vertex_epsilons(g)
    blocks = []
    assignments = []
    for v in range(g.n):
        block, assign = _vertex_block(g, v, eps[v], refinement)
        blocks.append(block)
        assignments.append(assign)

    cylinders = []
    for ei, e in enumerate(g.edges):
        lo, hi = (e.u, e.v) if g.values[e.u] < g.values[e.v] else (e.v, e.u)
        cylinders.append(cylinder_block(
            e.label, g.values[lo] + eps[lo], g.values[hi] - eps[hi],
            refinement, segments=3))

    parts = [b.cx for b in blocks] + [c.cx for c in cylinders]
    part_values = [b.values for b in blocks] + [c.values for c in cylinders]
    ident = []
    for ei, e in enumerate(g.edges):
        lo, hi = (e.u, e.v) if g.values[e.u] < g.values[e.v] else (e.v, e.u)
        cyl = cylinders[ei]
        cyl_part = len(blocks) + ei
        cyl_bottom = next(c for c in cyl.boundary if c.side == "bottom")
        cyl_top = next(c for c in cyl.boundary if c.side == "top")
        comp_lo = blocks[lo].boundary[assignments[lo][ei]]
        comp_hi = blocks[hi].boundary[assignments[hi][ei]]
        if comp_lo.value != cyl_bottom.value or \
                comp_hi.value != cyl_top.value:
            raise AssemblyError("interface values misaligned (planner bug)")
        for x, y in _identify_components(comp_lo, cyl_bottom):
            ident.append((lo, x, cyl_part, y))
        for x, y in _identify_components(comp_hi, cyl_top):
            ident.append((hi, x, cyl_part, y))

    cx, vmaps, toffs = merge_complexes(parts, ident)
    values: list = [None] * cx.nv
    for pi, vals in enumerate(part_values):
        for v, val in enumerate(vals):
            tgt = vmaps[pi][v]
            if values[tgt] is not None and values[tgt] != val:
                raise AssemblyError("value clash at a glued interface")
            values[tgt] = val
    provenance: list[tuple[str, int]] = []
    for vi in range(len(blocks)):
        provenance += [("vertex", vi)] * len(blocks[vi].cx.tets)
    for ei in range(len(cylinders)):
        provenance += [("edge", ei)] * len(cylinders[ei].cx.tets)
    return Manifold3(cx, values, provenance,
                     vertex_values=list(g.values))


@dataclass
class ManifoldReport:
    checks: list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def summary(self) -> str:
        return "\n".join(f"  [{'pass' if ok else 'FAIL'}] {name}: {msg}"
                         for name, ok, msg in self.checks)


def validate_manifold(m: Manifold3) -> ManifoldReport:
    """Closedness, link conditions, connectedness, chi = 0, provenance."""
    checks = []
    bf = boundary_faces(m.cx)
    checks.append(("closed", not bf,
                   "no boundary triangles" if not bf else
                   f"{len(bf)} boundary triangles, e.g. {bf[:3]}"))
    try:
        validate_complex(m.cx, closed=False)
        checks.append(("links", True, "all vertex links are spheres/disks"))
    except ComplexError as exc:
        checks.append(("links", False, str(exc)))
    # connectivity over tets through shared faces
    n = len(m.cx.tets)
    if n:
        from .complexes import face_map
        fm = face_map(m.cx)
        adj: dict[int, list[int]] = {i: [] for i in range(n)}
        for ts in fm.values():
            for i in range(len(ts) - 1):
                adj[ts[i]].append(ts[i + 1])
                adj[ts[i + 1]].append(ts[i])
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        ok = len(seen) == n
        checks.append(("connected", ok, f"{len(seen)}/{n} tetrahedra"))
    chi = euler_characteristic(m.cx)
    checks.append(("euler", chi == 0, f"chi = {chi}"))
    ok = len(m.provenance) == len(m.cx.tets) and \
        all(kind in ("vertex", "edge") for kind, _ in m.provenance)
    checks.append(("provenance", ok,
                   f"{len(m.provenance)} records for {len(m.cx.tets)} tets"))
    return ManifoldReport(checks)


def extract_reeb(m: Manifold3, threads: int | None = None) -> ReebGraph:
    return reeb_graph_of(m.cx.tets, m.values, threads=threads)


@dataclass
class VerificationResult:
    ok: bool
    manifold: Manifold3 | None
    reeb: ReebGraph | None
    detail: str


def verify_realization(g: LabeledGraph, refinement: int = 1,
                       mislabel_edge: int | None = None,
                       threads: int | None = None) -> VerificationResult:
    """Build, validate, extract, and compare against the input graph."""
    try:
        m = assemble(g, refinement)
    except (AssemblyError, BlockError, GraphError) as exc:
        return VerificationResult(False, None, None, f"assembly: {exc}")
    rep = validate_manifold(m)
    if not rep.ok:
        return VerificationResult(False, m, None,
                                  "manifold invalid:\n" + rep.summary())
    reeb = extract_reeb(m, threads=threads)
    target = g
    if mislabel_edge is not None:
        # debug hook: compare against a deliberately mislabeled copy
        edges = list(g.edges)
        e = edges[mislabel_edge]
        from .graphs import Edge
        bumped = e.label + 1 if e.label >= 0 else e.label - 1
        edges[mislabel_edge] = Edge(e.u, e.v, bumped)
        target = LabeledGraph(list(g.names), list(g.values), edges)
    iso = labeled_isomorphic(reeb, target)
    if not iso.isomorphic:
        return VerificationResult(False, m, reeb,
                                  f"isomorphism failed: {iso.mismatch}")
    return VerificationResult(True, m, reeb, "round trip succeeded")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def manifold_to_dict(m: Manifold3) -> dict:
    return {
        "vertices": m.cx.nv,
        "tetrahedra": [list(t) for t in m.cx.tets],
        "values": [format_rational(v) for v in m.values],
        "provenance": [[kind, idx] for kind, idx in m.provenance],
        "vertex_values": [format_rational(v) for v in m.vertex_values],
    }


def manifold_from_dict(doc) -> Manifold3:
    cx = TetComplex(int(doc["vertices"]),
                    [tuple(t) for t in doc["tetrahedra"]])
    values = [parse_rational(v) for v in doc["values"]]
    prov = [(str(k), int(i)) for k, i in doc.get("provenance", [])]
    vv = [parse_rational(v) for v in doc.get("vertex_values", [])]
    return Manifold3(cx, values, prov, vv)


def manifold_to_json(m: Manifold3) -> str:
    return json.dumps(manifold_to_dict(m))

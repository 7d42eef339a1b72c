"""Elementary moves on marked graphs of groups.

Four moves: edge subdivision and three fold shapes. A fold identifies two
edge orbits (or an edge orbit with a translate of itself) in the covering
tree; at quotient level that joins labels. The `align` / `element`
parameters are the explicit lift choices, so applying a move is a pure
deterministic function of (graph, move). New ids are supplied by the move,
never invented, which keeps scripts replayable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .canon import canonical_form
from .graphs import (
    Edge,
    MarkedGraphOfGroups,
    check_minimal,
    fundamental_image,
    normalize_holonomies,
)
from .groups import PermGroup, Permutation


class FoldError(ValueError):
    """A move's preconditions fail on the given graph."""


@dataclass(frozen=True)
class Subdivide:
    edge: int
    mid: int
    part1: int
    part2: int


@dataclass(frozen=True)
class TypeI:
    """Fold two distinct non-loop edges sharing the pivot vertex.

    e2's end of the tree-edge being folded is translated by align (an
    element of the pivot label) before identification with e1's lift.
    Requires identity holonomies on both edges; normalize first.
    """

    e1: int
    e2: int
    pivot: int
    align: Permutation


@dataclass(frozen=True)
class TypeII:
    """Pull the element's translate of the subtree across the edge.

    element must lie in the iota label and outside the edge label.
    Requires identity holonomy; a loop with holonomy is handled by
    subdividing and folding the parts with a type III move.
    """

    edge: int
    element: Permutation


@dataclass(frozen=True)
class TypeIII:
    """Fold two distinct parallel edges. The pivot is iota of e1.

    e1 participates by its identity lift at the pivot; e2 by its identity
    lift translated by align. Holonomies may be arbitrary.
    """

    e1: int
    e2: int
    align: Permutation


@dataclass(frozen=True)
class FoldScript:
    """Initial graph, moves in order, optional (start, length) period.

    A period states that the moves from index start onward repeat forever;
    the explicit list must end exactly at start + length.
    """

    initial: MarkedGraphOfGroups
    moves: tuple
    period: tuple | None = None

    def __post_init__(self):
        if self.period is None:
            return
        start, length = self.period
        if start < 0 or length < 1:
            raise ValueError("period needs start >= 0 and length >= 1")
        if start + length != len(self.moves):
            raise ValueError(
                "the explicit move list must end exactly at the period boundary"
            )


@dataclass
class FoldCertificate:
    """Where every id went: old vertex -> new vertex, old edge -> new edges."""

    kind: str
    vertex_map: dict
    edge_map: dict
    new_vertices: tuple = ()
    label_joins: tuple = ()
    notes: tuple = ()


def _identity_maps(g):
    return {v: v for v in g.vertices}, {e: (e,) for e in g.edges}


def subdivide(g, move):
    """Split an edge at a fresh midpoint labeled by the edge label."""
    g.require_valid()
    if move.edge not in g.edges:
        raise FoldError(f"edge {move.edge} does not exist")
    if move.mid in g.vertices:
        raise FoldError(f"vertex id {move.mid} already in use")
    if move.part1 == move.part2:
        raise FoldError("the two part ids must differ")
    for pid in (move.part1, move.part2):
        if pid in g.edges:
            raise FoldError(f"edge id {pid} already in use")
    e = g.edges[move.edge]
    out = g.copy()
    del out.edges[move.edge]
    out.add_vertex(move.mid, e.label)
    out.add_edge(move.part1, e.iota, move.mid, e.label)
    out.add_edge(move.part2, move.mid, e.tau, e.label, e.hol)
    vmap, emap = _identity_maps(g)
    emap[move.edge] = (move.part1, move.part2)
    cert = FoldCertificate(
        kind="subdivide",
        vertex_map=vmap,
        edge_map=emap,
        new_vertices=(move.mid,),
        label_joins=(("vertex", move.mid, "copy of edge label"),),
    )
    return out, cert


def fold_type1(g, move):
    """Merge two edges hanging off the pivot and their far endpoints."""
    g.require_valid()
    if move.e1 == move.e2:
        raise FoldError("e1 and e2 must differ")
    for eid in (move.e1, move.e2):
        if eid not in g.edges:
            raise FoldError(f"edge {eid} does not exist")
    e1, e2 = g.edges[move.e1], g.edges[move.e2]
    v = move.pivot
    if v not in (e1.iota, e1.tau) or v not in (e2.iota, e2.tau):
        raise FoldError(f"both edges must touch the pivot {v}")
    if e1.is_loop() or e2.is_loop():
        raise FoldError("loops cannot take a type I fold; subdivide first")
    x = e1.other_end(v)
    y = e2.other_end(v)
    if x == y:
        raise FoldError("edges are parallel: use a type III fold")
    if not e1.hol.is_identity() or not e2.hol.is_identity():
        raise FoldError("type I needs identity holonomies; normalize holonomies first")
    a = move.align
    if a not in g.vertices[v]:
        raise FoldError("align does not lie in the pivot vertex label")
    a_inv = a.inverse()
    new_edge_label = e1.label.join(e2.label.conjugate(a))
    new_x_label = g.vertices[x].join(g.vertices[y].conjugate(a))
    out = MarkedGraphOfGroups(g.degree)
    for vid in sorted(g.vertices):
        if vid == y:
            continue
        out.add_vertex(vid, new_x_label if vid == x else g.vertices[vid])
    out.basepoint = x if g.basepoint == y else g.basepoint
    for eid in sorted(g.edges):
        if eid == move.e2:
            continue
        f = g.edges[eid]
        if eid == move.e1:
            out.add_edge(eid, f.iota, f.tau, new_edge_label, f.hol)
        elif f.iota == y and f.tau == y:
            out.add_edge(eid, x, x, f.label.conjugate(a), a * f.hol * a_inv)
        elif f.iota == y:
            out.add_edge(eid, x, f.tau, f.label.conjugate(a), f.hol * a_inv)
        elif f.tau == y:
            out.add_edge(eid, f.iota, x, f.label, a * f.hol)
        else:
            out.add_edge(eid, f.iota, f.tau, f.label, f.hol)
    vmap = {vid: (x if vid == y else vid) for vid in g.vertices}
    emap = {eid: ((move.e1,) if eid == move.e2 else (eid,)) for eid in g.edges}
    cert = FoldCertificate(
        kind="type1",
        vertex_map=vmap,
        edge_map=emap,
        label_joins=(
            ("edge", move.e1, "join of both edge labels, the second align-conjugated"),
            ("vertex", x, "join of both far labels, the second align-conjugated"),
        ),
    )
    problems = out.validate()
    if problems:
        raise FoldError("fold produced an invalid graph: " + "; ".join(problems))
    return out, cert


def fold_type2(g, move):
    """Enlarge one edge label by an element of the iota vertex label."""
    g.require_valid()
    if move.edge not in g.edges:
        raise FoldError(f"edge {move.edge} does not exist")
    e = g.edges[move.edge]
    p = move.element
    if not e.hol.is_identity():
        raise FoldError(
            "type II needs identity holonomy; normalize holonomies first "
            "(a holonomy loop folds by subdividing then a type III move)"
        )
    if p not in g.vertices[e.iota]:
        raise FoldError("element does not lie in the iota vertex label")
    if p in e.label:
        raise FoldError("element already lies in the edge label: fold is a no-op")
    out = g.copy()
    out.edges[move.edge] = Edge(e.id, e.iota, e.tau, e.label.adjoin(p), e.hol)
    out.vertices[e.tau] = g.vertices[e.tau].adjoin(p)
    vmap, emap = _identity_maps(g)
    cert = FoldCertificate(
        kind="type2",
        vertex_map=vmap,
        edge_map=emap,
        label_joins=(
            ("edge", move.edge, "edge label joined with the element"),
            ("vertex", e.tau, "tau label joined with the element"),
        ),
    )
    problems = out.validate()
    if problems:
        raise FoldError("fold produced an invalid graph: " + "; ".join(problems))
    return out, cert


def fold_type3(g, move):
    """Merge two parallel edges; the far vertex gains the gluing element."""
    g.require_valid()
    if move.e1 == move.e2:
        raise FoldError("e1 and e2 must differ")
    for eid in (move.e1, move.e2):
        if eid not in g.edges:
            raise FoldError(f"edge {eid} does not exist")
    e1, e2 = g.edges[move.e1], g.edges[move.e2]
    if sorted((e1.iota, e1.tau)) != sorted((e2.iota, e2.tau)):
        raise FoldError("edges are not parallel")
    pivot = e1.iota
    far = e1.tau
    a = move.align
    if a not in g.vertices[pivot]:
        raise FoldError("align does not lie in the pivot vertex label")
    if e2.iota == pivot:
        eps2 = e2.label
        m2 = e2.hol.inverse()
    else:
        eps2 = e2.label.conjugate(e2.hol)
        m2 = e2.hol
    gain = e1.hol * a * m2
    new_edge_label = e1.label.join(eps2.conjugate(a))
    out = g.copy()
    del out.edges[move.e2]
    out.edges[move.e1] = Edge(e1.id, e1.iota, e1.tau, new_edge_label, e1.hol)
    out.vertices[far] = out.vertices[far].adjoin(gain)
    vmap = {vid: vid for vid in g.vertices}
    emap = {eid: ((move.e1,) if eid == move.e2 else (eid,)) for eid in g.edges}
    cert = FoldCertificate(
        kind="type3",
        vertex_map=vmap,
        edge_map=emap,
        label_joins=(
            ("edge", move.e1, "join of both edge labels seen at the pivot"),
            ("vertex", far, f"far label gains {gain}"),
        ),
        notes=(f"gain {gain} at vertex {far}",),
    )
    problems = out.validate()
    if problems:
        raise FoldError("fold produced an invalid graph: " + "; ".join(problems))
    return out, cert


def apply_move(g, move):
    if isinstance(move, Subdivide):
        return subdivide(g, move)
    if isinstance(move, TypeI):
        return fold_type1(g, move)
    if isinstance(move, TypeII):
        return fold_type2(g, move)
    if isinstance(move, TypeIII):
        return fold_type3(g, move)
    raise TypeError(f"not a move: {move!r}")


def _applies(g, move):
    try:
        apply_move(g, move)
        return True
    except FoldError:
        return False


def search_children(g):
    """Deterministic candidate moves for searches: every applicable fold,
    then one subdivision per edge using the graph's next fresh ids."""
    children = list(enumerate_applicable_folds(g))
    mid = g.fresh_vertex_id()
    p1 = g.fresh_edge_id()
    children.extend(Subdivide(eid, mid, p1, p1 + 1) for eid in sorted(g.edges))
    return children


@dataclass
class FactorizeResult:
    """status "found" carries the script; "unknown" means the bounded
    search gave out, which is not a disproof."""

    status: str
    script: FoldScript | None
    explored: int


def factorize(source, target, max_moves=6, max_states=4000):
    """Breadth-first search for a script of moves carrying source to target.

    Endpoints are compared by the canonical form of their reduced
    quotients, since subdivision is irreversible: a script reaches the
    target when its endpoint retracts to the same reduced quotient.
    Memoization is on canonical forms of full stages; children come from
    search_children, so the result is deterministic.
    """
    from .forest import reduce_graph

    source.require_valid()
    target.require_valid()
    if fundamental_image(normalize_holonomies(source)[0]) != fundamental_image(
        normalize_holonomies(target)[0]
    ):
        raise ValueError("source and target have different fundamental images")
    minimal, witness = check_minimal(target)
    if not minimal:
        raise ValueError(f"target is not minimal: vertex {witness} is prunable")

    def reduced_key(g):
        return canonical_form(reduce_graph(g)[0])

    goal = reduced_key(target)
    if reduced_key(source) == goal:
        return FactorizeResult("found", FoldScript(source.copy(), ()), 1)
    seen = {canonical_form(source)}
    queue = deque([(source.copy(), ())])
    explored = 1
    while queue:
        g, trail = queue.popleft()
        if len(trail) >= max_moves:
            continue
        for move in search_children(g):
            try:
                nxt, _ = apply_move(g, move)
            except FoldError:
                continue
            key = canonical_form(nxt)
            if key in seen:
                continue
            seen.add(key)
            explored += 1
            grown = trail + (move,)
            if reduced_key(nxt) == goal:
                return FactorizeResult(
                    "found", FoldScript(source.copy(), grown), explored
                )
            if explored >= max_states:
                return FactorizeResult("unknown", None, explored)
            queue.append((nxt, grown))
    return FactorizeResult("unknown", None, explored)


def enumerate_applicable_folds(g):
    """Every fold move that passes preconditions, align/element drawn from
    the ambient group's generating set plus the identity. Deterministic
    order: type I, then II, then III, ids ascending, parameters ascending.
    """
    g.require_valid()
    pool = [Permutation.identity(g.degree)]
    pool.extend(PermGroup.symmetric(g.degree).generators)
    eids = sorted(g.edges)
    moves = []
    for i1 in eids:
        for i2 in eids:
            if i1 == i2:
                continue
            e1, e2 = g.edges[i1], g.edges[i2]
            pivots = sorted(set((e1.iota, e1.tau)) & set((e2.iota, e2.tau)))
            for v in pivots:
                for a in pool:
                    if a not in g.vertices[v]:
                        continue
                    move = TypeI(i1, i2, v, a)
                    if _applies(g, move):
                        moves.append(move)
    for eid in eids:
        e = g.edges[eid]
        for p in pool:
            move = TypeII(eid, p)
            if _applies(g, move):
                moves.append(move)
    for i1 in eids:
        for i2 in eids:
            if i1 == i2:
                continue
            pivot = g.edges[i1].iota
            for a in pool:
                if a not in g.vertices[pivot]:
                    continue
                move = TypeIII(i1, i2, a)
                if _applies(g, move):
                    moves.append(move)
    return moves

"""Compressing forests, retraction, and reduced quotients.

A compressing forest is a set of arrowed non-loop edges: each arrow points
from a source vertex whose label equals the edge label (transported to that
end) toward the other end. Rules: at most one outgoing arrow per vertex, no
cycles, and maximality. Collapsing every forest component onto its unique
arrowless vertex (the sink) retracts the graph onto a reduced quotient.

Plain greedy maximality is not enough for the retract to be reduced: a
vertex can lose its only usable arrow slot to an earlier edge even though
its whole arrow path carries constant labels, leaving a compressible image.
find_compressing_forest therefore runs a repair pass: an edge also counts
as addable when its desired source vertex can be freed by reversing a
label-constant arrow path, and the pass iterates to a fixpoint. With that
stronger maximality, a compressible retracted edge would exhibit an addable
edge, so the fixpoint retract is reduced.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import Edge, MarkedGraphOfGroups
from .groups import Permutation


@dataclass
class CompressingForest:
    """arrows: edge id -> the endpoint vertex the arrow points away from."""

    arrows: dict

    def copy(self):
        return CompressingForest(dict(self.arrows))


def _label_eq_at(g, e, v):
    """Edge label transported to the v end equals the vertex label."""
    if v == e.iota:
        return e.label == g.vertices[v]
    return e.label.conjugate(e.hol) == g.vertices[v]


def _out_edges(g, forest):
    """vertex -> (edge id, target vertex) for its outgoing arrow."""
    out = {}
    for eid, src in forest.arrows.items():
        e = g.edges[eid]
        out[src] = (eid, e.other_end(src))
    return out


def is_reduced(g):
    """(True, None), or (False, witness edge id) when some non-loop edge's
    label at one end equals that endpoint's whole label."""
    g.require_valid()
    for eid in sorted(g.edges):
        e = g.edges[eid]
        if e.is_loop():
            continue
        if _label_eq_at(g, e, e.iota) or _label_eq_at(g, e, e.tau):
            return False, eid
    return True, None


def _components(g, forest):
    """vertex -> frozen component id (the minimum vertex in the component)."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for eid in forest.arrows:
        e = g.edges[eid]
        a, b = find(e.iota), find(e.tau)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return {v: find(v) for v in g.vertices}


def component_sinks(g, forest):
    """vertex -> its component's sink (unique vertex with no outgoing arrow)."""
    out = _out_edges(g, forest)
    sink = {}
    for v in g.vertices:
        cur = v
        seen = {cur}
        while cur in out:
            cur = out[cur][1]
            if cur in seen:
                raise ValueError("forest arrows contain a cycle")
            seen.add(cur)
        sink[v] = cur
    return sink


def arrow_path(g, forest, v):
    """Arrow steps (edge id, source, target) from v to its sink."""
    out = _out_edges(g, forest)
    path = []
    cur = v
    seen = {cur}
    while cur in out:
        eid, nxt = out[cur]
        path.append((eid, cur, nxt))
        if nxt in seen:
            raise ValueError("forest arrows contain a cycle")
        seen.add(nxt)
        cur = nxt
    return path


def transports(g, forest):
    """vertex -> permutation u conjugating its frame into its sink's frame.

    One arrow step from a via edge f contributes t_f when a = iota(f) and
    t_f^-1 when a = tau(f); u is the composition along the path, first step
    applied first.
    """
    u = {}
    for v in sorted(g.vertices):
        acc = Permutation.identity(g.degree)
        for eid, src, _ in arrow_path(g, forest, v):
            e = g.edges[eid]
            step = e.hol if src == e.iota else e.hol.inverse()
            acc = step * acc
        u[v] = acc
    return u


def forest_problems(g, forest, check_maximal=True):
    """Rule violations: (1) subgraph, (2) one slot, (3) label equality,
    forest acyclicity, and (4) maximality (plain, no rearrangement)."""
    problems = []
    for eid, src in sorted(forest.arrows.items()):
        if eid not in g.edges:
            problems.append(f"forest edge {eid} is not a graph edge")
            continue
        e = g.edges[eid]
        if src not in (e.iota, e.tau):
            problems.append(f"forest edge {eid}: source {src} is not an endpoint")
            continue
        if e.is_loop():
            problems.append(f"forest edge {eid} is a loop")
            continue
        if not _label_eq_at(g, e, src):
            problems.append(f"forest edge {eid}: label differs from source {src} label")
    if problems:
        return problems
    sources = sorted(forest.arrows.values())
    doubled = sorted({v for v in sources if sources.count(v) > 1})
    if doubled:
        problems.append(f"vertices with two outgoing arrows: {doubled}")
    comp = {v: v for v in g.vertices}
    for eid in sorted(forest.arrows):
        e = g.edges[eid]
        if comp[e.iota] == comp[e.tau]:
            problems.append(f"forest edge {eid} closes a cycle")
            return problems
        old, new = comp[e.tau], comp[e.iota]
        for v in comp:
            if comp[v] == old:
                comp[v] = new
    if check_maximal:
        comp = _components(g, forest)
        slots = set(_out_edges(g, forest))
        for eid in sorted(g.edges):
            if eid in forest.arrows:
                continue
            e = g.edges[eid]
            if e.is_loop():
                continue
            for src in (e.iota, e.tau):
                if (
                    _label_eq_at(g, e, src)
                    and src not in slots
                    and comp[e.iota] != comp[e.tau]
                ):
                    problems.append(
                        f"forest not maximal: edge {eid} addable with source {src}"
                    )
                    return problems
    return problems


def _reversible_to_free(g, forest, v):
    """Whether every arrow edge on v's path to its sink has label equality
    at both ends, so the path can be reversed to free v's slot."""
    for eid, src, tgt in arrow_path(g, forest, v):
        e = g.edges[eid]
        if not _label_eq_at(g, e, tgt):
            return False
    return True


def _reverse_path(forest, g, v):
    for eid, src, tgt in arrow_path(g, forest, v):
        forest.arrows[eid] = tgt


def complete_forest(g, forest):
    """Grow forest in place to the repaired fixpoint; returns action notes.

    Edges are scanned in ascending id; when both orientations qualify the
    arrow points toward the lower vertex id. A taken slot is freed by
    reversing a label-constant arrow path when legal.
    """
    notes = []

    def orientation_order(e):
        ends = []
        if _label_eq_at(g, e, e.iota):
            ends.append(e.iota)
        if _label_eq_at(g, e, e.tau):
            ends.append(e.tau)
        if len(ends) == 2:
            ends = [max(ends), min(ends)]
        return ends

    changed = True
    while changed:
        changed = False
        comp = _components(g, forest)
        slots = set(_out_edges(g, forest))
        for eid in sorted(g.edges):
            if eid in forest.arrows:
                continue
            e = g.edges[eid]
            if e.is_loop() or comp[e.iota] == comp[e.tau]:
                continue
            for src in orientation_order(e):
                if src not in slots:
                    forest.arrows[eid] = src
                    notes.append(f"added arrow on edge {eid} from vertex {src}")
                    changed = True
                    break
                if _reversible_to_free(g, forest, src):
                    _reverse_path(forest, g, src)
                    forest.arrows[eid] = src
                    notes.append(
                        f"reversed arrow path at vertex {src}; added arrow on edge {eid}"
                    )
                    changed = True
                    break
            if changed:
                break
    return notes


def find_compressing_forest(g):
    """Deterministic greedy scan plus the repair pass described above."""
    g.require_valid()
    forest = CompressingForest({})
    complete_forest(g, forest)
    return forest


def retract(g, forest):
    """Collapse every forest component to its sink.

    Returns (reduced graph, rho) where rho maps each vertex to its sink.
    Non-forest edges are re-attached with labels and holonomies conjugated
    by the arrow-path transports.
    """
    g.require_valid()
    problems = forest_problems(g, forest, check_maximal=False)
    if problems:
        raise ValueError("invalid forest: " + "; ".join(problems))
    rho = component_sinks(g, forest)
    u = transports(g, forest)
    out = MarkedGraphOfGroups(g.degree)
    for vid in sorted(g.vertices):
        if rho[vid] == vid:
            out.add_vertex(vid, g.vertices[vid])
    out.basepoint = rho[g.basepoint]
    for eid in sorted(g.edges):
        if eid in forest.arrows:
            continue
        e = g.edges[eid]
        out.add_edge(
            eid,
            rho[e.iota],
            rho[e.tau],
            e.label.conjugate(u[e.iota]),
            u[e.tau] * e.hol * u[e.iota].inverse(),
        )
    return out, rho


def reduce_graph(g):
    """find_compressing_forest then retract; returns (reduced, forest)."""
    forest = find_compressing_forest(g)
    reduced, _ = retract(g, forest)
    return reduced, forest


def verify_eta_monotone(before, after):
    """(eta(before) >= eta(after), exact difference)."""
    from .graphs import eta

    delta = eta(before) - eta(after)
    return delta >= 0, delta

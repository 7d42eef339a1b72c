"""Classification of the operation a fold induces on the reduced quotient.

Given a valid fold on a marked graph carrying a compressing forest, the
fold descends to the retract. Depending on forest membership of the folded
edges, on how the pivot and far ends sit inside forest components, and on a
handful of label conditions, the induced operation is an isomorphism, a
plain fold, a composite of slides or label joins, or one of fourteen local
surgeries that can create or absorb vertices of the quotient.

The report carries the decision trail, the evolved forest on the folded
graph, and an exact replayable program of quotient surgery steps. The
program's edge data is produced by the same transport formulas retraction
uses, so replaying it from retract(g, f) reproduces retract(fold(g), F')
on the nose; the content the commutation property actually checks is the
forest evolution and the structural case analysis (which edges survive,
surface, or vanish, and which vertices appear or merge).

Arrow changes the case analysis performs freely (reversing a label-constant
path so a vertex becomes its component's sink, or trading a forest edge for
an equally labelled fold participant) are explicit normalization steps and
every one of them lands in the report notes.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import forest as forests
from .graphs import Edge, first_betti
from .moves import FoldError, Subdivide, TypeI, TypeII, TypeIII, apply_move


@dataclass
class InducedFoldReport:
    classification: str
    conditions: tuple
    forest_after: forests.CompressingForest
    program: tuple
    notes: tuple

    def condition(self, name):
        for key, value in self.conditions:
            if key == name:
                return value
        raise KeyError(name)


PLAIN_FOLD_CLASSES = frozenset(
    {
        "isomorphism",
        "type I",
        "type III",
        "type 1 composite",
        "type 3",
        "type 5",
    }
)

ORBIT_DROPPING = frozenset({"type I", "type III", "type 3"})
BETTI_DROPPING = frozenset({"type 12", "type 13", "type 14"})


def _is_sink_label(g, u, sink, w):
    """w's label fills its component sink's label after transport."""
    return g.vertices[w].conjugate(u[w]) == g.vertices[sink[w]]


def _reverse_to_sink(g, work, w, notes):
    """Make w its component's sink by reversing its arrow path; legal only
    when the path is label-constant, which W = W* guarantees."""
    path = forests.arrow_path(g, work, w)
    if not path:
        return
    for eid, _, tgt in path:
        if not forests._label_eq_at(g, g.edges[eid], tgt):
            raise ValueError(f"arrow path at vertex {w} is not reversible")
    for eid, _, tgt in path:
        work.arrows[eid] = tgt
    notes.append(f"reversed arrow path so vertex {w} has no outgoing arrow")


def _outgoing(work, w):
    for eid, src in work.arrows.items():
        if src == w:
            return eid
    return None


def _map_forest(work, cert):
    """Push forest arrows through a fold certificate."""
    raw = {}
    for eid, src in work.arrows.items():
        images = cert.edge_map.get(eid, (eid,))
        nsrc = cert.vertex_map.get(src, src)
        for nid in images:
            if nid not in raw:
                raw[nid] = nsrc
    return forests.CompressingForest(raw)


def _finish_forest(t, fp, notes):
    """Sanitize the evolved arrows against the folded graph, then complete
    to the repaired-maximal fixpoint so the retract stays reduced."""
    for eid in sorted(fp.arrows):
        src = fp.arrows[eid]
        e = t.edges.get(eid)
        if (
            e is None
            or src not in (e.iota, e.tau)
            or e.is_loop()
            or not forests._label_eq_at(t, e, src)
        ):
            del fp.arrows[eid]
            notes.append(f"dropped arrow on edge {eid} after the fold")
    seen = {}
    for eid in sorted(fp.arrows):
        src = fp.arrows[eid]
        if src in seen:
            del fp.arrows[eid]
            notes.append(
                f"dropped arrow on edge {eid}: vertex {src} keeps edge {seen[src]}"
            )
        else:
            seen[src] = eid
    comp = {v: v for v in t.vertices}

    def find(v):
        while comp[v] != v:
            comp[v] = comp[comp[v]]
            v = comp[v]
        return v

    for eid in sorted(fp.arrows):
        e = t.edges[eid]
        a, b = find(e.iota), find(e.tau)
        if a == b:
            del fp.arrows[eid]
            notes.append(f"dropped arrow on edge {eid}: it closed a cycle")
        else:
            comp[max(a, b)] = min(a, b)
    notes.extend(forests.complete_forest(t, fp))
    return fp


def _retract_edge_data(graph, sink, u, eid):
    e = graph.edges[eid]
    return (
        sink[e.iota],
        sink[e.tau],
        e.label.conjugate(u[e.iota]),
        u[e.tau] * e.hol * u[e.iota].inverse(),
    )


def _emit_program(g, f, t, fp):
    """Exact surgery turning retract(g, f) into retract(t, fp)."""
    sink = forests.component_sinks(g, f)
    u = forests.transports(g, f)
    sink2 = forests.component_sinks(t, fp)
    u2 = forests.transports(t, fp)
    before_v = {v: g.vertices[v] for v in set(sink.values())}
    after_v = {v: t.vertices[v] for v in set(sink2.values())}
    ops = []
    for vid in sorted(after_v):
        if vid not in before_v:
            ops.append(("add_vertex", vid, after_v[vid]))
        elif before_v[vid] != after_v[vid]:
            ops.append(("set_vertex_label", vid, after_v[vid]))
    before_e = {
        eid: _retract_edge_data(g, sink, u, eid)
        for eid in g.edges
        if eid not in f.arrows
    }
    after_e = {
        eid: _retract_edge_data(t, sink2, u2, eid)
        for eid in t.edges
        if eid not in fp.arrows
    }
    for eid in sorted(after_e):
        if before_e.get(eid) != after_e[eid]:
            ops.append(("set_edge", eid) + after_e[eid])
    for eid in sorted(before_e):
        if eid not in after_e:
            ops.append(("remove_edge", eid))
    for vid in sorted(before_v):
        if vid not in after_v:
            ops.append(("remove_vertex", vid))
    if sink2[t.basepoint] != sink[g.basepoint]:
        ops.append(("set_basepoint", sink2[t.basepoint]))
    return tuple(ops)


def apply_induced(reduced, report):
    """Replay the report's program on a reduced quotient."""
    out = reduced.copy()
    for op in report.program:
        kind = op[0]
        if kind == "add_vertex":
            out.add_vertex(op[1], op[2])
        elif kind == "set_vertex_label":
            out.vertices[op[1]] = op[2]
        elif kind == "set_edge":
            eid, iota, tau, label, hol = op[1:]
            out.edges[eid] = Edge(eid, iota, tau, label, hol)
        elif kind == "remove_edge":
            del out.edges[op[1]]
        elif kind == "remove_vertex":
            del out.vertices[op[1]]
        elif kind == "set_basepoint":
            out.basepoint = op[1]
        else:
            raise ValueError(f"unknown program op {kind}")
    out.require_valid()
    return out


def classify_induced_fold(g, f, move):
    """Classify the operation `move` induces on retract(g, f).

    Raises FoldError when the move is inapplicable and ValueError when the
    forest is invalid. Subdivisions do not act on the reduced quotient.
    """
    if isinstance(move, Subdivide):
        raise FoldError("subdivisions induce nothing on the reduced quotient")
    g.require_valid()
    problems = forests.forest_problems(g, f)
    if problems:
        raise ValueError("invalid forest: " + "; ".join(problems))
    t, cert = apply_move(g, move)
    notes = []
    conds = []
    work = f.copy()
    if isinstance(move, TypeI):
        cls, action = _classify_fold1(g, work, move, conds, notes)
    elif isinstance(move, TypeII):
        cls, action = _classify_fold2(g, work, move, conds, notes)
    else:
        cls, action = _classify_fold3(g, work, move, conds, notes)
    fp = _map_forest(work, cert)
    _apply_membership(fp, action, move, cert, g, notes)
    fp = _finish_forest(t, fp, notes)
    program = _emit_program(g, f, t, fp)
    return InducedFoldReport(cls, tuple(conds), fp, program, tuple(notes))


def _apply_membership(fp, action, move, cert, g, notes):
    """Settle the folded edge's forest membership: 'leave' keeps whatever
    the certificate mapping produced, 'drop' forces it out, 'pivot' forces
    it in with the pivot as source, 'merge' rebuilds the both-in-forest
    arrow per the shared-pivot rule."""
    if action == "leave":
        return
    merged = move.e1
    if action == "drop":
        if merged in fp.arrows:
            del fp.arrows[merged]
            notes.append(f"folded edge {merged} leaves the forest")
        return
    if action == "pivot":
        if fp.arrows.get(merged) != move.pivot:
            notes.append(
                f"folded edge {merged} joins the forest with source {move.pivot}"
            )
        fp.arrows[merged] = move.pivot
        return
    if action == "merge-far":
        far = g.edges[move.e1].other_end(move.pivot)
        fp.arrows[merged] = cert.vertex_map.get(far, far)
        return
    raise ValueError(f"unknown membership action {action}")


def _aligned_frames(g, move, forest_side):
    """Far and edge labels in the merged frame: the move.e1 side is taken
    as-is, the move.e2 side conjugated by the align element."""
    e1, e2 = g.edges[move.e1], g.edges[move.e2]
    v = move.pivot
    a = move.align
    far1, far2 = e1.other_end(v), e2.other_end(v)
    side1 = (g.vertices[far1], e1.label, far1)
    side2 = (g.vertices[far2].conjugate(a), e2.label.conjugate(a), far2)
    if forest_side == "e2":
        (xm, e1m, fx), (ym, e2m, ry) = side2, side1
    else:
        (xm, e1m, fx), (ym, e2m, ry) = side1, side2
    return xm, e1m, fx, ym, e2m, ry


def _classify_fold1(g, work, move, conds, notes):
    v = move.pivot
    in1 = move.e1 in work.arrows
    in2 = move.e2 in work.arrows
    conds.append(("e1 in forest", in1))
    conds.append(("e2 in forest", in2))
    if in1 and in2:
        return "isomorphism", _merge_action(g, work, move, notes)
    if not in1 and not in2:
        return _classify_fold1_free(g, work, move, conds, notes)
    forest_side = "e1" if in1 else "e2"
    if forest_side == "e2":
        notes.append("roles mirrored: the forest edge is the move's second edge")
    xm, e1m, fx, ym, e2m, ry = _aligned_frames(g, move, forest_side)
    fe = move.e1 if in1 else move.e2
    sink = forests.component_sinks(g, work)
    same = sink[v] == sink[ry]
    conds.append(("v and y share a component", same))
    if same:
        return _classify_fold1_forest_same(
            g, work, move, conds, notes, fe, fx, ry, xm, e2m, ym
        )
    return _classify_fold1_forest_diff(
        g, work, move, conds, notes, fe, fx, ry, xm, e2m
    )


def _merge_action(g, work, move, notes):
    """Both folded edges carried arrows; the merged edge keeps an arrow
    pointing away from the pivot exactly when one of them did."""
    pivot = move.pivot
    if work.arrows[move.e1] == pivot or work.arrows[move.e2] == pivot:
        return "pivot"
    notes.append("merged forest edge keeps its arrow toward the pivot")
    return "merge-far"


def _classify_fold1_forest_diff(g, work, move, conds, notes, fe, fx, ry, xm, e2m):
    v = move.pivot
    u = forests.transports(g, work)
    sink = forests.component_sinks(g, work)
    toward_pivot = work.arrows[fe] == fx
    notes.append("arrow from x to v" if toward_pivot else "arrow from v to x")
    if toward_pivot:
        c1 = xm <= e2m
        conds.append(("X <= E2", c1))
        if c1:
            return "type 1 composite", "drop"
        join = xm.join(e2m)
        c2 = join == g.vertices[v] and _is_sink_label(g, u, sink, v)
        conds.append(("<X,E2> = V*", c2))
        c3 = _is_sink_label(g, u, sink, ry)
        conds.append(("Y = Y*", c3))
        if not c2 and not c3:
            return "type 2", "drop"
        if c2 and c3:
            _reverse_to_sink(g, work, v, notes)
            _reverse_to_sink(g, work, ry, notes)
            return "type 3", "pivot"
        if c2:
            _reverse_to_sink(g, work, v, notes)
            return "type II combination", "pivot"
        _reverse_to_sink(g, work, ry, notes)
        return "type II combination", "drop"
    cx = _is_sink_label(g, u, sink, fx)
    conds.append(("X = X*", cx))
    cy = _is_sink_label(g, u, sink, ry)
    conds.append(("Y = Y*", cy))
    if not cx and not cy:
        notes.append("<X,E2> = X in this flavor")
        return "type 2", "pivot"
    if cx and cy:
        _reverse_to_sink(g, work, fx, notes)
        _reverse_to_sink(g, work, ry, notes)
        return "type 3", "pivot"
    if cx:
        _reverse_to_sink(g, work, fx, notes)
        notes.append("pivot for the combination is y")
        return "type II combination", "pivot"
    _reverse_to_sink(g, work, ry, notes)
    notes.append("degenerate: the real edge's far end is already a sink")
    return "type 2", "pivot"


def _classify_fold1_forest_same(
    g, work, move, conds, notes, fe, fx, ry, xm, e2m, ym
):
    v = move.pivot
    eq = e2m == ym
    conds.append(("E2 = Y", eq))
    if eq and _swap_real_into_forest(g, work, move, fe, ry, notes):
        conds.clear()
        return _classify_fold1(g, work, move, conds, notes)
    u = forests.transports(g, work)
    sink = forests.component_sinks(g, work)
    toward_pivot = work.arrows[fe] == fx
    notes.append("arrow from x to v" if toward_pivot else "arrow from v to x")
    join = xm.join(e2m)
    frame = v if toward_pivot else fx
    c2 = join.conjugate(u[frame]) == g.vertices[sink[frame]]
    conds.append(("<X,E2> = V*", c2))
    notes.append(f"conjugator carrying Y into the sink frame: {u[ry]}")
    if c2:
        _reverse_to_sink(g, work, frame, notes)
        return "type 5", "pivot"
    return "type 4", ("drop" if toward_pivot else "pivot")


def _swap_real_into_forest(g, work, move, fe, ry, notes):
    """Same-component E2 = Y normalization: give y an outgoing arrow, then
    trade it for the real folded edge, reducing to the both-in-forest case."""
    re = move.e2 if fe == move.e1 else move.e1
    if _outgoing(work, ry) is None:
        incoming = None
        for eid, src in sorted(work.arrows.items()):
            e = g.edges[eid]
            if e.other_end(src) == ry and forests._label_eq_at(g, e, ry):
                incoming = eid
                break
        if incoming is None:
            notes.append(f"no reversible arrow at vertex {ry}; swap skipped")
            return False
        work.arrows[incoming] = ry
        notes.append(f"reversed arrow on edge {incoming} so vertex {ry} points out")
    out = _outgoing(work, ry)
    trial = dict(work.arrows)
    del trial[out]
    trial[re] = ry
    probe = forests.CompressingForest(trial)
    try:
        forests.component_sinks(g, probe)
    except ValueError:
        notes.append("swap would close a cycle; skipped")
        return False
    if forests.forest_problems(g, probe, check_maximal=False):
        notes.append("swap would break forest rules; skipped")
        return False
    work.arrows.clear()
    work.arrows.update(trial)
    notes.append(f"swapped forest edge {out} for folded edge {re} at vertex {ry}")
    return True


def _classify_fold1_free(g, work, move, conds, notes):
    v = move.pivot
    sink = forests.component_sinks(g, work)
    e1, e2 = g.edges[move.e1], g.edges[move.e2]
    x, y = e1.other_end(v), e2.other_end(v)
    for eid, w in ((move.e1, x), (move.e2, y)):
        e = g.edges[eid]
        if e.label == g.vertices[w] and sink[w] == sink[v]:
            if _swap_forest_for_edge(g, work, eid, w, v, notes):
                conds.clear()
                return _classify_fold1(g, work, move, conds, notes)
    u = forests.transports(g, work)
    xm, e1m, fx, ym, e2m, ry = _aligned_frames(g, move, None)
    distinct = len({sink[v], sink[x], sink[y]}) == 3
    conds.append(("v, x, y in distinct components", distinct))
    cx = _is_sink_label(g, u, sink, x)
    cy = _is_sink_label(g, u, sink, y)
    conds.append(("X = X*", cx))
    conds.append(("Y = Y*", cy))
    if distinct:
        if cx and cy:
            _reverse_to_sink(g, work, x, notes)
            _reverse_to_sink(g, work, y, notes)
            return "type I", "leave"
        if cx or cy:
            _reverse_to_sink(g, work, x if cx else y, notes)
            return "type 7", "leave"
        jx = xm.join(ym) == xm
        jy = xm.join(ym) == ym
        conds.append(("<X,Y> = X", jx))
        conds.append(("<X,Y> = Y", jy))
        if jx or jy:
            if jx and jy:
                kept = sorted(
                    eid for eid in (_outgoing(work, x), _outgoing(work, y))
                    if eid is not None
                )
                if kept:
                    notes.append(
                        f"either outgoing arrow may stay; edge {kept[0]} kept"
                    )
            return "type 7", "leave"
        joined = e1m.join(e2m)
        c6 = joined == g.vertices[v] and _is_sink_label(g, u, sink, v)
        conds.append(("<E1,E2> = V*", c6))
        if c6:
            _reverse_to_sink(g, work, v, notes)
            return "type II combination", "pivot"
        return "type 6", "leave"
    if sink[x] != sink[y]:
        notes.append("pivot shares a component with one far end")
    jx = xm.join(ym) == xm
    jy = xm.join(ym) == ym
    conds.append(("<X,Y> = X", jx))
    conds.append(("<X,Y> = Y", jy))
    if jx or jy:
        return "type 9", "leave"
    return "type 8", "leave"


def _swap_forest_for_edge(g, work, eid, w, v, notes):
    """Same-component far end whose label equals the folded edge's label:
    trade an arrow for this edge so the fold involves the forest."""
    candidates = []
    out_w = _outgoing(work, w)
    if out_w is not None:
        candidates.append((out_w, w))
    out_v = _outgoing(work, v)
    if out_v is not None and g.edges[eid].label == g.vertices[v]:
        candidates.append((out_v, v))
    for victim, src in candidates:
        trial = dict(work.arrows)
        del trial[victim]
        trial[eid] = src
        probe = forests.CompressingForest(trial)
        try:
            forests.component_sinks(g, probe)
        except ValueError:
            continue
        if forests.forest_problems(g, probe, check_maximal=False):
            continue
        work.arrows.clear()
        work.arrows.update(trial)
        notes.append(
            f"swapped forest edge {victim} for fold participant {eid} at vertex {src}"
        )
        return True
    notes.append(f"no legal swap for fold participant {eid}; classified as-is")
    return False


def _classify_fold2(g, work, move, conds, notes):
    e = g.edges[move.edge]
    v, x = e.iota, e.tau
    in_forest = move.edge in work.arrows
    conds.append(("e in forest", in_forest))
    if in_forest:
        return "isomorphism", "leave"
    u = forests.transports(g, work)
    sink = forests.component_sinks(g, work)
    same = sink[v] == sink[x]
    conds.append(("v and x share a component", same))
    gin = move.element in g.vertices[x]
    conds.append(("g in X", gin))
    if gin:
        return "type II", "leave"
    cx = _is_sink_label(g, u, sink, x)
    conds.append(("X = X*", cx))
    if cx:
        _reverse_to_sink(g, work, x, notes)
        if same:
            notes.append("pivot and far sinks coincide")
        return "type II", "leave"
    if not same:
        return "type 10", "leave"
    joined = e.label.adjoin(move.element)
    c5 = joined == g.vertices[v] and _is_sink_label(g, u, sink, v)
    conds.append(("<E,g> = V*", c5))
    notes.append(f"conjugator carrying the far label into the sink frame: {u[x]}")
    if c5:
        _reverse_to_sink(g, work, v, notes)
        work.arrows[move.edge] = v
        notes.append(f"folded edge {move.edge} joins the forest with source {v}")
        return "type 5", "leave"
    return "type 4", "leave"


def _classify_fold3(g, work, move, conds, notes):
    in1 = move.e1 in work.arrows
    in2 = move.e2 in work.arrows
    conds.append(("e1 in forest", in1))
    conds.append(("e2 in forest", in2))
    if in1 or in2:
        forest_eid = move.e1 if in1 else move.e2
        other_eid = move.e2 if in1 else move.e1
        src = work.arrows[forest_eid]
        keep = g.edges[forest_eid].other_end(src)
        degenerate = (
            g.edges[other_eid].label.is_trivial()
            and g.vertices[keep].is_trivial()
        )
        conds.append(("free edge label and surviving label trivial", degenerate))
        if degenerate:
            notes.append(
                "the collapsed parallel edge carries no label, so the reduced "
                "move folds the surviving loop with a translate of itself"
            )
            return "type III", "leave"
        notes.append("a parallel edge leaves the forest; E2 = X allowed here")
        return "type 14", "drop"
    e1 = g.edges[move.e1]
    p, q = e1.iota, e1.tau
    u = forests.transports(g, work)
    sink = forests.component_sinks(g, work)
    same = sink[p] == sink[q]
    conds.append(("pivot and far end share a component", same))
    cx = _is_sink_label(g, u, sink, q)
    conds.append(("X = X*", cx))
    if not same:
        if cx:
            _reverse_to_sink(g, work, q, notes)
            return "type III", "leave"
        return "type 11", "leave"
    if cx:
        return "type 12", "leave"
    return "type 13", "leave"


def verify_eta_monotone(before, after):
    """Re-exported convenience: see forest.verify_eta_monotone."""
    return forests.verify_eta_monotone(before, after)


def invariant_violations(report, before_reduced, after_reduced):
    """Strict-decrease checks tied to the classification: edge-orbit count
    for plain merging folds, cycle rank for the loop-absorbing types."""
    problems = []
    if report.classification in ORBIT_DROPPING:
        if len(after_reduced.edges) >= len(before_reduced.edges):
            problems.append(
                "edge orbit count did not drop: "
                f"{len(before_reduced.edges)} -> {len(after_reduced.edges)}"
            )
    if report.classification in BETTI_DROPPING:
        if first_betti(after_reduced) >= first_betti(before_reduced):
            problems.append(
                "cycle rank did not drop: "
                f"{first_betti(before_reduced)} -> {first_betti(after_reduced)}"
            )
    return problems

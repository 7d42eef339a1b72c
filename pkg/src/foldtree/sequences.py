"""Folding scripts: staged runs, provenance, lengths, reducibility, limits.

A script is an initial marked graph plus a list of elementary moves, with an
optional trailing period that repeats forever. Running a script yields one
stage record per move: the graph it produced and the certificate saying
where every id went. Periodic continuation translates the declared block of
moves through the label-preserving isomorphism between the block's first
and last stages, allocating fresh ids for subdivision points as it goes.

On top of the staged run this module solves for edge lengths that realize
every stage with exact rational values (parts of a subdivision sum to the
subdivided length, folded edges share the merged length), builds the
backward transfer matrix of a periodic block, decides from its growth
structure which edges are forced to zero length in the limit, checks
invariant witness sets for that behavior, tracks whether any fold ever
identifies two partial edges cut from one covering-tree edge, and pushes a
ball of covering-tree points down the stages to sample the limit
pseudometric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import sympy

from .balls import expand_ball
from .canon import find_isomorphism
from .graphs import MarkedGraphOfGroups
from .groups import Permutation
from .limits import path_distance, push_points
from .moves import (
    FoldError,
    FoldScript,
    Subdivide,
    TypeI,
    TypeII,
    TypeIII,
    apply_move,
)


@dataclass
class StageRecord:
    """Stage graph plus the move, certificate, and provenance behind it.

    provenance maps each edge id to a frozenset of (stage, ancestor edge,
    part tag) triples recording which subdivisions it descends from.
    """

    graph: MarkedGraphOfGroups
    move: object
    cert: object
    provenance: dict | None = None


def _checked_period(script):
    if script.period is None:
        return None
    start, length = script.period
    if start < 0 or length < 1:
        raise ValueError("period needs start >= 0 and length >= 1")
    if start + length != len(script.moves):
        raise ValueError(
            "the explicit move list must end exactly at the period boundary"
        )
    return start, length


def _iso_map(g_from, g_to):
    """Id translation along a label-preserving isomorphism, with flip flags."""
    found = find_isomorphism(g_from, g_to)
    if found is None:
        return None
    vmap, emap = found
    flips = {}
    for eid, other in emap.items():
        e = g_from.edges[eid]
        f = g_to.edges[other]
        straight = (
            vmap[e.iota] == f.iota
            and vmap[e.tau] == f.tau
            and e.label == f.label
            and e.hol == f.hol
        )
        flips[eid] = not straight
    return {"v": dict(vmap), "e": dict(emap), "flip": flips}


def _period_correspondence(g_from, g_to):
    """Edge correspondence closing a period, or None.

    Identity on ids when both stages share all ids and incidences (labels
    may have grown along the way); otherwise a label-preserving
    isomorphism.
    """
    if set(g_from.vertices) == set(g_to.vertices) and set(
        g_from.edges
    ) == set(g_to.edges):
        if all(
            g_from.edges[eid].iota == g_to.edges[eid].iota
            and g_from.edges[eid].tau == g_to.edges[eid].tau
            for eid in g_from.edges
        ):
            return {
                "v": {v: v for v in g_from.vertices},
                "e": {e: e for e in g_from.edges},
                "flip": {e: False for e in g_from.edges},
            }
    return _iso_map(g_from, g_to)


def _translate_move(move, sigma, graph):
    """Carry a move through an id translation, allocating fresh part ids."""
    if isinstance(move, Subdivide):
        if sigma["flip"].get(move.edge):
            raise FoldError(
                f"period correspondence reverses edge {move.edge}; "
                "list the continuation moves explicitly"
            )
        mid = graph.fresh_vertex_id()
        p1 = graph.fresh_edge_id()
        p2 = p1 + 1
        out = Subdivide(sigma["e"][move.edge], mid, p1, p2)
        sigma["v"][move.mid] = mid
        sigma["e"][move.part1] = p1
        sigma["e"][move.part2] = p2
        sigma["flip"][move.part1] = False
        sigma["flip"][move.part2] = False
        return out
    if isinstance(move, TypeI):
        return TypeI(
            sigma["e"][move.e1],
            sigma["e"][move.e2],
            sigma["v"][move.pivot],
            move.align,
        )
    if isinstance(move, TypeII):
        if sigma["flip"].get(move.edge):
            raise FoldError(
                f"period correspondence reverses edge {move.edge}; "
                "list the continuation moves explicitly"
            )
        return TypeII(sigma["e"][move.edge], move.element)
    if isinstance(move, TypeIII):
        if sigma["flip"].get(move.e1) or sigma["flip"].get(move.e2):
            raise FoldError(
                "period correspondence reverses a parallel edge; "
                "list the continuation moves explicitly"
            )
        return TypeIII(sigma["e"][move.e1], sigma["e"][move.e2], move.align)
    raise FoldError(f"unknown move {move!r}")


def run_script(script, steps=None):
    """Stage records after each move; stage 0 is a copy of the initial graph.

    steps beyond the explicit list unroll the period, translating the block
    through the stage isomorphism. Failures carry the move index.
    """
    period = _checked_period(script)
    if steps is None:
        steps = len(script.moves)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if steps > len(script.moves) and period is None:
        raise ValueError("script has no period, cannot run past its moves")
    script.initial.require_valid()
    stages = [StageRecord(script.initial.copy(), None, None)]
    base = None
    sigma = None
    for k in range(steps):
        if k < len(script.moves):
            move = script.moves[k]
        else:
            start, length = period
            j = (k - start) % length
            if j == 0:
                if base is None:
                    base = _period_correspondence(
                        stages[start].graph, stages[-1].graph
                    )
                    if base is None:
                        raise FoldError(
                            "declared period has no edge correspondence "
                            "between its start and end stages"
                        )
                    sigma = {
                        "v": dict(base["v"]),
                        "e": dict(base["e"]),
                        "flip": dict(base["flip"]),
                    }
                else:
                    sigma = {
                        "v": {v: sigma["v"][w] for v, w in base["v"].items()},
                        "e": {e: sigma["e"][f] for e, f in base["e"].items()},
                        "flip": {
                            e: base["flip"][e] or sigma["flip"][base["e"][e]]
                            for e in base["e"]
                        },
                    }
            move = _translate_move(
                script.moves[start + j], sigma, stages[-1].graph
            )
        if not isinstance(move, (Subdivide, TypeI, TypeII, TypeIII)):
            raise FoldError(f"move {k}: not a subdivision or a fold")
        try:
            out, cert = apply_move(stages[-1].graph, move)
        except FoldError as err:
            raise FoldError(f"move {k}: {err}") from err
        stages.append(StageRecord(out, move, cert))
    for rec, layer in zip(stages, edge_provenance(stages)):
        rec.provenance = layer
    return stages


def _identity(stages):
    return Permutation.identity(stages[0].graph.degree)


def _rich_provenance(stages):
    """Per stage: edge -> set of (stage, ancestor, part, lift transport).

    The transport locates the edge's identity lift inside the identity lift
    of the part it descends from; folds translate the absorbed side by the
    align element, re-rooted edges of a merged vertex likewise.
    """
    ident = _identity(stages)
    rich = [{eid: frozenset() for eid in stages[0].graph.edges}]
    events = {}
    for k, rec in enumerate(stages[1:], 1):
        prev_g = stages[k - 1].graph
        prev = rich[k - 1]
        move = rec.move
        cur = {}
        if isinstance(move, Subdivide):
            key = (k - 1, move.edge)
            events[key] = prev_g.edges[move.edge].label
            for eid in rec.graph.edges:
                if eid == move.part1:
                    cur[eid] = prev[move.edge] | {key + (1, ident)}
                elif eid == move.part2:
                    cur[eid] = prev[move.edge] | {key + (2, ident)}
                else:
                    cur[eid] = prev[eid]
        elif isinstance(move, TypeII):
            cur = {eid: prev[eid] for eid in rec.graph.edges}
        elif isinstance(move, TypeI):
            e2 = prev_g.edges[move.e2]
            y = e2.other_end(move.pivot)
            a = move.align
            for eid in rec.graph.edges:
                if eid == move.e1:
                    moved = {
                        (m, anc, part, a * t)
                        for (m, anc, part, t) in prev[move.e2]
                    }
                    cur[eid] = prev[move.e1] | moved
                elif prev_g.edges[eid].iota == y:
                    cur[eid] = frozenset(
                        (m, anc, part, a * t)
                        for (m, anc, part, t) in prev[eid]
                    )
                else:
                    cur[eid] = prev[eid]
        elif isinstance(move, TypeIII):
            e1 = prev_g.edges[move.e1]
            e2 = prev_g.edges[move.e2]
            pivot = e1.iota
            q2 = ident if (e2.is_loop() or e2.iota == pivot) else e2.hol
            shift = move.align * q2
            for eid in rec.graph.edges:
                if eid == move.e1:
                    moved = {
                        (m, anc, part, shift * t)
                        for (m, anc, part, t) in prev[move.e2]
                    }
                    cur[eid] = prev[move.e1] | moved
                else:
                    cur[eid] = prev[eid]
        else:
            raise FoldError(f"unknown move {move!r}")
        rich.append(cur)
    return rich, events


def edge_provenance(stages):
    """Per stage: edge -> frozenset of (stage, ancestor edge, part tag)."""
    rich, _ = _rich_provenance(stages)
    return [
        {eid: frozenset((m, anc, part) for (m, anc, part, _) in entries)
         for eid, entries in layer.items()}
        for layer in rich
    ]


@dataclass
class ConditionCReport:
    ok: bool
    violations: tuple
    checked_steps: int


def check_condition_c(script, steps=None):
    """Whether no fold ever glues two partial edges of one covering-tree edge.

    A fold of e1 with e2 under align a is a violation for a subdivision
    event exactly when both edges descend from the event with distinct part
    tags and the transported identity lifts sit in the same ancestor lift,
    i.e. t1^-1 * a * (q2 * t2) lies in the ancestor's frozen edge label.
    Quotient-level sharing with lifts in distinct ancestor translates is
    allowed. For periodic scripts the default scope runs the block three
    times; pass steps explicitly to scan further.
    """
    period = _checked_period(script)
    if steps is None:
        if period is None:
            steps = len(script.moves)
        else:
            steps = len(script.moves) + 2 * period[1]
    stages = run_script(script, steps)
    rich, events = _rich_provenance(stages)
    ident = _identity(stages)
    violations = []
    for k, rec in enumerate(stages[1:], 1):
        move = rec.move
        if isinstance(move, TypeI):
            a = move.align
            q2 = ident
        elif isinstance(move, TypeIII):
            prev_g = stages[k - 1].graph
            e2 = prev_g.edges[move.e2]
            pivot = prev_g.edges[move.e1].iota
            a = move.align
            q2 = ident if (e2.is_loop() or e2.iota == pivot) else e2.hol
        else:
            continue
        prev = rich[k - 1]
        seen = set()
        for m, anc, part, t1 in prev[move.e1]:
            for m2, anc2, part2, t2 in prev[move.e2]:
                if (m, anc) != (m2, anc2) or part == part2:
                    continue
                if (k - 1, m, anc) in seen:
                    continue
                label = events[(m, anc)]
                if t1.inverse() * (a * (q2 * t2)) in label:
                    seen.add((k - 1, m, anc))
                    violations.append((k - 1, move, (m, anc)))
    return ConditionCReport(
        ok=not violations,
        violations=tuple(violations),
        checked_steps=steps,
    )


@dataclass
class LengthAssignment:
    """Exact edge lengths per stage; stage 0 sums to one."""

    per_stage: tuple
    scale: Fraction


def solve_lengths(script, steps=None, final=None):
    """Backward-propagated rational lengths realizing every stage.

    final assigns lengths to the last stage's edges (default all ones).
    Subdivided parts sum to the parent length, folded edges inherit the
    merged length, and the whole solution is scaled so stage 0 sums to 1.
    """
    stages = run_script(script, steps)
    return _solve_for_stages(stages, final)


def _solve_for_stages(stages, final=None):
    last = stages[-1].graph
    if final is None:
        lengths = {eid: Fraction(1) for eid in last.edges}
    else:
        lengths = {eid: Fraction(v) for eid, v in final.items()}
        if set(lengths) != set(last.edges):
            raise ValueError("final lengths must cover the last stage exactly")
        if any(v <= 0 for v in lengths.values()):
            raise ValueError("final lengths must be positive")
    per_stage = [lengths]
    for k in range(len(stages) - 1, 0, -1):
        move = stages[k].move
        nxt = per_stage[0]
        here = {}
        for eid in stages[k - 1].graph.edges:
            if isinstance(move, Subdivide) and eid == move.edge:
                here[eid] = nxt[move.part1] + nxt[move.part2]
            elif isinstance(move, (TypeI, TypeIII)) and eid in (
                move.e1,
                move.e2,
            ):
                here[eid] = nxt[move.e1]
            else:
                here[eid] = nxt[eid]
        per_stage.insert(0, here)
    total = sum(per_stage[0].values())
    if total == 0:
        raise ValueError("every stage-0 length is zero; nothing to normalize")
    scale = Fraction(1) / total
    per_stage = [
        {eid: v * scale for eid, v in layer.items()} for layer in per_stage
    ]
    return LengthAssignment(per_stage=tuple(per_stage), scale=scale)


def check_lengths(stages, assignment):
    """Replay problems: the constraints a realization must satisfy."""
    problems = []
    layers = assignment.per_stage
    if len(layers) != len(stages):
        return ["assignment covers a different number of stages"]
    for k, layer in enumerate(layers):
        if set(layer) != set(stages[k].graph.edges):
            problems.append(f"stage {k} lengths do not match its edges")
    if problems:
        return problems
    for k in range(1, len(stages)):
        move = stages[k].move
        prev, cur = layers[k - 1], layers[k]
        for eid in stages[k - 1].graph.edges:
            if isinstance(move, Subdivide) and eid == move.edge:
                if prev[eid] != cur[move.part1] + cur[move.part2]:
                    problems.append(
                        f"stage {k - 1}: parts of edge {eid} do not sum"
                    )
            elif isinstance(move, (TypeI, TypeIII)) and eid in (
                move.e1,
                move.e2,
            ):
                if prev[eid] != cur[move.e1]:
                    problems.append(
                        f"stage {k - 1}: folded edge {eid} length changed"
                    )
            elif prev[eid] != cur[eid]:
                problems.append(f"stage {k - 1}: edge {eid} length changed")
    for k in range(1, len(stages)):
        move = stages[k].move
        if isinstance(move, (TypeI, TypeIII)):
            prev = layers[k - 1]
            if prev[move.e1] != prev[move.e2]:
                problems.append(
                    f"stage {k - 1}: fold inputs {move.e1}, {move.e2} "
                    "have different lengths"
                )
    return problems


def _transfer_rows(stages, start, length, iso):
    """Backward block matrix: early lengths as sums of late ones."""
    order = tuple(sorted(stages[start].graph.edges))
    expr = {eid: {eid: 1} for eid in order}
    for k in range(start + 1, start + length + 1):
        move = stages[k].move
        for eid in order:
            row = expr[eid]
            if isinstance(move, Subdivide):
                c = row.pop(move.edge, 0)
                if c:
                    row[move.part1] = row.get(move.part1, 0) + c
                    row[move.part2] = row.get(move.part2, 0) + c
            elif isinstance(move, (TypeI, TypeIII)):
                c = row.pop(move.e2, 0)
                if c:
                    row[move.e1] = row.get(move.e1, 0) + c
    back = iso["e"]
    rows = []
    for eid in order:
        translated = {}
        for end_id, c in expr[eid].items():
            translated[back[end_id]] = translated.get(back[end_id], 0) + c
        rows.append(tuple(translated.get(j, 0) for j in order))
    return order, tuple(rows)


def _sccs(adj, n):
    """Tarjan strongly connected components, deterministic order."""
    index = [None] * n
    low = [0] * n
    on = [False] * n
    stack = []
    out = []
    counter = itertools.count()
    calls = []
    for root in range(n):
        if index[root] is not None:
            continue
        calls.append((root, iter(adj[root])))
        index[root] = low[root] = next(counter)
        stack.append(root)
        on[root] = True
        while calls:
            v, it = calls[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on[w] = True
                    calls.append((w, iter(adj[w])))
                    advanced = True
                    break
                if on[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            calls.pop()
            if calls:
                low[calls[-1][0]] = min(low[calls[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(tuple(sorted(comp)))
    return out


def _scc_cyclicity(rows, comp):
    """gcd of closed-walk lengths inside one strongly connected block."""
    if len(comp) == 1:
        i = comp[0]
        return 1 if rows[i][i] else 0
    pos = {v: i for i, v in enumerate(comp)}
    level = {comp[0]: 0}
    queue = [comp[0]]
    edges = []
    while queue:
        u = queue.pop(0)
        for v in comp:
            if rows[u][v]:
                edges.append((u, v))
                if v not in level:
                    level[v] = level[u] + 1
                    queue.append(v)
    g = 0
    for u, v in edges:
        g = gcd(g, level[u] + 1 - level[v])
    return abs(g) if g else 0


def _growth_pairs(rows):
    """Per coordinate: (spectral radius reached, secondary polynomial degree).

    The radius is the largest Perron root among blocks reachable from the
    coordinate; the degree counts maximal chains of blocks attaining it.
    Exact sympy arithmetic throughout.
    """
    n = len(rows)
    adj = [
        [j for j in range(n) if rows[i][j]] for i in range(n)
    ]
    comps = _sccs(adj, n)
    comp_of = {}
    for c, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = c
    rho = []
    for comp in comps:
        sub = sympy.Matrix(
            [[rows[i][j] for j in comp] for i in comp]
        )
        if len(comp) == 1 and sub[0, 0] == 0:
            rho.append(sympy.Integer(0))
            continue
        lam = sympy.Symbol("lam")
        poly = sympy.Poly(sub.charpoly(lam).as_expr(), lam)
        real = poly.real_roots()
        rho.append(real[-1] if real else sympy.Integer(0))
    succ = [set() for _ in comps]
    for i in range(n):
        for j in adj[i]:
            if comp_of[i] != comp_of[j]:
                succ[comp_of[i]].add(comp_of[j])
    lam_of = [None] * len(comps)
    cnt_of = [None] * len(comps)

    def fill(c):
        if lam_of[c] is not None:
            return
        best = rho[c]
        for s in succ[c]:
            fill(s)
            if bool(lam_of[s] > best):
                best = lam_of[s]
        lam_of[c] = best
        cnt = 0
        for s in succ[c]:
            if lam_of[s] == best and cnt_of[s] > cnt:
                cnt = cnt_of[s]
        if rho[c] == best:
            cnt += 1
        cnt_of[c] = cnt

    for c in range(len(comps)):
        fill(c)
    pairs = []
    for i in range(n):
        c = comp_of[i]
        pairs.append((lam_of[c], max(cnt_of[c] - 1, 0)))
    return pairs, comps, comp_of, rho


def _lex_max(pairs):
    best = pairs[0]
    for p in pairs[1:]:
        if bool(p[0] > best[0]) or (p[0] == best[0] and p[1] > best[1]):
            best = p
    return best


class _LimitInexact(Exception):
    pass


def _mat_vec(rows, vec):
    return [
        sum(Fraction(c) * v for c, v in zip(row, vec)) for row in rows
    ]


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _mat_pow(rows, power):
    n = len(rows)
    out = tuple(
        tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
    )
    for _ in range(power):
        out = _mat_mul(out, rows)
    return out


def _solve_vandermonde(kappa, rhs):
    """Coefficients of the degree < kappa polynomial through rhs at 0..k-1."""
    rows = [[Fraction(m) ** d for d in range(kappa)] for m in range(kappa)]
    aug = [row + [rhs[m]] for m, row in enumerate(rows)]
    for col in range(kappa):
        pivot = next(r for r in range(col, kappa) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(kappa):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [aug[d][kappa] for d in range(kappa)]


def _leading_direction(rows, seed):
    """Exact normalized limit direction of rows^m * seed, or raise.

    Divides the dominant root out of the characteristic polynomial, applies
    the cofactor to the sample sequence to silence every other eigenvalue,
    fits the surviving polynomial-in-m part from exact samples, and returns
    its top-degree coefficients normalized to sum one. Only rational
    dominant roots are handled exactly; anything else raises.
    """
    n = len(rows)
    x = sympy.Symbol("x")
    mat = sympy.Matrix([[int(c) for c in row] for row in rows])
    poly = sympy.Poly(mat.charpoly(x).as_expr(), x)
    real = poly.real_roots()
    if not real:
        raise _LimitInexact("no real eigenvalue")
    lam_root = real[-1]
    if not lam_root.is_rational:
        raise _LimitInexact("dominant growth rate is irrational")
    lam = Fraction(int(lam_root.p), int(lam_root.q))
    if lam <= 0:
        raise _LimitInexact("nonpositive dominant eigenvalue")
    coeffs = [Fraction(int(c)) for c in poly.all_coeffs()[::-1]]
    kappa = 0
    while True:
        quot = [Fraction(0)] * (len(coeffs) - 1)
        acc = Fraction(0)
        for i in range(len(coeffs) - 1, 0, -1):
            acc = coeffs[i] + acc * lam
            quot[i - 1] = acc
        rem = coeffs[0] + acc * lam
        if rem != 0:
            break
        coeffs = quot
        kappa += 1
    if kappa == 0:
        raise _LimitInexact("dominant root does not divide the polynomial")
    deg_q = len(coeffs) - 1
    samples = [[Fraction(v) for v in seed]]
    for _ in range(deg_q + kappa + 3):
        samples.append(_mat_vec(rows, samples[-1]))
    ys = []
    for m in range(kappa + 3):
        acc = [Fraction(0)] * n
        for i, qc in enumerate(coeffs):
            if qc:
                acc = [a + qc * s for a, s in zip(acc, samples[m + i])]
        ys.append(acc)
    fitted = []
    for i in range(n):
        rhs = [ys[m][i] / lam**m for m in range(kappa)]
        fitted.append(_solve_vandermonde(kappa, rhs))
    for m in range(kappa, kappa + 3):
        for i in range(n):
            value = sum(
                fitted[i][d] * Fraction(m) ** d for d in range(kappa)
            )
            if value * lam**m != ys[m][i]:
                raise _LimitInexact("sample fit failed; no single limit")
    top = kappa - 1
    while top >= 0 and all(fitted[i][top] == 0 for i in range(n)):
        top -= 1
    if top < 0:
        raise _LimitInexact("degenerate seed")
    vec = [fitted[i][top] for i in range(n)]
    total = sum(vec)
    if total == 0:
        raise _LimitInexact("direction sums to zero")
    vec = [v / total for v in vec]
    if any(v < 0 for v in vec):
        raise _LimitInexact("negative direction entry")
    image = _mat_vec(rows, vec)
    if any(w != lam * v for w, v in zip(image, vec)):
        raise _LimitInexact("direction is not an eigenvector")
    return lam, tuple(vec)


def _iteration_estimate(rows, iters=60):
    """Fallback: Fraction power iteration with eigenvalue bracket."""
    n = len(rows)
    v = [Fraction(1, n)] * n
    lo, hi = None, None
    for _ in range(iters):
        w = [
            sum(Fraction(rows[i][j]) * v[j] for j in range(n))
            for i in range(n)
        ]
        ratios = [w[i] / v[i] for i in range(n) if v[i] > 0]
        lo, hi = min(ratios), max(ratios)
        total = sum(w)
        v = [x / total for x in w]
    return tuple(v), (lo, hi)


@dataclass
class ReducibilityReport:
    reducible: bool
    edge_order: tuple
    matrix: tuple
    zero_edges: frozenset
    limit_direction: tuple | None
    exact: bool
    extreme_directions: tuple
    rho: object
    rho_bounds: tuple | None
    witness_from: int
    witness: tuple | None
    notes: tuple


def detect_reducible_periodic(script):
    """Zero-length analysis of the declared period's transfer matrix.

    The block matrix M writes lengths at the period start in terms of the
    next block's lengths through the stage correspondence. A coordinate is
    forced to zero in every length limit exactly when its growth pair
    (reached Perron root, chain degree) is lexicographically beaten; the
    script is reducible when that zero set is nonempty, and the per-stage
    zero sets form an invariant witness. The all-ones limit direction is
    computed exactly when a single direction exists; an oscillating block
    reports the exact subsequence directions instead.
    """
    period = _checked_period(script)
    if period is None:
        raise ValueError("script declares no period")
    start, length = period
    stages = run_script(script)
    iso = _period_correspondence(stages[-1].graph, stages[start].graph)
    if iso is None:
        raise FoldError(
            "declared period has no edge correspondence between its "
            "start and end stages"
        )
    order, rows = _transfer_rows(stages, start, length, iso)
    pairs, comps, comp_of, rho = _growth_pairs(rows)
    best = _lex_max(pairs)
    zero_idx = [
        i
        for i, p in enumerate(pairs)
        if not (p[0] == best[0] and p[1] == best[1])
    ]
    zero_edges = frozenset(order[i] for i in zero_idx)
    notes = []
    n = len(order)
    cyc = 1
    for c, comp in enumerate(comps):
        if rho[c] == best[0]:
            p = _scc_cyclicity(rows, comp)
            if p > 1:
                cyc = cyc * p // gcd(cyc, p)
    limit = None
    extremes = ()
    exact = False
    rho_bounds = None
    try:
        if cyc == 1:
            _, vec = _leading_direction(rows, [1] * n)
            limit = vec
            exact = True
        else:
            seen = []
            seed = [Fraction(1)] * n
            power = _mat_pow(rows, cyc)
            for _ in range(cyc):
                _, vec = _leading_direction(power, seed)
                if vec not in seen:
                    seen.append(vec)
                seed = _mat_vec(rows, seed)
            extremes = tuple(seen)
            exact = True
            if len(seen) == 1:
                limit = seen[0]
            else:
                notes.append(
                    "block oscillates; subsequence directions reported"
                )
    except _LimitInexact as err:
        notes.append(f"no exact limit: {err}")
        approx, rho_bounds = _iteration_estimate(rows)
        limit = approx
        exact = False
    witness = None
    if zero_edges:
        sets = [set(zero_edges)]
        for k in range(start + 1, start + length + 1):
            move = stages[k].move
            prev = sets[-1]
            cur = set()
            for eid in prev:
                if isinstance(move, Subdivide) and eid == move.edge:
                    cur.add(move.part1)
                    cur.add(move.part2)
                elif isinstance(move, (TypeI, TypeIII)) and eid in (
                    move.e1,
                    move.e2,
                ):
                    cur.add(move.e1)
                else:
                    cur.add(eid)
            sets.append(cur)
        translated = {iso["e"][eid] for eid in sets[-1]}
        if translated != set(zero_edges):
            notes.append("zero set is not block-invariant; witness dropped")
            witness = None
        else:
            witness = tuple(frozenset(s) for s in sets)
    rho_value = best[0]
    return ReducibilityReport(
        reducible=bool(zero_edges) and len(zero_edges) < len(order),
        edge_order=order,
        matrix=rows,
        zero_edges=zero_edges,
        limit_direction=limit,
        exact=exact,
        extreme_directions=extremes,
        rho=rho_value,
        rho_bounds=rho_bounds,
        witness_from=start,
        witness=witness,
        notes=tuple(notes),
    )


def check_reducibility_witness(script, sets, steps=None, from_stage=0):
    """Whether per-stage edge sets witness reducibility; (verdict, problems).

    Each set must be a nonempty proper subset of its stage's edges, every
    move must carry members to members (both parts of a subdivided member,
    the merged edge of a folded member, the edge itself otherwise), and
    when the covered range closes the declared period the translated final
    set must reproduce the set at the period start.
    """
    stages = run_script(script, steps)
    problems = []
    if from_stage < 0 or from_stage >= len(stages):
        return False, ("from_stage out of range",)
    if len(sets) != len(stages) - from_stage:
        return False, ("need one edge set per stage from the start stage on",)
    for off, claimed in enumerate(sets):
        k = from_stage + off
        edges = set(stages[k].graph.edges)
        claimed = set(claimed)
        if not claimed:
            problems.append(f"stage {k}: witness set is empty")
        if not claimed <= edges:
            problems.append(f"stage {k}: witness names missing edges")
        if claimed == edges:
            problems.append(f"stage {k}: witness set is not proper")
    if problems:
        return False, tuple(problems)
    for off in range(len(sets) - 1):
        k = from_stage + off
        move = stages[k + 1].move
        nxt = set(sets[off + 1])
        for eid in sets[off]:
            if isinstance(move, Subdivide) and eid == move.edge:
                missing = {move.part1, move.part2} - nxt
                if missing:
                    problems.append(
                        f"stage {k}: parts {sorted(missing)} of subdivided "
                        f"member {eid} escape the witness"
                    )
            elif isinstance(move, (TypeI, TypeIII)) and eid in (
                move.e1,
                move.e2,
            ):
                if move.e1 not in nxt:
                    problems.append(
                        f"stage {k}: merged image of member {eid} escapes "
                        "the witness"
                    )
            elif eid not in nxt:
                problems.append(
                    f"stage {k}: member {eid} escapes the witness"
                )
    period = _checked_period(script)
    if period is not None and not problems:
        start, length = period
        lo, hi = start - from_stage, start + length - from_stage
        if 0 <= lo and hi < len(sets):
            corr = _period_correspondence(
                stages[start + length].graph, stages[start].graph
            )
            if corr is not None:
                translated = {corr["e"][eid] for eid in sets[hi]}
                if translated != set(sets[lo]):
                    problems.append(
                        "translated period-end set differs from the "
                        "period-start set"
                    )
    return not problems, tuple(problems)


@dataclass
class LimitSample:
    """Ball points pushed down the stages, with per-stage distance traces."""

    points: tuple
    origin: int
    matrix: tuple
    traces: tuple


def limit_pseudometric(script, steps=None, base=None, radius=2):
    """Pairwise distance traces for a ball of stage-0 covering-tree points.

    The ball is centered at the lift of base (default: the basepoint).
    Every stage re-expresses the points in the folded tree and measures
    them with that stage's realized lengths, so each trace is a
    nonincreasing sequence whose last entry approximates the limit
    pseudometric.
    """
    stages = run_script(script, steps)
    lengths = _solve_for_stages(stages)
    g0 = stages[0].graph
    origin = g0.basepoint if base is None else base
    if origin not in g0.vertices:
        raise ValueError(f"base vertex {origin} is not in the initial graph")
    ball = expand_ball(g0, origin, radius)
    paths = [node.path for node in ball.nodes]
    start_origin = origin

    def matrix_at(stage_idx, cur_paths):
        layer = lengths.per_stage[stage_idx]
        out = []
        for p in cur_paths:
            row = tuple(
                path_distance(layer, p, q) for q in cur_paths
            )
            out.append(row)
        return tuple(out)

    matrices = [matrix_at(0, paths)]
    for k in range(1, len(stages)):
        origin, paths = push_points(
            stages[k - 1].graph,
            stages[k].graph,
            stages[k].move,
            origin,
            paths,
        )
        matrices.append(matrix_at(k, paths))
    n = len(paths)
    traces = tuple(
        tuple(tuple(m[i][j] for m in matrices) for j in range(n))
        for i in range(n)
    )
    return LimitSample(
        points=tuple(ball.nodes[i].path for i in range(n)),
        origin=start_origin,
        matrix=matrices[-1],
        traces=traces,
    )


def verify_four_point(matrix):
    """Tree-likeness of a pseudometric: the two largest pair sums agree.

    Accepts a LimitSample or a square matrix. Raises ValueError when the
    input is not a pseudometric; returns (True, None) or (False, witness
    quadruple).
    """
    if isinstance(matrix, LimitSample):
        matrix = matrix.matrix
    n = len(matrix)
    for i in range(n):
        if len(matrix[i]) != n:
            raise ValueError("matrix is not square")
        if matrix[i][i] != 0:
            raise ValueError(f"nonzero diagonal at {i}")
        for j in range(n):
            if matrix[i][j] != matrix[j][i]:
                raise ValueError(f"asymmetry at ({i}, {j})")
            if matrix[i][j] < 0:
                raise ValueError(f"negative distance at ({i}, {j})")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if matrix[i][j] > matrix[i][k] + matrix[k][j]:
                    raise ValueError(
                        f"triangle inequality fails at ({i}, {j}, {k})"
                    )
    for quad in itertools.combinations(range(n), 4):
        i, j, k, l = quad
        sums = sorted(
            (
                matrix[i][j] + matrix[k][l],
                matrix[i][k] + matrix[j][l],
                matrix[i][l] + matrix[j][k],
            )
        )
        if sums[2] != sums[1]:
            return False, quad
    return True, None

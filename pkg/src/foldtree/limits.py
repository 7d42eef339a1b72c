"""Pushing covering-tree points through elementary moves.

A point of the covering tree is a reduced step path from a chosen origin
lift, in the same (edge id, is_fwd, coset rep) encoding that ball expansion
uses. Each elementary move induces a surjection of covering trees; this
module re-expresses a path as the canonical reduced path of its image,
relative to the image of the origin.

The walk keeps three pieces of running state. gamma is the accumulated
right deviation between the canonical new tag and the translated old tag.
m_cur is the tag translation of the current old vertex lift (folds move
some lifts by a fixed element, e.g. the merged far vertex of a two-edge
fold travels by align^-1). Each old step contributes A = m_cur^-1 * c *
f_old * m_next; writing D = gamma * A * f_new^-1, the new rep is the
canonical coset representative of D and the conjugated remainder feeds the
next step. A step whose D lies in the direction subgroup returns to the
parent lift, so it cancels the top of the output stack instead of being
emitted; that is how folds shorten paths.

The translation m_next of the target lift is forced up to a right factor
inside the target vertex label. Candidates are tried in order of the
derived exact value first, then coset-equal adjustments; a candidate is
usable only when its D lands in the current vertex label, which every
coset-equal candidate that is usable at all resolves to the same node.
"""

from __future__ import annotations

from .groups import Permutation
from .moves import Subdivide, TypeI, TypeII, TypeIII


def _factor(edge, is_fwd):
    return edge.hol.inverse() if is_fwd else edge.hol


def _direction_sub(edge, is_fwd):
    return edge.label if is_fwd else edge.label.conjugate(edge.hol)


def _target(edge, is_fwd):
    return edge.tau if is_fwd else edge.iota


class PushError(ValueError):
    pass


class _Rules:
    """Per-move step translation. Identity behavior; folds override."""

    def __init__(self, g_old, g_new, move):
        self.g_old = g_old
        self.g_new = g_new
        self.move = move

    def vertex_image(self, w):
        return w

    def origin_translation(self, w):
        return Permutation.identity(self.g_old.degree)

    def chains(self, w, eid, is_fwd, c, m_cur):
        """Candidate substep chains for one old step taken from vertex w.

        Each candidate is (substeps, m_next) with substeps a list of
        (new_eid, new_dir, A).
        """
        e = self.g_old.edges[eid]
        ident = Permutation.identity(self.g_old.degree)
        a_tot = m_cur.inverse() * c * _factor(e, is_fwd) * ident
        return [([(eid, is_fwd, a_tot)], ident)]


class _SubdivideRules(_Rules):
    def chains(self, w, eid, is_fwd, c, m_cur):
        mv = self.move
        if eid != mv.edge:
            return super().chains(w, eid, is_fwd, c, m_cur)
        e = self.g_old.edges[eid]
        ident = Permutation.identity(self.g_old.degree)
        if is_fwd:
            steps = [(mv.part1, True, c), (mv.part2, True, e.hol.inverse())]
        else:
            steps = [(mv.part2, False, c * e.hol), (mv.part1, False, ident)]
        return [(steps, ident)]


class _TypeIIRules(_Rules):
    pass


def _with_adjusters(g_new, preferred, adjusters, landing_label):
    """preferred first, then coset-equal right adjustments that stay legal."""
    out = [preferred]
    for r in adjusters:
        if r in landing_label:
            cand = preferred * r
            if cand not in out:
                out.append(cand)
    return out


class _TypeIRules(_Rules):
    def __init__(self, g_old, g_new, move):
        super().__init__(g_old, g_new, move)
        e1 = g_old.edges[move.e1]
        e2 = g_old.edges[move.e2]
        self.pivot = move.pivot
        self.x = e1.other_end(move.pivot)
        self.y = e2.other_end(move.pivot)
        self.a = move.align
        self.a_inv = move.align.inverse()
        self.e1_from_pivot_fwd = e1.iota == move.pivot

    def vertex_image(self, w):
        return self.x if w == self.y else w

    def origin_translation(self, w):
        if w == self.y:
            return self.a_inv
        return Permutation.identity(self.g_old.degree)

    def _m_candidates(self, w2):
        img_label = self.g_new.vertices[self.vertex_image(w2)]
        if w2 == self.y:
            preferred = self.a_inv
        elif w2 == self.pivot:
            preferred = self.a_inv
        else:
            preferred = Permutation.identity(self.g_old.degree)
        return _with_adjusters(
            self.g_new, preferred, (self.a, self.a_inv), img_label
        )

    def chains(self, w, eid, is_fwd, c, m_cur):
        mv = self.move
        e = self.g_old.edges[eid]
        w2 = _target(e, is_fwd)
        f_old = _factor(e, is_fwd)
        if eid == mv.e2:
            new_eid = mv.e1
            if w == self.pivot:
                new_dir = self.e1_from_pivot_fwd
            else:
                new_dir = not self.e1_from_pivot_fwd
        else:
            new_eid = eid
            new_dir = is_fwd
        out = []
        for m_next in self._m_candidates(w2):
            a_tot = m_cur.inverse() * c * f_old * m_next
            out.append(([(new_eid, new_dir, a_tot)], m_next))
        return out


class _TypeIIIRules(_Rules):
    def __init__(self, g_old, g_new, move):
        super().__init__(g_old, g_new, move)
        e1 = g_old.edges[move.e1]
        e2 = g_old.edges[move.e2]
        self.pivot = e1.iota
        self.far = e1.tau
        self.a = move.align
        if e2.iota == self.pivot and not e2.is_loop():
            self.m2 = e2.hol.inverse()
        elif e2.is_loop():
            self.m2 = e2.hol.inverse()
        else:
            self.m2 = e2.hol
        self.gain = e1.hol * move.align * self.m2
        self.gain_inv = self.gain.inverse()

    def _pivot_side(self, eid, is_fwd):
        e2 = self.g_old.edges[eid]
        if e2.is_loop():
            return is_fwd
        return (is_fwd and e2.iota == self.pivot) or (
            not is_fwd and e2.tau == self.pivot
        )

    def _m_candidates(self, preferred, w2):
        img_label = self.g_new.vertices[w2]
        return _with_adjusters(
            self.g_new,
            preferred,
            (self.a, self.a.inverse(), self.gain, self.gain_inv),
            img_label,
        )

    def chains(self, w, eid, is_fwd, c, m_cur):
        mv = self.move
        e = self.g_old.edges[eid]
        w2 = _target(e, is_fwd)
        f_old = _factor(e, is_fwd)
        ident = Permutation.identity(self.g_old.degree)
        if eid != mv.e2:
            preferred = ident
            new_eid, new_dir = eid, is_fwd
        elif self._pivot_side(eid, is_fwd):
            preferred = self.gain_inv
            new_eid, new_dir = mv.e1, True
        else:
            preferred = self.a.inverse()
            new_eid, new_dir = mv.e1, False
        out = []
        for m_next in self._m_candidates(preferred, w2):
            a_tot = m_cur.inverse() * c * f_old * m_next
            out.append(([(new_eid, new_dir, a_tot)], m_next))
        return out


def _rules_for(g_old, g_new, move):
    if isinstance(move, Subdivide):
        return _SubdivideRules(g_old, g_new, move)
    if isinstance(move, TypeI):
        return _TypeIRules(g_old, g_new, move)
    if isinstance(move, TypeII):
        return _TypeIIRules(g_old, g_new, move)
    if isinstance(move, TypeIII):
        return _TypeIIIRules(g_old, g_new, move)
    raise PushError(f"unknown move {move!r}")


def pushed_origin(g_old, move, origin):
    return _rules_for(g_old, None, move).vertex_image(origin)


def push_path(g_old, g_new, move, origin, steps):
    """Canonical reduced path of the image point, from the image origin."""
    if origin not in g_old.vertices:
        raise PushError(f"origin vertex {origin} does not exist")
    rules = _rules_for(g_old, g_new, move)
    gamma = Permutation.identity(g_old.degree)
    m_cur = rules.origin_translation(origin)
    cur_old = origin
    cur_new = rules.vertex_image(origin)
    out = []
    from_stack = []
    for eid, is_fwd, c in steps:
        if eid not in g_old.edges:
            raise PushError(f"step over missing edge {eid}")
        e_old = g_old.edges[eid]
        if cur_old not in (e_old.iota, e_old.tau):
            raise PushError(f"step over edge {eid} does not start at {cur_old}")
        placed = None
        for substeps, m_next in rules.chains(cur_old, eid, is_fwd, c, m_cur):
            state = (gamma, cur_new, list(out), list(from_stack))
            ok = True
            for new_eid, new_dir, a_part in substeps:
                e_new = g_new.edges[new_eid]
                f_hat = _factor(e_new, new_dir)
                d = state[0] * a_part * f_hat.inverse()
                here = g_new.vertices[state[1]]
                if d not in here:
                    ok = False
                    break
                eps = _direction_sub(e_new, new_dir)
                stack, vstack = state[2], state[3]
                if (
                    stack
                    and stack[-1][0] == new_eid
                    and stack[-1][1] != new_dir
                    and d in eps
                ):
                    prev_eid, prev_dir, prev_rep = stack.pop()
                    prev_f = _factor(g_new.edges[prev_eid], prev_dir)
                    new_gamma = prev_rep * prev_f * d * f_hat
                    new_cur = vstack.pop()
                else:
                    rep = eps.coset_rep(d)
                    new_gamma = f_hat.inverse() * (rep.inverse() * d) * f_hat
                    stack.append((new_eid, new_dir, rep))
                    vstack.append(state[1])
                    new_cur = _target(e_new, new_dir)
                state = (new_gamma, new_cur, stack, vstack)
            if ok:
                placed = state
                m_cur = m_next
                break
        if placed is None:
            raise PushError(
                f"no translation placed the step over edge {eid} "
                f"from vertex {cur_old}"
            )
        gamma, cur_new, out, from_stack = placed
        cur_old = _target(e_old, is_fwd)
    return cur_new, tuple(out)


def push_points(g_old, g_new, move, origin, paths):
    """Push many paths sharing one origin. Returns (new origin, new paths)."""
    new_origin = pushed_origin(g_old, move, origin)
    pushed = []
    for steps in paths:
        cur, new_steps = push_path(g_old, g_new, move, origin, steps)
        pushed.append(new_steps)
    return new_origin, pushed


def path_tag(g, origin, steps):
    """Tag permutation of the lift the path reaches, origin lift tagged 1."""
    tag = Permutation.identity(g.degree)
    cur = origin
    for eid, is_fwd, c in steps:
        e = g.edges[eid]
        tag = tag * c * _factor(e, is_fwd)
        cur = _target(e, is_fwd)
    return cur, tag


def path_distance(lengths, p_steps, q_steps):
    """Tree distance between two paths from one origin, by edge lengths."""
    k = 0
    while k < len(p_steps) and k < len(q_steps) and p_steps[k] == q_steps[k]:
        k += 1
    total = 0
    for eid, _, _ in p_steps[k:]:
        total += lengths[eid]
    for eid, _, _ in q_steps[k:]:
        total += lengths[eid]
    return total

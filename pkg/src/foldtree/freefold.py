"""Trivial-edge-label specialization: wedges of loops and a filtered search.

A wedge is one trivially labeled vertex with one trivially labeled loop per
generator image; it realizes a free group mapping onto whatever the images
generate. With every edge label trivial, eta equals the reduced quotient's
edge count, so a fold search from a wedge bounds the edge orbits of any
target decomposition by the wedge rank. grushko_fold performs that search
while requiring each fold's induced operation on reduced quotients to stay
in the plain fold classes; subdivisions induce nothing and pass freely.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import permutations

from .canon import canonical_form
from .forest import find_compressing_forest, is_reduced, reduce_graph
from .graphs import MarkedGraphOfGroups, fundamental_image, normalize_holonomies
from .groups import PermGroup
from .induced import PLAIN_FOLD_CLASSES, classify_induced_fold
from .moves import (
    FoldError,
    FoldScript,
    Subdivide,
    apply_move,
    search_children,
)


@dataclass(frozen=True)
class WedgeSpec:
    """rank-many loop images; rank is the free rank being realized."""

    rank: int
    images: tuple

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be a positive integer")
        if len(self.images) != self.rank:
            raise ValueError("need exactly rank images")


def wedge_gog(ambient, spec):
    """One trivially labeled vertex carrying one trivially labeled loop per
    image; loop i's holonomy is images[i]. The fundamental image is the
    subgroup the images generate."""
    degree = ambient.degree
    for p in spec.images:
        if p.degree != degree:
            raise ValueError(
                f"image degree {p.degree} does not match ambient degree {degree}"
            )
        if p not in ambient:
            raise ValueError(f"image {p} lies outside the ambient group")
    g = MarkedGraphOfGroups(degree)
    trivial = PermGroup.trivial(degree)
    g.add_vertex(0, trivial)
    for i, p in enumerate(spec.images):
        g.add_edge(i, 0, 0, trivial, p)
    g.require_valid()
    return g


def edge_orbit_bound_check(g, d):
    """True iff the reduced quotient has at most d edges.

    Demands trivial edge labels: with them, eta is exactly the reduced
    edge count, which is what the bound controls."""
    g.require_valid()
    if d < 1:
        raise ValueError("d must be a positive integer")
    for eid in sorted(g.edges):
        if not g.edges[eid].label.is_trivial():
            raise ValueError(f"edge {eid} has a nontrivial label")
    reduced, _ = reduce_graph(g)
    return len(reduced.edges) <= d


def _require_wedge(w):
    w.require_valid()
    if len(w.vertices) != 1:
        raise ValueError("a wedge has exactly one vertex")
    vid = next(iter(w.vertices))
    if not w.vertices[vid].is_trivial():
        raise ValueError("the wedge vertex label must be trivial")
    for eid in sorted(w.edges):
        e = w.edges[eid]
        if not e.is_loop():
            raise ValueError(f"wedge edge {eid} is not a loop")
        if not e.label.is_trivial():
            raise ValueError(f"wedge edge {eid} has a nontrivial label")


def _require_plain_target(target):
    target.require_valid()
    for eid in sorted(target.edges):
        if not target.edges[eid].label.is_trivial():
            raise ValueError(f"target edge {eid} has a nontrivial label")
    reduced, witness = is_reduced(target)
    if not reduced:
        raise ValueError(f"target is not reduced: edge {witness} compresses")


def quotient_onto_target(g, target):
    """A graph bijection g -> target matching incidence, with every vertex
    label contained in the target's label, or None. Holonomies and the
    basepoint are not compared; edge labels must be trivial on both sides."""
    if len(g.vertices) != len(target.vertices) or len(g.edges) != len(target.edges):
        return None
    gv = sorted(g.vertices)
    for image in permutations(sorted(target.vertices)):
        vmap = dict(zip(gv, image))
        if any(not g.vertices[v] <= target.vertices[vmap[v]] for v in gv):
            continue
        need = {}
        for eid in sorted(target.edges):
            e = target.edges[eid]
            pair = frozenset((e.iota, e.tau))
            need[pair] = need.get(pair, 0) + 1
        for eid in sorted(g.edges):
            e = g.edges[eid]
            pair = frozenset((vmap[e.iota], vmap[e.tau]))
            if need.get(pair, 0) == 0:
                break
            need[pair] -= 1
        else:
            return vmap
    return None


def grushko_fold(w, target, max_moves=8, max_states=4000):
    """Search for a script from the wedge whose reduced quotient maps onto
    the target, using only folds whose induced operations are plain.

    Returns (script, reduced quotient of the endpoint). The endpoint's
    reduced edge count is asserted against the wedge rank. Raises
    FoldError when the bounded search exhausts; that is not a disproof.
    """
    _require_wedge(w)
    _require_plain_target(target)
    d = len(w.edges)
    if fundamental_image(w) != fundamental_image(normalize_holonomies(target)[0]):
        raise ValueError("wedge and target have different fundamental images")

    def finish(g, trail):
        reduced, _ = reduce_graph(g)
        assert len(reduced.edges) <= d, "reduced endpoint exceeds the rank bound"
        return FoldScript(w.copy(), trail), reduced

    def matches(g):
        reduced, _ = reduce_graph(g)
        return quotient_onto_target(reduced, target) is not None

    if matches(w):
        return finish(w, ())
    seen = {canonical_form(w)}
    queue = deque([(w.copy(), ())])
    explored = 1
    while queue:
        g, trail = queue.popleft()
        if len(trail) >= max_moves:
            continue
        forest = find_compressing_forest(g)
        for move in search_children(g):
            if not isinstance(move, Subdivide):
                try:
                    report = classify_induced_fold(g, forest, move)
                except FoldError:
                    continue
                if report.classification not in PLAIN_FOLD_CLASSES:
                    continue
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
            if matches(nxt):
                return finish(nxt, grown)
            if explored >= max_states:
                raise FoldError(
                    f"search exhausted after {explored} graphs without an answer"
                )
            queue.append((nxt, grown))
    raise FoldError(
        f"search exhausted after {explored} graphs without an answer"
    )

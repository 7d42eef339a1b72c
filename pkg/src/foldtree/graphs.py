"""Marked graphs of finite groups over a fixed ambient symmetric group.

A graph here is a finite connected graph with a distinguished base vertex.
Every vertex carries a subgroup of Sym(n) and every edge carries a subgroup
E of its iota-endpoint label together with a holonomy permutation t with
t E t^-1 inside the tau-endpoint label. Vertex inclusions are literal
subgroup inclusions inside the ambient group, so joins and conjugations are
computed directly on permutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import PermGroup, Permutation


@dataclass(frozen=True)
class Edge:
    id: int
    iota: int
    tau: int
    label: PermGroup
    hol: Permutation

    def is_loop(self):
        return self.iota == self.tau

    def label_at(self, is_iota):
        """Label seen from one end: E at iota, t E t^-1 at tau."""
        return self.label if is_iota else self.label.conjugate(self.hol)

    def other_end(self, v):
        if v == self.iota:
            return self.tau
        if v == self.tau:
            return self.iota
        raise ValueError(f"vertex {v} is not an endpoint of edge {self.id}")


class MarkedGraphOfGroups:
    """Finite connected graph with subgroup labels and holonomies."""

    def __init__(self, degree):
        degree = int(degree)
        if degree < 1:
            raise ValueError("ambient degree must be >= 1")
        self.degree = degree
        self.vertices = {}
        self.edges = {}
        self.basepoint = None
        self._ambient = None

    def ambient(self):
        if self._ambient is None:
            self._ambient = PermGroup.symmetric(self.degree)
        return self._ambient

    def copy(self):
        g = MarkedGraphOfGroups(self.degree)
        g.vertices = dict(self.vertices)
        g.edges = dict(self.edges)
        g.basepoint = self.basepoint
        return g

    def add_vertex(self, vid, label):
        vid = int(vid)
        if vid in self.vertices:
            raise ValueError(f"duplicate vertex id {vid}")
        if label.degree != self.degree:
            raise ValueError(f"vertex {vid}: label degree {label.degree} != {self.degree}")
        self.vertices[vid] = label
        if self.basepoint is None:
            self.basepoint = vid
        return vid

    def add_edge(self, eid, iota, tau, label, hol=None):
        eid = int(eid)
        if eid in self.edges:
            raise ValueError(f"duplicate edge id {eid}")
        if hol is None:
            hol = Permutation.identity(self.degree)
        self.edges[eid] = Edge(eid, int(iota), int(tau), label, hol)
        return eid

    def fresh_vertex_id(self):
        return max(self.vertices, default=-1) + 1

    def fresh_edge_id(self):
        return max(self.edges, default=-1) + 1

    def ends_at(self, v):
        """(edge, is_iota) pairs at v in ascending edge id; loops appear twice."""
        out = []
        for eid in sorted(self.edges):
            e = self.edges[eid]
            if e.iota == v:
                out.append((e, True))
            if e.tau == v:
                out.append((e, False))
        return out

    def valence(self, v):
        return len(self.ends_at(v))

    def is_connected(self):
        if not self.vertices:
            return False
        start = min(self.vertices)
        seen = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for e, is_iota in self.ends_at(v):
                w = e.tau if is_iota else e.iota
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == len(self.vertices)

    def validate(self):
        """List of structural problems; empty means the graph is well formed."""
        problems = []
        if not self.vertices:
            problems.append("graph has no vertices")
            return problems
        if self.basepoint not in self.vertices:
            problems.append(f"basepoint {self.basepoint} is not a vertex")
        for vid, label in self.vertices.items():
            if label.degree != self.degree:
                problems.append(f"vertex {vid}: label degree {label.degree} != {self.degree}")
        for eid, e in sorted(self.edges.items()):
            if e.id != eid:
                problems.append(f"edge {eid}: stored id {e.id} disagrees")
            if e.iota not in self.vertices or e.tau not in self.vertices:
                problems.append(f"edge {eid}: endpoint missing")
                continue
            if e.label.degree != self.degree or e.hol.degree != self.degree:
                problems.append(f"edge {eid}: degree mismatch")
                continue
            if not e.label <= self.vertices[e.iota]:
                problems.append(f"edge {eid}: label not contained in vertex {e.iota} label")
            if not e.label.conjugate(e.hol) <= self.vertices[e.tau]:
                problems.append(
                    f"edge {eid}: holonomy-conjugated label not contained in vertex {e.tau} label"
                )
        if not problems and not self.is_connected():
            problems.append("graph is not connected")
        return problems

    def require_valid(self):
        problems = self.validate()
        if problems:
            raise ValueError("invalid graph: " + "; ".join(problems))

    def equals(self, other):
        """Structural equality: same ids, labels, holonomies, basepoint."""
        return (
            isinstance(other, MarkedGraphOfGroups)
            and self.degree == other.degree
            and self.basepoint == other.basepoint
            and self.vertices == other.vertices
            and self.edges == other.edges
        )


def spanning_tree(g):
    """BFS tree from the basepoint.

    Returns (parent, order): parent maps vertex -> (parent vertex, edge,
    is_iota_to_tau) with the basepoint mapping to None, and order lists the
    vertices in discovery order. is_iota_to_tau is True when the tree crosses
    the edge from iota to tau. Deterministic: vertices and edges in id order.
    """
    parent = {g.basepoint: None}
    order = [g.basepoint]
    frontier = [g.basepoint]
    while frontier:
        frontier.sort()
        v = frontier.pop(0)
        for e, is_iota in g.ends_at(v):
            w = e.tau if is_iota else e.iota
            if w not in parent:
                parent[w] = (v, e, is_iota)
                order.append(w)
                frontier.append(w)
    if len(parent) != len(g.vertices):
        raise ValueError("graph is not connected")
    return parent, order


def normalize_holonomies(g):
    """Conjugate labels so every BFS spanning-tree edge has identity holonomy.

    Returns (new graph, gauge) where gauge maps each vertex v to the
    permutation u_v used to move its label: labels become u V u^-1, edge
    labels u_iota E u_iota^-1, holonomies u_tau t u_iota^-1.
    """
    g.require_valid()
    parent, order = spanning_tree(g)
    gauge = {g.basepoint: Permutation.identity(g.degree)}
    for v in order[1:]:
        p, e, fwd = parent[v]
        gauge[v] = gauge[p] * e.hol.inverse() if fwd else gauge[p] * e.hol
    out = MarkedGraphOfGroups(g.degree)
    for vid in sorted(g.vertices):
        u = gauge[vid]
        out.add_vertex(vid, g.vertices[vid].conjugate(u))
    out.basepoint = g.basepoint
    for eid in sorted(g.edges):
        e = g.edges[eid]
        label = e.label.conjugate(gauge[e.iota])
        hol = gauge[e.tau] * e.hol * gauge[e.iota].inverse()
        out.add_edge(eid, e.iota, e.tau, label, hol)
    return out, gauge


def has_identity_spanning_tree(g):
    """Whether the identity-holonomy edges already span the graph."""
    if not g.vertices:
        return False
    start = g.basepoint
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for e, is_iota in g.ends_at(v):
            if not e.hol.is_identity():
                continue
            w = e.tau if is_iota else e.iota
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen) == len(g.vertices)


def fundamental_image(g):
    """Subgroup generated by all vertex labels and all holonomies.

    Matches the image of the marking only when the graph is holonomy
    normalized; keep graphs normalized before comparing images.
    """
    gens = []
    for vid in sorted(g.vertices):
        gens.extend(g.vertices[vid].generators)
    for eid in sorted(g.edges):
        gens.append(g.edges[eid].hol)
    return PermGroup(g.degree, gens)


def eta(g):
    """Sum of reciprocal edge-label orders over the reduced quotient."""
    from . import forest

    reduced, _ = forest.reduce_graph(g)
    total = Fraction(0)
    for e in reduced.edges.values():
        total += Fraction(1, e.label.order())
    return total


def first_betti(g):
    """Cycle rank of the underlying connected graph."""
    return len(g.edges) - len(g.vertices) + 1


def check_minimal(g):
    """(True, None) if no valence-1 vertex is prunable, else (False, witness).

    A valence-1 vertex is prunable when its label equals its one incident
    edge's label transported to that end. The basepoint is not exempt.
    """
    g.require_valid()
    for vid in sorted(g.vertices):
        ends = g.ends_at(vid)
        if len(ends) != 1:
            continue
        e, is_iota = ends[0]
        if e.label_at(is_iota) == g.vertices[vid]:
            return False, vid
    return True, None

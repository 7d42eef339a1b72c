"""Radius-r balls of the covering tree of a marked graph of groups.

Tree vertices are reduced edge-coset paths from a base lift: at a node over
quotient vertex v, each edge e with iota(e) = v contributes one forward
branch per left coset of E in V, and each edge with tau(e) = v one backward
branch per left coset of tEt^-1 in V; the branch whose coset contains the
identity in the direction reversing the arrival step returns to the parent
and is skipped. Every node carries a tag permutation locating its stabilizer
inside the ambient group: the root has tag 1, a forward child of a node
tagged h via coset rep c has tag h*c*t^-1, a backward child h*c*t. The node
stabilizer is the tag-conjugated vertex label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groups import Permutation

BALL_CAP = 100000


@dataclass
class BallNode:
    index: int
    vertex: int
    tag: Permutation
    depth: int
    parent: int | None
    step: tuple | None
    path: tuple
    children: list = field(default_factory=list)


class BallTree:
    def __init__(self, graph, base, radius, nodes):
        self.graph = graph
        self.base = base
        self.radius = radius
        self.nodes = nodes

    @property
    def root(self):
        return self.nodes[0]

    def stab(self, node):
        return self.graph.vertices[node.vertex].conjugate(node.tag)

    def paths(self):
        """Map from step path to node; node identity in comparisons."""
        return {node.path: node for node in self.nodes}

    def degree(self, node):
        return len(node.children) + (0 if node.parent is None else 1)

    def nodes_at_depth(self, depth):
        return [n for n in self.nodes if n.depth == depth]


def _directions(g, v):
    """(edge id, is_fwd, coset subgroup, target vertex, tag factor) at v."""
    out = []
    for eid in sorted(g.edges):
        e = g.edges[eid]
        if e.iota == v:
            out.append((eid, True, e.label, e.tau, e.hol.inverse()))
        if e.tau == v:
            out.append((eid, False, e.label.conjugate(e.hol), e.iota, e.hol))
    return out


def expand_ball(g, base, radius, cap=BALL_CAP):
    """Breadth-first ball of the covering tree, deterministic node order."""
    g.require_valid()
    if base not in g.vertices:
        raise ValueError(f"base vertex {base} does not exist")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    root = BallNode(
        index=0,
        vertex=base,
        tag=Permutation.identity(g.degree),
        depth=0,
        parent=None,
        step=None,
        path=(),
    )
    nodes = [root]
    queue = [0]
    while queue:
        idx = queue.pop(0)
        node = nodes[idx]
        if node.depth == radius:
            continue
        here = g.vertices[node.vertex]
        for eid, is_fwd, sub, target, factor in _directions(g, node.vertex):
            reps = sub.coset_reps_in(here)
            for c in reps:
                if (
                    node.step is not None
                    and node.step[0] == eid
                    and node.step[1] != is_fwd
                    and c in sub
                ):
                    continue
                child = BallNode(
                    index=len(nodes),
                    vertex=target,
                    tag=node.tag * c * factor,
                    depth=node.depth + 1,
                    parent=idx,
                    step=(eid, is_fwd, c),
                    path=node.path + ((eid, is_fwd, c),),
                )
                if len(nodes) >= cap:
                    raise ValueError(f"ball size exceeds cap {cap}")
                nodes.append(child)
                node.children.append(child.index)
                queue.append(child.index)
    return BallTree(g, base, radius, nodes)

"""Canonical forms and label-preserving isomorphism for marked graphs.

Isomorphism here means a graph isomorphism carrying every vertex and edge
label to a literally equal subgroup and every holonomy to an equal
permutation, where an edge may be flipped (label conjugated by the holonomy,
holonomy inverted). Basepoints are ignored. Graphs are desk scale, so vertex
orderings are brute forced inside invariant classes.
"""

from __future__ import annotations

import itertools


def _label_key(group):
    return tuple(p.images for p in group.sorted_elements())


def _edge_key(pos_iota, pos_tau, label, hol):
    fwd = (pos_iota, pos_tau, _label_key(label), hol.images)
    bwd = (
        pos_tau,
        pos_iota,
        _label_key(label.conjugate(hol)),
        hol.inverse().images,
    )
    return min(fwd, bwd)


def _vertex_invariant(g, v, label_keys):
    sigs = []
    for e, is_iota in g.ends_at(v):
        far = e.tau if is_iota else e.iota
        sigs.append(
            (
                _label_key(e.label_at(is_iota)),
                label_keys[far],
                e.is_loop(),
            )
        )
    return (label_keys[v], tuple(sorted(sigs)))


def _invariant_blocks(g):
    label_keys = {v: _label_key(g.vertices[v]) for v in g.vertices}
    inv = {v: _vertex_invariant(g, v, label_keys) for v in g.vertices}
    blocks = {}
    for v in sorted(g.vertices):
        blocks.setdefault(inv[v], []).append(v)
    return inv, [blocks[k] for k in sorted(blocks)]


def _orders(blocks):
    for arrangement in itertools.product(
        *(itertools.permutations(b) for b in blocks)
    ):
        yield [v for block in arrangement for v in block]


def canonical_form(g):
    """Hashable value equal across isomorphic graphs, distinct otherwise."""
    inv, blocks = _invariant_blocks(g)
    best = None
    head = None
    for order in _orders(blocks):
        if head is None:
            head = (
                g.degree,
                len(order),
                tuple(inv[v] for v in order),
            )
        pos = {v: i for i, v in enumerate(order)}
        edge_part = tuple(
            sorted(
                _edge_key(pos[e.iota], pos[e.tau], e.label, e.hol)
                for e in g.edges.values()
            )
        )
        if best is None or edge_part < best:
            best = edge_part
    return head + (best,)


def _edge_signature(e, vmap):
    return _edge_key(vmap[e.iota], vmap[e.tau], e.label, e.hol)


def find_isomorphism(g1, g2):
    """(vertex_map, edge_map) from g1 onto g2, or None.

    Deterministic: the first match in block-permutation order wins, edges
    matched in ascending g1 id against ascending g2 candidates.
    """
    if g1.degree != g2.degree:
        return None
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return None
    inv1, blocks1 = _invariant_blocks(g1)
    inv2, _ = _invariant_blocks(g2)
    by_inv2 = {}
    for v in sorted(g2.vertices):
        by_inv2.setdefault(inv2[v], []).append(v)
    targets = []
    for block in blocks1:
        key = inv1[block[0]]
        if key not in by_inv2 or len(by_inv2[key]) != len(block):
            return None
        targets.append(by_inv2[key])
    for arrangement in itertools.product(
        *(itertools.permutations(t) for t in targets)
    ):
        vmap = {}
        for block, image in zip(blocks1, arrangement):
            for src, dst in zip(block, image):
                vmap[src] = dst
        pool = {}
        for eid in sorted(g2.edges):
            e = g2.edges[eid]
            pool.setdefault(
                _edge_key(e.iota, e.tau, e.label, e.hol), []
            ).append(eid)
        emap = {}
        ok = True
        for eid in sorted(g1.edges):
            e = g1.edges[eid]
            key = _edge_signature(e, vmap)
            bucket = pool.get(key)
            if not bucket:
                ok = False
                break
            emap[eid] = bucket.pop(0)
        if ok:
            return vmap, emap
    return None


def are_isomorphic(g1, g2):
    return find_isomorphism(g1, g2) is not None

"""Shared builders for test fixtures."""

import random

from foldtree.graphs import MarkedGraphOfGroups
from foldtree.groups import PermGroup, Permutation


def perm(text, n):
    return Permutation.parse(text, n)


def grp(texts, n):
    return PermGroup(n, [perm(t, n) for t in texts])


def s4_subgroup_pool():
    n = 4
    return [
        grp([], n),
        grp(["(12)"], n),
        grp(["(13)"], n),
        grp(["(14)"], n),
        grp(["(23)"], n),
        grp(["(24)"], n),
        grp(["(34)"], n),
        grp(["(12)(34)"], n),
        grp(["(123)"], n),
        grp(["(124)"], n),
        grp(["(12)", "(34)"], n),
        grp(["(12)(34)", "(13)(24)"], n),
        grp(["(1234)"], n),
        grp(["(12)", "(123)"], n),
        grp(["(12)", "(1324)"], n),
        grp(["(123)", "(12)(34)"], n),
        PermGroup.symmetric(n),
    ]


def s5_subgroup_pool():
    n = 5
    return [
        grp([], n),
        grp(["(12)"], n),
        grp(["(45)"], n),
        grp(["(123)"], n),
        grp(["(12345)"], n),
        grp(["(12)", "(34)"], n),
        grp(["(12)", "(123)"], n),
        grp(["(1234)", "(13)"], n),
        grp(["(123)", "(345)"], n),
        PermGroup.symmetric(n),
    ]


def _random_edge_data(rng, g, u, v, pool, ambient, allow_holonomy):
    labels = [E for E in pool if E <= g.vertices[u]]
    rng.shuffle(labels)
    for E in labels:
        if allow_holonomy:
            hols = [h for h in ambient if E.conjugate(h) <= g.vertices[v]]
            if hols:
                return E, rng.choice(hols)
        elif E <= g.vertices[v]:
            return E, Permutation.identity(g.degree)
    trivial = PermGroup.trivial(g.degree)
    hol = rng.choice(ambient) if allow_holonomy else Permutation.identity(g.degree)
    return trivial, hol


def random_graph(rng, degree=4, max_vertices=4, max_extra_edges=2, allow_holonomy=True):
    """Small random valid connected graph."""
    if degree == 4:
        pool = s4_subgroup_pool()
    elif degree == 5:
        pool = s5_subgroup_pool()
    else:
        pool = [PermGroup.trivial(degree), PermGroup.symmetric(degree)]
    ambient = PermGroup.symmetric(degree).sorted_elements()
    g = MarkedGraphOfGroups(degree)
    nv = rng.randint(1, max_vertices)
    for v in range(nv):
        g.add_vertex(v, rng.choice(pool))
    eid = 0
    for v in range(1, nv):
        u = rng.randrange(v)
        label, hol = _random_edge_data(rng, g, u, v, pool, ambient, allow_holonomy)
        g.add_edge(eid, u, v, label, hol)
        eid += 1
    for _ in range(rng.randint(0, max_extra_edges)):
        u = rng.randrange(nv)
        v = rng.randrange(nv)
        label, hol = _random_edge_data(rng, g, u, v, pool, ambient, allow_holonomy)
        g.add_edge(eid, u, v, label, hol)
        eid += 1
    assert g.validate() == []
    return g

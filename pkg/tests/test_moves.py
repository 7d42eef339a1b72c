import random

import pytest

from conftest import grp, perm, random_graph

from foldtree.graphs import MarkedGraphOfGroups, fundamental_image
from foldtree.groups import PermGroup, Permutation
from foldtree.moves import (
    FoldError,
    Subdivide,
    TypeI,
    TypeII,
    TypeIII,
    apply_move,
    enumerate_applicable_folds,
    factorize,
    fold_type1,
    fold_type2,
    fold_type3,
    subdivide,
)


def path_graph(labels, edge_labels, hols=None, n=4):
    g = MarkedGraphOfGroups(n)
    for i, lab in enumerate(labels):
        g.add_vertex(i, lab)
    for i, lab in enumerate(edge_labels):
        hol = None if hols is None else hols[i]
        g.add_edge(i, i, i + 1, lab, hol)
    return g


def test_subdivide_one_edge():
    E = grp(["(12)"], 4)
    g = path_graph([PermGroup.symmetric(4), grp(["(12)", "(34)"], 4)], [E])
    out, cert = subdivide(g, Subdivide(edge=0, mid=2, part1=1, part2=2))
    assert out.validate() == []
    assert set(out.vertices) == {0, 1, 2}
    assert out.vertices[2] == E
    assert out.edges[1].iota == 0 and out.edges[1].tau == 2
    assert out.edges[2].iota == 2 and out.edges[2].tau == 1
    assert out.edges[1].label == E and out.edges[2].label == E
    assert out.edges[1].hol.is_identity()
    assert cert.edge_map[0] == (1, 2)
    assert cert.new_vertices == (2,)
    assert fundamental_image(out) == fundamental_image(g)


def test_subdivide_keeps_holonomy_on_second_part():
    E = grp(["(12)"], 4)
    t = perm("(1324)", 4)
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, PermGroup.symmetric(4))
    g.add_edge(0, 0, 0, E, t)
    out, _ = subdivide(g, Subdivide(0, 1, 1, 2))
    assert out.edges[1].hol.is_identity()
    assert out.edges[2].hol == t
    assert out.validate() == []
    assert fundamental_image(out) == fundamental_image(g)


def test_subdivide_rejects_stale_ids():
    g = path_graph([PermGroup.symmetric(4), PermGroup.symmetric(4)], [grp([], 4)])
    with pytest.raises(FoldError):
        subdivide(g, Subdivide(edge=5, mid=2, part1=1, part2=2))
    with pytest.raises(FoldError):
        subdivide(g, Subdivide(edge=0, mid=1, part1=1, part2=2))
    with pytest.raises(FoldError):
        subdivide(g, Subdivide(edge=0, mid=2, part1=0, part2=1))
    with pytest.raises(FoldError):
        subdivide(g, Subdivide(edge=0, mid=2, part1=1, part2=1))


def star_for_type1(x_label, y_label, v_label, e1_label, e2_label):
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, v_label)
    g.add_vertex(1, x_label)
    g.add_vertex(2, y_label)
    g.add_edge(0, 0, 1, e1_label)
    g.add_edge(1, 0, 2, e2_label)
    return g


def test_type1_joins_labels():
    g = star_for_type1(
        grp(["(12)"], 4), grp(["(34)"], 4), PermGroup.trivial(4), grp([], 4), grp([], 4)
    )
    out, cert = fold_type1(g, TypeI(0, 1, 0, Permutation.identity(4)))
    assert out.validate() == []
    assert set(out.vertices) == {0, 1}
    assert out.vertices[1] == grp(["(12)", "(34)"], 4)
    assert out.vertices[1].order() == 4
    assert out.edges[0].label.is_trivial()
    assert 1 not in out.edges
    assert cert.vertex_map[2] == 1
    assert cert.edge_map[1] == (0,)
    assert fundamental_image(out) == fundamental_image(g)


def test_type1_degenerate_trivial_labels():
    g = star_for_type1(
        PermGroup.trivial(4), PermGroup.trivial(4), PermGroup.trivial(4),
        grp([], 4), grp([], 4),
    )
    out, _ = fold_type1(g, TypeI(0, 1, 0, Permutation.identity(4)))
    assert out.vertices[1].is_trivial()
    assert out.edges[0].label.is_trivial()


def test_type1_align_conjugates_far_label():
    g = star_for_type1(
        grp(["(12)"], 4), grp(["(12)"], 4), PermGroup.symmetric(4),
        grp([], 4), grp([], 4),
    )
    out, _ = fold_type1(g, TypeI(0, 1, 0, perm("(13)", 4)))
    assert out.vertices[1] == grp(["(12)", "(23)"], 4)
    assert out.vertices[1].order() == 6


def test_type1_reframes_other_edges_at_absorbed_vertex():
    g = star_for_type1(
        grp(["(12)"], 4), grp(["(34)"], 4), PermGroup.symmetric(4),
        grp([], 4), grp([], 4),
    )
    g.add_vertex(3, grp(["(34)"], 4))
    g.add_edge(2, 2, 3, grp(["(34)"], 4))
    a = perm("(13)", 4)
    out, cert = fold_type1(g, TypeI(0, 1, 0, a))
    assert out.validate() == []
    f = out.edges[2]
    assert f.iota == 1 and f.tau == 3
    assert f.label == grp(["(14)"], 4)
    assert f.hol == a.inverse()
    assert out.vertices[1] == grp(["(12)", "(14)"], 4)
    assert cert.vertex_map == {0: 0, 1: 1, 2: 1, 3: 3}


def test_type1_reframes_edge_pointing_into_absorbed_vertex():
    g = star_for_type1(
        grp(["(12)"], 4), grp(["(34)"], 4), PermGroup.symmetric(4),
        grp([], 4), grp([], 4),
    )
    g.add_vertex(3, PermGroup.symmetric(4))
    g.add_edge(2, 3, 2, grp(["(34)"], 4))
    a = perm("(13)", 4)
    out, _ = fold_type1(g, TypeI(0, 1, 0, a))
    assert out.validate() == []
    f = out.edges[2]
    assert f.iota == 3 and f.tau == 1
    assert f.label == grp(["(34)"], 4)
    assert f.hol == a


def test_type1_reframes_loop_at_absorbed_vertex():
    g = star_for_type1(
        grp(["(12)"], 4), grp(["(12)", "(34)"], 4), PermGroup.symmetric(4),
        grp([], 4), grp([], 4),
    )
    g.add_edge(2, 2, 2, grp(["(34)"], 4), perm("(12)", 4))
    a = perm("(13)", 4)
    out, _ = fold_type1(g, TypeI(0, 1, 0, a))
    assert out.validate() == []
    f = out.edges[2]
    assert f.iota == 1 and f.tau == 1
    assert f.label == grp(["(14)"], 4)
    assert f.hol == a * perm("(12)", 4) * a.inverse()


def test_type1_moves_basepoint_off_absorbed_vertex():
    g = star_for_type1(
        grp([], 4), grp([], 4), PermGroup.trivial(4), grp([], 4), grp([], 4)
    )
    g.basepoint = 2
    out, _ = fold_type1(g, TypeI(0, 1, 0, Permutation.identity(4)))
    assert out.basepoint == 1


def test_type1_rejects_parallel_edges():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, PermGroup.trivial(4))
    g.add_vertex(1, PermGroup.trivial(4))
    g.add_edge(0, 0, 1, grp([], 4))
    g.add_edge(1, 0, 1, grp([], 4))
    with pytest.raises(FoldError, match="type III"):
        fold_type1(g, TypeI(0, 1, 0, Permutation.identity(4)))


def test_type1_rejects_loops_and_bad_pivot_and_align():
    g = star_for_type1(
        grp([], 4), grp([], 4), PermGroup.trivial(4), grp([], 4), grp([], 4)
    )
    g.add_edge(2, 1, 1, grp([], 4))
    with pytest.raises(FoldError, match="loop"):
        fold_type1(g, TypeI(0, 2, 1, Permutation.identity(4)))
    with pytest.raises(FoldError, match="pivot"):
        fold_type1(g, TypeI(0, 1, 1, Permutation.identity(4)))
    with pytest.raises(FoldError, match="align"):
        fold_type1(g, TypeI(0, 1, 0, perm("(12)", 4)))


def test_type1_rejects_nonidentity_holonomy():
    g = star_for_type1(
        PermGroup.symmetric(4), PermGroup.symmetric(4), PermGroup.symmetric(4),
        grp([], 4), grp([], 4),
    )
    g.edges[1] = type(g.edges[1])(1, 0, 2, grp([], 4), perm("(12)", 4))
    with pytest.raises(FoldError, match="normalize"):
        fold_type1(g, TypeI(0, 1, 0, Permutation.identity(4)))


def test_type2_joins_edge_and_far_labels():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, grp(["(12)"], 4))
    g.add_vertex(1, grp(["(34)"], 4))
    g.add_edge(0, 0, 1, grp([], 4))
    out, _ = fold_type2(g, TypeII(0, perm("(12)", 4)))
    assert out.validate() == []
    assert out.edges[0].label == grp(["(12)"], 4)
    assert out.vertices[1] == grp(["(12)", "(34)"], 4)
    assert out.vertices[1].order() == 4
    assert out.vertices[0] == grp(["(12)"], 4)
    assert fundamental_image(out) == fundamental_image(g)
    with pytest.raises(FoldError, match="no-op"):
        fold_type2(out, TypeII(0, perm("(12)", 4)))


def test_type2_rejects_element_outside_iota_label():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, grp(["(12)"], 4))
    g.add_vertex(1, PermGroup.symmetric(4))
    g.add_edge(0, 0, 1, grp([], 4))
    with pytest.raises(FoldError, match="iota"):
        fold_type2(g, TypeII(0, perm("(34)", 4)))


def test_type2_rejects_holonomy():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, PermGroup.symmetric(4))
    g.add_edge(0, 0, 0, grp([], 4), perm("(12)", 4))
    with pytest.raises(FoldError, match="normalize"):
        fold_type2(g, TypeII(0, perm("(34)", 4)))


def test_type2_on_identity_loop_keeps_vertex_label():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, grp(["(12)", "(34)"], 4))
    g.add_edge(0, 0, 0, grp([], 4))
    out, _ = fold_type2(g, TypeII(0, perm("(34)", 4)))
    assert out.edges[0].label == grp(["(34)"], 4)
    assert out.vertices[0] == g.vertices[0]


def test_type3_parallel_edges_far_vertex_gains_align():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, grp(["(12)"], 4))
    g.add_vertex(1, PermGroup.trivial(4))
    g.add_edge(0, 0, 1, grp([], 4))
    g.add_edge(1, 0, 1, grp([], 4))
    a = perm("(12)", 4)
    out, cert = fold_type3(g, TypeIII(0, 1, a))
    assert out.validate() == []
    assert set(out.edges) == {0}
    assert out.edges[0].label.is_trivial()
    assert out.vertices[1] == grp(["(12)"], 4)
    assert cert.edge_map[1] == (0,)
    assert fundamental_image(out) == fundamental_image(g)


def test_type3_identity_align_equal_labels_changes_nothing_but_shape():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, grp(["(12)"], 4))
    g.add_vertex(1, grp(["(12)"], 4))
    g.add_edge(0, 0, 1, grp(["(12)"], 4))
    g.add_edge(1, 0, 1, grp(["(12)"], 4))
    out, _ = fold_type3(g, TypeIII(0, 1, Permutation.identity(4)))
    assert out.edges[0].label == grp(["(12)"], 4)
    assert out.vertices[1] == grp(["(12)"], 4)


def test_type3_respects_reversed_second_edge():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, grp(["(12)"], 4))
    g.add_vertex(1, grp(["(12)"], 4))
    g.add_edge(0, 0, 1, grp([], 4))
    g.add_edge(1, 1, 0, grp(["(12)"], 4), perm("(12)", 4))
    out, _ = fold_type3(g, TypeIII(0, 1, Permutation.identity(4)))
    assert out.validate() == []
    assert out.edges[0].label == grp(["(12)"], 4)
    assert out.vertices[1] == grp(["(12)"], 4)
    assert fundamental_image(out) == fundamental_image(g)


def test_type3_absorbs_subdivided_holonomy_loop():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, PermGroup.trivial(4))
    g.add_edge(0, 0, 0, grp([], 4), perm("(12)", 4))
    g2, _ = subdivide(g, Subdivide(0, 1, 1, 2))
    out, cert = fold_type3(g2, TypeIII(1, 2, Permutation.identity(4)))
    assert out.validate() == []
    assert set(out.vertices) == {0, 1}
    assert out.vertices[0].is_trivial()
    assert out.vertices[1] == grp(["(12)"], 4)
    assert set(out.edges) == {1}
    assert out.edges[1].label.is_trivial()
    assert out.edges[1].hol.is_identity()
    assert fundamental_image(out) == grp(["(12)"], 4)
    assert "gain" in cert.notes[0]


def test_type3_on_two_holonomy_loops():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, PermGroup.trivial(4))
    g.add_edge(0, 0, 0, grp([], 4), perm("(12)", 4))
    g.add_edge(1, 0, 0, grp([], 4), perm("(13)", 4))
    out, _ = fold_type3(g, TypeIII(0, 1, Permutation.identity(4)))
    assert out.validate() == []
    assert out.vertices[0] == grp(["(132)"], 4)
    assert out.edges[0].hol == perm("(12)", 4)
    assert fundamental_image(out) == fundamental_image(g)


def test_type3_rejects_non_parallel():
    g = star_for_type1(
        grp([], 4), grp([], 4), PermGroup.trivial(4), grp([], 4), grp([], 4)
    )
    with pytest.raises(FoldError, match="parallel"):
        fold_type3(g, TypeIII(0, 1, Permutation.identity(4)))


def test_enumerate_no_edges_is_empty():
    g = MarkedGraphOfGroups(4)
    g.add_vertex(0, PermGroup.symmetric(4))
    assert enumerate_applicable_folds(g) == []


def test_enumerate_finds_type1_at_shared_pivot():
    g = star_for_type1(
        PermGroup.trivial(4), PermGroup.trivial(4), PermGroup.trivial(4),
        grp([], 4), grp([], 4),
    )
    moves = enumerate_applicable_folds(g)
    assert TypeI(0, 1, 0, Permutation.identity(4)) in moves
    assert TypeI(1, 0, 0, Permutation.identity(4)) in moves


def test_enumerate_is_sound_and_deterministic():
    rng = random.Random(1009)
    for _ in range(20):
        g = random_graph(rng, max_vertices=3, max_extra_edges=2)
        moves = enumerate_applicable_folds(g)
        assert moves == enumerate_applicable_folds(g)
        for move in moves:
            out, _ = apply_move(g, move)
            assert out.validate() == []


def test_folds_preserve_image_and_shrink_edges():
    rng = random.Random(77)
    checked = 0
    for _ in range(40):
        g = random_graph(rng, max_vertices=3, max_extra_edges=2)
        for move in enumerate_applicable_folds(g)[:6]:
            out, _ = apply_move(g, move)
            assert fundamental_image(out) == fundamental_image(g)
            if isinstance(move, (TypeI, TypeIII)):
                assert len(out.edges) == len(g.edges) - 1
            else:
                assert len(out.edges) == len(g.edges)
            checked += 1
    assert checked > 30


# --- factorization search ---


def amalgam_s3():
    g = MarkedGraphOfGroups(3)
    g.add_vertex(0, grp(["(12)"], 3))
    g.add_vertex(1, grp(["(123)"], 3))
    g.add_edge(0, 0, 1, PermGroup.trivial(3))
    g.require_valid()
    return g


def wedge_s3():
    g = MarkedGraphOfGroups(3)
    g.add_vertex(0, PermGroup.trivial(3))
    g.add_edge(0, 0, 0, PermGroup.trivial(3), perm("(12)", 3))
    g.add_edge(1, 0, 0, PermGroup.trivial(3), perm("(123)", 3))
    g.require_valid()
    return g


def test_factorize_isomorphic_pair_gives_empty_script():
    g = amalgam_s3()
    h = MarkedGraphOfGroups(3)
    h.add_vertex(4, grp(["(123)"], 3))
    h.add_vertex(7, grp(["(12)"], 3))
    h.add_edge(2, 7, 4, PermGroup.trivial(3))
    h.require_valid()
    res = factorize(g, h)
    assert res.status == "found"
    assert res.script.moves == ()


def test_factorize_wedge_to_amalgam():
    from foldtree.canon import canonical_form
    from foldtree.forest import reduce_graph
    from foldtree.sequences import run_script

    res = factorize(wedge_s3(), amalgam_s3())
    assert res.status == "found"
    assert 0 < len(res.script.moves) <= 6
    stages = run_script(res.script)
    end, _ = reduce_graph(stages[-1].graph)
    want, _ = reduce_graph(amalgam_s3())
    assert canonical_form(end) == canonical_form(want)


def test_factorize_is_deterministic():
    first = factorize(wedge_s3(), amalgam_s3())
    second = factorize(wedge_s3(), amalgam_s3())
    assert first.script.moves == second.script.moves
    assert first.explored == second.explored


def test_factorize_rejects_image_mismatch():
    g = wedge_s3()
    h = MarkedGraphOfGroups(3)
    h.add_vertex(0, grp(["(12)"], 3))
    h.require_valid()
    with pytest.raises(ValueError):
        factorize(g, h)


def test_factorize_rejects_prunable_target():
    h = MarkedGraphOfGroups(3)
    h.add_vertex(0, PermGroup.symmetric(3))
    h.add_vertex(1, PermGroup.trivial(3))
    h.add_edge(0, 0, 1, PermGroup.trivial(3))
    h.require_valid()
    with pytest.raises(ValueError):
        factorize(wedge_s3(), h)


def test_factorize_reports_unknown_when_capped():
    res = factorize(wedge_s3(), amalgam_s3(), max_moves=2)
    assert res.status == "unknown"
    assert res.script is None
    capped = factorize(wedge_s3(), amalgam_s3(), max_states=3)
    assert capped.status == "unknown"

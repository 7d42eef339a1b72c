"""Text formats: parse/print round-trips, error positions, golden bytes."""

import random
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import random_graph
from foldtree.formats import (
    FormatError,
    classification_report_text,
    export_dot,
    matrix_csv,
    parse_gog,
    parse_script,
    print_gog,
    print_script,
)
from foldtree.forest import find_compressing_forest
from foldtree.graphs import MarkedGraphOfGroups
from foldtree.groups import PermGroup, Permutation
from foldtree.induced import classify_induced_fold
from foldtree.moves import (
    FoldError,
    Subdivide,
    TypeI,
    TypeII,
    TypeIII,
    enumerate_applicable_folds,
)

GOLD = Path(__file__).parent / "golden"


def perm(text, n=3):
    return Permutation.parse(text, n)


def golden_graph():
    g = MarkedGraphOfGroups(3)
    g.add_vertex(0, PermGroup(3, [perm("(12)")]))
    g.add_vertex(1, PermGroup(3, [perm("(123)")]))
    g.add_vertex(2, PermGroup.trivial(3))
    g.add_edge(0, 0, 1, PermGroup.trivial(3))
    g.add_edge(1, 1, 1, PermGroup.trivial(3), perm("(123)"))
    g.add_edge(2, 1, 2, PermGroup.trivial(3))
    g.require_valid()
    return g


def golden_moves():
    return (
        Subdivide(0, 3, 3, 4),
        TypeIII(3, 4, perm("(12)")),
        TypeII(1, perm("(123)")),
        TypeI(3, 4, 0, perm("()")),
    )


# --- graph format ---


def test_minimal_file_is_one_vertex():
    g = parse_gog("AMBIENT 3\nGROUP T = ()\nVERTEX 7 GROUP T\n")
    assert set(g.vertices) == {7}
    assert not g.edges
    assert g.basepoint == 7


def test_gog_round_trip_fixture():
    g = golden_graph()
    assert parse_gog(print_gog(g)).equals(g)


def test_gog_print_is_stable_and_matches_golden():
    text = print_gog(golden_graph())
    assert text == print_gog(golden_graph())
    assert text == (GOLD / "amalgam.gog").read_text()


def test_gog_round_trip_random_graphs():
    for seed in range(60):
        rng = random.Random(seed)
        g = random_graph(rng, degree=4, max_vertices=4, max_extra_edges=2)
        assert parse_gog(print_gog(g)).equals(g), f"seed {seed}"


def test_comments_and_blanks_are_ignored():
    g = parse_gog(
        "# leading comment\n\nAMBIENT 3  # trailing\n"
        "GROUP T = ()\n\nVERTEX 0 GROUP T\nBASE 0\n"
    )
    assert set(g.vertices) == {0}


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("VERTEX 0 GROUP T", 1, "first statement must be AMBIENT"),
        ("AMBIENT 3\nAMBIENT 3", 2, "duplicate AMBIENT"),
        ("AMBIENT 0", 1, "degree must be >= 1"),
        ("AMBIENT 3\nWIBBLE 1", 2, "unknown keyword 'WIBBLE'"),
        ("AMBIENT 3\nGROUP A (12)", 2, "expected `GROUP"),
        ("AMBIENT 3\nGROUP A = (12)\nGROUP A = ()", 3, "defined twice"),
        ("AMBIENT 3\nGROUP A = (1 4)", 2, "bad generator"),
        ("AMBIENT 3\nGROUP A = (12);", 2, "missing generator"),
        ("AMBIENT 3\nVERTEX 0 GROUP T", 2, "unknown group 'T'"),
        ("AMBIENT 3\nGROUP T = ()\nVERTEX x GROUP T", 3, "vertex id must be an integer"),
        (
            "AMBIENT 3\nGROUP T = ()\nVERTEX 0 GROUP T\nVERTEX 0 GROUP T",
            4,
            "vertex 0 defined twice",
        ),
        (
            "AMBIENT 3\nGROUP T = ()\nVERTEX 0 GROUP T\n"
            "EDGE 0 FROM 0 TO 9 GROUP T HOL ()",
            4,
            "endpoint 9 is not a vertex yet",
        ),
        (
            "AMBIENT 3\nGROUP T = ()\nVERTEX 0 GROUP T\nEDGE 0 FROM 0 TO 0 GROUP T",
            4,
            "expected `EDGE",
        ),
        ("AMBIENT 3\nGROUP T = ()\nVERTEX 0 GROUP T\nBASE 9", 4, "not a vertex"),
        ("AMBIENT 3\nGROUP T = ()\nVERTEX 0 GROUP T\nBASE 0\nBASE 0", 5, "duplicate BASE"),
    ],
)
def test_gog_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(FormatError) as err:
        parse_gog(text)
    assert fragment in str(err.value)
    assert err.value.line == line


def test_empty_input_is_an_error():
    with pytest.raises(FormatError, match="expected an AMBIENT"):
        parse_gog("# nothing here\n")


def test_semantic_errors_go_through_validate():
    text = (
        "AMBIENT 3\nGROUP T = ()\nGROUP B = (123)\n"
        "VERTEX 0 GROUP T\nVERTEX 1 GROUP T\n"
        "EDGE 0 FROM 0 TO 1 GROUP B HOL ()\n"
    )
    with pytest.raises(FormatError):
        parse_gog(text)


# --- script format ---


def test_script_round_trip_with_period():
    moves = golden_moves()
    text = print_script(moves, period=(2, 2))
    assert text == (GOLD / "loop_fold.script").read_text()
    back, period = parse_script(text, 3)
    assert back == moves
    assert period == (2, 2)


def test_script_round_trip_without_period():
    moves = golden_moves()
    back, period = parse_script(print_script(moves), 3)
    assert back == moves and period is None


def test_empty_script_prints_empty():
    assert print_script(()) == ""
    assert parse_script("", 3) == ((), None)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("FOLD9 1 2", "unknown keyword 'FOLD9'"),
        ("SUBDIVIDE 0 AT 1 AS 2", "expected `SUBDIVIDE"),
        ("FOLD1 1 2 AT 0 ALIGN", "expected `FOLD1"),
        ("FOLD2 1 BY (1 4)", "bad element"),
        ("FOLD3 1 2 ALIGN bogus", "bad alignment"),
        ("PERIOD 0 1", "does not end at move 0"),
        ("FOLD2 1 BY (12)\nPERIOD -1 2", "start >= 0"),
        ("FOLD2 1 BY (12)\nPERIOD 0 1\nFOLD2 1 BY (12)", "must be the last statement"),
    ],
)
def test_script_parse_errors(text, fragment):
    with pytest.raises(FormatError) as err:
        parse_script(text, 3)
    assert fragment in str(err.value)
    assert err.value.line is not None


def test_script_errors_point_at_the_right_line():
    with pytest.raises(FormatError) as err:
        parse_script("FOLD2 1 BY (12)\n# fine\nFOLD9 0 1", 3)
    assert err.value.line == 3


# --- DOT ---


def test_dot_edgeless_graph_is_one_node():
    g = MarkedGraphOfGroups(3)
    g.add_vertex(0, PermGroup.trivial(3))
    lines = export_dot(g).strip().splitlines()
    assert sum(1 for ln in lines if ln.strip().startswith("v0 [")) == 1
    assert not any("->" in ln for ln in lines)


def test_dot_forest_edge_is_directed_and_highlighted():
    g = golden_graph()
    forest = find_compressing_forest(g)
    text = export_dot(g, forest)
    assert text == (GOLD / "reduced_pair.dot").read_text()
    assert 'v2 -> v1 [label="e2 |E|=1 hol=()" color=crimson penwidth=2];' in text
    assert text.count("dir=none") == 2


def test_dot_is_deterministic():
    g = golden_graph()
    forest = find_compressing_forest(g)
    assert export_dot(g, forest) == export_dot(g, forest)


# --- reports ---


def classified_report():
    g = golden_graph()
    forest = find_compressing_forest(g)
    for move in enumerate_applicable_folds(g):
        try:
            return classify_induced_fold(g, forest, move)
        except FoldError:
            continue
    raise AssertionError("no move classified")


def test_classification_report_matches_golden():
    text = classification_report_text(classified_report())
    assert text == (GOLD / "fold_classify.report").read_text()


def test_classification_report_shape():
    text = classification_report_text(classified_report())
    lines = text.strip().splitlines()
    assert lines[0].startswith("classification: ")
    assert any(ln.startswith("condition ") for ln in lines)
    assert all(ln.endswith(("yes", "no")) for ln in lines if ln.startswith("condition "))
    assert any(ln.startswith("forest after: ") for ln in lines)


def test_matrix_csv_matches_golden():
    rows = [
        [Fraction(5, 6), Fraction(1, 6), Fraction(0)],
        [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)],
    ]
    text = matrix_csv(rows)
    assert text == (GOLD / "stage_lengths.csv").read_text()
    assert text.splitlines()[0] == "5/6,1/6,0"

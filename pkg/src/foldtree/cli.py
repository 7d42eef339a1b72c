"""Command-line front end.

Every verb reads text files in the formats module's grammar, writes a
report of key: value lines (with rational CSV blocks where a matrix is
involved) on standard output, and reserves standard error for diagnostics.
Exit status: 0 success, 1 analysis verdict false or search gave no answer,
2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .balls import expand_ball
from .forest import find_compressing_forest, reduce_graph
from .formats import (
    FormatError,
    classification_report_text,
    export_dot,
    matrix_csv,
    parse_gog,
    parse_script,
    print_gog,
    print_script,
)
from .freefold import WedgeSpec, edge_orbit_bound_check, grushko_fold, wedge_gog
from .graphs import eta
from .groups import PermGroup, Permutation
from .induced import classify_induced_fold
from .moves import FoldError, FoldScript, Subdivide, apply_move
from .sequences import detect_reducible_periodic, run_script, solve_lengths


def _read(path):
    return Path(path).read_text()


def _load_graph(path, check=True):
    return parse_gog(_read(path), check=check)


def _load_script(path, degree):
    return parse_script(_read(path), degree)


def cmd_validate(args):
    g = _load_graph(args.graph, check=False)
    problems = g.validate()
    print(f"valid: {'yes' if not problems else 'no'}")
    for problem in problems:
        print(f"problem: {problem}")
    return 0 if not problems else 1


def cmd_eta(args):
    g = _load_graph(args.graph)
    print(f"eta: {eta(g)}")
    return 0


def cmd_forest(args):
    g = _load_graph(args.graph)
    forest = find_compressing_forest(g)
    print(f"forest edges: {len(forest.arrows)}")
    for eid, src in sorted(forest.arrows.items()):
        print(f"arrow {eid}: away from {src}")
    return 0


def cmd_reduce(args):
    g = _load_graph(args.graph)
    reduced, _ = reduce_graph(g)
    sys.stdout.write(print_gog(reduced))
    return 0


def cmd_fold(args):
    g = _load_graph(args.graph)
    moves, _ = _load_script(args.script, g.degree)
    for k, move in enumerate(moves):
        if args.classify:
            line = print_script((move,)).strip()
            print(f"move {k}: {line}")
            if isinstance(move, Subdivide):
                print("classification: subdivision")
            else:
                forest = find_compressing_forest(g)
                report = classify_induced_fold(g, forest, move)
                sys.stdout.write(classification_report_text(report))
        g, _ = apply_move(g, move)
    sys.stdout.write(print_gog(g))
    return 0


def cmd_run(args):
    g = _load_graph(args.graph)
    moves, period = _load_script(args.script, g.degree)
    script = FoldScript(g, moves, period)
    stages = run_script(script, args.steps)
    print(f"stages: {len(stages)}")
    for k, rec in enumerate(stages):
        print(
            f"stage {k}: vertices={len(rec.graph.vertices)} "
            f"edges={len(rec.graph.edges)} eta={eta(rec.graph)}"
        )
    last = stages[-1]
    for eid in sorted(last.provenance):
        entries = ";".join(
            f"({stage},{ancestor},{tag})"
            for stage, ancestor, tag in sorted(last.provenance[eid])
        )
        print(f"provenance {eid}: {entries if entries else '(none)'}")
    return 0


def _parse_final(text):
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if "=" not in piece:
            raise ValueError(f"final lengths need eid=value entries, got {piece!r}")
        eid, value = piece.split("=", 1)
        out[int(eid)] = Fraction(value)
    return out


def cmd_lengths(args):
    g = _load_graph(args.graph)
    moves, period = _load_script(args.script, g.degree)
    script = FoldScript(g, moves, period)
    final = _parse_final(args.final) if args.final else None
    assignment = solve_lengths(script, args.steps, final)
    print(f"stages: {len(assignment.per_stage)}")
    print(f"scale: {assignment.scale}")
    for k, layer in enumerate(assignment.per_stage):
        order = sorted(layer)
        print(f"edges stage {k}: {','.join(str(eid) for eid in order)}")
        sys.stdout.write(
            "lengths stage " + str(k) + ": " + matrix_csv([[layer[e] for e in order]])
        )
    return 0


def cmd_reducible(args):
    g = _load_graph(args.graph)
    moves, period = _load_script(args.script, g.degree)
    script = FoldScript(g, moves, period)
    report = detect_reducible_periodic(script)
    print(f"reducible: {'yes' if report.reducible else 'no'}")
    print(f"edge order: {','.join(str(e) for e in report.edge_order)}")
    print("matrix:")
    sys.stdout.write(matrix_csv(report.matrix))
    if report.limit_direction is not None:
        sys.stdout.write("limit: " + matrix_csv([report.limit_direction]))
    print(f"exact: {'yes' if report.exact else 'no'}")
    print(f"rho: {report.rho}")
    zeros = ",".join(str(e) for e in sorted(report.zero_edges))
    print(f"zero edges: {zeros if zeros else '(none)'}")
    return 0 if report.reducible else 1


def cmd_ball(args):
    g = _load_graph(args.graph)
    tree = expand_ball(g, args.base, args.radius)
    print(f"nodes: {len(tree.nodes)}")
    for depth in range(args.radius + 1):
        layer = tree.nodes_at_depth(depth)
        print(f"depth {depth}: {len(layer)}")
    for node in tree.nodes:
        stab = tree.stab(node)
        print(f"node {node.index}: vertex={node.vertex} depth={node.depth} "
              f"stab order={stab.order()}")
    return 0


def cmd_grushko(args):
    ambient = PermGroup.symmetric(args.ambient)
    images = tuple(
        Permutation.parse(piece.strip(), args.ambient)
        for piece in args.images.split(";")
    )
    w = wedge_gog(ambient, WedgeSpec(len(images), images))
    target = _load_graph(args.target)
    try:
        script, reduced = grushko_fold(w, target)
    except FoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"moves: {len(script.moves)}")
    sys.stdout.write(print_script(script.moves))
    print(f"reduced edges: {len(reduced.edges)}")
    print(f"bound: {'yes' if edge_orbit_bound_check(reduced, len(images)) else 'no'}")
    sys.stdout.write(print_gog(reduced))
    return 0


def cmd_dot(args):
    g = _load_graph(args.graph)
    forest = find_compressing_forest(g) if args.forest else None
    sys.stdout.write(export_dot(g, forest))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="foldtree",
        description="Folding calculus on marked graphs of finite groups.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check a graph file's invariants")
    p.add_argument("graph")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("eta", help="complexity of the reduced quotient")
    p.add_argument("graph")
    p.set_defaults(handler=cmd_eta)

    p = sub.add_parser("forest", help="compressing forest arrows")
    p.add_argument("graph")
    p.set_defaults(handler=cmd_forest)

    p = sub.add_parser("reduce", help="print the reduced quotient")
    p.add_argument("graph")
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser("fold", help="apply a script's moves once")
    p.add_argument("graph")
    p.add_argument("script")
    p.add_argument(
        "--classify",
        action="store_true",
        help="report each move's induced operation on the reduced quotient",
    )
    p.set_defaults(handler=cmd_fold)

    p = sub.add_parser("run", help="run a script with provenance")
    p.add_argument("graph")
    p.add_argument("script")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("lengths", help="solve exact edge lengths")
    p.add_argument("graph")
    p.add_argument("script")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument(
        "--final",
        help="last-stage lengths as eid=value,... (default all ones)",
    )
    p.set_defaults(handler=cmd_lengths)

    p = sub.add_parser("reducible", help="periodic reducibility analysis")
    p.add_argument("graph")
    p.add_argument("script")
    p.set_defaults(handler=cmd_reducible)

    p = sub.add_parser("ball", help="expand a covering-tree ball")
    p.add_argument("graph")
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.set_defaults(handler=cmd_ball)

    p = sub.add_parser("grushko", help="fold a wedge onto a target graph")
    p.add_argument("target")
    p.add_argument("--ambient", type=int, required=True)
    p.add_argument("--images", required=True, help="loop holonomies, ; separated")
    p.set_defaults(handler=cmd_grushko)

    p = sub.add_parser("dot", help="DOT rendering")
    p.add_argument("graph")
    p.add_argument("--forest", action="store_true", help="highlight the forest")
    p.set_defaults(handler=cmd_dot)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Line-oriented text formats.

Graphs and move scripts have a strict keyword grammar parsed line by line;
errors carry the 1-based line number (and column where a single token is at
fault). Printers are deterministic, so printed output is stable enough for
byte-exact golden comparisons, and parse(print(x)) reproduces x.
"""

from __future__ import annotations

from .forest import CompressingForest
from .graphs import MarkedGraphOfGroups
from .groups import PermGroup, Permutation
from .moves import Subdivide, TypeI, TypeII, TypeIII


class FormatError(ValueError):
    """Bad input text; line (and sometimes col) locate the fault."""

    def __init__(self, message, line=None, col=None):
        place = ""
        if line is not None:
            place = f"line {line}: " if col is None else f"line {line} col {col}: "
        super().__init__(place + message)
        self.line = line
        self.col = col


def _statements(text):
    """(lineno, stripped statement) pairs, comments and blanks dropped."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _int_field(token, what, lineno, col=None):
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {token!r}", lineno, col)


def _perm_field(text, what, degree, lineno):
    if not text:
        raise FormatError(f"missing {what}", lineno)
    try:
        return Permutation.parse(text, degree)
    except ValueError as exc:
        raise FormatError(f"bad {what}: {exc}", lineno)


def _shape(tokens, lineno, pattern):
    """Check the literal keywords in pattern ('.' marks a value slot)."""
    want = pattern.split()
    if len(tokens) != len(want):
        raise FormatError(
            f"expected `{pattern.replace('.', '<..>')}`, got {len(tokens)} fields",
            lineno,
        )
    for pos, (tok, expect) in enumerate(zip(tokens, want)):
        if expect != "." and tok != expect:
            raise FormatError(
                f"expected keyword {expect!r} at field {pos + 1}, got {tok!r}",
                lineno,
            )


# --- graphs ---


def parse_gog(text, check=True):
    """Parse the graph format. Statements must define names before use;
    the first statement is AMBIENT. Unknown keywords are errors. check=False
    skips the final semantic validation (parse shape only)."""
    degree = None
    groups = {}
    g = None
    base = None
    for lineno, line in _statements(text):
        tokens = line.split()
        key = tokens[0]
        if degree is None:
            if key != "AMBIENT":
                raise FormatError(f"first statement must be AMBIENT, got {key!r}", lineno)
            _shape(tokens, lineno, "AMBIENT .")
            degree = _int_field(tokens[1], "ambient degree", lineno)
            if degree < 1:
                raise FormatError("ambient degree must be >= 1", lineno)
            g = MarkedGraphOfGroups(degree)
            continue
        if key == "AMBIENT":
            raise FormatError("duplicate AMBIENT statement", lineno)
        if key == "GROUP":
            if len(tokens) < 4 or tokens[2] != "=":
                raise FormatError("expected `GROUP <name> = <perm>;<perm>;...`", lineno)
            name = tokens[1]
            if name in groups:
                raise FormatError(f"group {name!r} defined twice", lineno)
            body = line.split("=", 1)[1]
            gens = []
            for piece in body.split(";"):
                gens.append(_perm_field(piece.strip(), "generator", degree, lineno))
            groups[name] = PermGroup(degree, gens)
        elif key == "VERTEX":
            _shape(tokens, lineno, "VERTEX . GROUP .")
            vid = _int_field(tokens[1], "vertex id", lineno)
            if vid in g.vertices:
                raise FormatError(f"vertex {vid} defined twice", lineno)
            if tokens[3] not in groups:
                raise FormatError(f"unknown group {tokens[3]!r}", lineno)
            g.add_vertex(vid, groups[tokens[3]])
        elif key == "EDGE":
            if len(tokens) < 10:
                raise FormatError(
                    "expected `EDGE <id> FROM <vid> TO <vid> GROUP <name> HOL <perm>`",
                    lineno,
                )
            _shape(tokens[:9], lineno, "EDGE . FROM . TO . GROUP . HOL")
            eid = _int_field(tokens[1], "edge id", lineno)
            if eid in g.edges:
                raise FormatError(f"edge {eid} defined twice", lineno)
            iota = _int_field(tokens[3], "FROM vertex", lineno)
            tau = _int_field(tokens[5], "TO vertex", lineno)
            for vid in (iota, tau):
                if vid not in g.vertices:
                    raise FormatError(f"edge endpoint {vid} is not a vertex yet", lineno)
            if tokens[7] not in groups:
                raise FormatError(f"unknown group {tokens[7]!r}", lineno)
            hol = _perm_field(" ".join(tokens[9:]), "holonomy", degree, lineno)
            g.add_edge(eid, iota, tau, groups[tokens[7]], hol)
        elif key == "BASE":
            _shape(tokens, lineno, "BASE .")
            if base is not None:
                raise FormatError("duplicate BASE statement", lineno)
            base = (_int_field(tokens[1], "base vertex", lineno), lineno)
        else:
            raise FormatError(f"unknown keyword {key!r}", lineno)
    if g is None:
        raise FormatError("empty input: expected an AMBIENT statement")
    if base is not None:
        vid, lineno = base
        if vid not in g.vertices:
            raise FormatError(f"base vertex {vid} is not a vertex", lineno)
        g.basepoint = vid
    if check:
        problems = g.validate()
        if problems:
            raise FormatError("; ".join(problems))
    return g


def _group_table(g):
    """Distinct labels in first-use order (vertices then edges, ids sorted),
    named G0, G1, ..."""
    names = {}
    order = []
    labels = [g.vertices[v] for v in sorted(g.vertices)]
    labels += [g.edges[e].label for e in sorted(g.edges)]
    for label in labels:
        if label not in names:
            names[label] = f"G{len(order)}"
            order.append(label)
    return names, order


def print_gog(g):
    names, order = _group_table(g)
    lines = [f"AMBIENT {g.degree}"]
    for label in order:
        gens = ";".join(str(p) for p in label.generators) or "()"
        lines.append(f"GROUP {names[label]} = {gens}")
    for vid in sorted(g.vertices):
        lines.append(f"VERTEX {vid} GROUP {names[g.vertices[vid]]}")
    for eid in sorted(g.edges):
        e = g.edges[eid]
        lines.append(
            f"EDGE {eid} FROM {e.iota} TO {e.tau} "
            f"GROUP {names[e.label]} HOL {e.hol}"
        )
    lines.append(f"BASE {g.basepoint}")
    return "\n".join(lines) + "\n"


# --- scripts ---


def parse_script(text, degree):
    """Parse move lines into (moves tuple, period or None). The PERIOD
    statement, when present, must come last."""
    moves = []
    period = None
    for lineno, line in _statements(text):
        if period is not None:
            raise FormatError("PERIOD must be the last statement", lineno)
        tokens = line.split()
        key = tokens[0]
        if key == "SUBDIVIDE":
            _shape(tokens, lineno, "SUBDIVIDE . AT . AS . .")
            moves.append(
                Subdivide(
                    _int_field(tokens[1], "edge id", lineno),
                    _int_field(tokens[3], "new vertex id", lineno),
                    _int_field(tokens[5], "first part id", lineno),
                    _int_field(tokens[6], "second part id", lineno),
                )
            )
        elif key == "FOLD1":
            if len(tokens) < 7:
                raise FormatError(
                    "expected `FOLD1 <e1> <e2> AT <v> ALIGN <perm>`", lineno
                )
            _shape(tokens[:6], lineno, "FOLD1 . . AT . ALIGN")
            moves.append(
                TypeI(
                    _int_field(tokens[1], "edge id", lineno),
                    _int_field(tokens[2], "edge id", lineno),
                    _int_field(tokens[4], "pivot vertex", lineno),
                    _perm_field(" ".join(tokens[6:]), "alignment", degree, lineno),
                )
            )
        elif key == "FOLD2":
            if len(tokens) < 4:
                raise FormatError("expected `FOLD2 <e> BY <perm>`", lineno)
            _shape(tokens[:3], lineno, "FOLD2 . BY")
            moves.append(
                TypeII(
                    _int_field(tokens[1], "edge id", lineno),
                    _perm_field(" ".join(tokens[3:]), "element", degree, lineno),
                )
            )
        elif key == "FOLD3":
            if len(tokens) < 5:
                raise FormatError("expected `FOLD3 <e1> <e2> ALIGN <perm>`", lineno)
            _shape(tokens[:4], lineno, "FOLD3 . . ALIGN")
            moves.append(
                TypeIII(
                    _int_field(tokens[1], "edge id", lineno),
                    _int_field(tokens[2], "edge id", lineno),
                    _perm_field(" ".join(tokens[4:]), "alignment", degree, lineno),
                )
            )
        elif key == "PERIOD":
            _shape(tokens, lineno, "PERIOD . .")
            start = _int_field(tokens[1], "period start", lineno)
            length = _int_field(tokens[2], "period length", lineno)
            if start < 0 or length < 1:
                raise FormatError("period needs start >= 0 and length >= 1", lineno)
            if start + length != len(moves):
                raise FormatError(
                    f"period ({start}, {length}) does not end at move "
                    f"{len(moves)}, the last one listed",
                    lineno,
                )
            period = (start, length)
        else:
            raise FormatError(f"unknown keyword {key!r}", lineno)
    return tuple(moves), period


def print_script(moves, period=None):
    lines = []
    for move in moves:
        if isinstance(move, Subdivide):
            lines.append(
                f"SUBDIVIDE {move.edge} AT {move.mid} AS {move.part1} {move.part2}"
            )
        elif isinstance(move, TypeI):
            lines.append(f"FOLD1 {move.e1} {move.e2} AT {move.pivot} ALIGN {move.align}")
        elif isinstance(move, TypeII):
            lines.append(f"FOLD2 {move.edge} BY {move.element}")
        elif isinstance(move, TypeIII):
            lines.append(f"FOLD3 {move.e1} {move.e2} ALIGN {move.align}")
        else:
            raise TypeError(f"not a move: {move!r}")
    if period is not None:
        lines.append(f"PERIOD {period[0]} {period[1]}")
    return "\n".join(lines) + "\n" if lines else ""


# --- DOT ---


def export_dot(g, forest=None):
    """Deterministic DOT text. Vertices show label orders, edges show label
    order and holonomy; forest edges are directed from their arrow source
    and highlighted. The basepoint gets a double ring."""
    if forest is None:
        forest = CompressingForest({})
    out = ["digraph gog {"]
    out.append("  node [shape=circle];")
    for vid in sorted(g.vertices):
        extra = " peripheries=2" if vid == g.basepoint else ""
        out.append(f'  v{vid} [label="{vid} |V|={g.vertices[vid].order()}"{extra}];')
    for eid in sorted(g.edges):
        e = g.edges[eid]
        text = f"e{eid} |E|={e.label.order()} hol={e.hol}"
        if eid in forest.arrows:
            src = forest.arrows[eid]
            dst = e.other_end(src)
            out.append(
                f'  v{src} -> v{dst} [label="{text}" color=crimson penwidth=2];'
            )
        else:
            out.append(f'  v{e.iota} -> v{e.tau} [label="{text}" dir=none];')
    out.append("}")
    return "\n".join(out) + "\n"


# --- reports ---


def classification_report_text(report):
    """key: value lines — classification, then each recorded condition as
    yes/no, then the surviving forest arrows, then notes."""
    lines = [f"classification: {report.classification}"]
    for name, value in report.conditions:
        lines.append(f"condition {name}: {'yes' if value else 'no'}")
    arrows = " ".join(
        f"{eid}->{src}" for eid, src in sorted(report.forest_after.arrows.items())
    )
    lines.append(f"forest after: {arrows if arrows else '(empty)'}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def matrix_csv(rows):
    """Rational CSV: one line per row, fractions as p/q (integers bare)."""
    return "\n".join(",".join(str(x) for x in row) for row in rows) + "\n"

"""Line-oriented text format for relations among strata.

Example::

    relation genus=2 markings=3

    # three rational tails
    term -2 unassigned
    vertex a g=2
    vertex b g=0 m={3}
    vertex c g=0 m={1,2}
    edge a-b; edge b-c

Statements end at a newline or ``;``.  ``coef`` is accepted for ``term``
and the ``vertex`` keyword may be omitted.  Cotangent exponents are written
``psi@m<label>=<k>`` on a vertex and ``psi@<vertex>=<k>`` on an edge (the
flag at that endpoint).  Terms are separated by blank lines or by a new
``term`` statement.
"""
from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .graphs import DualGraph, Label, RelationExpr, StrataError, StratumTerm

SHIPPED_RELATION = "genus2_relation.strata"


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DSLSemanticError(StrataError):
    def __init__(self, message: str, line: int):
        super().__init__(f"term ending at line {line}: {message}")
        self.line = line


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RE_TERM = re.compile(r"(?:term|coef)\s+(?P<coef>[-+]?\d+(?:/\d+)?)(?:\s+(?P<flag>assigned|unassigned))?\s*$")
_RE_VERTEX = re.compile(rf"(?:vertex\s+)?(?P<id>{_IDENT})\s+g=(?P<g>\d+)(?P<rest>.*)$")
_RE_EDGE = re.compile(rf"edge\s+(?P<a>{_IDENT})-(?P<b>{_IDENT})(?P<rest>.*)$")
_RE_HEADER = re.compile(r"relation\s+genus=(?P<g>\d+)\s+markings=(?P<n>\d+)\s*$")
_RE_MARKS = re.compile(r"m=\{(?P<labels>[^}]*)\}")
_RE_LEGPSI = re.compile(r"psi@m(?P<label>q?\d+)=(?P<k>\d+)")
_RE_FLAGPSI = re.compile(rf"psi@(?P<id>{_IDENT})=(?P<k>\d+)")


class _TermBuilder:
    def __init__(self, coef: Fraction, assigned: bool, line: int):
        self.coef = coef
        self.assigned = assigned
        self.line = line
        self.vertices: dict[str, int] = {}
        self.genera: list[int] = []
        self.legs: list[tuple[Label, int]] = []
        self.leg_psi: list[tuple[Label, int]] = []
        self.edges: list[tuple[int, int]] = []
        self.flag_psi: list[tuple[tuple[int, int], int]] = []

    def build(self, genus: int | None, markings: int | None, end_line: int) -> StratumTerm:
        try:
            graph = DualGraph(tuple(self.genera), tuple(self.legs), tuple(self.edges), tuple(self.leg_psi), tuple(self.flag_psi))
            labels = None if markings is None else [Label("m", i) for i in range(1, markings + 1)]
            graph.validate(genus, labels)
        except StrataError as exc:
            raise DSLSemanticError(str(exc), end_line) from None
        return StratumTerm(self.coef, graph.canonical(), self.assigned)


def _strip_rest(rest: str, patterns: tuple[re.Pattern, ...], line: int, col: int) -> str:
    leftover = rest
    for pattern in patterns:
        leftover = pattern.sub("", leftover)
    leftover = leftover.strip()
    if leftover:
        raise DSLSyntaxError(f"unexpected text {leftover!r}", line, col + rest.find(leftover.split()[0]))
    return leftover


def parse_relation(text: str) -> RelationExpr:
    """Parse relation text; graphs are validated and canonicalized."""
    genus = markings = None
    terms: list[StratumTerm] = []
    current: _TermBuilder | None = None
    last_line = 0

    def finish(line: int):
        nonlocal current
        if current is not None:
            if not current.genera:
                raise DSLSemanticError("term has no vertices", line)
            terms.append(current.build(genus, markings, line))
            current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            finish(lineno)
            continue
        last_line = lineno
        offset = 0
        for stmt in body.split(";"):
            col = offset + (len(stmt) - len(stmt.lstrip())) + 1
            offset += len(stmt) + 1
            s = stmt.strip()
            if not s:
                continue
            if m := _RE_HEADER.match(s):
                if terms or current:
                    raise DSLSyntaxError("relation header must come first", lineno, col)
                genus, markings = int(m["g"]), int(m["n"])
            elif m := _RE_TERM.match(s):
                finish(lineno)
                current = _TermBuilder(Fraction(m["coef"]), m["flag"] != "unassigned", lineno)
            elif m := _RE_EDGE.match(s):
                if current is None:
                    raise DSLSyntaxError("edge outside a term", lineno, col)
                ids = current.vertices
                for name in (m["a"], m["b"]):
                    if name not in ids:
                        raise DSLSyntaxError(f"unknown vertex {name!r}", lineno, col + s.find(name))
                idx = len(current.edges)
                current.edges.append((ids[m["a"]], ids[m["b"]]))
                rest = m["rest"]
                loop_ends = [0, 1]
                for pm in _RE_FLAGPSI.finditer(rest):
                    if m["a"] == m["b"] == pm["id"]:
                        if not loop_ends:
                            raise DSLSyntaxError("a loop has only two flags", lineno, col)
                        current.flag_psi.append(((idx, loop_ends.pop(0)), int(pm["k"])))
                    elif pm["id"] == m["a"]:
                        current.flag_psi.append(((idx, 0), int(pm["k"])))
                    elif pm["id"] == m["b"]:
                        current.flag_psi.append(((idx, 1), int(pm["k"])))
                    else:
                        raise DSLSyntaxError(f"psi on {pm['id']!r} which is not an endpoint", lineno, col)
                _strip_rest(rest, (_RE_FLAGPSI,), lineno, col + m.start("rest"))
            elif m := _RE_VERTEX.match(s):
                if current is None:
                    current = _TermBuilder(Fraction(1), True, lineno)
                vid = m["id"]
                if vid in current.vertices:
                    raise DSLSyntaxError(f"duplicate vertex {vid!r}", lineno, col)
                v = current.vertices[vid] = len(current.genera)
                current.genera.append(int(m["g"]))
                rest = m["rest"]
                if mm := _RE_MARKS.search(rest):
                    for item in filter(None, (x.strip() for x in mm["labels"].split(","))):
                        try:
                            current.legs.append((Label.parse(item), v))
                        except ValueError:
                            raise DSLSyntaxError(f"bad marking label {item!r}", lineno, col) from None
                for pm in _RE_LEGPSI.finditer(rest):
                    current.leg_psi.append((Label.parse(pm["label"]), int(pm["k"])))
                _strip_rest(rest, (_RE_MARKS, _RE_LEGPSI), lineno, col + m.start("rest"))
            else:
                raise DSLSyntaxError(f"cannot parse statement {s!r}", lineno, col)
    finish(last_line + 1)
    if genus is None:
        if not terms:
            raise DSLSyntaxError("empty relation", 1, 1)
        genus = terms[0].graph.genus
        markings = len([l for l in terms[0].graph.markings if not l.is_extra])
    extras = {l.index for t in terms for l in t.graph.markings if l.is_extra}
    return RelationExpr(tuple(terms), genus, markings, max(extras, default=0))


def format_graph(graph: DualGraph) -> str:
    names = [f"v{i}" for i in range(graph.num_vertices)]
    lines = []
    for v, g in enumerate(graph.genera):
        parts = [f"vertex {names[v]} g={g}"]
        legs = graph.legs_at(v)
        if legs:
            parts.append("m={" + ",".join(str(l) for l in legs) + "}")
        parts.extend(f"psi@m{l}={graph.psi_of_leg(l)}" for l in legs if graph.psi_of_leg(l))
        lines.append(" ".join(parts))
    for i, (a, b) in enumerate(graph.edges):
        parts = [f"edge {names[a]}-{names[b]}"]
        if graph.psi_of_flag((i, 0)):
            parts.append(f"psi@{names[a]}={graph.psi_of_flag((i, 0))}")
        if graph.psi_of_flag((i, 1)):
            parts.append(f"psi@{names[b]}={graph.psi_of_flag((i, 1))}")
        lines.append(" ".join(parts))
    return "\n".join(lines)


def format_relation(expr: RelationExpr) -> str:
    blocks = [f"relation genus={expr.genus} markings={expr.markings}"]
    for t in expr.terms:
        head = f"term {t.coefficient}" + ("" if t.assigned else " unassigned")
        blocks.append(head + "\n" + format_graph(t.graph))
    return "\n\n".join(blocks) + "\n"


def load_relation(path: str | Path | None = None) -> RelationExpr:
    """Parse a relation file; defaults to the shipped genus-2 relation."""
    if path is None:
        text = resources.files("strata2rec.data").joinpath(SHIPPED_RELATION).read_text()
    else:
        text = Path(path).read_text()
    return parse_relation(text)

"""Per-degree equations for the genus-2 basic series and their solution.

The codimension-2 genus-2 relation is pulled back along the map forgetting
``l`` extra points, paired with a Gromov-Witten class carrying ``T_{a_i}``
at the three original markings and ``T2`` at every extra point, and reduced
to the basic series.  Summing over the six ways of placing the assignment
on the markings gives one linear equation per degree and assignment.

The degree-``d`` equations never contain ``N2(d)``, and contain ``H2(d)``
and ``P2(d)`` only through ``H2(d) - d*P2(d)``; the full triple at degree
``d`` is pinned down together with the degree ``d + 1`` equations.  The
solver therefore runs one degree ahead and keeps leftover rows between
degrees.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import permutations, product
from math import comb, factorial
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import linalg
from .dsl import load_relation
from .graphs import RelationExpr, mark
from .model import PLANE, TargetModel
from .splitting import CorrelatorKey, IrreducibleCorrelator, Poly, Symbol, integrate_pullback, reduce

ASSIGNMENTS: tuple[tuple[int, int, int], ...] = ((1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2))
GENUS2_SERIES = ("N2", "H2", "P2")
DEGREE_ZERO = {Symbol("N2", 0): Fraction(0), Symbol("H2", 0): Fraction(-1, 960)}
GENUS1_FILE = "genus1_p2.tsv"


class InfeasibleAssignment(ValueError):
    """The pulled-back relation would need a negative number of extra points."""


class InsufficientData(ValueError):
    """Input series do not reach the requested degree."""


class Genus1FormatError(ValueError):
    def __init__(self, message: str, source: str, line: int):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


class InconsistentSystem(ArithmeticError):
    def __init__(self, degree: int, assignment, residual: Fraction | None = None):
        what = "carried rows" if assignment is None else "assignment " + ",".join(map(str, assignment))
        super().__init__(f"inconsistent system at degree {degree} ({what})")
        self.degree = degree
        self.assignment = assignment
        self.residual = residual

    def diagnostic(self) -> dict:
        return {
            "error": "inconsistent system",
            "degree": self.degree,
            "assignment": None if self.assignment is None else list(self.assignment),
        }


class Underdetermined(ArithmeticError):
    def __init__(self, degree: int, missing: Sequence[Symbol]):
        super().__init__(f"underdetermined degree {degree}: rank deficient for " + ", ".join(map(str, missing)))
        self.degree = degree
        self.missing = tuple(missing)


# -- lower genus input ------------------------------------------------------------

@lru_cache(maxsize=None)
def _genus0_table(d: int) -> tuple[int, ...]:
    n = [0, 1]
    for k in range(2, d + 1):
        s = 0
        for a in range(1, k):
            b = k - a
            s += n[a] * n[b] * a * a * b * (b * comb(3 * k - 4, 3 * a - 2) - a * comb(3 * k - 4, 3 * a - 1))
        n.append(s)
    return tuple(n)


def genus0(d: int) -> Fraction:
    """Number of rational degree-``d`` plane curves through ``3d - 1`` points."""
    if d < 1:
        raise ValueError(f"genus-0 invariant needs degree >= 1, got {d}")
    return Fraction(_genus0_table(d)[d])


@dataclass(frozen=True)
class Genus1Data:
    values: Mapping[int, Fraction]
    c1: Fraction
    source: str = "<memory>"

    @property
    def max_degree(self) -> int:
        d = 0
        while d + 1 in self.values:
            d += 1
        return d

    def require(self, degree: int) -> None:
        if self.max_degree < degree:
            raise InsufficientData(f"insufficient genus-1 data up to {degree} (source {self.source} covers d <= {self.max_degree})")

    def __getitem__(self, d: int) -> Fraction:
        self.require(d)
        return self.values[d]


def _rational(text: str, source: str, line: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise Genus1FormatError(f"not an exact rational: {text!r}", source, line) from None


def genus1_parse(text: str, source: str = "<string>") -> Genus1Data:
    """Parse the tab-separated genus-1 table.

    Lines are ``c1<TAB>value`` (once) and ``d<TAB>value``; an optional
    column header ``d<TAB>N1`` and ``#`` comments are ignored.
    """
    values: dict[int, Fraction] = {}
    c1 = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) != 2:
            raise Genus1FormatError("expected two tab-separated columns", source, no)
        key, value = cols
        if key == "d":
            continue
        if key == "c1":
            if c1 is not None:
                raise Genus1FormatError("duplicate c1 row", source, no)
            c1 = _rational(value, source, no)
            continue
        if not key.isdigit() or int(key) < 1:
            raise Genus1FormatError(f"bad degree {key!r}", source, no)
        if int(key) in values:
            raise Genus1FormatError(f"duplicate degree {key}", source, no)
        values[int(key)] = _rational(value, source, no)
    if c1 is None:
        raise Genus1FormatError("missing c1 header row", source, 0)
    return Genus1Data(values, c1, source)


def genus1_load(path: str | Path | None = None) -> Genus1Data:
    """Load genus-1 invariants; the shipped table is used when ``path`` is None."""
    if path is None:
        ref = resources.files("strata2rec.data").joinpath(GENUS1_FILE)
        return genus1_parse(ref.read_text(), GENUS1_FILE)
    path = Path(path)
    return genus1_parse(path.read_text(), str(path))


# -- compilation -----------------------------------------------------------------

@lru_cache(maxsize=1)
def shipped_relation() -> RelationExpr:
    return load_relation()


def extra_points(assignment: Sequence[int], degree: int, relation: RelationExpr | None = None, model: TargetModel = PLANE) -> int:
    """Number of extra point insertions making the pairing dimensionally sound.

    Raises :class:`InfeasibleAssignment` when it would be negative.
    """
    relation = relation or shipped_relation()
    codims = {t.graph.codimension for t in relation.terms}
    if len(codims) != 1:
        raise ValueError("relation terms have different codimensions")
    (codim,) = codims
    top = len(model.codegrees) - 1
    need = model.virtual_dimension(relation.genus, len(assignment), degree) - codim - sum(model.codegrees[a] for a in assignment)
    step = model.codegrees[top] - 1
    if need < 0 or need % step:
        raise InfeasibleAssignment(f"assignment {','.join(map(str, assignment))} is infeasible at degree {degree}")
    return need // step


@dataclass(frozen=True)
class DegreeEquation:
    """``unknown_side = known_side`` at one degree and assignment.

    ``poly`` is the full compiled expression, which vanishes; the unknown
    side collects the genus-2 basic series of the equation's own degree.
    """

    degree: int
    assignment: tuple[int, ...]
    poly: Poly

    def unknowns(self) -> list[Symbol]:
        return [Symbol(n, self.degree) for n in GENUS2_SERIES]

    @property
    def unknown_side(self) -> Poly:
        keys = {(s,) for s in self.unknowns()}
        return Poly({k: -v for k, v in self.poly.terms.items() if k in keys})

    @property
    def known_side(self) -> Poly:
        keys = {(s,) for s in self.unknowns()}
        return Poly({k: v for k, v in self.poly.terms.items() if k not in keys})

    def substitute(self, values: Mapping[Symbol, Fraction]) -> Poly:
        return self.poly.substitute(values)

    def __str__(self) -> str:
        return f"[d={self.degree} ({','.join(map(str, self.assignment))})] {self.unknown_side} = {self.known_side}"


def _threads(threads: int | None) -> int:
    if threads is None:
        try:
            threads = int(os.environ.get("STRATA2REC_THREADS", "1"))
        except ValueError:
            threads = 1
    return max(1, threads)


def compile_degree_equation(
    assignment: Sequence[int],
    degree: int,
    relation: RelationExpr | None = None,
    model: TargetModel = PLANE,
    threads: int | None = None,
) -> DegreeEquation:
    """Compile the relation into the degree-``degree`` equation for ``assignment``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if len(assignment) != 3 or any(not 0 <= a < model.size for a in assignment):
        raise ValueError(f"assignment must be three class indices, got {assignment!r}")
    relation = relation or shipped_relation()
    return _compile(tuple(assignment), degree, relation, model, _threads(threads))


@lru_cache(maxsize=256)
def _compile(assignment, degree, relation, model, threads) -> DegreeEquation:
    l = extra_points(assignment, degree, relation, model)
    labels = [mark(i) for i in range(1, relation.markings + 1)]
    counts: dict = {}
    for perm in permutations(assignment):
        counts[perm] = counts.get(perm, 0) + 1
    jobs = []
    for term in relation.terms:
        # an assigned term already fixes which marking sits where
        for perm, mult in (counts.items() if not term.assigned else [(tuple(assignment), factorial(len(assignment)))]):
            jobs.append((term, dict(zip(labels, perm)), mult))

    def run(job):
        term, classes, mult = job
        return integrate_pullback(term, classes, degree, l, model).scale(mult)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    total = Poly()
    for p in parts:
        total.add_scaled(p)
    return DegreeEquation(degree, tuple(sorted(assignment)), total.scale(Fraction(1, factorial(len(assignment)))))


def compile_all(degree: int, relation=None, model=PLANE, threads=None) -> list[DegreeEquation]:
    """Feasible equations at ``degree`` in the fixed assignment order."""
    out = []
    for a in ASSIGNMENTS:
        try:
            out.append(compile_degree_equation(a, degree, relation, model, threads))
        except InfeasibleAssignment:
            continue
    return out


# -- solving -----------------------------------------------------------------------

@dataclass
class DegreeReport:
    degree: int
    equations: int
    rank: int

    @property
    def surplus(self) -> int:
        return self.equations - self.rank


@dataclass
class SeriesTable:
    """Solved series with a provenance tag per entry."""

    values: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    reports: list = field(default_factory=list)
    max_degree: int = 0

    def set(self, sym: Symbol, value: Fraction, tag: str) -> None:
        self.values[sym] = Fraction(value)
        self.provenance[sym] = tag

    def get(self, name: str, degree: int) -> Fraction:
        return self.values[Symbol(name, degree)]

    def row(self, d: int) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(self.get(n, d) for n in GENUS2_SERIES)

    def rows(self) -> list[tuple[int, Fraction, Fraction, Fraction]]:
        return [(d,) + self.row(d) for d in range(1, self.max_degree + 1)]


class _Row:
    __slots__ = ("coeffs", "const", "origin")

    def __init__(self, coeffs: dict, const: Fraction, origin):
        self.coeffs = coeffs
        self.const = const
        self.origin = origin


def _linear_row(poly: Poly, origin) -> _Row:
    coeffs = {}
    const = Fraction(0)
    for mono, c in poly.terms.items():
        if not mono:
            const = c
        elif len(mono) == 1:
            coeffs[mono[0]] = c
        else:
            raise ValueError(f"nonlinear equation after substitution: {' '.join(map(str, mono))}")
    return _Row(coeffs, const, origin)


def _eliminate(rows: list[_Row], degree: int):
    """Echelon form over the unknowns; raises on an inconsistent row."""
    cols = sorted({s for r in rows for s in r.coeffs})
    matrix: list[list[Fraction]] = []
    for r in rows:
        matrix.append([r.coeffs.get(s, Fraction(0)) for s in cols] + [-r.const])
        red, pivots = linalg.rref(matrix)
        if len(cols) in pivots:
            raise InconsistentSystem(degree, r.origin, red[pivots.index(len(cols))][-1])
    if not matrix:
        return cols, [], []
    return (cols,) + linalg.rref(matrix)


def solve_up_to(
    max_degree: int,
    genus1: Genus1Data | None = None,
    relation: RelationExpr | None = None,
    constants: Mapping[Symbol, Fraction] | None = None,
    infer_genus1: bool = False,
    model: TargetModel = PLANE,
    threads: int | None = None,
) -> SeriesTable:
    """Solve for ``(N2, H2, P2)(d)`` for ``d = 1..max_degree``.

    Equations of degree ``max_degree + 1`` are needed, so genus-0 and genus-1
    input must reach that degree.  Every equation beyond those needed to fix
    the unknowns is checked exactly.  With ``infer_genus1`` the genus-1
    series is treated as unknown too (``genus1`` then only supplies ``c1``).
    ``constants`` overrides the degree-0 values; ``None`` leaves one unknown.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    if genus1 is None:
        genus1 = genus1_load()
    horizon = max_degree + 1
    if not infer_genus1:
        genus1.require(horizon)
    table = SeriesTable(max_degree=max_degree)
    consts = dict(DEGREE_ZERO)
    if constants:
        consts.update(constants)
    for sym, v in consts.items():
        if v is None:
            continue
        table.set(sym, v, "constant")
    table.set(Symbol("C1"), genus1.c1, "loaded")
    for d in range(1, horizon + 1):
        table.set(Symbol("N0", d), genus0(d), "computed")
        if not infer_genus1:
            table.set(Symbol("N1", d), genus1[d], "loaded")

    pending: list[_Row] = []
    for k in range(1, horizon + 1):
        rows = list(pending)
        for eq in compile_all(k, relation, model, threads):
            rows.append(_linear_row(eq.substitute(table.values), eq.assignment))
        cols, red, pivots = _eliminate(rows, k)
        table.reports.append(DegreeReport(k, len(rows), len(pivots)))
        solved = {}
        for i, p in enumerate(pivots):
            if all(red[i][j] == 0 for j in range(len(cols)) if j != p):
                solved[cols[p]] = red[i][-1]
        targets = [Symbol(n, k - 1) for n in GENUS2_SERIES] if k >= 2 else []
        if infer_genus1 and k >= 4:
            targets.append(Symbol("N1", k - 1))
        missing = [s for s in targets if s not in solved and s not in table.values]
        if missing:
            raise Underdetermined(k - 1, missing)
        for s, v in solved.items():
            table.set(s, v, "solved")
        pending = []
        for i, p in enumerate(pivots):
            if cols[p] in solved:
                continue
            coeffs = {cols[j]: red[i][j] for j in range(len(cols)) if red[i][j] and cols[j] not in solved}
            pending.append(_Row(coeffs, -red[i][-1], None))
    # keep only entries of the requested range for the genus-2 series
    for sym in list(table.values):
        if sym.name in GENUS2_SERIES and sym.degree > max_degree:
            del table.values[sym]
            del table.provenance[sym]
    return table


# -- the printed (T1,T1,T1) recursion --------------------------------------------

def _multinomial(n: int, *parts: int) -> int:
    if any(p < 0 for p in parts) or sum(parts) != n:
        return 0
    r = factorial(n)
    for p in parts:
        r //= factorial(p)
    return r


def printed_coefficients(d: int, p20_sign: int = -1) -> dict[str, dict[tuple[int, ...], Fraction]]:
    """The six coefficient families of the (T1,T1,T1) recursion, per ordered split.

    ``p20_sign`` is the sign of the second summand of ``p20``; the value
    consistent with the solved table is ``-1``.
    """
    fam: dict[str, dict] = {k: {} for k in ("p200", "p110", "p20", "ph0", "p11", "p10")}
    n = 3 * d - 1
    for d1 in range(1, d):
        for d2 in range(1, d - d1):
            d3 = d - d1 - d2
            fam["p200"][(d1, d2, d3)] = Fraction(
                -2 * _multinomial(n, 3 * d1 + 1, 3 * d2 - 1, 3 * d3 - 1) * d1 * d2**2 * d3**3 * (d2 + d3)
            )
            fam["p110"][(d1, d2, d3)] = Fraction(
                _multinomial(n, 3 * d1, 3 * d2, 3 * d3 - 1) * d1 * d2 * d3**3 * (-9 * d1 * d2 + 6 * d2**2 - 12 * d2 * d3 + d3**2),
                5,
            )
    for d1 in range(1, d):
        d2 = d - d1
        b = comb(n, 3 * d1)
        fam["p20"][(d1, d2)] = Fraction(
            comb(n, 3 * d1 + 1) * d2 * (3 * d1**2 - 10 * d1 * d2 + 4 * d2**2) + p20_sign * b * d2**2 * (3 * d1 + 2 * d2)
        )
        fam["ph0"][(d1, d2)] = Fraction(2 * b * d2**4)
        fam["p11"][(d1, d2)] = Fraction(3 * b * d1 * (4 * d1**2 - 9 * d1 * d2 + 2 * d2**2), 5)
        fam["p10"][(d1, d2)] = Fraction(
            b * d1 * d2**3 * (-18 * d1**2 + 36 * d1 * d2 - 6 * d2**2 + 5 * d1**3 - 33 * d1**2 * d2 + 3 * d1 * d2**2 + d2**3),
            120,
        )
    return fam


FAMILY_SYMBOLS = {
    "p200": ("N2", "N0", "N0"),
    "p110": ("N1", "N1", "N0"),
    "p20": ("N2", "N0"),
    "ph0": ("H2", "N0"),
    "p11": ("N1", "N1"),
    "p10": ("N1", "N0"),
}


def printed_recursion(d: int, p20_sign: int = -1) -> Poly:
    """Right-hand side of the printed recursion for ``-3 H2(d) + 3d P2(d)``."""
    out = Poly()
    for name, values in printed_coefficients(d, p20_sign).items():
        names = FAMILY_SYMBOLS[name]
        for split, c in values.items():
            out.add_scaled(Poly({tuple(Symbol(s, k) for s, k in zip(names, split)): c}))
    out.add_scaled(Poly({(Symbol("N0", d),): Fraction(-(d**4) * (d - 1) * (d - 2), 960)}))
    out.add_scaled(Poly({(Symbol("N1", d),): Fraction(d * d * (5 * d - 6), 40)}))
    return out


def _render(x) -> str:
    return str(Fraction(x))


def verify_printed_recursion(
    max_degree: int,
    table: SeriesTable | None = None,
    literal: bool = False,
    genus1: Genus1Data | None = None,
    relation: RelationExpr | None = None,
    threads: int | None = None,
) -> dict:
    """Check the printed (T1,T1,T1) recursion against the compiled equation and the table.

    With ``literal`` the coefficient ``p20`` is taken with the sign as
    printed (``+``); otherwise with the sign consistent with the table.
    The returned report is JSON-serializable; ``report["ok"]`` is the verdict.
    """
    if genus1 is None:
        genus1 = genus1_load()
    if table is None:
        table = solve_up_to(max_degree, genus1, relation, threads=threads)
    sign = 1 if literal else -1
    consts = dict(DEGREE_ZERO)
    consts[Symbol("C1")] = genus1.c1
    checks = []
    ok = True
    for d in range(1, max_degree + 1):
        eq = compile_degree_equation((1, 1, 1), d, relation, threads=threads)
        printed = printed_recursion(d, sign)
        compiled = eq.known_side.substitute(consts)
        expected_unknown = Poly({(Symbol("H2", d),): Fraction(-3), (Symbol("P2", d),): Fraction(3 * d)})
        mismatches = []
        if eq.unknown_side != expected_unknown:
            mismatches.append({"term": "unknown side", "compiled": str(eq.unknown_side), "printed": str(expected_unknown)})
        diff = compiled - printed
        for mono in sorted(diff.terms):
            mismatches.append({
                "term": "*".join(map(str, mono)) or "1",
                "compiled": _render(compiled.coefficient(*mono)),
                "printed": _render(printed.coefficient(*mono)),
            })
        values = dict(table.values)
        lhs = eq.unknown_side.substitute(values)
        rhs = printed.substitute(values)
        numeric = lhs == rhs and not lhs.symbols()
        checks.append({
            "degree": d,
            "coefficients_match": not mismatches,
            "mismatches": mismatches,
            "lhs": _render(lhs.constant_term),
            "rhs": _render(rhs.constant_term),
            "table_satisfies_recursion": numeric,
        })
        ok = ok and numeric and not mismatches
    surplus = [
        {"degree": r.degree, "equations": r.equations, "rank": r.rank, "surplus": r.surplus}
        for r in table.reports
    ]
    return {
        "max_degree": max_degree,
        "p20_second_sign": "+" if literal else "-",
        "checks": checks,
        "surplus": surplus,
        "ok": ok,
    }


# -- the truncated potential -------------------------------------------------------

def parse_monomial(text: str) -> dict[tuple[int, int], int]:
    """Parse ``t21*t20^5`` into ``{(2, 1): 1, (2, 0): 5}`` (``t<class><psi>``)."""
    out: dict[tuple[int, int], int] = {}
    for factor in filter(None, (f.strip() for f in text.replace(" ", "").split("*"))):
        base, _, power = factor.partition("^")
        if len(base) != 3 or base[0] != "t" or not base[1:].isdigit():
            raise ValueError(f"bad variable {base!r}; expected t<class><psi>")
        key = (int(base[1]), int(base[2]))
        out[key] = out.get(key, 0) + (int(power) if power else 1)
    return out


def potential_coefficient(monomial: Mapping[tuple[int, int], int] | str, table: SeriesTable, model: TargetModel = PLANE) -> Fraction:
    """Coefficient of ``prod (t^i_j)^m / m!`` in the 1-cotangent genus-2 potential.

    The degree is fixed by dimension.  Monomials with a second cotangent
    power or two cotangent variables lie outside the cut-off.
    """
    if isinstance(monomial, str):
        monomial = parse_monomial(monomial)
    ins = []
    for (i, j), m in monomial.items():
        if not 0 <= i < model.size or m < 0:
            raise ValueError(f"bad variable t{i}{j}")
        ins += [(i, j)] * m
    psi = [x for x in ins if x[1] > 0]
    if len(psi) > 1 or any(j > 1 for _, j in ins):
        raise ValueError("monomial outside the 1-cotangent cut-off")
    weight = sum(model.codegrees[i] + j for i, j in ins) - len(ins) - (model.dimension - 3) * (1 - 2)
    if weight % model.first_chern_degree:
        return Fraction(0)
    d = weight // model.first_chern_degree
    if d < 0:
        return Fraction(0)
    form = reduce(CorrelatorKey(2, d, tuple(ins)), model)
    value = form.substitute(table.values)
    if value.symbols():
        raise InsufficientData("series not solved through degree " + str(d))
    return value.constant_term


# -- closed-form detection -----------------------------------------------------------

def fit_polynomial(points: Sequence[tuple[tuple[int, ...], Fraction]], max_total_degree: int = 8):
    """Smallest-degree exact polynomial through the points, or None.

    A fit is accepted only when it is overdetermined by at least two points.
    Returns ``{exponents: coefficient}``.
    """
    if not points:
        return None
    nvars = len(points[0][0])
    for deg in range(max_total_degree + 1):
        monos = [e for e in product(range(deg + 1), repeat=nvars) if sum(e) <= deg]
        if len(points) < len(monos) + 2:
            return None
        rows = []
        for x, y in points:
            row = []
            for e in monos:
                v = 1
                for xi, ei in zip(x, e):
                    v *= xi**ei
                row.append(v)
            rows.append(row + [y])
        red, pivots = linalg.rref(rows)
        if len(monos) in pivots:
            continue
        if len(pivots) < len(monos):
            return None
        return {monos[p]: red[i][-1] for i, p in enumerate(pivots) if red[i][-1]}
    return None


def format_polynomial(poly: Mapping[tuple[int, ...], Fraction], names: Sequence[str]) -> str:
    if not poly:
        return "0"
    parts = []
    for e, c in sorted(poly.items(), key=lambda kv: (-sum(kv[0]), [-x for x in kv[0]])):
        vars_ = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        if not vars_:
            parts.append(str(c))
        else:
            parts.append(vars_ if c == 1 else ("-" + vars_ if c == -1 else f"{c}*{vars_}"))
    return " + ".join(parts).replace("+ -", "- ")

"""Splitting formula and reduction of correlators to the basic series.

Correlators are brackets ``<(T_a psi^k) ...>_{g,d}`` over the target.  The
reduction rules are those of the plane: dimension selection, the
fundamental class, string, dilaton and divisor equations (with the
descendent correction), classical degree-0 values and the basic symbols

    N0(d) = <T2^{3d-1}>_{0,d}      N1(d) = <T2^{3d}>_{1,d}
    N2(d) = <T2^{3d+1}>_{2,d}      H2(d) = <(T1 psi) T2^{3d}>_{2,d}
    P2(d) = <(T2 psi) T2^{3d-1}>_{2,d}     C1 = <T1>_{1,0}

For 1-cotangent integrals of positive genus on the plane the descendents
built from cotangent lines pulled back from the moduli of curves agree with
the ordinary ones, so a single correlator notion is used throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .graphs import DualGraph, Label, StratumTerm, graph_automorphisms
from .model import PLANE, TargetModel


class IrreducibleCorrelator(ValueError):
    """The rule system has no rewrite for a correlator."""


class Symbol(NamedTuple):
    name: str
    degree: int = 0

    def __str__(self) -> str:
        return self.name if self.name == "C1" else f"{self.name}({self.degree})"


Monomial = tuple  # sorted tuple of Symbol


class Poly:
    """Polynomial with Fraction coefficients in the basic symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[tuple(sorted(k))] = Fraction(v)

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def symbol(cls, name: str, degree: int = 0) -> "Poly":
        return cls({(Symbol(name, degree),): Fraction(1)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            body = "*".join(str(s) for s in mono)
            parts.append(f"{c}" if not body else (body if c == 1 else f"{c}*{body}"))
        return " + ".join(parts)

    def add_scaled(self, other: "Poly", c=1) -> "Poly":
        """In-place ``self += c * other``."""
        for k, v in other.terms.items():
            nv = self.terms.get(k, 0) + c * v
            if nv:
                self.terms[k] = nv
            else:
                self.terms.pop(k, None)
        return self

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.terms).add_scaled(other)

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(self.terms).add_scaled(other, -1)

    def __neg__(self) -> "Poly":
        return self.scale(-1)

    def scale(self, c) -> "Poly":
        out = Poly()
        if c:
            out.terms = {k: v * c for k, v in self.terms.items()}
        return out

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        out = Poly()
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(sorted(ka + kb))
                nv = out.terms.get(k, 0) + va * vb
                if nv:
                    out.terms[k] = nv
                else:
                    out.terms.pop(k, None)
        return out

    __rmul__ = __mul__

    def coefficient(self, *symbols: Symbol) -> Fraction:
        return self.terms.get(tuple(sorted(symbols)), Fraction(0))

    def symbols(self) -> set:
        return {s for k in self.terms for s in k}

    def substitute(self, values: Mapping[Symbol, Fraction]) -> "Poly":
        out = Poly()
        for k, v in self.terms.items():
            rest = []
            for s in k:
                if s in values:
                    v = v * values[s]
                else:
                    rest.append(s)
            out.add_scaled(Poly({tuple(rest): v}))
        return out

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))


BasicForm = Poly


@dataclass(frozen=True, order=True)
class CorrelatorKey:
    genus: int
    degree: int
    insertions: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "insertions", tuple(sorted(tuple(x) for x in self.insertions)))

    def __str__(self) -> str:
        counts: dict = {}
        for x in self.insertions:
            counts[x] = counts.get(x, 0) + 1
        parts = []
        for (a, k), m in sorted(counts.items()):
            body = f"T{a}" if k == 0 else (f"(T{a}ψ)" if k == 1 else f"(T{a}ψ^{k})")
            parts.append(body if m == 1 else f"{body}^{m}")
        return f"⟨{' '.join(parts)}⟩_{{{self.genus},{self.degree}}}"


def _cup(model: TargetModel, a: int, b: int) -> int | None:
    c = model.codegrees[a] + model.codegrees[b]
    return model.codegrees.index(c) if c in model.codegrees else None


def _classical(model: TargetModel, a: int, b: int, c: int) -> Fraction:
    ab = _cup(model, a, b)
    return Fraction(0) if ab is None else model.pairing[ab][c]


def reduce(key: CorrelatorKey, model: TargetModel = PLANE) -> Poly:
    """Rewrite a correlator as a linear form in the basic symbols."""
    if not model.reducible:
        raise IrreducibleCorrelator(f"no reduction rules for target {model.name}")
    return Poly(dict(_reduce(key.genus, key.degree, key.insertions, model)))


def _rest(ins: tuple, i: int, replace: tuple | None = None) -> tuple:
    r = list(ins[:i] + ins[i + 1 :])
    if replace is not None:
        j, new = replace
        r[r.index(j)] = new
    return tuple(sorted(r))


@lru_cache(maxsize=None)
def _reduce(g: int, d: int, ins: tuple, model: TargetModel) -> tuple:
    n = len(ins)
    codeg = model.codegrees
    if sum(codeg[a] + k for a, k in ins) != model.virtual_dimension(g, n, d):
        return ()
    psi = [x for x in ins if x[1] > 0]
    if len(psi) > 1 or any(k > 1 for _, k in psi) or (psi and g < 2):
        raise IrreducibleCorrelator(str(CorrelatorKey(g, d, ins)))
    if g == 0 and d == 0:
        return (((), _classical(model, *(a for a, _ in ins))),) if n == 3 else ()
    rest_stable = 2 * g - 2 + (n - 1) > 0 or d > 0
    unit, divisor = 0, codeg.index(1)
    if rest_stable and (unit, 0) in ins:
        # string equation; without psi the fundamental class kills the correlator
        if not psi:
            return ()
        (a, _), = psi
        return _reduce(g, d, _rest(ins, ins.index((unit, 0)), (psi[0], (a, 0))), model)
    if rest_stable and (unit, 1) in ins:
        factor = 2 * g - 2 + n - 1
        return tuple((k, v * factor) for k, v in _reduce(g, d, _rest(ins, ins.index((unit, 1))), model))
    if rest_stable and (divisor, 0) in ins:
        rest = _rest(ins, ins.index((divisor, 0)))
        acc = Poly()
        acc.add_scaled(Poly(dict(_reduce(g, d, rest, model))), d)
        if psi:
            (a, _), = psi
            b = _cup(model, divisor, a)
            if b is not None:
                lowered = tuple(sorted(_swap(rest, psi[0], (b, 0))))
                acc.add_scaled(Poly(dict(_reduce(g, d, lowered, model))))
        return tuple(acc.terms.items())
    return _base(g, d, ins, model)


def _swap(ins: tuple, old, new) -> list:
    r = list(ins)
    r[r.index(old)] = new
    return r


def _base(g: int, d: int, ins: tuple, model: TargetModel) -> tuple:
    top = len(model.codegrees) - 1
    divisor = model.codegrees.index(1)
    plain = [a for a, k in ins if k == 0]
    psi = [a for a, k in ins if k == 1]
    one = Fraction(1)
    if g == 1 and d == 0 and ins == ((divisor, 0),):
        return (((Symbol("C1"),), one),)
    if any(a != top for a in plain):
        raise IrreducibleCorrelator(str(CorrelatorKey(g, d, ins)))
    if not psi:
        if g == 0 and d >= 1:
            return (((Symbol("N0", d),), one),)
        if g == 1 and d >= 1:
            return (((Symbol("N1", d),), one),)
        if g == 2:
            return (((Symbol("N2", d),), one),)
    elif g == 2 and psi == [divisor]:
        return (((Symbol("H2", d),), one),)
    elif g == 2 and psi == [top] and d >= 1:
        return (((Symbol("P2", d),), one),)
    raise IrreducibleCorrelator(str(CorrelatorKey(g, d, ins)))


# -- splitting formula ------------------------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for i in range(total + 1):
        for rest in _compositions(total - i, parts - 1):
            yield (i,) + rest


def _diagonal(model: TargetModel) -> list[tuple[int, int, Fraction]]:
    inv = model.pairing_inverse()
    return [(i, j, inv[i][j]) for i in range(model.size) for j in range(model.size) if inv[i][j]]


def _vertex_slots(graph: DualGraph, insertion: Mapping[Label, tuple[int, int]]):
    """Per vertex: list of ('leg', label) / ('flag', flag) slots with their psi."""
    slots = [[] for _ in graph.genera]
    for label, v in graph.legs:
        slots[v].append(("leg", label, graph.psi_of_leg(label)))
    for i, (u, v) in enumerate(graph.edges):
        slots[u].append(("flag", (i, 0), graph.psi_of_flag((i, 0))))
        slots[v].append(("flag", (i, 1), graph.psi_of_flag((i, 1))))
    return slots


def split_term(
    term: StratumTerm,
    assignment: Mapping[Label, int | tuple[int, int]],
    degree: int,
    model: TargetModel = PLANE,
) -> list[tuple[Fraction, tuple[CorrelatorKey, ...]]]:
    """Restrict a degree-``degree`` Gromov-Witten class to a stratum.

    ``assignment`` gives a basis index (optionally with a psi power) for every
    marking.  Returns ``(coefficient, correlators)`` pairs, one correlator per
    vertex, summed over flag colorings and degree distributions.
    """
    graph = term.graph
    ins = {l: (a, 0) if isinstance(a, int) else tuple(a) for l, a in assignment.items()}
    if set(ins) != set(graph.markings):
        raise ValueError("assignment must cover exactly the markings of the graph")
    slots = _vertex_slots(graph, ins)
    inv = model.pairing_inverse()
    weight = term.coefficient / graph_automorphisms(graph)
    out = []
    nflags = 2 * len(graph.edges)
    for colors in product(range(model.size), repeat=nflags):
        c = weight
        for i in range(len(graph.edges)):
            c *= inv[colors[2 * i]][colors[2 * i + 1]]
            if not c:
                break
        if not c:
            continue
        for phi in _compositions(degree, graph.num_vertices):
            keys = []
            for v, vs in enumerate(slots):
                items = []
                for kind, where, k in vs:
                    if kind == "leg":
                        a, p = ins[where]
                    else:
                        a, p = colors[2 * where[0] + where[1]], 0
                    items.append((a, p + k))
                keys.append(CorrelatorKey(graph.genera[v], phi[v], tuple(items)))
            out.append((c, tuple(keys)))
    return out


def evaluate(products: Iterable[tuple[Fraction, Sequence[CorrelatorKey]]], model: TargetModel = PLANE) -> Poly:
    total = Poly()
    for c, keys in products:
        value = Poly.constant(c)
        for key in keys:
            value = value * reduce(key, model)
            if not value:
                break
        total.add_scaled(value)
    return total


# -- counted pull-back evaluation -------------------------------------------------

def integrate_pullback(
    term: StratumTerm,
    classes: Mapping[Label, int],
    degree: int,
    extra_points: int,
    model: TargetModel = PLANE,
    extra_class: int | None = None,
) -> Poly:
    """Pair the pull-back of ``term`` with a Gromov-Witten class.

    The extra points all carry ``extra_class`` (the point class by default),
    so distributions are counted rather than enumerated.  Equivalent to
    pulling back with :func:`pullback.pullback_relation`, applying
    :func:`split_term` and :func:`evaluate`.
    """
    from .pullback import _psi_slot, _with_points

    if extra_class is None:
        extra_class = len(model.codegrees) - 1
    graph = term.graph
    weight = term.coefficient / graph_automorphisms(graph)
    total = _counted(graph, classes, degree, extra_points, model, extra_class, None)
    slot = _psi_slot(graph)
    if slot is not None:
        bubble = _with_points(graph, [], [], slot)
        total.add_scaled(_counted(bubble, classes, degree, extra_points, model, extra_class, bubble.num_vertices - 1), -1)
    return total.scale(weight)


def _counted(graph, classes, degree, l, model, extra_class, bubble) -> Poly:
    slots = _vertex_slots(graph, {})
    diag = _diagonal(model)
    codeg = model.codegrees
    step = codeg[extra_class] - 1
    nv = graph.num_vertices
    total = Poly()
    for pairs in product(diag, repeat=len(graph.edges)):
        c = Fraction(1)
        for _, _, val in pairs:
            c *= val
        base = []
        for v, vs in enumerate(slots):
            items = []
            for kind, where, k in vs:
                a = classes[where] if kind == "leg" else pairs[where[0]][where[1]]
                items.append((a, k))
            base.append(items)
        fixed = [sum(codeg[a] + k for a, k in items) for items in base]
        for phi in _compositions(degree, nv):
            counts = []
            for v in range(nv):
                room = model.virtual_dimension(graph.genera[v], len(base[v]), phi[v]) - fixed[v]
                if room < 0 or room % step:
                    break
                nvx = room // step
                if bubble == v and nvx < 1:
                    break
                counts.append(nvx)
            else:
                if sum(counts) != l:
                    continue
                mult = factorial(l)
                for x in counts:
                    mult //= factorial(x)
                value = Poly.constant(c * mult)
                for v in range(nv):
                    ins = tuple(sorted(base[v] + [(extra_class, 0)] * counts[v]))
                    value = value * Poly(dict(_reduce(graph.genera[v], phi[v], ins, model)))
                    if not value:
                        break
                total.add_scaled(value)
    return total

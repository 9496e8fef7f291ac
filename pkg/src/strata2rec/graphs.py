"""Decorated stable dual graphs and formal combinations of strata.

A :class:`DualGraph` has vertices carrying genus labels, legs (markings)
attached to vertices, edges as vertex pairs (loops and parallel edges are
allowed) and cotangent-line exponents on legs or on edge flags.  The flag
``(i, 0)`` of edge ``i = (u, v)`` sits at ``u``, the flag ``(i, 1)`` at ``v``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence


class StrataError(ValueError):
    """A graph or relation violates a structural invariant."""


class Label(NamedTuple):
    """Marking label; ``kind`` is ``"m"`` for original markings, ``"q"`` for extra points."""

    kind: str
    index: int

    def __str__(self) -> str:
        return str(self.index) if self.kind == "m" else f"q{self.index}"

    @property
    def is_extra(self) -> bool:
        return self.kind == "q"

    @classmethod
    def parse(cls, text: str) -> "Label":
        text = text.strip()
        if text.startswith("q") and text[1:].isdigit():
            return cls("q", int(text[1:]))
        if text.isdigit():
            return cls("m", int(text))
        raise ValueError(f"bad marking label {text!r}")


def mark(i: int) -> Label:
    return Label("m", i)


def extra(i: int) -> Label:
    return Label("q", i)


Flag = tuple  # (edge index, end)


@dataclass(frozen=True)
class DualGraph:
    genera: tuple[int, ...]
    legs: tuple[tuple[Label, int], ...]
    edges: tuple[tuple[int, int], ...] = ()
    leg_psi: tuple[tuple[Label, int], ...] = ()
    flag_psi: tuple[tuple[Flag, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "genera", tuple(self.genera))
        object.__setattr__(self, "legs", tuple(sorted((Label(*l), v) for l, v in self.legs)))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "leg_psi", tuple(sorted((Label(*l), e) for l, e in self.leg_psi if e)))
        object.__setattr__(self, "flag_psi", tuple(sorted((tuple(f), e) for f, e in self.flag_psi if e)))
        nv = len(self.genera)
        labels = [l for l, _ in self.legs]
        if len(set(labels)) != len(labels):
            raise StrataError("a marking label appears on more than one vertex")
        if any(not 0 <= v < nv for _, v in self.legs) or any(not (0 <= u < nv and 0 <= v < nv) for u, v in self.edges):
            raise StrataError("leg or edge refers to a missing vertex")
        if any(g < 0 for g in self.genera):
            raise StrataError("negative genus label")
        if any(l not in labels for l, _ in self.leg_psi):
            raise StrataError("psi decoration on a missing marking")
        if any(not (0 <= f[0] < len(self.edges) and f[1] in (0, 1)) for f, _ in self.flag_psi):
            raise StrataError("psi decoration on a missing edge flag")

    # -- structure ---------------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    def leg_vertex(self, label: Label) -> int:
        for l, v in self.legs:
            if l == label:
                return v
        raise KeyError(label)

    def flag_vertex(self, flag: Flag) -> int:
        return self.edges[flag[0]][flag[1]]

    def legs_at(self, v: int) -> list[Label]:
        return [l for l, w in self.legs if w == v]

    def flags_at(self, v: int) -> list[Flag]:
        return [(i, end) for i, e in enumerate(self.edges) for end in (0, 1) if e[end] == v]

    def valence(self, v: int) -> int:
        return len(self.legs_at(v)) + len(self.flags_at(v))

    def psi_of_leg(self, label: Label) -> int:
        return dict(self.leg_psi).get(label, 0)

    def psi_of_flag(self, flag: Flag) -> int:
        return dict(self.flag_psi).get(tuple(flag), 0)

    def psi_at(self, v: int) -> int:
        return sum(e for l, e in self.leg_psi if self.leg_vertex(l) == v) + sum(
            e for f, e in self.flag_psi if self.flag_vertex(f) == v
        )

    @property
    def betti(self) -> int:
        # first Betti number of a connected graph
        return len(self.edges) - self.num_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.betti

    @property
    def codimension(self) -> int:
        return len(self.edges) + sum(e for _, e in self.leg_psi) + sum(e for _, e in self.flag_psi)

    @property
    def markings(self) -> tuple[Label, ...]:
        return tuple(l for l, _ in self.legs)

    def is_connected(self) -> bool:
        if not self.genera:
            return False
        seen, stack = {0}, [0]
        while stack:
            v = stack.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == self.num_vertices

    def validate(self, genus: int | None = None, markings: Iterable[Label] | None = None) -> "DualGraph":
        if not self.is_connected():
            raise StrataError("graph is not connected")
        for v, g in enumerate(self.genera):
            if 2 * g - 2 + self.valence(v) <= 0:
                raise StrataError(f"vertex {v} (genus {g}, valence {self.valence(v)}) is unstable")
        if genus is not None and self.genus != genus:
            raise StrataError(f"total genus {self.genus} differs from ambient genus {genus}")
        if markings is not None and sorted(markings) != sorted(self.markings):
            raise StrataError("markings do not match the ambient marking set")
        return self

    # -- transformations ---------------------------------------------------
    def relabel(self, mapping: Mapping[Label, Label]) -> "DualGraph":
        m = lambda l: mapping.get(l, l)
        return DualGraph(
            self.genera,
            tuple((m(l), v) for l, v in self.legs),
            self.edges,
            tuple((m(l), e) for l, e in self.leg_psi),
            self.flag_psi,
        )

    def canonical(self) -> "DualGraph":
        return _canonical(self)[0]

    def __str__(self) -> str:
        from .dsl import format_graph

        return format_graph(self)


# -- canonical forms -----------------------------------------------------------

def _vertex_color(g: DualGraph, v: int):
    return (
        g.genera[v],
        g.valence(v),
        tuple(sorted((l, g.psi_of_leg(l)) for l in g.legs_at(v))),
        tuple(sorted(g.psi_of_flag(f) for f in g.flags_at(v))),
    )


def _encode(g: DualGraph, order: Sequence[int]):
    pos = {v: i for i, v in enumerate(order)}
    genera = tuple(g.genera[v] for v in order)
    legs = tuple(sorted((l, pos[v], g.psi_of_leg(l)) for l, v in g.legs))
    edges = []
    for i, (u, v) in enumerate(g.edges):
        a = (pos[u], g.psi_of_flag((i, 0)))
        b = (pos[v], g.psi_of_flag((i, 1)))
        edges.append((a, b) if a <= b else (b, a))
    return genera, legs, tuple(sorted(edges))


def _orderings(g: DualGraph) -> Iterator[tuple[int, ...]]:
    colors = {v: _vertex_color(g, v) for v in range(g.num_vertices)}
    blocks: dict = {}
    for v in range(g.num_vertices):
        blocks.setdefault(colors[v], []).append(v)
    keys = sorted(blocks)
    for choice in product(*(permutations(blocks[k]) for k in keys)):
        yield tuple(v for block in choice for v in block)


def _canonical(g: DualGraph):
    best, count = None, 0
    for order in _orderings(g):
        enc = _encode(g, order)
        if best is None or enc < best:
            best, count = enc, 1
        elif enc == best:
            count += 1
    genera, legs, edges = best
    graph = DualGraph(
        genera,
        tuple((l, v) for l, v, _ in legs),
        tuple((a[0], b[0]) for a, b in edges),
        tuple((l, e) for l, _, e in legs),
        tuple(((i, end), side[1]) for i, (a, b) in enumerate(edges) for end, side in ((0, a), (1, b))),
    )
    return graph, best, count


def canonical_form(graph: DualGraph):
    """Hashable encoding, equal for two graphs iff they are isomorphic.

    Isomorphisms fix marking labels and respect genus labels and cotangent
    exponents.
    """
    return _canonical(graph)[1]


def graph_automorphisms(graph: DualGraph) -> int:
    """Order of the automorphism group acting on vertices and edge flags."""
    _, enc, vertex_autos = _canonical(graph)
    total = vertex_autos
    for mult in Counter(enc[2]).values():
        total *= factorial(mult)
    for a, b in enc[2]:
        if a == b:
            total *= 2
    return total


# -- terms and relations -------------------------------------------------------

@dataclass(frozen=True)
class StratumTerm:
    """``coefficient`` times the stratum class of ``graph``.

    An unassigned term stands for the sum over all relabelings of its
    original markings.
    """

    coefficient: Fraction
    graph: DualGraph
    assigned: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))

    def scaled(self, c) -> "StratumTerm":
        return StratumTerm(self.coefficient * c, self.graph, self.assigned)


@dataclass(frozen=True)
class RelationExpr:
    terms: tuple[StratumTerm, ...]
    genus: int
    markings: int
    extra: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(mark(i) for i in range(1, self.markings + 1)) + tuple(extra(i) for i in range(1, self.extra + 1))

    def coefficients(self) -> list[Fraction]:
        return [t.coefficient for t in self.terms]

    def expanded(self) -> "RelationExpr":
        """All terms assigned, isomorphic graphs merged."""
        out: list[StratumTerm] = []
        for t in self.terms:
            out.extend(expand_unassigned(t) if not t.assigned else [t])
        return RelationExpr(merge_terms(out), self.genus, self.markings, self.extra)

    def canonical_terms(self) -> dict:
        """Map canonical encoding -> coefficient of the expanded expression."""
        return {canonical_form(t.graph): t.coefficient for t in self.expanded().terms}

    def __add__(self, other: "RelationExpr") -> "RelationExpr":
        return RelationExpr(self.terms + other.terms, self.genus, self.markings, max(self.extra, other.extra))

    def scaled(self, c) -> "RelationExpr":
        return RelationExpr(tuple(t.scaled(c) for t in self.terms), self.genus, self.markings, self.extra)


def merge_terms(terms: Iterable[StratumTerm]) -> tuple[StratumTerm, ...]:
    """Combine terms with isomorphic graphs (and equal assignment flag).

    Zero terms are dropped; output order is deterministic.
    """
    acc: dict = {}
    graphs: dict = {}
    for t in terms:
        g, enc, _ = _canonical(t.graph)
        key = (t.assigned, enc)
        acc[key] = acc.get(key, Fraction(0)) + t.coefficient
        graphs[key] = g
    return tuple(StratumTerm(c, graphs[k], k[0]) for k, c in sorted(acc.items()) if c != 0)


def expand_unassigned(term: StratumTerm) -> list[StratumTerm]:
    """Sum over all assignments of the original markings, merged by isomorphism."""
    if term.assigned:
        raise StrataError("term is already assigned")
    originals = sorted(l for l in term.graph.markings if not l.is_extra)
    out = []
    for perm in permutations(originals):
        out.append(StratumTerm(term.coefficient, term.graph.relabel(dict(zip(originals, perm)))))
    return list(merge_terms(out))

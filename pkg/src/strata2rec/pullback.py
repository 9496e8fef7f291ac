"""Pull-back of (descendent) stratum classes along maps forgetting points.

Extra points carry labels ``q1, q2, ...``.  Coefficients are those of stack
stratum classes, so a distribution ``f`` of the extra points contributes
with weight ``|Aut Γ_f| / |Aut Γ|`` before isomorphic outputs are merged.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .graphs import DualGraph, Label, RelationExpr, StrataError, StratumTerm, extra, graph_automorphisms, merge_terms


def _psi_slot(graph: DualGraph):
    slots = [("leg", l, e) for l, e in graph.leg_psi] + [("flag", f, e) for f, e in graph.flag_psi]
    if len(slots) > 1 or any(e > 1 for *_, e in slots):
        raise NotImplementedError("only a single first power of psi can be pulled back")
    return slots[0] if slots else None


def _with_points(graph: DualGraph, labels, targets, bubble_slot=None) -> DualGraph:
    genera = list(graph.genera)
    legs = list(graph.legs)
    edges = list(graph.edges)
    leg_psi = list(graph.leg_psi)
    flag_psi = list(graph.flag_psi)
    if bubble_slot is not None:
        kind, where, _ = bubble_slot
        b = len(genera)
        genera.append(0)
        if kind == "leg":
            v = graph.leg_vertex(where)
            legs = [(l, b if l == where else w) for l, w in legs]
            leg_psi = []
        else:
            i, end = where
            v = edges[i][end]
            e = list(edges[i])
            e[end] = b
            edges[i] = tuple(e)
            flag_psi = []
        edges.append((v, b))
    legs += list(zip(labels, targets))
    return DualGraph(tuple(genera), tuple(legs), tuple(edges), tuple(leg_psi), tuple(flag_psi))


def _pullback(term: StratumTerm, l: int, first: int, merge: bool, with_psi: bool) -> list[StratumTerm]:
    graph = term.graph
    slot = _psi_slot(graph)
    if with_psi != (slot is not None):
        raise StrataError("pullback_psi needs exactly one psi; pullback_pure needs none")
    if l < 0:
        raise ValueError("number of extra points must be nonnegative")
    labels = [extra(first + i) for i in range(l)]
    aut = graph_automorphisms(graph)
    out: list[StratumTerm] = []

    def emit(g: DualGraph, sign: int):
        out.append(StratumTerm(sign * term.coefficient * Fraction(graph_automorphisms(g), aut), g, term.assigned))

    nv = graph.num_vertices
    for targets in product(range(nv), repeat=l):
        emit(_with_points(graph, labels, targets), 1)
    if slot is not None:
        # correction: psi point moves to a rational bubble with a nonempty set of extra points
        for targets in product(range(nv + 1), repeat=l):
            if nv in targets:
                emit(_with_points(graph, labels, targets, slot), -1)
    return list(merge_terms(out)) if merge else out


def pullback_pure(term: StratumTerm, l: int, first: int = 1, merge: bool = True) -> RelationExpr:
    """Pull back a stratum class without psi along the map forgetting ``l`` points."""
    terms = _pullback(term, l, first, merge, with_psi=False)
    return RelationExpr(tuple(terms), term.graph.genus, _originals(term.graph), first - 1 + l)


def pullback_psi(term: StratumTerm, l: int, first: int = 1, merge: bool = True) -> RelationExpr:
    """Pull back a stratum class decorated by one psi.

    The psi term is kept on every distribution; for each nonempty set of
    extra points reaching the psi vertex a correction term with a rational
    bubble holding the psi point and those points is subtracted.
    """
    terms = _pullback(term, l, first, merge, with_psi=True)
    return RelationExpr(tuple(terms), term.graph.genus, _originals(term.graph), first - 1 + l)


def pullback_relation(expr: RelationExpr, l: int, merge: bool = True) -> RelationExpr:
    first = expr.extra + 1
    terms: list[StratumTerm] = []
    for t in expr.terms:
        has_psi = bool(t.graph.leg_psi or t.graph.flag_psi)
        terms.extend(_pullback(t, l, first, False, with_psi=has_psi))
    if merge:
        terms = list(merge_terms(terms))
    return RelationExpr(tuple(terms), expr.genus, expr.markings, expr.extra + l)


def _originals(graph: DualGraph) -> int:
    return len([x for x in graph.markings if not x.is_extra])

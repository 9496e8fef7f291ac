"""Genus-2 descendent recursions for the projective plane, in exact arithmetic.

The package compiles a codimension-2 relation among descendent stratum classes
of the moduli space of genus-2 curves with three markings into per-degree
linear equations for the 1-cotangent-line descendent series of the plane and
solves them.
"""
from .model import PLANE, ModelError, TargetModel
from .graphs import DualGraph, Label, RelationExpr, StratumTerm, canonical_form, graph_automorphisms
from .dsl import format_relation, load_relation, parse_relation
from .pullback import pullback_psi, pullback_pure, pullback_relation
from .splitting import CorrelatorKey, IrreducibleCorrelator, Poly, Symbol, reduce, split_term
from .series import (
    DegreeEquation,
    Genus1Data,
    SeriesTable,
    compile_degree_equation,
    genus0,
    genus1_load,
    potential_coefficient,
    solve_up_to,
    verify_printed_recursion,
)

__all__ = [
    "PLANE", "ModelError", "TargetModel",
    "DualGraph", "Label", "RelationExpr", "StratumTerm", "canonical_form", "graph_automorphisms",
    "format_relation", "load_relation", "parse_relation",
    "pullback_psi", "pullback_pure", "pullback_relation",
    "CorrelatorKey", "IrreducibleCorrelator", "Poly", "Symbol", "reduce", "split_term",
    "DegreeEquation", "Genus1Data", "SeriesTable", "compile_degree_equation", "genus0",
    "genus1_load", "potential_coefficient", "solve_up_to", "verify_printed_recursion",
]

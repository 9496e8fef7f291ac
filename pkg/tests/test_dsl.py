from __future__ import annotations

from collections import Counter
from fractions import Fraction as F

import pytest

from strata2rec import format_relation, graph_automorphisms, load_relation, parse_relation
from strata2rec.dsl import DSLSemanticError, DSLSyntaxError
from strata2rec.graphs import mark


def test_shipped_relation_shape(relation):
    assert (relation.genus, relation.markings, len(relation)) == (2, 3, 20)
    assert all(not t.assigned for t in relation.terms)
    for t in relation.terms:
        t.graph.validate(2, [mark(1), mark(2), mark(3)])
        assert t.graph.codimension == 2


def test_shipped_coefficients(relation):
    expected = [-2, 2, 3, -3, F(2, 5), F(-6, 5), F(12, 5), F(-18, 5), F(-6, 5), F(9, 5), F(-6, 5),
                F(1, 60), F(-3, 20), F(3, 20), F(-1, 60), F(1, 5), F(-3, 5), F(1, 5), F(-1, 10), F(-1, 10)]
    assert Counter(relation.coefficients()) == Counter(map(F, expected))


def test_shipped_automorphism_profile(relation):
    # loops and the banana graphs carry the only symmetries
    assert sorted(graph_automorphisms(t.graph) for t in relation.terms) == [1] * 10 + [2] * 10


def test_round_trip(relation):
    text = format_relation(relation)
    again = parse_relation(text)
    assert again.terms == relation.terms
    assert format_relation(again) == text


def test_statement_separators_and_comments():
    text = "relation genus=2 markings=3\nterm 1/2  # one term\na g=2 m={1}; b g=0 m={2,3}; edge a-b psi@a=1\n"
    (t,) = parse_relation(text).terms
    assert t.coefficient == F(1, 2) and t.assigned
    assert t.graph.flag_psi and not t.graph.leg_psi


def test_loop_psi_on_either_end():
    one = parse_relation("term 1\na g=1 m={1,2,3}\nb g=0\nedge a-b\nedge b-b psi@b=1\n").terms[0]
    assert graph_automorphisms(one.graph) == 1
    both = parse_relation("term 1\na g=1 m={1,2,3}\nb g=0\nedge a-b\nedge b-b psi@b=1 psi@b=1\n").terms[0]
    assert graph_automorphisms(both.graph) == 2
    assert parse_relation(format_relation(parse_relation("term 1\na g=1 m={1,2,3}\nb g=0\nedge a-b\nedge b-b psi@b=1 psi@b=1\n"))).terms == (both,)


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("relation genus=2 markings=3\nterm 1\na g=2\nedge a-c\n", 4, 8),
        ("relation genus=2 markings=3\nterm 1\na g=2 m={1,2,3} junk\n", 3, 17),
        ("relation genus=2 markings=3\nterm one\n", 2, 1),
        ("relation genus=2 markings=3\nedge a-b\n", 2, 1),
    ],
)
def test_syntax_errors_carry_location(text, line, column):
    with pytest.raises(DSLSyntaxError) as info:
        parse_relation(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_unstable_vertex_is_rejected():
    with pytest.raises(DSLSemanticError):
        parse_relation("relation genus=2 markings=3\nterm 1\na g=2 m={1,2}\nb g=0 m={3}\nedge a-b\n")


def test_genus_and_marking_mismatch_rejected():
    with pytest.raises(DSLSemanticError):
        parse_relation("relation genus=2 markings=3\nterm 1\na g=1 m={1,2,3}\n")
    with pytest.raises(DSLSemanticError):
        parse_relation("relation genus=2 markings=3\nterm 1\na g=2 m={1,2}\n")


def test_load_from_path(tmp_path, relation):
    path = tmp_path / "r.strata"
    path.write_text(format_relation(relation))
    assert load_relation(path).terms == relation.terms

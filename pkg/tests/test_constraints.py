from fractions import Fraction

import pytest
from hypothesis import given, settings

from nestdet import catalog
from nestdet.graph import MixedGraph
from nestdet.constraints import (
    ConstraintError,
    Det,
    MinorRef,
    Scalar,
    as_labels,
    candidate_pairs,
    det,
    depth,
    expand_nested,
    expr_from_json,
    expr_to_json,
    f_ij,
    numeric_leaf,
    parental_expr,
    parental_matrix,
    parentally_nested_determinants,
    theorem_constraint_set,
)
from nestdet.poly import parse_polynomial
from nestdet.symbolic import minor
from nestdet.treks import is_restricted_trek_separated
from nestdet.verify import sample_covariance, SampleSpec, vanishes_symbolically
from strategies import mixed_graphs

F_VERMA = parse_polynomial(
    "s11*s13*s22*s34 - s11*s13*s23*s24 - s11*s14*s22*s33 + s11*s14*s23^2"
    " - s12^2*s13*s34 + s12^2*s14*s33 + s12*s13^2*s24 - s12*s13*s14*s23"
)


def test_as_labels():
    assert as_labels("123") == ("1", "2", "3")
    assert as_labels("a,bc") == ("a", "bc")
    assert as_labels([1, 2]) == ("1", "2")


def test_minor_keeps_given_order():
    assert MinorRef("12", "21").polynomial() == -minor("12", "12")
    with pytest.raises(ValueError):
        MinorRef("12", "1")


def test_expression_json_roundtrip():
    e = det([[("12", "12"), ("12", "13")], [Fraction(-1, 2), det([[("1", "1")]])]])
    data = expr_to_json(e)
    assert data["det"][1][0] == {"scalar": "-1/2"}
    assert expr_from_json(data) == e
    assert depth(e) == 2
    with pytest.raises(ValueError):
        expr_from_json({"det": [[{"bogus": 1}]]})
    with pytest.raises(ValueError):
        Det(((Scalar(1), Scalar(2)),))


def test_expand_nested_is_determinant_of_leaves():
    e = det([[("1", "1"), ("1", "2")], [("2", "1"), ("2", "2")]])
    assert expand_nested(e) == minor("12", "12")
    assert expand_nested(det([[2, 0], [0, 3]])) == parse_polynomial("6")


def test_numeric_leaf_agrees_with_symbolic_expansion(verma):
    e = parental_expr(verma, "4", ["1"])
    smp = sample_covariance(SampleSpec(seed=5), verma)
    exact = expand_nested(e).evaluate(smp.assignment())
    assert expand_nested(e, numeric_leaf(smp.sigma, smp.labels)) == exact
    p = 1_000_003
    assert expand_nested(e, numeric_leaf(smp.sigma, smp.labels, p), p) == exact.numerator * pow(exact.denominator, -1, p) % p


def test_parental_matrix_verma(verma):
    F = parental_matrix(verma, "4", ["1"])
    assert F.rows == ("1", "3") and F.cols == ("3", "4")
    assert F.entry("1", "3") == minor("1", "3")
    assert F.entry("3", "4") == minor("123", "124")
    assert f_ij(verma, "4", "1") == F_VERMA


def test_parental_entry_appends_row_and_column_last():
    g = catalog.graph("ancestral_four")
    F = parental_matrix(g, "3", ["4"])
    assert F.entry("4", "1") == MinorRef("24", "21").polynomial()


def test_candidate_pairs(verma):
    assert candidate_pairs(verma) == [("1", ("2", "3")), ("2", ("3",)), ("4", ("1",))]
    assert candidate_pairs(catalog.graph("bow")) == []


def test_theorem_constraint_set_verma(verma):
    records = theorem_constraint_set(verma)
    assert [r.source for r in records] == ["parental(4,{1})"]
    assert records[0].expanded == F_VERMA
    assert records[0].to_json()["polynomial"] == str(F_VERMA)


def test_theorem_hypotheses_reported():
    with pytest.raises(ConstraintError):
        theorem_constraint_set(catalog.graph("bow"))
    g = MixedGraph(["1", "2", "3", "4"], [("1", "2"), ("2", "3"), ("3", "4")], [("1", "3"), ("2", "4")])
    with pytest.raises(ConstraintError) as exc:
        theorem_constraint_set(g)
    assert exc.value.vertex == "3"


@settings(max_examples=40)
@given(mixed_graphs(max_vertices=4, max_edges=6))
def test_parentally_nested_determinants_vanish(g):
    for i, J in candidate_pairs(g):
        for _, poly in parentally_nested_determinants(g, i, J):
            assert vanishes_symbolically(g, poly).vanishes


@settings(max_examples=40)
@given(mixed_graphs(max_vertices=5, max_edges=7))
def test_parental_separation_is_certified(g):
    for i, J in candidate_pairs(g):
        pa = g.parents(i)
        for j in J:
            assert is_restricted_trek_separated(g, pa + [j], pa + [i], [], pa, P=pa + [j], Q=g.vertices)


def test_fig6_pair_relation():
    g = catalog.graph("nonmaximal_ancestral")
    f35, f53 = f_ij(g, "3", "5"), f_ij(g, "5", "3")
    assert not f35.is_zero()
    assert f35 == -f53
    assert vanishes_symbolically(g, f35).vanishes and vanishes_symbolically(g, f53).vanishes

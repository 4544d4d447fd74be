import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nestdet import catalog, linalg
from nestdet.constraints import det
from nestdet.graph import CycleError, MixedGraph
from nestdet.poly import parse_polynomial
from nestdet.symbolic import determinant, restricted_covariance, symbolic_covariance, trek_polynomial
from nestdet.treks import generic_rank, min_restricted_cut
from nestdet.verify import (
    NONZERO,
    PROBABLY,
    VANISHES,
    FitError,
    SampleSpec,
    check_swapping,
    fit_parameters,
    membership_check,
    restricted_covariance_numeric,
    sample_covariance,
    sample_parameters,
    vanishes_numerically,
    vanishes_symbolically,
    verify_factorization,
)
from strategies import mixed_graphs

F_VERMA = parse_polynomial(
    "s11*s13*s22*s34 - s11*s13*s23*s24 - s11*s14*s22*s33 + s11*s14*s23^2"
    " - s12^2*s13*s34 + s12^2*s14*s33 + s12*s13^2*s24 - s12*s13*s14*s23"
)
V = "1234"


def test_sampling_is_exact_and_reproducible(verma):
    a = sample_covariance(SampleSpec(seed=11), verma)
    b = sample_covariance(SampleSpec(seed=11), verma)
    assert a.sigma == b.sigma
    assert all(isinstance(x, (int, Fraction)) for r in a.sigma for x in r)
    assert linalg.is_positive_definite(a.sigma)
    assert a.sigma != sample_covariance(SampleSpec(seed=12), verma).sigma
    # nonzero edge weights exactly on the support
    assert all(a.draw.Lambda[verma.index(x)][verma.index(y)] != 0 for x, y in verma.directed)


def test_sampling_observed_block():
    g = catalog.graph("two_factor")
    smp = sample_covariance(SampleSpec(seed=1, observed=tuple("12345")), g)
    full = sample_covariance(SampleSpec(seed=1), g)
    assert smp.labels == tuple("12345")
    assert smp.sigma == [r[2:] for r in full.sigma[2:]]


def test_cyclic_sampling_keeps_i_minus_lambda_invertible():
    g = catalog.graph("cyclic_four")
    for seed in range(10):
        smp = sample_covariance(SampleSpec(seed=seed), g)
        assert linalg.is_positive_definite(smp.sigma)


def test_restricted_numeric_matches_symbolic(verma):
    draw = sample_parameters(verma, SampleSpec(seed=4))
    P, Q, M = restricted_covariance_numeric(verma, draw, "24", "234")
    S = restricted_covariance(verma, "24", "234")
    assert M == S.evaluate(draw.assignment(verma))


def test_symbolic_verdicts(verma):
    assert vanishes_symbolically(verma, F_VERMA).status == VANISHES
    v = vanishes_symbolically(verma, parse_polynomial("s13"), seed=3)
    assert v.status == NONZERO and v.value != 0
    image = symbolic_covariance(verma).entry("1", "3")
    assert image.evaluate({k: Fraction(x) for k, x in v.witness.items()}) == v.value
    with pytest.raises(CycleError):
        vanishes_symbolically(catalog.graph("cyclic_four"), F_VERMA)


def test_numeric_verdicts(verma):
    v = vanishes_numerically(verma, F_VERMA, trials=4, seed=2)
    assert v.status == PROBABLY and v.trials == 4
    assert vanishes_numerically(verma, parse_polynomial("s11"), trials=3).status == NONZERO
    assert vanishes_numerically(verma, F_VERMA, trials=2, modulus=1_000_003).status == PROBABLY
    with pytest.raises(ValueError):
        vanishes_numerically(verma, F_VERMA, trials=0)


def test_verdict_json_is_stable(verma):
    a = vanishes_numerically(verma, parse_polynomial("s12"), seed=9).to_json()
    b = vanishes_numerically(verma, parse_polynomial("s12"), seed=9).to_json()
    assert a == b and a["status"] == NONZERO and "/" in "".join(a["witness"].values()) + "/"


def test_fit_roundtrip(verma):
    for seed in range(3):
        smp = sample_covariance(SampleSpec(seed=seed), verma)
        assert membership_check(verma, smp.sigma)
        wit = fit_parameters(verma, smp.sigma)
        assert wit.reproduces and wit.Lambda == smp.draw.Lambda and wit.Omega == smp.draw.Omega


def test_fit_accepts_permuted_labels(verma):
    smp = sample_covariance(SampleSpec(seed=8), verma)
    perm = [3, 1, 0, 2]
    labels = [verma.vertices[k] for k in perm]
    cov = [[smp.sigma[i][j] for j in perm] for i in perm]
    assert membership_check(verma, cov, labels)


def test_perturbed_covariance_is_rejected(verma):
    smp = sample_covariance(SampleSpec(seed=0), verma)
    S = [list(r) for r in smp.sigma]
    S[0][3] += Fraction(1, 7)
    S[3][0] += Fraction(1, 7)
    assert not membership_check(verma, S)
    try:
        assert not fit_parameters(verma, S).reproduces
    except FitError:
        pass


def test_fit_input_validation(verma):
    with pytest.raises(ValueError):
        membership_check(verma, [[1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(ValueError):
        membership_check(verma, [[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_example_factorizations(verma):
    assert verify_factorization(verma, [("1", "1", V, V), ("2", "2", "234", "234")])
    assert verify_factorization(verma, [("1", "3", V, V), ("2", "4", "234", "24")])
    assert not verify_factorization(verma, [("1", "3", V, V), ("2", "4", V, V)])
    assert check_swapping(verma, [("1", "1"), ("2", "2")])


def test_swapping_fails_when_blocks_cross():
    g = MixedGraph(["1", "2"], [], [("1", "2")])
    assert not check_swapping(g, [("1", "1"), ("2", "2")])


def test_lemma_on_restricted_entry_sets(verma):
    entries = [[trek_polynomial(verma, [a], [b], "234", F) for b, F in (("2", "234"), ("4", "24"))] for a in "23"]
    assert determinant(entries) == trek_polynomial(verma, "23", "24", "234", "24")


@settings(max_examples=40)
@given(mixed_graphs(min_vertices=2, max_vertices=4, max_edges=6), st.data())
def test_entry_sets_may_grow_by_non_ancestors(g, data):
    Vs = list(g.vertices)
    a = g.sort(data.draw(st.lists(st.sampled_from(Vs), min_size=2, max_size=2, unique=True)))
    b = g.sort(data.draw(st.lists(st.sampled_from(Vs), min_size=2, max_size=2, unique=True)))
    E = sorted(set(a) | set(data.draw(st.lists(st.sampled_from(Vs), unique=True))))
    F = sorted(set(b) | set(data.draw(st.lists(st.sampled_from(Vs), unique=True))))

    def grow(base, anc):
        room = sorted(set(Vs) - set(anc) - set(base))
        return sorted(set(base) | set(data.draw(st.lists(st.sampled_from(room), unique=True)) if room else []))

    M = [[trek_polynomial(g, [ai], [bj], grow(E, g.ancestors(ai)), grow(F, g.ancestors(bj))) for bj in b] for ai in a]
    assert determinant(M) == trek_polynomial(g, a, b, E, F)


def test_entry_sets_may_not_drop_other_sources():
    # dropping a_1 from the left set of the (2,2) entry removes the trek
    # 2 <- 1 -> 2 there but not its swap partner, so the cancellation breaks
    g = MixedGraph(["1", "2"], [("1", "2")])
    M = [[trek_polynomial(g, "1", "1", "1", "1"), trek_polynomial(g, "1", "2", "1", "12")],
         [trek_polynomial(g, "2", "1", "12", "1"), trek_polynomial(g, "2", "2", "2", "2")]]
    assert determinant(M) == parse_polynomial("w11*w22 - l12^2*w11^2")
    assert trek_polynomial(g, "12", "12", "12", "12") == parse_polynomial("w11*w22")


def test_nested_vanishing_matches_separation(verma):
    # the Example 5.5 setting: |M| factors and vanishes through the (234, 24) separation
    M = det([[("12", "12"), ("12", "34")], [("13", "12"), ("13", "34")]])
    assert vanishes_symbolically(verma, M).vanishes
    assert min_restricted_cut(verma, "23", "24", "234", "24").size < 2
    assert not trek_polynomial(verma, "1", "1").is_zero() and not trek_polynomial(verma, "1", "3").is_zero()


@settings(max_examples=40)
@given(mixed_graphs(min_vertices=2, max_vertices=4, max_edges=6), st.data())
def test_nested_vanishes_iff_some_factor_separated(g, data):
    # one-by-one blocks C_j = D_j = {c}: M_ij = |Sigma_{c a_i, c b_j}|
    Vs = list(g.vertices)
    c = data.draw(st.sampled_from(Vs))
    rest = [v for v in Vs if v != c]
    assume(len(rest) >= 2)
    a = g.sort(data.draw(st.lists(st.sampled_from(rest), min_size=2, max_size=2, unique=True)))
    b = g.sort(data.draw(st.lists(st.sampled_from(rest), min_size=2, max_size=2, unique=True)))
    blocks_ok = all(
        check_swapping(g, [(c, c), (ai, bj)]) and verify_factorization(g, [(c, c, Vs, Vs), (ai, bj, Vs, Vs)])
        for ai in a for bj in b
    )
    assume(blocks_ok)
    M = det([[((c, ai), (c, bj)) for bj in b] for ai in a])
    zero = vanishes_symbolically(g, M).vanishes
    separated = generic_rank(g, a, b) < 2 or generic_rank(g, [c], [c]) < 1
    assert zero == separated


@settings(max_examples=30)
@given(mixed_graphs(max_vertices=4, max_edges=5), st.integers(0, 10_000))
def test_numeric_rank_matches_generic_rank(g, seed):
    draw = sample_parameters(g, SampleSpec(seed=seed))
    Vs = list(g.vertices)
    for k in (1, 2):
        for A in itertools.combinations(Vs, k):
            for B in itertools.combinations(Vs, k):
                P, Q, M = restricted_covariance_numeric(g, draw, A, B)
                sub = [[M[P.index(x)][Q.index(y)] for y in B] for x in A]
                r = generic_rank(g, A, B, A, B)
                if linalg.rank(sub) != r:
                    # measure-zero coincidence: one resample allowed
                    draw2 = sample_parameters(g, SampleSpec(seed=seed + 1))
                    P, Q, M = restricted_covariance_numeric(g, draw2, A, B)
                    sub = [[M[P.index(x)][Q.index(y)] for y in B] for x in A]
                    assert linalg.rank(sub) == r

"""Vanishing checks, model sampling, membership, parameter fitting and the
factorization / swapping checks for restricted trek polynomials."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .constraints import (
    Leaf,
    Scalar,
    check_fitting_hypotheses,
    expand_nested,
    numeric_leaf,
    theorem_constraint_set,
)
from .graph import CycleError, GraphError, Label, MixedGraph, find_cycle, graph_sha256, is_ancestral_vertex
from .poly import Polynomial, Variable, lam, omega, sigma
from .symbolic import determinant, symbolic_covariance, substitute_sigma, trek_polynomial
from .treks import enumerate_trek_systems

VANISHES = "vanishes_identically"
NONZERO = "nonzero_witness"
PROBABLY = "vanishes_probably"

MAX_RESAMPLES = 16


class FitError(ArithmeticError):
    """Raised when a covariance matrix cannot be fitted to the model."""


def fraction_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- sampling


@dataclass(frozen=True)
class SampleSpec:
    """How to draw model parameters.

    Edge weights come from {+-1, ..., +-9}/10 (zero excluded so every edge
    is present); bidirected entries of Omega from the same set; the
    diagonal of Omega exceeds the absolute row sum by k/10, k in 1..10, so
    Omega is strictly diagonally dominant and hence positive definite.
    """

    seed: int = 0
    lambda_numerators: tuple[int, ...] = tuple(k for k in range(-9, 10) if k != 0)
    lambda_denominator: int = 10
    omega_style: str = "diagonal-dominant"
    observed: tuple[Label, ...] | None = None

    def rng(self) -> random.Random:
        return random.Random(self.seed)


@dataclass(frozen=True)
class ParameterDraw:
    labels: tuple[Label, ...]
    Lambda: list[list[Fraction]]
    Omega: list[list[Fraction]]

    def assignment(self, g: MixedGraph) -> dict[Variable, Fraction]:
        idx = {v: k for k, v in enumerate(self.labels)}
        out = {}
        for a, b in g.directed:
            out[lam(a, b)] = self.Lambda[idx[a]][idx[b]]
        for v in g.vertices:
            out[omega(v, v)] = self.Omega[idx[v]][idx[v]]
        for a, b in g.bidirected:
            out[omega(a, b)] = self.Omega[idx[a]][idx[b]]
        return out


def sample_parameters(g: MixedGraph, spec: SampleSpec, rng: random.Random | None = None) -> ParameterDraw:
    """Draw (Lambda, Omega).  For graphs with directed cycles, draws with
    singular I - Lambda are rejected (at most MAX_RESAMPLES times)."""
    if spec.omega_style != "diagonal-dominant":
        raise ValueError(f"unknown omega style {spec.omega_style!r}")
    rng = rng or spec.rng()
    n = len(g)
    idx = {v: k for k, v in enumerate(g.vertices)}
    den = spec.lambda_denominator
    directed = sorted(g.directed, key=lambda e: (idx[e[0]], idx[e[1]]))
    bidirected = sorted(g.bidirected, key=lambda e: (idx[e[0]], idx[e[1]]))
    cyclic = find_cycle(g) is not None
    for _ in range(MAX_RESAMPLES):
        L = linalg.zeros(n)
        for a, b in directed:
            L[idx[a]][idx[b]] = Fraction(rng.choice(spec.lambda_numerators), den)
        W = linalg.zeros(n)
        for a, b in bidirected:
            w = Fraction(rng.choice(spec.lambda_numerators), den)
            W[idx[a]][idx[b]] = W[idx[b]][idx[a]] = w
        for i in range(n):
            W[i][i] = sum(abs(x) for x in W[i]) + Fraction(rng.randint(1, 10), 10)
        if not cyclic or linalg.det(_i_minus(L)) != 0:
            return ParameterDraw(tuple(g.vertices), L, W)
    raise FitError(f"no invertible I - Lambda after {MAX_RESAMPLES} draws")


def _i_minus(L):
    n = len(L)
    return [[(1 if i == j else 0) - L[i][j] for j in range(n)] for i in range(n)]


def covariance_from_parameters(Lambda, Omega) -> list[list[Fraction]]:
    """(I - Lambda)^{-T} Omega (I - Lambda)^{-1}, exactly."""
    inv = linalg.inverse(_i_minus(Lambda))
    return linalg.matmul(linalg.matmul(linalg.transpose(inv), Omega), inv)


def restricted_covariance_numeric(g: MixedGraph, draw: ParameterDraw, P, Q) -> tuple[list, list, list]:
    """[(I-Lambda)_{P,P}]^{-T} Omega_{P,Q} [(I-Lambda)_{Q,Q}]^{-1} at a draw."""
    P, Q = g.sort(set(g.labels(P))), g.sort(set(g.labels(Q)))
    ip = [g.index(v) for v in P]
    iq = [g.index(v) for v in Q]
    IL = _i_minus(draw.Lambda)
    left = linalg.inverse(linalg.submatrix(IL, ip, ip)) if ip else []
    right = linalg.inverse(linalg.submatrix(IL, iq, iq)) if iq else []
    mid = linalg.submatrix(draw.Omega, ip, iq)
    if not P or not Q:
        return P, Q, [[] for _ in P]
    return P, Q, linalg.matmul(linalg.matmul(linalg.transpose(left), mid), right)


@dataclass(frozen=True)
class CovarianceSample:
    labels: tuple[Label, ...]
    sigma: list[list[Fraction]]
    draw: ParameterDraw
    seed: int

    def assignment(self) -> dict[Variable, Fraction]:
        return sigma_assignment(self.labels, self.sigma)


def sample_covariance(spec: SampleSpec, g: MixedGraph) -> CovarianceSample:
    """Exact covariance matrix of a random model point; with
    ``spec.observed`` only that principal submatrix is returned."""
    draw = sample_parameters(g, spec)
    cov = covariance_from_parameters(draw.Lambda, draw.Omega)
    labels = tuple(g.vertices)
    if spec.observed is not None:
        keep = g.sort(spec.observed)
        pos = [g.index(v) for v in keep]
        cov = linalg.submatrix(cov, pos, pos)
        labels = tuple(keep)
    return CovarianceSample(labels, cov, draw, spec.seed)


def sigma_assignment(labels: Sequence, cov: Sequence[Sequence]) -> dict[Variable, Fraction]:
    labels = [str(v) for v in labels]
    return {sigma(a, b): cov[i][j] for i, a in enumerate(labels) for j, b in enumerate(labels) if i <= j}


# ---------------------------------------------------------------- verdicts


@dataclass
class Verdict:
    status: str
    graph_sha256: str
    seed: int | None = None
    trials: int = 0
    modulus: int | None = None
    degree: int | None = None
    error_bound: Fraction | None = None
    witness: dict[str, Fraction] | None = None
    value: Fraction | int | None = None

    @property
    def vanishes(self) -> bool:
        return self.status in (VANISHES, PROBABLY)

    def to_json(self) -> dict:
        out = {"status": self.status, "graph_sha256": self.graph_sha256, "seed": self.seed}
        if self.status == PROBABLY:
            out.update(trials=self.trials, modulus=self.modulus, degree=self.degree,
                       error_bound=fraction_str(self.error_bound) if self.error_bound is not None else None)
        if self.witness is not None:
            out["witness"] = {k: fraction_str(v) for k, v in sorted(self.witness.items())}
            out["value"] = fraction_str(self.value)
        return out


def _expr_degree(e) -> int:
    """Upper bound on the sigma-degree of an expression."""
    if isinstance(e, Polynomial):
        return max(e.degree(), 0)
    if isinstance(e, Leaf):
        return len(e.minor.rows)
    if isinstance(e, Scalar):
        return 0
    return len(e.entries) * max((_expr_degree(x) for r in e.entries for x in r), default=0)


def _symbolic_image(g: MixedGraph, f) -> Polynomial:
    S = symbolic_covariance(g)
    if isinstance(f, Polynomial):
        return substitute_sigma(f, S)
    minors: dict = {}

    def leaf_value(m):
        if m not in minors:
            minors[m] = determinant(S.sub(m.rows, m.cols))
        return minors[m]

    return expand_nested(f, leaf_value)


def vanishes_symbolically(g: MixedGraph, f, seed: int = 0) -> Verdict:
    """Decide exactly whether ``f`` (a sigma-polynomial or a nested
    determinant expression) vanishes on the model of an acyclic graph."""
    cycle = find_cycle(g)
    if cycle is not None:
        raise CycleError(cycle)
    h = graph_sha256(g)
    image = _symbolic_image(g, f)
    if image.is_zero():
        return Verdict(VANISHES, h, seed=seed, degree=_expr_degree(f))
    rng = random.Random(seed)
    for _ in range(64):
        draw = sample_parameters(g, SampleSpec(seed=seed), rng)
        values = draw.assignment(g)
        val = image.evaluate(values)
        if val != 0:
            return Verdict(NONZERO, h, seed=seed, witness={str(k): v for k, v in values.items()}, value=val)
    raise FitError("nonzero image but no witness found; sampling set too small")


def _evaluate_at(f, labels, cov, modulus):
    if isinstance(f, Polynomial):
        return f.evaluate(sigma_assignment(labels, cov), modulus)
    return expand_nested(f, numeric_leaf(cov, labels, modulus), modulus)


def vanishes_numerically(g: MixedGraph, f, trials: int = 8, seed: int = 0, modulus: int | None = None,
                         observed: Iterable | None = None) -> Verdict:
    """Evaluate ``f`` at ``trials`` exact random model covariances.

    Works for cyclic graphs.  A nonzero value is a proof of non-vanishing;
    all zeros give ``vanishes_probably`` together with a Schwartz-Zippel
    style bound: each parameter is drawn from 18 values and the composed
    polynomial has degree at most deg(f) * (2|V| - 1) on acyclic graphs.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    h = graph_sha256(g)
    obs = None if observed is None else tuple(g.sort(observed))
    rng = random.Random(seed)
    for _ in range(trials):
        spec = SampleSpec(seed=rng.randrange(2**32), observed=obs)
        smp = sample_covariance(spec, g)
        cov = smp.sigma
        if modulus:
            from .poly import to_field
            cov = [[to_field(x, modulus) for x in r] for r in cov]
        val = _evaluate_at(f, smp.labels, cov, modulus)
        if val != 0:
            wit = {str(k): v for k, v in sigma_assignment(smp.labels, smp.sigma).items()}
            return Verdict(NONZERO, h, seed=seed, trials=trials, modulus=modulus, witness=wit, value=val)
    deg = _expr_degree(f)
    per_trial = None
    if find_cycle(g) is None:
        per_trial = min(Fraction(1), Fraction(deg * (2 * len(g) - 1), 18))
    bound = per_trial ** trials if per_trial is not None else None
    return Verdict(PROBABLY, h, seed=seed, trials=trials, modulus=modulus or None, degree=deg, error_bound=bound)


# ---------------------------------------------------------------- membership and fitting


@dataclass
class ModelWitness:
    labels: tuple[Label, ...]
    Lambda: list[list[Fraction]]
    Omega: list[list[Fraction]]
    support_ok: bool
    positive_definite: bool
    reproduces: bool

    def to_json(self) -> dict:
        s = lambda m: [[fraction_str(x) for x in r] for r in m]
        return {"labels": list(self.labels), "Lambda": s(self.Lambda), "Omega": s(self.Omega),
                "support_ok": self.support_ok, "positive_definite": self.positive_definite,
                "reproduces": self.reproduces}


def _check_sigma(g: MixedGraph, cov, labels):
    labels = tuple(g.vertices) if labels is None else tuple(str(v) for v in labels)
    if set(labels) != set(g.vertices) or len(labels) != len(g):
        raise GraphError("covariance labels must match the graph's vertices")
    perm = [labels.index(v) for v in g.vertices]
    cov = [[Fraction(cov[i][j]) for j in perm] for i in perm]
    if not linalg.is_symmetric(cov):
        raise ValueError("covariance matrix is not symmetric")
    if not linalg.is_positive_definite(cov):
        raise ValueError("covariance matrix is not positive definite")
    return cov


def membership_check(g: MixedGraph, cov, labels: Sequence | None = None) -> bool:
    """Does every constraint of the fitting theorem vanish at ``cov``?"""
    cov = _check_sigma(g, cov, labels)
    ev = numeric_leaf(cov, g.vertices)
    return all(expand_nested(r.expr, ev) == 0 for r in theorem_constraint_set(g))


def fit_parameters(g: MixedGraph, cov, labels: Sequence | None = None) -> ModelWitness:
    """Recover (Lambda, Omega) with (I-Lambda)^T Sigma (I-Lambda) = Omega.

    Ancestral vertices are fitted by regressing on their parents; the last
    vertex of the topological order, if not ancestral, through the kernel
    of the Schur-complement matrix of its parental constraint system.
    """
    order = check_fitting_hypotheses(g)
    S = _check_sigma(g, cov, labels)
    ix = g.index
    n = len(g)
    L = [[Fraction(0)] * n for _ in range(n)]
    for pos, j in enumerate(order):
        pa = g.parents(j)
        if not pa:
            continue
        pj = [ix(v) for v in pa]
        if is_ancestral_vertex(g, j):
            coef = linalg.solve(linalg.submatrix(S, pj, pj), [S[k][ix(j)] for k in pj])
        else:
            coef = _kernel_fit(g, S, L, order[:pos], j)
        for k, c in zip(pj, coef):
            L[k][ix(j)] = Fraction(c)
    IL = _i_minus(L)
    W = linalg.matmul(linalg.matmul(linalg.transpose(IL), S), IL)
    allowed = {(ix(a), ix(b)) for a, b in g.bidirected} | {(ix(b), ix(a)) for a, b in g.bidirected}
    support_ok = all(W[a][b] == 0 for a in range(n) for b in range(n) if a != b and (a, b) not in allowed)
    pd = linalg.is_positive_definite(W)
    back = covariance_from_parameters(L, W)
    return ModelWitness(tuple(g.vertices), L, W, support_ok, pd, support_ok and pd and back == S)


def _kernel_fit(g: MixedGraph, S, L, earlier: Sequence[Label], p: Label) -> list[Fraction]:
    ix = g.index
    sib = set(g.siblings(p))
    rows = [r for r in earlier if r not in sib]
    cols = g.parents(p) + [p]
    # row r of [(I - Lambda')^T Sigma] restricted to the columns pa(p), p
    Fbar = [[S[ix(r)][ix(c)] - sum(L[k][ix(r)] * S[k][ix(c)] for k in range(len(g))) for c in cols] for r in rows]
    basis = linalg.nullspace(Fbar)
    for v in basis:
        if v[-1] != 0:
            return [-Fraction(x) / v[-1] for x in v[:-1]]
    if not basis:
        raise FitError(f"constraint system for vertex {p} has full column rank; covariance is not in the model")
    raise FitError(f"every kernel vector for vertex {p} has zero last coordinate")


# ---------------------------------------------------------------- factorizations


def _block_sets(g, blk):
    return [g.sort(x) for x in blk]


def verify_factorization(g: MixedGraph, blocks: Sequence[Sequence]) -> bool:
    """|Sigma_{A_1+...+A_k, B_1+...+B_k}| == prod_i P_{A_i,B_i,(C_i,D_i)}?

    Rows (columns) are the blocks' A_i (B_i) in declaration order,
    concatenated in block order.
    """
    rows, cols, rhs = [], [], Polynomial.constant(1)
    for blk in blocks:
        if len(blk) != 4:
            raise ValueError("blocks are (A, B, C, D) quadruples")
        A, B, C, D = _block_sets(g, blk)
        if len(A) != len(B):
            raise ValueError(f"block sizes differ: {A} vs {B}")
        rows += A
        cols += B
        rhs = rhs * trek_polynomial(g, A, B, C, D)
    lhs = determinant(symbolic_covariance(g).sub(rows, cols))
    return lhs == rhs


def check_swapping(g: MixedGraph, blocks: Sequence[Sequence]) -> bool:
    """Brute-force check of the swapping property for (A_i, B_i) blocks."""
    cycle = find_cycle(g)
    if cycle is not None:
        raise CycleError(cycle)
    blocks = [(_block_sets(g, (A, B))) for A, B in blocks]
    A_all = [a for A, _ in blocks for a in A]
    B_all = [b for _, B in blocks for b in B]
    if len(A_all) != len(B_all) or any(len(A) != len(B) for A, B in blocks):
        raise ValueError("blocks must pair sets of equal size")
    systems = enumerate_trek_systems(g, A_all, B_all)
    block_of_a = {a: k for k, (A, _) in enumerate(blocks) for a in A}
    block_of_b = {b: k for k, (_, B) in enumerate(blocks) for b in B}
    split = []
    for s in systems:
        parts = [[] for _ in blocks]
        for t in s.treks:
            k = block_of_a[t.source]
            if block_of_b[t.target] != k:
                return False
            parts[k].append(t)
        split.append(parts)

    def disjoint(treks):
        lefts, rights = set(), set()
        for t in treks:
            if t.left_side & lefts or t.right_side & rights:
                return False
            lefts |= t.left_side
            rights |= t.right_side
        return True

    for p1, p2 in itertools.combinations(split, 2):
        for k in range(len(blocks)):
            one = [t for j, part in enumerate(p1) for t in (p2[k] if j == k else part)]
            two = [t for j, part in enumerate(p2) for t in (p1[k] if j == k else part)]
            if not disjoint(one) or not disjoint(two):
                return False
    return True

"""Symbolic covariance matrices over the edge parameters and their minors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph import CycleError, GraphError, Label, MixedGraph, find_cycle, topological_order
from .poly import SIGMA, Polynomial, PolynomialError, Variable, evaluate, lam, omega, product, sigma
from .treks import enumerate_trek_systems

ONE = Polynomial.constant(1)
ZERO = Polynomial()


@dataclass(frozen=True)
class SymbolicMatrix:
    """Polynomial matrix with vertex labels on rows and columns.

    Labels may repeat (multiset indexing); ``sub`` looks entries up by
    label so a repeated label gives a literally repeated row or column.
    """

    rows: tuple[Label, ...]
    cols: tuple[Label, ...]
    entries: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        if len(self.entries) != len(self.rows) or any(len(r) != len(self.cols) for r in self.entries):
            raise ValueError("entries do not match the row/column labels")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def entry(self, r, c) -> Polynomial:
        return self.entries[self.rows.index(str(r))][self.cols.index(str(c))]

    def sub(self, rows: Sequence, cols: Sequence) -> "SymbolicMatrix":
        rows = tuple(str(r) for r in rows)
        cols = tuple(str(c) for c in cols)
        missing = [x for x in rows if x not in self.rows] + [x for x in cols if x not in self.cols]
        if missing:
            raise GraphError(f"labels not in matrix: {', '.join(missing)}")
        ri = [self.rows.index(r) for r in rows]
        ci = [self.cols.index(c) for c in cols]
        return SymbolicMatrix(rows, cols, tuple(tuple(self.entries[i][j] for j in ci) for i in ri))

    def evaluate(self, values: Mapping, modulus: int | None = None) -> list[list]:
        return [[evaluate(p, values, modulus) for p in r] for r in self.entries]

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i] for i in range(len(self.rows)) for j in range(i)
        )

    def as_strings(self) -> list[list[str]]:
        return [[str(p) for p in r] for r in self.entries]


def _path_sums(g: MixedGraph, allowed: Sequence[Label]) -> dict[tuple[Label, Label], Polynomial]:
    """Entries of ((I - Lambda)_{S,S})^{-1}: sums of lambda-monomials over
    directed paths inside ``allowed``."""
    order = [v for v in topological_order(g) if v in set(allowed)]
    inside = set(order)
    T: dict[tuple[Label, Label], Polynomial] = {}
    for src in order:
        T[(src, src)] = ONE
        for v in order:
            if v == src:
                continue
            acc = ZERO
            for k in g.parents(v):
                if k in inside and (src, k) in T:
                    acc = acc + T[(src, k)] * Polynomial.var(lam(k, v))
            if not acc.is_zero():
                T[(src, v)] = acc
    return T


def _omega_entries(g: MixedGraph) -> list[tuple[Label, Label, Polynomial]]:
    out = [(v, v, Polynomial.var(omega(v, v))) for v in g.vertices]
    for a, b in g.bidirected:
        w = Polynomial.var(omega(a, b))
        out += [(a, b, w), (b, a, w)]
    return out


def restricted_covariance(g: MixedGraph, P: Iterable | None = None, Q: Iterable | None = None) -> SymbolicMatrix:
    """Sigma^(P,Q) = [(I-Lambda)_{P,P}]^{-T} Omega_{P,Q} [(I-Lambda)_{Q,Q}]^{-1}.

    Rows follow P and columns follow Q in declaration order.  The
    inverses are computed as path sums, which needs an acyclic graph.
    """
    cycle = find_cycle(g)
    if cycle is not None:
        raise CycleError(cycle)
    P = g.sort(set(g.vertices if P is None else g.labels(P)))
    Q = g.sort(set(g.vertices if Q is None else g.labels(Q)))
    TP, TQ = _path_sums(g, P), _path_sums(g, Q)
    Pset, Qset = set(P), set(Q)
    om = [(x, y, w) for x, y, w in _omega_entries(g) if x in Pset and y in Qset]
    rows = []
    for a in P:
        row = []
        for b in Q:
            acc = ZERO
            for x, y, w in om:
                left = TP.get((x, a))
                right = TQ.get((y, b))
                if left is not None and right is not None:
                    acc = acc + left * w * right
            row.append(acc)
        rows.append(tuple(row))
    return SymbolicMatrix(tuple(P), tuple(Q), tuple(rows))


def symbolic_covariance(g: MixedGraph) -> SymbolicMatrix:
    """Covariance matrix of the model as polynomials in lambda and omega."""
    return restricted_covariance(g)


def sigma_matrix(labels: Sequence) -> SymbolicMatrix:
    """The generic symmetric matrix of sigma variables on ``labels``."""
    labels = tuple(str(v) for v in labels)
    return SymbolicMatrix(labels, labels, tuple(
        tuple(Polynomial.var(sigma(a, b)) for b in labels) for a in labels))


def determinant(m) -> Polynomial:
    """Exact determinant by cofactor expansion along rows, memoized on the
    set of columns still available."""
    entries = m.entries if isinstance(m, SymbolicMatrix) else m
    n = len(entries)
    if any(len(r) != n for r in entries):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return ONE
    entries = [[x if isinstance(x, Polynomial) else Polynomial.constant(x) for x in r] for r in entries]
    memo: dict[int, Polynomial] = {}

    def rec(row: int, free: int) -> Polynomial:
        if row == n:
            return ONE
        if free in memo:
            return memo[free]
        acc = ZERO
        sign = 1
        for c in range(n):
            bit = 1 << c
            if not free & bit:
                continue
            e = entries[row][c]
            if not e.is_zero():
                rest = rec(row + 1, free & ~bit)
                if not rest.is_zero():
                    term = e * rest
                    acc = acc + term if sign > 0 else acc - term
            sign = -sign
        memo[free] = acc
        return acc

    return rec(0, (1 << n) - 1)


def minor(rows: Sequence, cols: Sequence) -> Polynomial:
    """|Sigma_{rows,cols}| as a polynomial in the sigma variables, with
    rows and columns taken in the order given."""
    if len(rows) != len(cols):
        raise ValueError("minor needs as many rows as columns")
    return determinant([[Polynomial.var(sigma(r, c)) for c in cols] for r in rows])


def substitute_sigma(f: Polynomial, cov: SymbolicMatrix) -> Polynomial:
    """Image of ``f`` under sigma_ij -> cov[i, j]."""
    mapping = {}
    for v in f.variables():
        if v.kind != SIGMA:
            raise PolynomialError(f"{v} is not a covariance variable")
        if v.i not in cov.rows or v.j not in cov.cols:
            raise PolynomialError(f"no covariance entry for {v}")
        mapping[v] = cov.entry(v.i, v.j)
    return f.substitute(mapping)


def trek_polynomial(g: MixedGraph, A: Sequence, B: Sequence, P: Iterable | None = None,
                    Q: Iterable | None = None) -> Polynomial:
    """Signed sum over (P,Q)-restricted trek systems from A to B without
    sided intersection of the products of trek monomials."""
    if len(A) != len(B):
        raise GraphError("trek polynomial needs |A| == |B|")
    if P is not None and not set(g.labels(A)) <= set(g.labels(P)):
        return ZERO
    if Q is not None and not set(g.labels(B)) <= set(g.labels(Q)):
        return ZERO
    acc = ZERO
    for system in enumerate_trek_systems(g, A, B, P, Q):
        acc = acc + system.monomial()
    return acc


def parameter_variables(g: MixedGraph) -> list[Variable]:
    """All lambda and omega variables of the graph, in canonical order."""
    vs = [lam(a, b) for a, b in g.directed] + [omega(v, v) for v in g.vertices]
    vs += [omega(a, b) for a, b in g.bidirected]
    return sorted(vs, key=lambda v: v.sort_key)


__all__ = [
    "SymbolicMatrix", "restricted_covariance", "symbolic_covariance", "sigma_matrix", "determinant",
    "minor", "substitute_sigma", "trek_polynomial", "parameter_variables", "product",
]

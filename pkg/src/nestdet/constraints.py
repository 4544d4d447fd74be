"""Nested determinant expressions and parentally nested determinants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

from . import linalg
from .graph import GraphError, Label, MixedGraph, is_ancestral_vertex, is_globally_identifiable, label_to_json, topological_order
from .poly import Polynomial, to_field
from .symbolic import SymbolicMatrix, determinant, minor


class ConstraintError(GraphError):
    """Raised when a graph does not meet the hypotheses of a construction."""

    def __init__(self, message: str, vertex: Label | None = None):
        super().__init__(message)
        self.vertex = vertex


def as_labels(x) -> tuple[Label, ...]:
    """``"123"`` -> ("1","2","3"); ``"a,bc"`` -> ("a","bc"); sequences pass through."""
    if isinstance(x, str):
        if "," in x:
            return tuple(s.strip() for s in x.split(",") if s.strip())
        return tuple(x.strip())
    return tuple(str(v) for v in x)


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class MinorRef:
    """|Sigma_{rows,cols}|.  Rows and columns are kept in the given order,
    so an unsorted index list carries the sign of its permutation."""

    rows: tuple[Label, ...]
    cols: tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", as_labels(self.rows))
        object.__setattr__(self, "cols", as_labels(self.cols))
        if len(self.rows) != len(self.cols):
            raise ValueError(f"minor {self} is not square")

    def polynomial(self) -> Polynomial:
        return minor(self.rows, self.cols)

    def sorted(self, g: MixedGraph) -> "MinorRef":
        return MinorRef(tuple(g.sort(self.rows)), tuple(g.sort(self.cols)))

    def __str__(self) -> str:
        sep = "," if any(len(x) > 1 for x in self.rows + self.cols) else ""
        return f"|S_{sep.join(self.rows)};{sep.join(self.cols)}|"


@dataclass(frozen=True)
class Leaf:
    minor: MinorRef


@dataclass(frozen=True)
class Scalar:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Det:
    entries: tuple[tuple["NestedDetExpr", ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("determinant node is not square")


NestedDetExpr = Union[Leaf, Det, Scalar]


def leaf(rows, cols) -> Leaf:
    return Leaf(MinorRef(rows, cols))


def det(rows: Sequence[Sequence]) -> Det:
    """Build a Det node; bare numbers become Scalars and (rows, cols) pairs
    become minors."""

    def conv(x):
        if isinstance(x, (Leaf, Det, Scalar)):
            return x
        if isinstance(x, MinorRef):
            return Leaf(x)
        if isinstance(x, (int, Fraction)):
            return Scalar(x)
        if isinstance(x, tuple) and len(x) == 2:
            return leaf(*x)
        raise TypeError(f"cannot use {x!r} as a matrix entry")

    return Det(tuple(tuple(conv(x) for x in r) for r in rows))


def depth(e: NestedDetExpr) -> int:
    if isinstance(e, Det):
        return 1 + max((depth(x) for r in e.entries for x in r), default=0)
    return 0


def expr_to_json(e: NestedDetExpr) -> dict:
    if isinstance(e, Leaf):
        return {"minor": {"rows": [label_to_json(x) for x in e.minor.rows],
                          "cols": [label_to_json(x) for x in e.minor.cols]}}
    if isinstance(e, Scalar):
        v = e.value
        return {"scalar": str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"}
    return {"det": [[expr_to_json(x) for x in r] for r in e.entries]}


def expr_from_json(data) -> NestedDetExpr:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError(f"expected one of det/minor/scalar, got {data!r}")
    (kind, body), = data.items()
    if kind == "minor":
        return leaf(tuple(str(x) for x in body["rows"]), tuple(str(x) for x in body["cols"]))
    if kind == "scalar":
        return Scalar(Fraction(str(body)))
    if kind == "det":
        return Det(tuple(tuple(expr_from_json(x) for x in r) for r in body))
    raise ValueError(f"unknown expression kind {kind!r}")


def expand_nested(e: NestedDetExpr, leaf_value: Callable[[MinorRef], object] | None = None,
                  modulus: int | None = None):
    """Expand to a sigma-polynomial, or, with ``leaf_value``, evaluate with
    leaves replaced by whatever that callable returns (polynomials or
    exact numbers)."""
    if isinstance(e, Leaf):
        return e.minor.polynomial() if leaf_value is None else leaf_value(e.minor)
    if isinstance(e, Scalar):
        return Polynomial.constant(e.value) if leaf_value is None else e.value
    vals = [[expand_nested(x, leaf_value, modulus) for x in r] for r in e.entries]
    if any(isinstance(v, Polynomial) for r in vals for v in r):
        return determinant(vals)
    return linalg.det(vals, modulus)


def numeric_leaf(sigma_values: Sequence[Sequence], labels: Sequence, modulus: int | None = None):
    """Leaf evaluator for a concrete covariance matrix indexed by ``labels``."""
    pos = {str(v): k for k, v in enumerate(labels)}
    if modulus:
        sigma_values = [[to_field(x, modulus) for x in r] for r in sigma_values]

    def value(m: MinorRef):
        try:
            rows = [pos[r] for r in m.rows]
            cols = [pos[c] for c in m.cols]
        except KeyError as exc:
            raise GraphError(f"minor {m} uses unknown label {exc.args[0]}") from None
        return linalg.det(linalg.submatrix(sigma_values, rows, cols), modulus)

    return value


# ---------------------------------------------------------------- parental constructions


def _parental_minor(g: MixedGraph, r: Label, c: Label) -> MinorRef:
    # r and c go last so the minor is |Sigma_{pa,pa}| times the Schur
    # complement sigma_rc - Sigma_{r,pa} Sigma_{pa,pa}^{-1} Sigma_{pa,c};
    # sorting c into pa(r) would flip signs column by column
    pa = g.parents(r)
    return MinorRef(tuple(pa + [r]), tuple(pa + [c]))


def parental_rows_cols(g: MixedGraph, i, J) -> tuple[list[Label], list[Label]]:
    i = g.label(i)
    pa = g.parents(i)
    return g.sort(pa + g.labels(J)), g.sort(pa + [i])


def parental_expr(g: MixedGraph, i, J, rows: Sequence | None = None) -> Det:
    """F_{i,J} as a Det node (rows restricted to ``rows`` if given)."""
    all_rows, cols = parental_rows_cols(g, i, J)
    rows = all_rows if rows is None else list(rows)
    return Det(tuple(tuple(Leaf(_parental_minor(g, r, c)) for c in cols) for r in rows))


def parental_matrix(g: MixedGraph, i, J) -> SymbolicMatrix:
    """The matrix F_{i,J} whose (r, c) entry is |Sigma_{pa(r)+r, pa(r)+c}|
    for rows r in pa(i)+J and columns c in pa(i)+{i}.

    Rows and columns of F follow declaration order.  Inside each entry
    pa(r) is in declaration order with r (resp. c) appended last.
    """
    rows, cols = parental_rows_cols(g, i, J)
    cache: dict = {}

    def entry(r, c):
        if (r, c) not in cache:
            cache[(r, c)] = _parental_minor(g, r, c).polynomial()
        return cache[(r, c)]

    return SymbolicMatrix(tuple(rows), tuple(cols), tuple(tuple(entry(r, c) for c in cols) for r in rows))


def f_ij(g: MixedGraph, i, j) -> Polynomial:
    """The single parentally nested determinant for (i, {j})."""
    return determinant(parental_matrix(g, i, [j]))


def parentally_nested_determinants(g: MixedGraph, i, J) -> list[tuple[tuple[Label, ...], Polynomial]]:
    """All maximal minors of F_{i,J}, keyed by their row selection."""
    F = parental_matrix(g, i, J)
    k = len(F.cols)
    out = []
    for sel in itertools.combinations(range(len(F.rows)), k):
        sub = [F.entries[s] for s in sel]
        out.append((tuple(F.rows[s] for s in sel), determinant(sub)))
    return out


def candidate_pairs(g: MixedGraph) -> list[tuple[Label, tuple[Label, ...]]]:
    """Pairs (i, J) where pa(i) and sib(i) are disjoint, all parents are
    ancestral and J collects the remaining ancestral vertices."""
    ancestral = {v for v in g.vertices if is_ancestral_vertex(g, v)}
    out = []
    for i in g.vertices:
        pa, sib = set(g.parents(i)), set(g.siblings(i))
        if pa & sib or not pa <= ancestral:
            continue
        J = tuple(v for v in g.vertices if v in ancestral and v not in pa | sib | {i})
        if J:
            out.append((i, J))
    return out


@dataclass(frozen=True)
class ConstraintRecord:
    vertex: Label
    J: tuple[Label, ...]
    rows: tuple[Label, ...]
    expr: NestedDetExpr
    expanded: Polynomial = field(compare=False)

    @property
    def source(self) -> str:
        return f"parental({self.vertex},{{{','.join(self.J)}}})"

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "i": label_to_json(self.vertex),
            "J": [label_to_json(x) for x in self.J],
            "rows": [label_to_json(x) for x in self.rows],
            "expr": expr_to_json(self.expr),
            "polynomial": str(self.expanded),
        }


def check_fitting_hypotheses(g: MixedGraph) -> list[Label]:
    """Topological order under which every vertex but the last is
    ancestral; raises ConstraintError naming the failing vertex."""
    order = topological_order(g)
    if not is_globally_identifiable(g):
        raise ConstraintError("graph is not globally identifiable")
    for v in order[:-1]:
        if not is_ancestral_vertex(g, v):
            raise ConstraintError(f"vertex {v} is not ancestral", v)
    return order


def theorem_constraint_set(g: MixedGraph) -> list[ConstraintRecord]:
    """Parentally nested determinants for (i, earlier(i) minus pa(i) and
    sib(i)) over a topological order.  Together with positive definiteness
    they cut out the model exactly when the hypotheses hold."""
    order = check_fitting_hypotheses(g)
    records = []
    for k, i in enumerate(order):
        excl = set(g.parents(i)) | set(g.siblings(i))
        J = tuple(g.sort(v for v in order[:k] if v not in excl))
        if not J:
            continue
        for rows, poly in parentally_nested_determinants(g, i, J):
            records.append(ConstraintRecord(i, J, rows, parental_expr(g, i, J, rows), poly))
    return records

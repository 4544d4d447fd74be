"""Sparse multivariate polynomials with exact rational coefficients.

Variables are covariances ``s{i}{j}``, edge weights ``l{i}{j}`` and error
covariances ``w{i}{j}``.  Internally each variable is interned to a small
integer and a monomial is a sorted tuple of ``(var_id, exponent)`` pairs;
the printed form always uses the canonical order (kind sigma < lambda <
omega, then natural order of the index pair, terms graded-lexicographic).
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Union

from .graph import Label, as_label, natural_key

SIGMA, LAMBDA, OMEGA = 0, 1, 2
_PREFIX = {SIGMA: "s", LAMBDA: "l", OMEGA: "w"}
_KIND_OF_PREFIX = {v: k for k, v in _PREFIX.items()}

# 2**61 - 1
DEFAULT_PRIME = 2305843009213693951

Scalar = Union[int, Fraction]


class PolynomialError(ValueError):
    pass


@dataclass(frozen=True, order=False)
class Variable:
    kind: int
    i: Label
    j: Label

    def __post_init__(self):
        if self.kind not in _PREFIX:
            raise PolynomialError(f"unknown variable kind {self.kind!r}")
        i, j = as_label(self.i), as_label(self.j)
        # sigma and omega are symmetric
        if self.kind != LAMBDA and natural_key(j) < natural_key(i):
            i, j = j, i
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)

    @property
    def sort_key(self) -> tuple:
        return (self.kind, natural_key(self.i), natural_key(self.j))

    def __str__(self) -> str:
        p = _PREFIX[self.kind]
        if len(self.i) == 1 and len(self.j) == 1:
            return f"{p}{self.i}{self.j}"
        return f"{p}{self.i}_{self.j}"


def sigma(i, j) -> Variable:
    return Variable(SIGMA, i, j)


def lam(i, j) -> Variable:
    return Variable(LAMBDA, i, j)


def omega(i, j) -> Variable:
    return Variable(OMEGA, i, j)


_VAR_RE = re.compile(r"^([slw])([A-Za-z0-9]+?)(?:_([A-Za-z0-9]+))?$")


def parse_variable(text: str) -> Variable:
    m = _VAR_RE.match(text.strip())
    if m is None:
        raise PolynomialError(f"bad variable {text!r}")
    prefix, a, b = m.groups()
    if b is None:
        whole = text.strip()[1:]
        if len(whole) != 2:
            raise PolynomialError(f"ambiguous variable {text!r}; use {prefix}i_j")
        a, b = whole[0], whole[1]
    return Variable(_KIND_OF_PREFIX[prefix], a, b)


class _Registry:
    def __init__(self):
        self._ids: dict[Variable, int] = {}
        self._vars: list[Variable] = []
        self._lock = threading.Lock()

    def id(self, v: Variable) -> int:
        k = self._ids.get(v)
        if k is None:
            with self._lock:
                k = self._ids.get(v)
                if k is None:
                    k = len(self._vars)
                    self._vars.append(v)
                    self._ids[v] = k
        return k

    def var(self, k: int) -> Variable:
        return self._vars[k]


_REG = _Registry()

Monomial = tuple  # tuple[tuple[int, int], ...] sorted by variable id


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, vb = a[i][0], b[j][0]
        if va == vb:
            out.append((va, a[i][1] + b[j][1]))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps monomials to nonzero
    coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        self._terms = {m: _norm(c) for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw({(): c} if c != 0 else {})

    @classmethod
    def var(cls, v: Variable) -> "Polynomial":
        return cls._raw({((_REG.id(v), 1),): 1})

    @classmethod
    def from_terms(cls, items: Iterable[tuple[Mapping[Variable, int], Scalar]]) -> "Polynomial":
        acc: dict = {}
        for powers, c in items:
            mono = tuple(sorted((_REG.id(v), e) for v, e in powers.items() if e))
            acc[mono] = acc.get(mono, 0) + c
        return cls(acc)

    # queries
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """(powers, coefficient) pairs with powers a dict Variable -> exponent."""
        for m, c in self._terms.items():
            yield {_REG.var(k): e for k, e in m}, c

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e for _, e in m) for m in self._terms)

    def variables(self) -> set[Variable]:
        return {_REG.var(k) for m in self._terms for k, _ in m}

    def constant_value(self) -> Scalar | None:
        if not self._terms:
            return 0
        if len(self._terms) == 1 and () in self._terms:
            return self._terms[()]
        return None

    # arithmetic
    @staticmethod
    def _coerce(x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return Polynomial.constant(x)
        if isinstance(x, Variable):
            return Polynomial.var(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for m, c in small.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = _norm(v)
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial._raw({})
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = _mono_mul(ma, mb)
                out[m] = get(m, 0) + ca * cb
        return Polynomial._raw({m: _norm(c) for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PolynomialError("only non-negative integer powers")
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Scalar) -> "Polynomial":
        return Polynomial({m: v * c for m, v in self._terms.items()})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # substitution / evaluation
    def substitute(self, mapping: Mapping[Variable, "Polynomial"]) -> "Polynomial":
        """Replace variables by polynomials; unmapped variables stay."""
        images = {_REG.id(v): self._coerce(p) for v, p in mapping.items()}
        powers: dict = {}

        def power(k, e):
            key = (k, e)
            if key not in powers:
                if k in images:
                    powers[key] = images[k] ** e
                else:
                    powers[key] = Polynomial._raw({((k, e),): 1})
            return powers[key]

        total = Polynomial._raw({})
        for m, c in self._terms.items():
            term = Polynomial.constant(c)
            for k, e in m:
                term = term * power(k, e)
            total = total + term
        return total

    def evaluate(self, values: Mapping, modulus: int | None = None):
        """Exact value at ``values`` (keys Variables or their names)."""
        return evaluate(self, values, modulus)

    # formatting
    def _sorted_terms(self):
        def mono_key(m):
            vs = sorted(((_REG.var(k).sort_key, e) for k, e in m))
            deg = sum(e for _, e in vs)
            # graded, then lexicographic with larger exponents of earlier variables first
            return (-deg, [(key, -e) for key, e in vs])

        return sorted(self._terms.items(), key=lambda t: mono_key(t[0]))

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


def _format_mono(m) -> str:
    parts = []
    for key, var, e in sorted((_REG.var(k).sort_key, _REG.var(k), e) for k, e in m):
        parts.append(str(var) if e == 1 else f"{var}^{e}")
    return "*".join(parts)


def _format_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial) -> str:
    """Canonical string, e.g. ``s11*s13*s22*s34 - s11*s13*s23*s24``."""
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p._sorted_terms()):
        neg = c < 0
        mag = -c if neg else c
        mono = _format_mono(m)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([slw][A-Za-z0-9_]+)|(\*\*|\^|[-+*()]))")


def parse_polynomial(text: str) -> Polynomial:
    """Parse sums of products with ``+ - * ^ **`` and parentheses.

    Accepts the canonical format produced by :func:`format_polynomial`.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise PolynomialError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        num, var, op = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif var is not None:
            tokens.append(("var", parse_variable(var)))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    tokens.append(("end", None))
    k = 0

    def peek():
        return tokens[k]

    def take():
        nonlocal k
        k += 1
        return tokens[k - 1]

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term().scale(sign)
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = factor()
        while peek() == ("op", "*"):
            take()
            acc = acc * factor()
        return acc

    def factor():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num" or Fraction(val).denominator != 1:
                raise PolynomialError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return Polynomial.constant(val)
        if kind == "var":
            return Polynomial.var(val)
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise PolynomialError("unbalanced parenthesis")
            return inner
        if (kind, val) == ("op", "-"):
            return -factor()
        raise PolynomialError(f"unexpected token {val!r}")

    result = expr()
    if peek()[0] != "end":
        raise PolynomialError(f"trailing input near token {peek()[1]!r}")
    return result


def _lookup(values: Mapping, v: Variable):
    if v in values:
        return values[v]
    name = str(v)
    if name in values:
        return values[name]
    raise PolynomialError(f"no value for variable {name}")


def evaluate(p: Polynomial, values: Mapping, modulus: int | None = None):
    """Evaluate exactly.  With ``modulus`` the result lives in GF(modulus);
    rational inputs are mapped through modular inverses."""
    cache: dict = {}

    def val(k):
        if k not in cache:
            x = _lookup(values, _REG.var(k))
            cache[k] = to_field(x, modulus) if modulus else Fraction(x)
        return cache[k]

    total = 0
    for m, c in p._terms.items():
        t = to_field(c, modulus) if modulus else c
        for k, e in m:
            t = t * pow(val(k), e, modulus) if modulus else t * val(k) ** e
            if modulus:
                t %= modulus
        total = (total + t) % modulus if modulus else total + t
    return total if modulus else _norm(Fraction(total))


def to_field(x, modulus: int) -> int:
    x = Fraction(x)
    num = x.numerator % modulus
    den = x.denominator % modulus
    if den == 0:
        raise PolynomialError(f"denominator {x.denominator} vanishes modulo {modulus}")
    return num * pow(den, -1, modulus) % modulus


def product(polys: Iterable[Polynomial]) -> Polynomial:
    return reduce(lambda a, b: a * b, polys, Polynomial.constant(1))

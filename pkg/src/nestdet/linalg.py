"""Exact dense linear algebra over the rationals or a prime field.

Matrices are lists of row lists.  Entries are ints/Fractions, or ints in
``[0, modulus)`` when a modulus is given.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list


class SingularMatrixError(ArithmeticError):
    pass


def _div(a, b, modulus):
    if modulus:
        return a * pow(b, -1, modulus) % modulus
    return Fraction(a) / b


def _red(x, modulus):
    return x % modulus if modulus else x


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(n: int, m: int | None = None) -> Matrix:
    return [[0] * (n if m is None else m) for _ in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix, modulus: int | None = None) -> Matrix:
    bt = transpose(b)
    return [[_red(sum(x * y for x, y in zip(row, col)), modulus) for col in bt] for row in a]


def submatrix(a: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[a[r][c] for c in cols] for r in rows]


def det(a: Matrix, modulus: int | None = None):
    """Fraction-free (Bareiss) elimination; plain elimination mod p."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")
    if modulus:
        m = [[x % modulus for x in r] for r in a]
        sign = 1
        for k in range(n):
            piv = next((i for i in range(k, n) if m[i][k]), None)
            if piv is None:
                return 0
            if piv != k:
                m[k], m[piv] = m[piv], m[k]
                sign = -sign
            inv = pow(m[k][k], -1, modulus)
            for i in range(k + 1, n):
                f = m[i][k] * inv % modulus
                if f:
                    for j in range(k, n):
                        m[i][j] = (m[i][j] - f * m[k][j]) % modulus
        out = sign
        for k in range(n):
            out = out * m[k][k] % modulus
        return out
    # scale rationals to integers row by row
    m = []
    scale = Fraction(1)
    for r in a:
        r = [Fraction(x) for x in r]
        den = 1
        for x in r:
            den = den * x.denominator // _gcd(den, x.denominator)
        m.append([int(x * den) for x in r])
        scale /= den
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k]), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    out = sign * m[n - 1][n - 1] * scale
    return out.numerator if out.denominator == 1 else out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rref(a: Matrix, modulus: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (leftmost pivots first)."""
    m = [[_red(x, modulus) if modulus else Fraction(x) for x in r] for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [_div(x, p, modulus) for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [_red(x - f * y, modulus) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix, modulus: int | None = None) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a, modulus)[1])


def nullspace(a: Matrix, modulus: int | None = None) -> list[list]:
    """Basis of the right kernel, one vector per free column (that free
    coordinate set to 1, other free coordinates 0)."""
    cols = len(a[0]) if a else 0
    m, pivots = rref(a, modulus)
    basis = []
    for free in range(cols):
        if free in pivots:
            continue
        v = [0] * cols
        v[free] = 1
        for row, pc in enumerate(pivots):
            v[pc] = _red(-m[row][free], modulus)
        basis.append(v)
    return basis


def inverse(a: Matrix, modulus: int | None = None) -> Matrix:
    n = len(a)
    aug = [list(r) + e for r, e in zip(a, identity(n))]
    m, pivots = rref(aug, modulus)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [r[n:] for r in m]


def solve(a: Matrix, b: Sequence, modulus: int | None = None) -> list:
    inv = inverse(a, modulus)
    return [_red(sum(x * y for x, y in zip(row, b)), modulus) for row in inv]


def is_symmetric(a: Matrix) -> bool:
    n = len(a)
    return all(len(r) == n for r in a) and all(a[i][j] == a[j][i] for i in range(n) for j in range(i))


def is_positive_definite(a: Matrix) -> bool:
    """Exact test via pivots of symmetric Gaussian elimination (LDL^T)."""
    if not is_symmetric(a):
        return False
    n = len(a)
    m = [[Fraction(x) for x in r] for r in a]
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return True

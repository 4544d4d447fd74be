from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nestdet import linalg


def mats(n):
    return st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n)


def leibniz(a):
    import itertools

    n = len(a)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= a[i][perm[i]]
        total += (-1) ** inv * prod
    return total


@given(st.integers(1, 4).flatmap(mats))
def test_det_matches_leibniz(a):
    assert linalg.det(a) == leibniz(a)
    assert linalg.det(a, 101) == leibniz(a) % 101


@given(st.integers(1, 4).flatmap(mats))
def test_inverse_or_singular(a):
    if leibniz(a) == 0:
        with pytest.raises(linalg.SingularMatrixError):
            linalg.inverse(a)
    else:
        inv = linalg.inverse(a)
        assert linalg.matmul(a, inv) == linalg.identity(len(a))


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n),
                                                      min_size=1, max_size=4)))
def test_rank_nullity(a):
    basis = linalg.nullspace(a)
    assert linalg.rank(a) + len(basis) == len(a[0])
    for v in basis:
        assert all(sum(x * y for x, y in zip(row, v)) == 0 for row in a)


def test_positive_definite():
    assert linalg.is_positive_definite([[2, 1], [1, 2]])
    assert not linalg.is_positive_definite([[1, 2], [2, 1]])
    assert not linalg.is_positive_definite([[1, 0], [1, 1]])
    assert linalg.det([]) == 1
    assert linalg.solve([[2, 0], [0, 4]], [1, 1]) == [Fraction(1, 2), Fraction(1, 4)]

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genpos.exactla import (
    SCREEN_PRIME, Echelon, Fp, Matrix, is_prime, kernel_basis, matvec_zero, random_prime,
    rank, rref, span_dim, to_rational,
)

small = st.integers(-6, 6)


def matrices(max_rows=6, max_cols=6, elems=small):
    return st.integers(1, max_rows).flatmap(lambda r: st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(elems, min_size=c, max_size=c), min_size=r, max_size=r)
        .map(lambda rows: Matrix(rows, c))))


def test_rank_examples():
    assert rank(Matrix.identity(5)) == 5
    assert rank(Matrix.zeros(3, 4)) == 0
    assert rank(Matrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])) == 2


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(4)).nrows == 0
    K = kernel_basis(Matrix.zeros(2, 3))
    assert K == Matrix.identity(3)
    M = Matrix([[1, 1, 1]])
    K = kernel_basis(M)
    assert K.nrows == 2 and rank(K) == 2
    assert all(matvec_zero(M, v) for v in K.rows)


def test_span_dim_examples():
    assert span_dim(Matrix([[1, 2], [1, 2]])) == 1
    assert span_dim(Matrix([], 3)) == 0
    assert span_dim(Matrix([[1, 0], [0, 1], [1, 1]])) == 2


def test_from_flat_checks_length():
    assert Matrix.from_flat(2, 2, [1, 2, 3, 4]).rows == [[1, 2], [3, 4]]
    with pytest.raises(ValueError):
        Matrix.from_flat(2, 2, [1, 2, 3])


@given(matrices())
def test_rank_transpose(M):
    assert rank(M) == rank(M.transpose())


@given(matrices())
def test_rank_nullity_and_kernel(M):
    K = kernel_basis(M)
    assert rank(M) + K.nrows == M.ncols
    assert all(matvec_zero(M, v) for v in K.rows)
    if K.nrows:
        assert rank(K) == K.nrows


@given(matrices(elems=st.fractions(min_value=-5, max_value=5, max_denominator=7)))
def test_rank_rational_entries_matches_rref(M):
    R, piv = rref(M)
    assert rank(M) == len(piv) <= min(M.nrows, M.ncols)
    for i, c in enumerate(piv):
        assert R.rows[i][c] == 1


@given(matrices(elems=st.sampled_from([0, 1, SCREEN_PRIME, 2 * SCREEN_PRIME, -SCREEN_PRIME])))
def test_rank_survives_modular_screen_collapse(M):
    # entries vanishing modulo the screening prime force the exact fallback
    _, piv = rref(M)
    assert rank(M) == len(piv)


@given(matrices(), st.integers(0, 6))
def test_rank_with_valid_cap(M, extra):
    r = len(rref(M)[1])
    assert rank(M, cap=r + extra) == r


def test_modp_and_rational_agree():
    rng = random.Random(11)
    p = random_prime(61, rng)
    assert is_prime(p) and p.bit_length() == 61
    for _ in range(200):
        rows = [[rng.randint(-50, 50) for _ in range(12)] for _ in range(10)]
        if rng.random() < 0.3:
            rows[3] = [a + 2 * b for a, b in zip(rows[0], rows[1])]
        M = Matrix(rows, 12)
        assert rank(M) == rank(M, p)


def test_modp_rank_can_only_drop():
    M = Matrix([[1, 1], [1, 6]])
    assert rank(M) == 2 and rank(M, 5) == 1


def test_is_prime():
    primes = [2, 3, 5, 7, 11, 13, 97, 2147483629, 2**61 - 1]
    assert all(is_prime(p) for p in primes)
    assert not any(is_prime(n) for n in [0, 1, 4, 9, 561, 2**61 + 1, 3215031751])


@given(st.integers(0, 96), st.integers(0, 96))
def test_fp_field_axioms(a, b):
    p = 97
    x, y = Fp(a, p), Fp(b, p)
    assert x + (-x) == Fp(0, p)
    assert (x + y) - y == x
    if a % p:
        assert x * x.inverse() == Fp(1, p)
        assert (y / x) * x == y


@given(st.fractions())
def test_rationals_canonical(q):
    r = to_rational(q)
    f = Fraction(r)
    assert f.denominator > 0 and f == q


def test_echelon_incremental():
    E = Echelon(3)
    assert E.add([1, 2, 3]) and not E.add([2, 4, 6])
    assert E.add([0, 1, 1]) and E.dim == 2
    assert [1, 3, 4] in E and [0, 0, 1] not in E
    F = Echelon.full(3)
    assert F.dim == 3 and [5, -1, 2] in F and F.free_columns == []

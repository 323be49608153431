import random

import pytest
from gmpy2 import mpfr

from sirel.arith import PrecisionContext
from sirel.reduction import (DegenerateMatrixError, apply_inverse_to_columns,
                             generalized_hermite_reduce,
                             modified_hermite_reduce)

CTX = PrecisionContext(50, 10)


def int_det(mat):
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)]
            for row in a]


def random_trapezoid(rng, n, t):
    m = n - t
    with CTX.workspace():
        h = [[mpfr(0)] * m for _ in range(n)]
        for i in range(n):
            for j in range(min(i + 1, m)):
                h[i][j] = mpfr(rng.uniform(-4, 4))
            if i < m:
                while abs(h[i][i]) < mpfr("0.25"):
                    h[i][i] = mpfr(rng.uniform(-4, 4))
        return h


def test_already_reduced_is_identity():
    with CTX.workspace():
        h = [[mpfr(2), mpfr(0)], [mpfr("0.9"), mpfr(3)], [mpfr("0.8"), mpfr("-1.2")]]
        rec, hp = generalized_hermite_reduce(h, 1, CTX)
        assert rec.elementary_ops == [] and rec.row_swaps == []
        assert rec.reducing_matrix() == identity(3)
        assert all(hp[i][j] == h[i][j] for i in range(3) for j in range(2))


def test_hand_example_2_3_5():
    with CTX.workspace():
        h = [[mpfr(2)], [mpfr(3)], [mpfr(5)]]
        rec, hp = generalized_hermite_reduce(h, 2, CTX)
        assert [float(r[0]) for r in hp] == [2.0, -1.0, -1.0]
        assert rec.reducing_matrix() == [[1, 0, 0], [-2, 1, 0], [-3, 0, 1]]
        assert rec.row_swaps == []


def test_hand_example_with_swap_phase():
    # (2,4,5): rows reduce to (2,0,-1); the zero then sinks below the nonzero
    with CTX.workspace():
        h = [[mpfr(2)], [mpfr(4)], [mpfr(5)]]
        rec, hp = generalized_hermite_reduce(h, 2, CTX)
        assert [float(r[0]) for r in hp] == [2.0, -1.0, 0.0]
        assert rec.row_swaps == [(1, 2)]
        d = rec.reducing_matrix()
        assert abs(int_det(d)) == 1


def test_swap_phase_zero_pattern():
    # after the swap phase, all nonzero trailing-column entries of the last
    # t rows sit above the zero ones
    rng = random.Random(23)
    for _ in range(50):
        n, t = rng.choice([(5, 2), (6, 3), (7, 4)])
        m = n - t
        h = random_trapezoid(rng, n, t)
        with CTX.workspace():
            # plant some exact zeros in the trailing column of the last rows
            for i in range(m, n):
                if rng.random() < 0.5:
                    h[i][m - 1] = mpfr(0)
            rec, hp = generalized_hermite_reduce(h, t, CTX)
            tail = [abs(hp[i][m - 1]) > CTX.zero_threshold for i in range(m, n)]
            # no zero above a nonzero
            seen_zero = False
            for nonzero in tail:
                if not nonzero:
                    seen_zero = True
                assert not (seen_zero and nonzero)


def test_size_bound_and_unimodularity_random():
    rng = random.Random(29)
    for _ in range(60):
        n, t = rng.choice([(4, 1), (5, 2), (6, 2), (6, 4), (7, 3)])
        m = n - t
        h = random_trapezoid(rng, n, t)
        with CTX.workspace():
            rec, hp = generalized_hermite_reduce(h, t, CTX)
            d = rec.reducing_matrix()
            assert abs(int_det(d)) == 1
            # diagonals unchanged in magnitude
            for j in range(m):
                assert abs(abs(hp[j][j]) - abs(h[j][j])) < mpfr(10) ** -35
            # |h'_{k,i}| <= |h'_{i,i}|/2 for i <= min(k-1, m)
            for k in range(n):
                for i in range(min(k, m)):
                    assert abs(hp[k][i]) <= abs(hp[i][i]) / 2 + mpfr(10) ** -30
            # H' = D H exactly (up to roundoff)
            dh = [[sum(mpfr(d[i][r]) * h[r][j] for r in range(n))
                   for j in range(m)] for i in range(n)]
            for i in range(n):
                for j in range(m):
                    assert abs(dh[i][j] - hp[i][j]) < mpfr(10) ** -30


def test_degenerate_diagonal_rejected():
    with CTX.workspace():
        h = [[mpfr(1), mpfr(0)], [mpfr("0.3"), mpfr(0)], [mpfr(1), mpfr(2)]]
        with pytest.raises(DegenerateMatrixError):
            generalized_hermite_reduce(h, 1, CTX)


def test_modified_equals_generalized_at_t1():
    rng = random.Random(31)
    for _ in range(1000):
        n = rng.randint(3, 6)
        h = random_trapezoid(rng, n, 1)
        with CTX.workspace():
            rec_g, hp_g = generalized_hermite_reduce(
                [row[:] for row in h], 1, CTX)
            rec_m, hp_m = modified_hermite_reduce([row[:] for row in h], CTX)
            assert rec_g.reducing_matrix() == rec_m.reducing_matrix()
            assert all(hp_g[i][j] == hp_m[i][j]
                       for i in range(n) for j in range(n - 1))


def test_modified_single_rounding():
    with CTX.workspace():
        h = [[mpfr(1)], [mpfr("0.6")]]
        rec, hp = modified_hermite_reduce(h, CTX)
        assert rec.elementary_ops == [(1, 0, 1)]
        assert abs(hp[1][0] + mpfr("0.4")) < mpfr(10) ** -40


def test_apply_inverse_identity_and_reconstruction():
    rng = random.Random(37)
    for _ in range(40):
        n, t = rng.choice([(4, 1), (5, 2), (6, 3)])
        h = random_trapezoid(rng, n, t)
        with CTX.workspace():
            rec, _ = generalized_hermite_reduce(h, t, CTX)
        d = rec.reducing_matrix()
        dinv = apply_inverse_to_columns(rec, identity(n))
        assert matmul(d, dinv) == identity(n)


def test_apply_inverse_hand_example():
    with CTX.workspace():
        h = [[mpfr(2)], [mpfr(3)], [mpfr(5)]]
        rec, _ = generalized_hermite_reduce(h, 2, CTX)
    dinv = apply_inverse_to_columns(rec, identity(3))
    assert dinv == [[1, 0, 0], [2, 1, 0], [3, 0, 1]]


def test_apply_inverse_no_ops():
    from sirel.reduction import ReductionRecord
    rec = ReductionRecord(n=3)
    m = [[1, 2, 3], [4, 5, 6]]
    assert apply_inverse_to_columns(rec, m) == m


def test_apply_inverse_dimension_mismatch():
    from sirel.reduction import ReductionRecord
    rec = ReductionRecord(n=3)
    with pytest.raises(ValueError):
        apply_inverse_to_columns(rec, [[1, 2]])

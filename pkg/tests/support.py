"""Shared helpers for the test suite: exact determinants, planted instances."""

import random


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


def planted_instance(rng: random.Random, n: int, t: int,
                     entry_bound: int = 100, rel_bound: int = 3):
    """Exact integer columns with a planted relation of small norm.

    The planted vector has first entry 1 so each x can be completed exactly;
    the true lambda(X) may be even smaller.
    """
    m_star = [rng.randint(-rel_bound, rel_bound) for _ in range(n)]
    m_star[0] = 1
    cols = []
    for _ in range(t):
        x = [rng.randint(-entry_bound, entry_bound) for _ in range(n)]
        x[0] = -sum(x[j] * m_star[j] for j in range(1, n))
        cols.append(x)
    return cols, m_star


def dot_exact(col, vec):
    return sum(a * b for a, b in zip(col, vec))

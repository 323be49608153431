"""Input matrix handling and construction of the hyperplane matrix.

Given t linearly independent n-vectors x_1..x_t (columns of X), the detector
needs an n x (n-t) matrix H whose columns form an orthonormal basis of the
orthogonal complement of span(x_1..x_t), and which is lower trapezoidal with
nonzero diagonal.  Such an H exists whenever the t x t minor built from the
last t rows of X is nonsingular; ``permute_for_minor`` reorders rows to make
that so, and ``hyperplane_matrix`` builds H via Householder QR (orthonormalize
x_1..x_t, then the standard basis vectors e_1..e_{n-t}, in that order).
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr

from .arith import PrecisionContext, PrecisionError, is_negligible, to_mpfr


class LinearDependenceError(ValueError):
    """The input vectors are (numerically) linearly dependent."""


class MinorConditionError(ValueError):
    """The trailing t x t minor of X is singular; permute rows first."""


class InputMatrix:
    """t real n-vectors, stored columnwise with 1 <= t < n.

    Entries may be ints, Fractions, decimal strings, floats or mpfr; they are
    converted to mpfr at the caller's working precision, so a decimal string
    is rounded exactly once.  Linear independence is not checked here (it
    needs a working precision); rank-revealing operations raise
    LinearDependenceError when it fails.
    """

    __slots__ = ("columns", "n", "t")

    def __init__(self, columns):
        cols = tuple(tuple(c) for c in columns)
        if not cols:
            raise ValueError("need at least one input vector")
        n = len(cols[0])
        if any(len(c) != n for c in cols):
            raise ValueError("input vectors must share one dimension")
        t = len(cols)
        if t >= n:
            raise ValueError(
                "need t < n: with t >= n no simultaneous integer relation exists")
        self.columns = cols
        self.n = n
        self.t = t

    def mpfr_columns(self) -> list[list[mpfr]]:
        """Columns converted under the active gmpy2 context."""
        return [[to_mpfr(v) for v in col] for col in self.columns]

    def row(self, i):
        return tuple(col[i] for col in self.columns)


def frobenius_norm(rows) -> mpfr:
    return gmpy2.sqrt(sum(v * v for row in rows for v in row))


def identity_int(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def permutation_transpose_apply(c: list[list[int]], vec: list[int]) -> list[int]:
    """Map a relation found for C*X back to the original row order (C^T m)."""
    n = len(vec)
    return [sum(c[j][i] * vec[j] for j in range(n)) for i in range(n)]


def householder_qr(rows, want_q: bool = True):
    """QR factorization A = Q R of an m x n mpfr matrix (list of rows).

    R is upper trapezoidal with exact structural zeros below the diagonal.
    Q (m x m, orthogonal) is accumulated only when requested.
    """
    a = [list(row) for row in rows]
    m, n = len(a), len(a[0])
    zero = mpfr(0)
    reflectors = []
    for k in range(min(m, n)):
        norm = gmpy2.sqrt(sum(a[i][k] ** 2 for i in range(k, m)))
        if norm == 0:
            reflectors.append(None)
            continue
        # reflect onto -sign(a_kk) * norm * e_k to avoid cancellation
        alpha = -norm if a[k][k] >= 0 else norm
        v = [a[i][k] for i in range(k, m)]
        v[0] -= alpha
        vnorm2 = sum(vi * vi for vi in v)
        if vnorm2 == 0:
            reflectors.append(None)
            continue
        for j in range(k + 1, n):
            dot = sum(v[i - k] * a[i][j] for i in range(k, m))
            f = 2 * dot / vnorm2
            if f:
                for i in range(k, m):
                    a[i][j] -= f * v[i - k]
        a[k][k] = alpha
        for i in range(k + 1, m):
            a[i][k] = zero
        reflectors.append(v)
    q = None
    if want_q:
        # Q = P_1 P_2 ... P_p applied to the identity, innermost first
        q = [[mpfr(1) if i == j else zero for j in range(m)] for i in range(m)]
        for k in reversed(range(len(reflectors))):
            v = reflectors[k]
            if v is None:
                continue
            vnorm2 = sum(vi * vi for vi in v)
            for j in range(m):
                dot = sum(v[i - k] * q[i][j] for i in range(k, m))
                f = 2 * dot / vnorm2
                if f:
                    for i in range(k, m):
                        q[i][j] -= f * v[i - k]
    return q, a


def check_minor(x: InputMatrix, ctx: PrecisionContext) -> bool:
    """True iff the t x t determinant from the last t rows of X is non-negligible."""
    with ctx.workspace():
        cols = x.mpfr_columns()
        t, n = x.t, x.n
        minor = [[cols[j][n - t + i] for j in range(t)] for i in range(t)]
        # Hadamard bound of the minor sets the scale for the zero test
        scale = mpfr(1)
        for j in range(t):
            cnorm = gmpy2.sqrt(sum(minor[i][j] ** 2 for i in range(t)))
            if cnorm == 0:
                return False
            scale *= cnorm
        det = mpfr(1)
        for k in range(t):
            piv = max(range(k, t), key=lambda i: abs(minor[i][k]))
            if minor[piv][k] == 0:
                return False
            if piv != k:
                minor[k], minor[piv] = minor[piv], minor[k]
                det = -det
            det *= minor[k][k]
            for i in range(k + 1, t):
                f = minor[i][k] / minor[k][k]
                if f:
                    for j in range(k, t):
                        minor[i][j] -= f * minor[k][j]
        return not is_negligible(det, ctx, scale=scale)


def permute_for_minor(x: InputMatrix, ctx: PrecisionContext):
    """Row permutation C (in GL(n, Z)) such that C*X passes check_minor.

    Returns (C, X') with X' = C X.  If X already satisfies the minor
    condition, C is the identity.  Pivot rows are located by Gaussian
    elimination with partial pivoting on X^T and moved to the bottom;
    all other rows keep their relative order.  A relation m' found for X'
    maps back to the original order as C^T m'.
    """
    n, t = x.n, x.t
    if check_minor(x, ctx):
        return identity_int(n), x
    with ctx.workspace():
        red = [[to_mpfr(x.columns[r][c]) for c in range(n)] for r in range(t)]
        row_scale = [max(abs(v) for v in red[r]) for r in range(t)]
        pivots: list[int] = []
        for r in range(t):
            cand = [c for c in range(n) if c not in pivots]
            c_best = max(cand, key=lambda c: abs(red[r][c]))
            if row_scale[r] == 0 or is_negligible(red[r][c_best], ctx, scale=row_scale[r]):
                raise LinearDependenceError("input vectors linearly dependent")
            pivots.append(c_best)
            for r2 in range(r + 1, t):
                f = red[r2][c_best] / red[r][c_best]
                if f:
                    for c in range(n):
                        red[r2][c] -= f * red[r][c]
    pivot_set = set(pivots)
    order = [i for i in range(n) if i not in pivot_set] + sorted(pivots)
    c_mat = [[0] * n for _ in range(n)]
    for new, old in enumerate(order):
        c_mat[new][old] = 1
    x_perm = InputMatrix([[col[old] for old in order] for col in x.columns])
    if not check_minor(x_perm, ctx):
        raise PrecisionError("permuted matrix still fails the minor condition; "
                             "raise decimal_digits")
    return c_mat, x_perm


def hyperplane_matrix(x: InputMatrix, ctx: PrecisionContext) -> list[list[mpfr]]:
    """Orthonormal lower-trapezoidal basis H of the complement of span(X).

    Equals (up to the enforced positive diagonal) the Gram-Schmidt
    orthonormalization of x_1..x_t, e_1..e_{n-t} restricted to the e-block,
    but is computed with Householder reflections for stability.  Raises
    MinorConditionError when X fails the minor condition and PrecisionError
    when orthogonality degrades beyond n * zero_threshold.
    """
    n, t = x.n, x.t
    with ctx.workspace():
        cols = x.mpfr_columns()
        zero = mpfr(0)
        sys_rows = [
            [cols[j][i] for j in range(t)]
            + [mpfr(1) if i == k else zero for k in range(n - t)]
            for i in range(n)
        ]
        col_scale = [gmpy2.sqrt(sum(c * c for c in col)) for col in cols] + \
                    [mpfr(1)] * (n - t)
        q, r = householder_qr(sys_rows)
        for k in range(n):
            if is_negligible(r[k][k], ctx, scale=col_scale[k]):
                if k < t:
                    raise LinearDependenceError("input vectors linearly dependent")
                raise MinorConditionError(
                    "trailing minor of X is singular; apply permute_for_minor first")
        h = [[q[i][t + j] for j in range(n - t)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n - t):
                h[i][j] = zero
        for j in range(n - t):
            if h[j][j] < 0:
                for i in range(n):
                    h[i][j] = -h[i][j]
        # orthonormality check: H^T H = I within n * zero_threshold
        err2 = mpfr(0)
        for a in range(n - t):
            for b in range(a, n - t):
                dot = sum(h[i][a] * h[i][b] for i in range(max(a, b), n))
                d = dot - 1 if a == b else dot
                err2 += d * d if a == b else 2 * d * d
        if gmpy2.sqrt(err2) > n * ctx.zero_threshold:
            raise PrecisionError("hyperplane matrix lost orthogonality; "
                                 "raise decimal_digits")
        return h

"""Independent brute-force ground truth for small instances.

Deliberately exponential and bounded: exhaustive relation enumeration over
exact integer/rational inputs, the least relation norm lambda(X), and
conjugate-product minimal polynomials for numbers a^(1/r) - b^(1/s) i.
Property tests and the acceptance suite check the detection engine against
these, never the other way around.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .arith import PrecisionContext, PrecisionError, nearest_int
from .minpoly import IntegerPolynomial, primitive_part

MAX_DIMENSION = 7
MAX_BOUND = 1000.0


class ExactInputMatrix:
    """t exact integer or rational n-vectors, columnwise, verified rank t."""

    __slots__ = ("columns", "n", "t")

    def __init__(self, columns):
        cols = tuple(tuple(Fraction(v) for v in c) for c in columns)
        if not cols:
            raise ValueError("need at least one column")
        n, t = len(cols[0]), len(cols)
        if any(len(c) != n for c in cols):
            raise ValueError("columns must share one dimension")
        if t >= n:
            raise ValueError("need t < n")
        if _exact_rank(cols) != t:
            raise ValueError("columns are linearly dependent")
        self.columns = cols
        self.n = n
        self.t = t


def _exact_rank(cols) -> int:
    rows = [list(c) for c in cols]
    rank = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def enumerate_relations(x: ExactInputMatrix, bound: float) -> list[tuple[int, ...]]:
    """All m != 0 with ||m||_2 <= bound and X^T m = 0 exactly.

    Canonicalized (first nonzero entry positive) and sorted by norm, then
    lexicographically.  Desk-scale only: refuses n > 7 or bound > 1000.
    The search walks the integer box coordinate by coordinate, pruning with
    the exact Cauchy-Schwarz feasibility test
    partial^2 <= ||x_rest||^2 * remaining_norm_budget.
    """
    if x.n > MAX_DIMENSION:
        raise ValueError(f"enumeration limited to n <= {MAX_DIMENSION}")
    if bound > MAX_BOUND:
        raise ValueError(f"enumeration limited to bound <= {MAX_BOUND}")
    n, t = x.n, x.t
    budget = math.floor(bound * bound)
    bmax = math.isqrt(budget)
    # suffix norms ||x_i[k:]||^2 for the pruning test
    tail = [[sum(col[j] * col[j] for j in range(k, n)) for k in range(n + 1)]
            for col in x.columns]
    found: list[tuple[int, ...]] = []
    m = [0] * n

    def descend(k: int, used: int, partials, nonzero_seen: bool) -> None:
        if k == n:
            if nonzero_seen and all(p == 0 for p in partials):
                found.append(tuple(m))
            return
        room = budget - used
        lo = 0 if not nonzero_seen else -bmax
        for v in range(lo, bmax + 1):
            if v * v > room:
                if v > 0:
                    break
                continue
            m[k] = v
            nxt = [p + col[k] * v for p, col in zip(partials, x.columns)]
            rem = room - v * v
            if all(p * p <= tail[i][k + 1] * rem for i, p in enumerate(nxt)):
                descend(k + 1, used + v * v, nxt, nonzero_seen or v != 0)
        m[k] = 0

    descend(0, 0, [Fraction(0)] * t, False)
    found.sort(key=lambda vec: (sum(v * v for v in vec), vec))
    return found


def lambda_of(x: ExactInputMatrix, bound: float) -> float | None:
    """Least Euclidean norm of a relation within the bound, if any."""
    rels = enumerate_relations(x, bound)
    if not rels:
        return None
    return math.sqrt(sum(v * v for v in rels[0]))


def conjugate_product_minpoly(a: int, b: int, r: int, s: int,
                              ctx: PrecisionContext) -> IntegerPolynomial:
    """Minimal polynomial of a^(1/r) - b^(1/s) i, of degree 2 r s.

    Multiplies the linear factors (x - root) over every conjugate root
    z_r^j a^(1/r) - z_s^k b^(1/s) (+-i) numerically, at twice the working
    precision plus slack, and rounds each coefficient to the nearest
    integer.  Raises PrecisionError if any rounding residual is not
    negligible.
    """
    if a < 2 or b < 2:
        raise ValueError("need a, b >= 2")
    if r < 1 or s < 1 or s % 2 == 0:
        raise ValueError("need r >= 1 and odd s >= 1")
    with ctx.workspace(extra_digits=ctx.decimal_digits + 30):
        ar = gmpy2.root(mpfr(a), r)
        bs = gmpy2.root(mpfr(b), s)
        two_pi = 2 * gmpy2.const_pi()
        roots = []
        for j in range(r):
            zr = gmpy2.mpc(gmpy2.cos(two_pi * j / r), gmpy2.sin(two_pi * j / r))
            for k in range(s):
                zs = gmpy2.mpc(gmpy2.cos(two_pi * k / s), gmpy2.sin(two_pi * k / s))
                for sign in (1, -1):
                    roots.append(zr * ar - zs * bs * gmpy2.mpc(0, sign))
        coeffs = [gmpy2.mpc(1)]
        for root in roots:
            nxt = [gmpy2.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] -= c * root
                nxt[i + 1] += c
            coeffs = nxt
        out = []
        for c in coeffs:
            vi = nearest_int(c.real)
            scale = max(mpfr(1), abs(c.real))
            if abs(c.real - vi) > ctx.zero_threshold * scale or \
                    abs(c.imag) > ctx.zero_threshold * scale:
                raise PrecisionError(
                    "conjugate product coefficients failed to round to "
                    "integers; raise decimal_digits")
            out.append(vi)
    return primitive_part(out)

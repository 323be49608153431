"""Integer row reduction of a lower trapezoidal matrix.

The reduction sweeps rows top to bottom, subtracting integer multiples of
earlier rows so that every entry below the diagonal (and every entry of the
last t rows) ends up at most half the corresponding diagonal in magnitude.
A final swap phase on the last t rows pushes zero entries of the last column
below nonzero ones.  All row operations are collected in a
:class:`ReductionRecord` whose reducing matrix D is unimodular, so the
inverse can be applied to other matrices exactly by replaying the ops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpfr

from .arith import PrecisionContext, is_negligible, nearest_int
from .hyperplane import frobenius_norm, identity_int


class DegenerateMatrixError(ArithmeticError):
    """reduce called on degenerate H (negligible diagonal entry)."""


@dataclass
class ReductionRecord:
    """Row operations performed by one reduction, in execution order.

    ``elementary_ops`` holds (i, j, q) meaning "row i of D minus q times
    row j" (0-based); ``row_swaps`` holds the (s1, s2) exchanges of the swap
    phase, applied after all elementary ops.  Replaying both from I_n
    reproduces the reducing matrix D exactly.
    """

    n: int
    elementary_ops: list[tuple[int, int, int]] = field(default_factory=list)
    row_swaps: list[tuple[int, int]] = field(default_factory=list)

    def reducing_matrix(self) -> list[list[int]]:
        d = identity_int(self.n)
        for i, j, q in self.elementary_ops:
            row_i, row_j = d[i], d[j]
            for k in range(self.n):
                row_i[k] -= q * row_j[k]
        for s1, s2 in self.row_swaps:
            d[s1], d[s2] = d[s2], d[s1]
        return d


def generalized_hermite_reduce(h, t: int, ctx: PrecisionContext):
    """Reduce a lower trapezoidal n x (n-t) matrix, returning (record, H').

    H' = D H with the swap phase applied to both D and H', so H' = D H holds
    as an identity throughout.  Requires every diagonal entry of H to be
    non-negligible relative to the Frobenius norm of H.
    """
    n = len(h)
    m = len(h[0])
    if m != n - t:
        raise ValueError(f"shape mismatch: {n} x {m} matrix with t = {t}")
    scale = frobenius_norm(h)
    for j in range(m):
        if is_negligible(h[j][j], ctx, scale=scale):
            raise DegenerateMatrixError(
                f"reduce called on degenerate H: diagonal {j} negligible")
    hp = [list(row) for row in h]
    record = ReductionRecord(n=n)
    ops = record.elementary_ops
    for i in range(1, n):
        for j in range(min(i - 1, m - 1), -1, -1):
            q = nearest_int(hp[i][j] / hp[j][j])
            if q:
                row_i, row_j = hp[i], hp[j]
                for k in range(j + 1):
                    row_i[k] -= q * row_j[k]
                ops.append((i, j, q))
    # swap phase: in the last column, move zero entries of rows n-t..n-1
    # below the nonzero ones (scan upward, swap each zero with the next
    # nonzero further down)
    if t >= 1 and m >= 1:
        s1 = m
        while s1 < n:
            if is_negligible(hp[s1][m - 1], ctx, scale=scale):
                s2 = next((s for s in range(s1 + 1, n)
                           if not is_negligible(hp[s][m - 1], ctx, scale=scale)),
                          None)
                if s2 is None:
                    break
                hp[s1], hp[s2] = hp[s2], hp[s1]
                record.row_swaps.append((s1, s2))
            s1 += 1
    return record, hp


def modified_hermite_reduce(h, ctx: PrecisionContext):
    """Plain Hermite reduction; identical to the generalized form at t = 1."""
    return generalized_hermite_reduce(h, len(h) - len(h[0]), ctx)


def apply_inverse_to_columns(record: ReductionRecord, mat):
    """Return M D^{-1} without forming D^{-1}.

    Each elementary op (i, j, q) replays as "column j of M plus q times
    column i", in recorded order, followed by the row swaps as column swaps.
    Exact for integer matrices.
    """
    rows = [list(row) for row in mat]
    if rows and len(rows[0]) != record.n:
        raise ValueError(f"matrix has {len(rows[0])} columns, record is for n = {record.n}")
    for i, j, q in record.elementary_ops:
        for row in rows:
            row[j] += q * row[i]
    for s1, s2 in record.row_swaps:
        for row in rows:
            row[s1], row[s2] = row[s2], row[s1]
    return rows

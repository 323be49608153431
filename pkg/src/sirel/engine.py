"""Simultaneous integer relation detection.

Given t linearly independent real n-vectors (columns of X), ``detect_sir``
either finds a nonzero integer vector m with X^T m = 0 or proves that no such
vector of Euclidean norm below 1/||H||_F exists.  Each iteration performs

  Exchange   swap rows r, r+1 of H where r maximizes gamma^i |h_ii|,
  Corner     a 2x2 right rotation restoring the trapezoid when r < n-t,
  Reduction  generalized Hermite reduction, replayed on B and Y = X^T B,
  Check      scan columns of Y for a vanished one (a relation sits in B).

``run_two_level`` executes the same loop mostly in hardware floats, folding
the accumulated exact integer operations back into a multiprecision master
state on overflow/degeneracy triggers and re-verifying every candidate there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .arith import PrecisionContext, PrecisionError, is_negligible, to_mpfr
from .hyperplane import (InputMatrix, check_minor, frobenius_norm,
                         householder_qr, hyperplane_matrix, identity_int,
                         permutation_transpose_apply, permute_for_minor)
from .reduction import apply_inverse_to_columns, generalized_hermite_reduce

GAMMA_FLOOR = 2 / math.sqrt(3)

#: hard iteration cap when max_iterations="auto" and no target bound is given
_AUTO_HARD_CAP = 10 ** 6

#: two-level tuning: integer magnitudes must stay exactly representable in
#: doubles, hardware diagonals must stay clear of double roundoff, and a
#: column of Y counting as a candidate at hardware scale forces a fold
_HW_INT_LIMIT = 2 ** 53
_HW_DIAG_EPS = 1e-13
_HW_RELATION_TRIGGER = 1e-11
_HW_REARM_FACTOR = 2.0 ** 10
_HW_MANDATORY_FOLD = 512


@dataclass(frozen=True)
class EngineConfig:
    gamma: float = 2.0
    ctx: PrecisionContext = PrecisionContext()
    max_iterations: int | str = "auto"
    target_bound: float | None = None
    mode: str = "one-level"

    def __post_init__(self) -> None:
        if not float(self.gamma) > GAMMA_FLOOR:
            raise ValueError(f"gamma must exceed 2/sqrt(3) ~ {GAMMA_FLOOR:.6f}")
        if self.mode not in ("one-level", "two-level"):
            raise ValueError("mode must be 'one-level' or 'two-level'")
        if self.max_iterations != "auto" and int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be positive or 'auto'")
        if self.target_bound is not None and not float(self.target_bound) > 0:
            raise ValueError("target_bound must be positive")

    def resolved_max_iterations(self, n: int, t: int) -> int:
        if self.max_iterations != "auto":
            return int(self.max_iterations)
        if self.target_bound is not None and self.target_bound >= 1:
            return iteration_budget(n, t, float(self.gamma), float(self.target_bound))
        return _AUTO_HARD_CAP


@dataclass(frozen=True)
class Found:
    relation: tuple[int, ...]
    iterations: int
    norm: float
    proven_floor: float


@dataclass(frozen=True)
class Exhausted:
    proven_floor: float
    iterations: int


DetectionResult = Found | Exhausted


class DetectionState:
    """Evolving quadruple of the iteration: H, B, Y = X^T B, and the count k.

    B stays an exact integer matrix (Python ints), so |det B| = 1 holds
    exactly; H and Y are mpfr matrices at the working precision.  One state
    must not be mutated concurrently; independent states may run in
    parallel (nothing here is global).
    """

    __slots__ = ("n", "t", "h", "b", "y", "k", "frobenius_history", "floor",
                 "best_floor", "relation", "x_cols", "x_norms")

    def __init__(self, x_cols, h, b, y):
        self.n = len(b)
        self.t = len(y)
        self.h = h
        self.b = b
        self.y = y
        self.k = 0
        self.floor = 1 / frobenius_norm(h)
        self.best_floor = self.floor
        self.frobenius_history = [frobenius_norm(h)]
        self.relation: list[int] | None = None
        self.x_cols = x_cols
        self.x_norms = [gmpy2.sqrt(sum(v * v for v in col)) for col in x_cols]


def normalize_sign(vec) -> tuple[int, ...]:
    """Flip signs so the first nonzero entry is positive."""
    for v in vec:
        if v:
            return tuple(vec) if v > 0 else tuple(-w for w in vec)
    return tuple(vec)


def _verify_column(state: DetectionState, j: int, ctx: PrecisionContext) -> bool:
    """Relation test for column j of B against the original X."""
    col = [state.b[i][j] for i in range(state.n)]
    bnorm2 = sum(v * v for v in col)
    if bnorm2 == 0:
        return False
    bnorm = gmpy2.sqrt(mpfr(bnorm2))
    thr = ctx.zero_threshold
    for i in range(state.t):
        dot = sum(state.x_cols[i][r] * col[r] for r in range(state.n))
        if abs(dot) > thr * state.x_norms[i] * bnorm:
            return False
    return True


def termination_check(state: DetectionState, ctx: PrecisionContext):
    """Return a relation column of B if one is detectable, else None.

    A column j qualifies when every entry of column j of Y is negligible
    relative to ||x_i|| ||B_j|| (the running Y equals X^T B, so this is the
    test X^T B_j = 0), or when the trailing diagonal entry of H has vanished,
    in which case column n-t of B carries the relation.  Candidates are
    re-verified against the original X; the norm floor 1/||H||_F is refreshed
    as a side effect.  Every per-iteration floor is individually certified,
    so best_floor keeps the largest one seen (the norm can fluctuate
    slightly upward through a reduction).
    """
    fro = frobenius_norm(state.h)
    state.floor = 1 / fro
    if state.floor > state.best_floor:
        state.best_floor = state.floor
    n, t, m = state.n, state.t, state.n - state.t
    thr = ctx.zero_threshold
    candidates = []
    for j in range(n):
        bnorm2 = sum(state.b[i][j] ** 2 for i in range(n))
        if bnorm2 == 0:
            continue
        bn = gmpy2.sqrt(mpfr(bnorm2))
        if all(abs(state.y[i][j]) <= thr * state.x_norms[i] * bn for i in range(t)):
            candidates.append((bnorm2, j))
    if not candidates and is_negligible(state.h[m - 1][m - 1], ctx, scale=fro):
        if _verify_column(state, m - 1, ctx):
            return [state.b[i][m - 1] for i in range(n)]
        raise PrecisionError(
            "diagonal of H vanished but no column of B verifies as a "
            "relation; raise decimal_digits")
    if not candidates:
        return None
    _, j = min(candidates)
    if not _verify_column(state, j, ctx):
        raise PrecisionError(
            "candidate relation failed re-verification against X; "
            "raise decimal_digits")
    return [state.b[i][j] for i in range(n)]


def _initiate(x: InputMatrix, config: EngineConfig):
    """Initiation: hyperplane matrix, first reduction, first check.

    Returns (state, h_raw, d0) where h_raw is the unreduced hyperplane
    matrix and d0 the reducing matrix of the initiation step, so that
    every later H equals (accumulated row ops) * h_raw up to a right
    orthogonal factor.
    """
    ctx = config.ctx
    if not check_minor(x, ctx):
        raise ValueError(
            "X fails the trailing-minor condition; apply permute_for_minor "
            "and map the result back via C^T")
    h_raw = hyperplane_matrix(x, ctx)
    x_cols = x.mpfr_columns()
    b = identity_int(x.n)
    y = [list(col) for col in x_cols]
    record, h = generalized_hermite_reduce(h_raw, x.t, ctx)
    b = apply_inverse_to_columns(record, b)
    y = apply_inverse_to_columns(record, y)
    state = DetectionState(x_cols, h, b, y)
    state.relation = termination_check(state, ctx)
    return state, h_raw, record.reducing_matrix()


def initial_state(x: InputMatrix, config: EngineConfig) -> DetectionState:
    with config.ctx.workspace():
        state, _, _ = _initiate(x, config)
        return state


def _exchange_index(h, m: int, gamma: mpfr) -> int:
    r, best, w = 0, None, mpfr(1)
    for i in range(m):
        w = w * gamma
        cand = w * abs(h[i][i])
        if best is None or cand > best:
            best, r = cand, i
    return r


def iterate_once(state: DetectionState, config: EngineConfig) -> DetectionState:
    """One Exchange / Corner / Reduction / Check pass, mutating the state."""
    ctx = config.ctx
    with ctx.workspace():
        h, b, y = state.h, state.b, state.y
        n, t, m = state.n, state.t, state.n - state.t
        fro = state.frobenius_history[-1]
        for j in range(m):
            if is_negligible(h[j][j], ctx, scale=fro):
                if j == m - 1:
                    # trailing diagonal vanished: the relation is already in B
                    state.relation = termination_check(state, ctx)
                    if state.relation is None:
                        raise PrecisionError(
                            "degenerate diagonal without a detectable "
                            "relation; raise decimal_digits")
                    return state
                raise PrecisionError("interior diagonal of H vanished; "
                                     "raise decimal_digits")
        gamma = to_mpfr(config.gamma)
        r = _exchange_index(h, m, gamma)
        beta = h[r + 1][r]
        lam = h[r + 1][r + 1] if r < m - 1 else None
        h[r], h[r + 1] = h[r + 1], h[r]
        for row in y:
            row[r], row[r + 1] = row[r + 1], row[r]
        for row in b:
            row[r], row[r + 1] = row[r + 1], row[r]
        if r < m - 1:
            delta = gmpy2.sqrt(beta * beta + lam * lam)
            if is_negligible(delta, ctx, scale=fro):
                raise PrecisionError("corner rotation degenerate; "
                                     "raise decimal_digits")
            c0, c1 = beta / delta, lam / delta
            for i in range(r, n):
                a0, a1 = h[i][r], h[i][r + 1]
                h[i][r] = a0 * c0 + a1 * c1
                h[i][r + 1] = a1 * c0 - a0 * c1
            h[r][r + 1] = mpfr(0)
        record, h = generalized_hermite_reduce(h, t, ctx)
        state.h = h
        state.b = apply_inverse_to_columns(record, b)
        state.y = apply_inverse_to_columns(record, y)
        state.k += 1
        state.frobenius_history.append(frobenius_norm(h))
        state.relation = termination_check(state, ctx)
        return state


def _found(state: DetectionState) -> Found:
    rel = normalize_sign(state.relation)
    return Found(relation=rel,
                 iterations=state.k,
                 norm=math.sqrt(sum(v * v for v in rel)),
                 proven_floor=float(state.floor))


def detect_sir(x: InputMatrix, config: EngineConfig) -> DetectionResult:
    """Run the detection loop to a relation, a proven bound, or the cap.

    X must satisfy the trailing-minor condition (callers permute otherwise).
    When ``config.target_bound`` is set, the loop stops with Exhausted as
    soon as the certified floor 1/||H||_F exceeds the bound, which proves
    that no relation of norm <= bound exists.
    """
    if config.mode == "two-level":
        return run_two_level(x, config)
    ctx = config.ctx
    bound = config.target_bound
    with ctx.workspace():
        state = initial_state(x, config)
        limit = config.resolved_max_iterations(x.n, x.t)
        while True:
            if bound is not None and state.best_floor > bound:
                return Exhausted(proven_floor=float(state.best_floor),
                                 iterations=state.k)
            if state.relation is not None:
                return _found(state)
            if state.k >= limit:
                return Exhausted(proven_floor=float(state.best_floor),
                                 iterations=state.k)
            iterate_once(state, config)


def detect_sir_permuted(x: InputMatrix, config: EngineConfig):
    """Permute rows if needed, detect, and map any relation back via C^T.

    Returns (result, C) with the relation already in the original row order.
    """
    c_mat, x_fixed = permute_for_minor(x, config.ctx)
    result = detect_sir(x_fixed, config)
    if isinstance(result, Found):
        back = permutation_transpose_apply(c_mat, list(result.relation))
        result = replace(result, relation=normalize_sign(back))
    return result, c_mat


def iteration_budget(n: int, t: int, gamma: float, lambda_bound: float) -> int:
    """Worst-case iteration count before a relation shows up in B.

    Evaluates ceil([C(n,2) - C(t,2)] * log(gamma^{n-t} lambda) /
    ((1/2) log(4 gamma^2 / (gamma^2 + 4)))), valid for gamma > 2/sqrt(3)
    and lambda_bound >= 1.
    """
    if not n > t >= 1:
        raise ValueError("need n > t >= 1")
    if gamma <= GAMMA_FLOOR:
        raise ValueError(f"gamma must exceed 2/sqrt(3) ~ {GAMMA_FLOOR:.6f}")
    if lambda_bound < 1:
        raise ValueError("lambda_bound must be at least 1")
    pairs = math.comb(n, 2) - math.comb(t, 2)
    num = pairs * ((n - t) * math.log(gamma) + math.log(lambda_bound))
    den = 0.5 * math.log(4 * gamma * gamma / (gamma * gamma + 4))
    return math.ceil(num / den)


def pi_value(state: DetectionState, lambda_true, gamma, n: int, t: int) -> mpfr:
    """Diagnostic potential prod_j min(gamma^{n-t} lambda, 1/|h_jj|)^{n-j}.

    Grows geometrically per iteration and is capped by
    (gamma^{n-t} lambda)^(C(n,2) - C(t,2)), which is what bounds the
    iteration count.  A vanished diagonal entry contributes the capped
    branch (1/|h_jj| -> +inf).
    """
    cap = to_mpfr(gamma) ** (n - t) * to_mpfr(lambda_true)
    result = mpfr(1)
    for j in range(1, n - t + 1):
        hjj = abs(state.h[j - 1][j - 1])
        term = cap if hjj == 0 else min(cap, 1 / hjj)
        result *= term ** (n - j)
    return result


# ---------------------------------------------------------------------------
# two-level execution: hardware-float mirrors with exact integer bookkeeping
# ---------------------------------------------------------------------------

class _Fast:
    """Hardware mirrors of H and Y plus exact integer accumulators.

    ``bacc`` accumulates the column operations since the last fold (so
    B_master @ bacc is the true B) and ``aacc`` the matching row operations
    (aacc = bacc^{-1}).  Entries are Python ints, kept below 2^53 so the
    float mirrors remain faithful to exact arithmetic.
    """

    __slots__ = ("hf", "yf", "bacc", "aacc", "iters")

    def __init__(self, state: DetectionState):
        n = state.n
        self.hf = [[float(v) for v in row] for row in state.h]
        self.yf = [[float(v) for v in row] for row in state.y]
        self.bacc = identity_int(n)
        self.aacc = identity_int(n)
        self.iters = 0

    def snapshot(self):
        return ([row[:] for row in self.hf], [row[:] for row in self.yf],
                [row[:] for row in self.bacc], [row[:] for row in self.aacc])

    def restore(self, snap):
        self.hf = [row[:] for row in snap[0]]
        self.yf = [row[:] for row in snap[1]]
        self.bacc = [row[:] for row in snap[2]]
        self.aacc = [row[:] for row in snap[3]]


def _fast_iteration(fast: _Fast, n: int, t: int, log_gamma: float,
                    xnorm_f, triggers: dict[int, float]) -> str:
    """One hardware iteration; returns 'ok', 'fold' or 'candidate'.

    'fold' means the state was (or would have been) damaged and the caller
    must restore the snapshot and refresh from the master; 'candidate'
    leaves the completed iteration in place for the master to confirm.
    """
    m = n - t
    hf, yf = fast.hf, fast.yf
    scale = math.sqrt(sum(v * v for row in hf for v in row))
    best, r = None, 0
    for i in range(m):
        d = abs(hf[i][i])
        if d < _HW_DIAG_EPS * scale:
            return "fold"
        w = (i + 1) * log_gamma + math.log(d)
        if best is None or w > best:
            best, r = w, i
    beta = hf[r + 1][r]
    lam = hf[r + 1][r + 1] if r < m - 1 else 0.0
    hf[r], hf[r + 1] = hf[r + 1], hf[r]
    for row in yf:
        row[r], row[r + 1] = row[r + 1], row[r]
    for row in fast.bacc:
        row[r], row[r + 1] = row[r + 1], row[r]
    fast.aacc[r], fast.aacc[r + 1] = fast.aacc[r + 1], fast.aacc[r]
    if r < m - 1:
        delta = math.hypot(beta, lam)
        if delta < _HW_DIAG_EPS * scale:
            return "fold"
        c0, c1 = beta / delta, lam / delta
        for i in range(r, n):
            a0, a1 = hf[i][r], hf[i][r + 1]
            hf[i][r] = a0 * c0 + a1 * c1
            hf[i][r + 1] = a1 * c0 - a0 * c1
        hf[r][r + 1] = 0.0
    bacc, aacc = fast.bacc, fast.aacc
    bmax = 0
    for i in range(1, n):
        hrow = hf[i]
        for j in range(min(i - 1, m - 1), -1, -1):
            q = math.floor(hrow[j] / hf[j][j] + 0.5)
            if not q:
                continue
            if abs(q) >= _HW_INT_LIMIT:
                return "fold"
            prow = hf[j]
            for k in range(j + 1):
                hrow[k] -= q * prow[k]
            arow_i, arow_j = aacc[i], aacc[j]
            for k in range(n):
                arow_i[k] -= q * arow_j[k]
            for row in bacc:
                row[j] += q * row[i]
            for row in yf:
                row[j] += q * row[i]
    for mat in (bacc, aacc):
        for row in mat:
            for v in row:
                if v > bmax:
                    bmax = v
                elif -v > bmax:
                    bmax = -v
    if bmax >= _HW_INT_LIMIT:
        return "fold"
    # swap phase on the trailing rows of the last column
    if m >= 1:
        col = m - 1
        zero_cut = _HW_DIAG_EPS * scale
        s1 = m
        while s1 < n:
            if abs(hf[s1][col]) < zero_cut:
                s2 = next((s for s in range(s1 + 1, n)
                           if abs(hf[s][col]) >= zero_cut), None)
                if s2 is None:
                    break
                hf[s1], hf[s2] = hf[s2], hf[s1]
                aacc[s1], aacc[s2] = aacc[s2], aacc[s1]
                for row in bacc:
                    row[s1], row[s2] = row[s2], row[s1]
                for row in yf:
                    row[s1], row[s2] = row[s2], row[s1]
            s1 += 1
    fast.iters += 1
    # relation trigger: a column of Y vanished down to hardware scale
    for j in range(n):
        bn2 = sum(row[j] * row[j] for row in bacc)
        if not bn2:
            continue
        bn = math.sqrt(bn2)
        metric = max(abs(yf[i][j]) / (xnorm_f[i] * bn) for i in range(t))
        if metric <= _HW_RELATION_TRIGGER and metric < triggers.get(j, math.inf):
            # disarm until this column improves by a further 2^10, so an
            # unconfirmed candidate cannot force a fold every iteration
            triggers[j] = metric / _HW_REARM_FACTOR
            return "candidate"
    return "ok"


def _int_matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _lower_trapezoidal_factor(mat):
    """L of M = L Q (Q orthogonal), L lower trapezoidal, positive diagonal."""
    rows_t = [list(col) for col in zip(*mat)]
    _, r = householder_qr(rows_t, want_q=False)
    lower = [list(col) for col in zip(*r)]
    for j in range(len(lower[0])):
        if lower[j][j] < 0:
            for i in range(len(lower)):
                lower[i][j] = -lower[i][j]
    return lower


def _unimodular_inverse(b):
    """Exact inverse of a unimodular integer matrix."""
    n = len(b)
    work = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if work[r][col])
        work[col], work[piv] = work[piv], work[col]
        pivval = work[col][col]
        if pivval != 1:
            work[col] = [v / pivval for v in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [a - f * c for a, c in zip(work[r], work[col])]
    out = []
    for row in work:
        int_row = []
        for v in row[n:]:
            if v.denominator != 1:
                raise ArithmeticError("matrix is not unimodular")
            int_row.append(int(v))
        out.append(int_row)
    return out


def _fold(fast: _Fast, state: DetectionState, a_master, h_raw, ctx: PrecisionContext):
    """Commit the accumulated integer ops into the multiprecision master.

    B and A fold exactly; Y is recomputed from the original X so the
    conservation law Y = X^T B holds at working precision; H is rebuilt as
    the lower trapezoidal factor of A * H_raw, the exact image of the
    initial hyperplane matrix under all row operations so far.  The master
    is then put back in canonical reduced form and checked for termination.
    """
    n, t = state.n, state.t
    state.b = _int_matmul(state.b, fast.bacc)
    a_master = _int_matmul(fast.aacc, a_master)
    state.y = [[sum(state.x_cols[i][r] * state.b[r][j] for r in range(n))
                for j in range(n)] for i in range(t)]
    raw = [[sum(a_master[i][r] * h_raw[r][j] for r in range(n))
            for j in range(n - t)] for i in range(n)]
    state.h = _lower_trapezoidal_factor(raw)
    record, state.h = generalized_hermite_reduce(state.h, t, ctx)
    state.b = apply_inverse_to_columns(record, state.b)
    state.y = apply_inverse_to_columns(record, state.y)
    for i, j, q in record.elementary_ops:
        row_i, row_j = a_master[i], a_master[j]
        for k in range(n):
            row_i[k] -= q * row_j[k]
    for s1, s2 in record.row_swaps:
        a_master[s1], a_master[s2] = a_master[s2], a_master[s1]
    state.k += fast.iters
    state.frobenius_history.append(frobenius_norm(state.h))
    state.relation = termination_check(state, ctx)
    return a_master


def run_two_level(x: InputMatrix, config: EngineConfig) -> DetectionResult:
    """detect_sir with the iteration loop mostly in hardware floats.

    Every unimodular operation performed on the float mirrors is recorded
    exactly in integer accumulators; on a fold the master B, its inverse A,
    Y = X^T B and H = lqfactor(A * H_raw) are rebuilt at working precision,
    so nothing the hardware loop does can corrupt the master.  Candidate
    relations found in the fast path count only after the master confirms
    them at the multiprecision threshold.
    """
    ctx = config.ctx
    bound = config.target_bound
    with ctx.workspace():
        state, h_raw, d0 = _initiate(x, config)
        a_master = d0  # accumulated row ops = B^{-1}, starting at D0
        limit = config.resolved_max_iterations(x.n, x.t)
        xnorm_f = [float(v) for v in state.x_norms]
        log_gamma = math.log(float(config.gamma))
        triggers: dict[int, float] = {}
        while True:
            if bound is not None and state.best_floor > bound:
                return Exhausted(proven_floor=float(state.best_floor), iterations=state.k)
            if state.relation is not None:
                return _found(state)
            if state.k >= limit:
                return Exhausted(proven_floor=float(state.best_floor), iterations=state.k)
            fast = _Fast(state)
            while state.k + fast.iters < limit and fast.iters < _HW_MANDATORY_FOLD:
                snap = fast.snapshot()
                outcome = _fast_iteration(fast, state.n, state.t, log_gamma,
                                          xnorm_f, triggers)
                if outcome == "fold":
                    fast.restore(snap)
                    break
                if outcome == "candidate":
                    break
            made_progress = fast.iters > 0
            a_master = _fold(fast, state, a_master, h_raw, ctx)
            if state.relation is not None or (
                    bound is not None and state.best_floor > bound):
                continue
            if not made_progress and state.k < limit:
                # hardware cannot advance this state; take one exact step
                iterate_once(state, config)
                a_master = _unimodular_inverse(state.b)

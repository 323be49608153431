"""Minimal polynomial recovery for approximately known algebraic numbers.

For a degree-n candidate, the power vectors (Re(a^0..a^n), Im(a^0..a^n)) of
the approximation are rounded to its stated number of significant digits and
fed to the relation detector (t = 1 when the imaginary part is negligible,
t = 2 otherwise).  The detected relation, read as polynomial coefficients in
increasing degree, is returned as its primitive part once it survives two
plausibility checks: a coefficient-height ceiling tied to the stated
accuracy, and a residual evaluation at elevated precision.  With too few
significant digits the detector returns an exact relation of the truncated
data that fails these checks -- that failure is reported, relation attached,
rather than silently returning a wrong polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import gmpy2
from gmpy2 import mpfr

from .arith import PrecisionContext, is_negligible, nearest_int, to_mpfr
from .engine import EngineConfig, Exhausted, detect_sir_permuted
from .hyperplane import InputMatrix

#: leading constant of the residual acceptance bound (see verify_residual)
RESIDUAL_SLACK = 50


class VerificationError(RuntimeError):
    """A detected relation is not credible as a minimal polynomial.

    Carries the spurious relation so callers can report it; the usual cause
    is an approximation with too few significant digits.
    """

    def __init__(self, message: str, relation, iterations: int = 0):
        super().__init__(message)
        self.relation = tuple(relation)
        self.iterations = iterations


class RelationNotFound(RuntimeError):
    """No polynomial of the requested degree exists within the norm bound."""

    def __init__(self, message: str, proven_floor: float, iterations: int):
        super().__init__(message)
        self.proven_floor = proven_floor
        self.iterations = iterations


@dataclass(frozen=True)
class ApproxAlgebraicNumber:
    """An approximation re + im*i claimed accurate to stated_digits digits.

    ``re`` and ``im`` may be decimal strings (preferred: they are then
    rounded exactly once, at working precision), mpfr, ints or floats.
    """

    re: object
    im: object
    stated_digits: int

    def __post_init__(self) -> None:
        if self.stated_digits < 1:
            raise ValueError("stated_digits must be at least 1")


@dataclass(frozen=True)
class IntegerPolynomial:
    """Dense integer coefficients, constant term first, primitive, c_d > 0."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self) -> str:
        return " ".join(str(c) for c in self.coeffs)

    def evaluate(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


def primitive_part(coeffs) -> IntegerPolynomial:
    """Strip trailing zeros, divide by the gcd, make the leading sign positive."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("primitive_part of the zero polynomial")
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    if coeffs[-1] < 0:
        g = -g
    return IntegerPolynomial(tuple(c // g for c in coeffs))


def round_significant(x: mpfr, digits: int) -> mpfr:
    """Round to ``digits`` significant decimal digits (exact for zero)."""
    if x == 0:
        return mpfr(0)
    mant, exp, _ = x.digits(10, digits)
    neg = mant.startswith("-")
    if neg:
        mant = mant[1:]
    val = to_mpfr(f"{mant}e{exp - len(mant)}")
    return -val if neg else val


def build_power_vectors(alpha: ApproxAlgebraicNumber, degree: int,
                        ctx: PrecisionContext | None = None):
    """(Re(a^k), Im(a^k)) for k = 0..degree, at working precision."""
    if degree < 1:
        raise ValueError("degree must be at least 1")

    def powers():
        re, im = to_mpfr(alpha.re), to_mpfr(alpha.im)
        v1, v2 = [mpfr(1)], [mpfr(0)]
        pr, pi = mpfr(1), mpfr(0)
        for _ in range(degree):
            pr, pi = pr * re - pi * im, pr * im + pi * re
            v1.append(pr)
            v2.append(pi)
        return v1, v2

    if ctx is None:
        return powers()
    with ctx.workspace():
        return powers()


def verify_residual(poly: IntegerPolynomial, alpha: ApproxAlgebraicNumber,
                    ctx: PrecisionContext) -> bool:
    """Residual test |p(a)| <= 50 (d+1) 10^(1-stated) ||p||_1 max(1,|a|)^d.

    Evaluated at doubled precision so evaluation error cannot mask a bad
    polynomial.  The bound is what the true minimal polynomial can produce
    when the root is perturbed by one unit in the last stated digit; exact
    relations of more coarsely truncated data overshoot it.
    """
    with ctx.workspace(extra_digits=ctx.decimal_digits + 30):
        re, im = to_mpfr(alpha.re), to_mpfr(alpha.im)
        pr = poly.evaluate(gmpy2.mpc(re, im))
        residual = gmpy2.sqrt(pr.real ** 2 + pr.imag ** 2)
        alpha_mag = max(mpfr(1), gmpy2.sqrt(re * re + im * im))
        onenorm = sum(abs(c) for c in poly.coeffs)
        bound = (RESIDUAL_SLACK * (poly.degree + 1)
                 * mpfr(10) ** (1 - alpha.stated_digits)
                 * onenorm * alpha_mag ** poly.degree)
        return residual <= bound


def minimal_polynomial(alpha: ApproxAlgebraicNumber, degree: int,
                       config: EngineConfig,
                       height_ceiling: float | None = None,
                       details: dict | None = None) -> IntegerPolynomial:
    """Recover the minimal polynomial of ``alpha`` assuming the given degree.

    The engine's target bound defaults to 10^(stated_digits + 2) so that an
    exact relation of the truncated data is found (and then rejected) rather
    than silently timing out; the credibility ceiling on the returned
    coefficient vector defaults to 10^(stated_digits / 2), since relations
    with height near the inverse approximation error are exactly the
    unreliable ones.  Raises RelationNotFound when the engine proves there
    is no relation within the bound, VerificationError when the found
    relation fails the credibility checks.  Pass a dict as ``details`` to
    receive iterations / proven_floor / relation back.
    """
    ctx = config.ctx
    if height_ceiling is None:
        height_ceiling = 10.0 ** (alpha.stated_digits / 2)
    with ctx.workspace():
        v1, v2 = build_power_vectors(alpha, degree)
        v1 = [round_significant(v, alpha.stated_digits) for v in v1]
        v2 = [round_significant(v, alpha.stated_digits) for v in v2]
        re, im = to_mpfr(alpha.re), to_mpfr(alpha.im)
        real_case = is_negligible(im / max(mpfr(1), abs(re)), ctx)
        x = InputMatrix([v1] if real_case else [v1, v2])
        run_config = config
        if config.target_bound is None:
            run_config = replace(config,
                                 target_bound=10.0 ** (alpha.stated_digits + 2))
        result, _ = detect_sir_permuted(x, run_config)
    if details is not None:
        details["iterations"] = result.iterations
        details["proven_floor"] = result.proven_floor
        details["relation"] = getattr(result, "relation", None)
    if isinstance(result, Exhausted):
        raise RelationNotFound(
            f"no polynomial of degree {degree} within norm bound "
            f"{run_config.target_bound:g} (proven floor {result.proven_floor:g})",
            proven_floor=result.proven_floor, iterations=result.iterations)
    poly = primitive_part(result.relation)
    height = math.sqrt(sum(c * c for c in poly.coeffs))
    if height > height_ceiling:
        raise VerificationError(
            f"detected relation has height {height:.4g}, beyond the credible "
            f"ceiling {height_ceiling:.4g} for {alpha.stated_digits} stated "
            f"digits", result.relation, iterations=result.iterations)
    if not verify_residual(poly, alpha, ctx):
        raise VerificationError(
            "detected relation fails the residual check at elevated "
            "precision", result.relation, iterations=result.iterations)
    return poly

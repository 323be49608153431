"""Arbitrary-precision scalar semantics shared by all other modules.

All high-precision arithmetic in this package runs on gmpy2 ``mpfr`` values
under a thread-local gmpy2 context.  A :class:`PrecisionContext` fixes the
working precision in decimal digits and the negligibility threshold used to
decide when an accumulated floating value counts as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

#: bits of binary mantissa per decimal digit (log2 10), rounded up a little
_BITS_PER_DIGIT = 3.3219280948873626


class NumericStateError(ArithmeticError):
    """A non-finite value appeared where the algebra guarantees a finite one."""


class PrecisionError(RuntimeError):
    """The working precision is too low to continue meaningfully."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision (base 10) plus the zero-detection policy.

    ``zero_threshold`` is 10**-(decimal_digits - guard_digits): the last
    ``guard_digits`` digits are sacrificed to roundoff before a quantity is
    declared zero.  The threshold is relative to unit scale; callers compare
    against it after dividing out the natural scale of the quantity under
    test (typically a Frobenius norm or a product of vector norms).
    """

    decimal_digits: int = 50
    guard_digits: int = 10

    def __post_init__(self) -> None:
        if self.decimal_digits < 2:
            raise ValueError("decimal_digits must be at least 2")
        if not 0 < self.guard_digits < self.decimal_digits:
            raise ValueError("guard_digits must satisfy 0 < guard < decimal_digits")

    @property
    def precision_bits(self) -> int:
        return int(self.decimal_digits * _BITS_PER_DIGIT) + 16

    @property
    def zero_threshold(self) -> mpfr:
        with self.workspace():
            return mpfr(10) ** -(self.decimal_digits - self.guard_digits)

    def workspace(self, extra_digits: int = 0):
        """gmpy2 context manager activating this precision (plus guard bits)."""
        bits = self.precision_bits + int(extra_digits * _BITS_PER_DIGIT)
        return gmpy2.context(precision=bits)


def to_mpfr(value) -> mpfr:
    """Convert ints, Fractions, strings, floats or mpfr to mpfr.

    Conversion rounds once, at the precision of the active gmpy2 context;
    decimal strings in particular are never routed through hardware floats.
    """
    if isinstance(value, Fraction):
        return mpfr(gmpy2.mpq(value.numerator, value.denominator))
    if isinstance(value, str):
        return mpfr(value.strip())
    return mpfr(value)


def nearest_int(c) -> int:
    """Nearest integer to ``c`` with ties rounded up: floor(c + 1/2)."""
    c = c if isinstance(c, mpfr) else to_mpfr(c)
    if not gmpy2.is_finite(c):
        raise NumericStateError(f"nearest_int of non-finite value {c!r}")
    return int(gmpy2.floor(c + mpfr("0.5")))


def is_negligible(x, ctx: PrecisionContext, scale=1) -> bool:
    """True iff |x| < ctx.zero_threshold * scale."""
    return abs(x) < ctx.zero_threshold * scale

import random

import gmpy2
import pytest
from gmpy2 import mpfr

from sirel.arith import (NumericStateError, PrecisionContext, is_negligible,
                         nearest_int, to_mpfr)


def test_nearest_int_examples():
    assert nearest_int(0.5) == 1          # ties round up
    assert nearest_int(2.4) == 2
    assert nearest_int(-1.5) == -1        # floor(-1.5 + 0.5) = -1


def test_nearest_int_more_ties():
    assert nearest_int(1.5) == 2
    assert nearest_int(-0.5) == 0
    assert nearest_int(-2.5) == -2


def test_nearest_int_rejects_non_finite():
    with pytest.raises(NumericStateError):
        nearest_int(mpfr("inf"))
    with pytest.raises(NumericStateError):
        nearest_int(mpfr("nan"))


def test_nearest_int_shift_equivariance():
    rng = random.Random(42)
    with PrecisionContext(50, 10).workspace():
        for _ in range(200):
            c = mpfr(rng.uniform(-1000, 1000))
            k = rng.randint(-50, 50)
            assert nearest_int(c + k) == nearest_int(c) + k


def test_nearest_int_within_half():
    rng = random.Random(7)
    with PrecisionContext(50, 10).workspace():
        for _ in range(200):
            c = mpfr(rng.uniform(-100, 100))
            assert abs(c - nearest_int(c)) <= mpfr("0.5")


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(decimal_digits=5, guard_digits=10)
    with pytest.raises(ValueError):
        PrecisionContext(decimal_digits=10, guard_digits=0)
    with pytest.raises(ValueError):
        PrecisionContext(decimal_digits=1)


def test_zero_threshold_value():
    ctx = PrecisionContext(100, 10)
    with ctx.workspace():
        assert ctx.zero_threshold == mpfr(10) ** -90
    assert 0 < ctx.zero_threshold < 1


def test_is_negligible_examples():
    ctx = PrecisionContext(100, 10)
    assert is_negligible(0, ctx)
    assert not is_negligible(1, ctx)
    with ctx.workspace():
        assert is_negligible(mpfr(10) ** -95, ctx)
        assert not is_negligible(mpfr(10) ** -85, ctx)


def test_is_negligible_monotone():
    ctx = PrecisionContext(30, 5)
    rng = random.Random(3)
    with ctx.workspace():
        for _ in range(200):
            b = mpfr(10) ** rng.uniform(-40, 5)
            a = b * mpfr(rng.uniform(0, 1))
            if is_negligible(b, ctx):
                assert is_negligible(a, ctx)


def test_is_negligible_scale():
    ctx = PrecisionContext(20, 10)  # threshold 1e-10
    assert is_negligible(1e-8, ctx, scale=1000)
    assert not is_negligible(1e-8, ctx, scale=1)


def test_to_mpfr_parses_strings_exactly_once():
    ctx = PrecisionContext(60, 10)
    with ctx.workspace():
        x = to_mpfr("0.1")
        # parsed at 60-digit precision, not through a hardware double
        assert abs(x - mpfr(1) / 10) < mpfr(10) ** -55
        assert x != 0.1 or float(x) == 0.1


def test_to_mpfr_fraction():
    from fractions import Fraction
    with PrecisionContext(40, 10).workspace():
        x = to_mpfr(Fraction(1, 3))
        assert abs(3 * x - 1) < mpfr(10) ** -35


def test_workspace_precision_is_local():
    ctx = PrecisionContext(200, 10)
    with ctx.workspace():
        inner = (mpfr(1) / 3).precision
    assert inner == ctx.precision_bits
    assert (gmpy2.mpfr(1) / 3).precision == gmpy2.get_context().precision

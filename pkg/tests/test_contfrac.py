"""Exact digit-cylinder geometry and the two-sided digit sampler."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normlab import contfrac

LAM_1 = math.log2(4 / 3)
LAM_11 = math.log2(10 / 9)


def test_cylinder_intervals_known():
    assert contfrac.cylinder_interval((1,)) == (Fraction(1, 2), Fraction(1, 1))
    assert contfrac.cylinder_interval((2,)) == (Fraction(1, 3), Fraction(1, 2))
    assert contfrac.cylinder_interval((1, 1)) == (Fraction(1, 2), Fraction(2, 3))


@given(st.lists(st.integers(1, 30), min_size=1, max_size=8))
def test_interval_endpoints_are_truncations(block):
    """Endpoints must be the values of the block and of the block with its
    last digit bumped, evaluated as exact continued fractions."""
    def evaluate(digits):
        v = Fraction(0)
        for d in reversed(digits):
            v = Fraction(1, d + v)
        return v

    lo, hi = contfrac.cylinder_interval(block)
    bumped = list(block[:-1]) + [block[-1] + 1]
    expect = sorted([evaluate(list(block)), evaluate(bumped)])
    assert [lo, hi] == expect


def test_cylinder_measures_known():
    assert contfrac.cylinder_measure((1,)) == pytest.approx(LAM_1, abs=1e-15)
    assert contfrac.cylinder_measure((1, 1)) == pytest.approx(LAM_11, abs=1e-15)
    assert contfrac.digit_measure(1) == pytest.approx(LAM_1, abs=1e-15)


def test_digit_measures_sum_to_one():
    total = sum(contfrac.digit_measure(k) for k in range(1, 10_000))
    assert total + contfrac.digit_tail_mass(9_999) == pytest.approx(1.0, abs=1e-12)


def test_empty_block_rejected():
    with pytest.raises(ValueError):
        contfrac.cylinder_interval(())


def test_conditional_law_simple_values():
    assert contfrac.digit_conditional_probability(1, 0.0) == pytest.approx(0.5)
    # sums telescope exactly at the sampled check points
    for y in (0.0, 0.3, 0.99):
        s = math.fsum(
            contfrac.digit_conditional_probability(k, y) for k in range(1, 1001)
        )
        assert s == pytest.approx(
            contfrac.digit_conditional_partial_sum(1000, y), abs=1e-12
        )


@pytest.mark.parametrize("y", [0.0, 0.3, 0.99])
@pytest.mark.parametrize("K", [10, 1000, 1_000_000])
def test_telescoping_partial_sums(y, K):
    ks = np.arange(1, K + 1, dtype=np.float64)
    terms = (1.0 + y) / ((ks + y) * (ks + 1.0 + y))
    total = math.fsum(terms.tolist())
    assert abs(total - contfrac.digit_conditional_partial_sum(K, y)) < 1e-12


@given(st.floats(0.0, 0.999), st.integers(1, 2000))
def test_telescoping_property(y, K):
    s = math.fsum(
        contfrac.digit_conditional_probability(k, y) for k in range(1, K + 1)
    )
    assert abs(s - contfrac.digit_conditional_partial_sum(K, y)) < 1e-12


def test_conditional_law_matches_stationary_marginal():
    """Averaging P(k|y) over the stationary mirror law must reproduce the
    single-digit weights; checked by midpoint quadrature."""
    ys = (np.arange(200_000) + 0.5) / 200_000
    dens = 1.0 / ((1.0 + ys) * math.log(2))
    for k in (1, 2, 5, 10):
        pk = (1.0 + ys) / ((k + ys) * (k + 1.0 + ys))
        est = float(np.mean(pk * dens))
        assert est == pytest.approx(contfrac.digit_measure(k), abs=1e-9)


@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999999))
def test_sample_digit_inverts_the_cdf(y, u):
    k = contfrac.sample_digit(y, u)
    assert k >= 1
    # u must fall inside the CDF step of the returned digit
    assert contfrac.digit_conditional_partial_sum(k, y) >= u - 1e-12
    if k > 1:
        assert contfrac.digit_conditional_partial_sum(k - 1, y) < u + 1e-12


@given(st.integers(1, 50), st.floats(0.0, 0.999))
def test_mirror_update_stays_inside(k, y):
    assert 0.0 < contfrac.mirror_update(k, y) < 1.0


def test_spread_measure_no_stars_is_exact():
    v, b = contfrac.spread_measure((1, 1), (0,), tol=1e-9)
    assert b == 0.0
    assert v == pytest.approx(LAM_11, abs=1e-15)


def test_spread_measure_one_star():
    """Frozen by independent quadrature and simulation: the one-star pair
    value is 0.178579 +- 1e-5, strictly above both the adjacent-pair value
    and the product of the single-digit values."""
    v, b = contfrac.spread_measure((1, 1), (1,), tol=1e-6)
    assert b <= 1e-6
    assert v == pytest.approx(0.1785787, abs=2e-5)
    assert v > LAM_11
    assert v > LAM_1**2


def test_spread_measure_underestimates_and_tightens():
    lo, blo = contfrac.spread_measure((1, 1), (1,), tol=1e-2)
    hi, bhi = contfrac.spread_measure((1, 1), (1,), tol=1e-5)
    assert lo <= hi <= lo + blo
    assert bhi < blo


def test_spread_measure_mixing_toward_product():
    """More separation moves the value toward the product of the digit
    weights: |V_2 - Pi| < |V_1 - Pi| with room for the error bounds."""
    pi = LAM_1**2
    v1, b1 = contfrac.spread_measure((1, 1), (1,), tol=1e-6)
    v2, b2 = contfrac.spread_measure((1, 1), (2,), tol=3e-3)
    assert abs(v2 - pi) + b2 < abs(v1 - pi) - b1


def test_spread_measure_infeasible_tolerance():
    with pytest.raises(contfrac.GaussTruncationError):
        contfrac.spread_measure((1, 1), (10,), tol=1e-3)


def test_spread_measure_bad_inputs():
    with pytest.raises(ValueError):
        contfrac.spread_measure((1, 1), (1,), tol=0.0)
    with pytest.raises(ValueError):
        contfrac.spread_measure((1, 1), (1, 2), tol=1e-3)
    with pytest.raises(ValueError):
        contfrac.spread_measure((1, 1), (-1,), tol=1e-3)


@settings(max_examples=15)
@given(st.lists(st.integers(1, 6), min_size=2, max_size=3), st.integers(0, 2))
def test_spread_measure_brute_force_small(block, gap):
    """Tiny cases against direct enumeration over fillings."""
    gaps = (gap,) + (0,) * (len(block) - 2)
    v, bound = contfrac.spread_measure(block, gaps, tol=0.05)
    import itertools

    M = 200
    brute = 0.0
    for filling in itertools.product(range(1, M + 1), repeat=gap):
        full = (block[0],) + filling + tuple(block[1:])
        brute += contfrac.cylinder_measure(full)
    assert v <= brute + 1e-12
    assert brute <= v + bound + 1e-9

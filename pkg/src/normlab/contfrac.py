"""Exact continued-fraction cylinder geometry and digit statistics.

A digit block (b_1, ..., b_k) pins down the interval of reals in [0, 1)
whose expansion starts with those digits.  The endpoints are consecutive
convergents, computed with the integer continuant recursion
p_i = b_i p_{i-1} + p_{i-2}, q_i = b_i q_{i-1} + q_{i-2}, so everything
here is exact rational arithmetic until the final logarithm.

The invariant digit measure of an interval (a, b) is
log2((1+b)/(1+a)), hence the single-digit weights
log2(1 + 1/(k(k+2))) and the familiar ~41.5% share of digit 1.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

__all__ = [
    "cylinder_interval",
    "cylinder_measure",
    "digit_measure",
    "digit_tail_mass",
    "digit_conditional_probability",
    "digit_conditional_partial_sum",
    "mirror_update",
    "sample_digit",
    "spread_measure",
    "GaussTruncationError",
]


class GaussTruncationError(ValueError):
    """Requested tolerance needs more star fillings than the configured cap."""


def cylinder_interval(block) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints (lo, hi) of the cylinder of a digit block."""
    block = tuple(int(b) for b in block)
    if not block:
        raise ValueError("empty digit block has no cylinder interval")
    if any(b < 1 for b in block):
        raise ValueError(f"continued-fraction digits must be >= 1, got {block}")
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1
    for b in block:
        p_prev, p_cur = p_cur, b * p_cur + p_prev
        q_prev, q_cur = q_cur, b * q_cur + q_prev
    end_a = Fraction(p_cur, q_cur)
    end_b = Fraction(p_cur + p_prev, q_cur + q_prev)
    return (end_a, end_b) if end_a < end_b else (end_b, end_a)


def _interval_mass(lo: Fraction, hi: Fraction) -> float:
    return math.log2(float((1 + hi) / (1 + lo)))


def cylinder_measure(block) -> float:
    """Invariant measure of the digit cylinder [b_1, ..., b_k]."""
    lo, hi = cylinder_interval(block)
    return _interval_mass(lo, hi)


def digit_measure(k: int) -> float:
    """Stationary weight of the single digit k: log2(1 + 1/(k(k+2)))."""
    if k < 1:
        raise ValueError("digits start at 1")
    return math.log2(1.0 + 1.0 / (k * (k + 2)))


def digit_tail_mass(cap: int) -> float:
    """Stationary mass of {digit > cap}: log2(1 + 1/(cap+1))."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    return math.log2(1.0 + 1.0 / (cap + 1))


def digit_conditional_probability(k: int, y: float) -> float:
    """Next-digit law given the mirror state y of the two-sided extension.

    P(k | y) = (1+y) / ((k+y)(k+1+y)), a proper distribution on k >= 1
    for every y in [0, 1).
    """
    if not 0.0 <= y < 1.0:
        raise ValueError(f"mirror state must lie in [0,1), got {y}")
    return (1.0 + y) / ((k + y) * (k + 1.0 + y))


def digit_conditional_partial_sum(K: int, y: float) -> float:
    """Closed form of sum_{k<=K} P(k|y): the sum telescopes to
    1 - (1+y)/(K+1+y)."""
    return 1.0 - (1.0 + y) / (K + 1.0 + y)


def mirror_update(k: int, y: float) -> float:
    """Mirror state after emitting digit k: y -> 1/(k+y), stays in (0,1).

    The single boundary orbit (k=1 at y=0 would land exactly on 1) has
    probability zero; it is clamped back into the open interval.
    """
    v = 1.0 / (k + y)
    return v if v < 1.0 else 1.0 - 2.0**-53


def sample_digit(y: float, u: float) -> int:
    """Inverse-CDF draw of the next digit given mirror state y and u~U[0,1).

    The partial sums telescope, so the inverse is closed form: the digit is
    the smallest k >= 1 with k >= (1+y) u/(1-u).
    """
    t = (1.0 + y) * u / (1.0 - u)
    k = int(math.ceil(t))
    return k if k >= 1 else 1


def _star_template(block, gaps):
    """Template of fixed digits and None slots for the spread block."""
    block = tuple(int(b) for b in block)
    gaps = tuple(int(p) for p in gaps)
    if len(gaps) != len(block) - 1:
        raise ValueError("need one gap entry per adjacent digit pair")
    if any(p < 0 for p in gaps):
        raise ValueError("gaps must be nonnegative")
    template: list[int | None] = [block[0]]
    for sym, p in zip(block[1:], gaps):
        template.extend([None] * p)
        template.append(sym)
    return template


def _fillings_budget(tol: float, n_stars: int) -> int:
    """Largest digit M with n_stars * log2(1 + 1/(M+1)) <= tol."""
    per_star = tol / n_stars
    m = int(math.ceil(1.0 / (2.0**per_star - 1.0))) - 1
    while n_stars * digit_tail_mass(max(m, 1)) > tol:
        m += 1
    return max(m, 1)


def _sum_template(template, M: int) -> float:
    """Sum of cylinder measures over all fillings of None slots by 1..M.

    The last star is vectorised; earlier stars are enumerated exactly.
    Continuants stay below 2^53 for every feasible (M, template) pair, so
    float64 arithmetic on them is exact; this is asserted.
    """
    star_positions = [i for i, s in enumerate(template) if s is None]
    last_star = star_positions[-1]
    head, tail = template[:last_star], template[last_star + 1 :]
    head_stars = [i for i, s in enumerate(head) if s is None]

    d = np.arange(1, M + 1, dtype=np.float64)
    total = 0.0
    for filling in itertools.product(range(1, M + 1), repeat=len(head_stars)):
        digits = list(head)
        for pos, val in zip(head_stars, filling):
            digits[pos] = val
        p_prev, p_cur = 1, 0
        q_prev, q_cur = 0, 1
        for b in digits:
            p_prev, p_cur = p_cur, b * p_cur + p_prev
            q_prev, q_cur = q_cur, b * q_cur + q_prev
        pp, pc = np.float64(p_prev), np.float64(p_cur)
        qp, qc = np.float64(q_prev), np.float64(q_cur)
        pp, pc = pc, d * pc + pp
        qp, qc = qc, d * qc + qp
        for b in tail:
            pp, pc = pc, b * pc + pp
            qp, qc = qc, b * qc + qp
        if float(np.max(qc + qp)) >= 2.0**52:
            raise GaussTruncationError("continuants exceed exact float range")
        lo_num, lo_den = pc, qc
        hi_num, hi_den = pc + pp, qc + qp
        # measure of interval between p/q and (p+p')/(q+q')
        ratio = ((lo_den + lo_num) * hi_den) / (lo_den * (hi_den + hi_num))
        total += float(np.abs(np.log2(ratio)).sum())
    return total


def spread_measure(
    block, gaps, tol: float, *, max_fillings: int = 30_000_000
) -> tuple[float, float]:
    """Measure of the spread digit block with wildcard gaps, by truncation.

    Sums exact cylinder measures over all fillings of the starred positions
    with digits <= M, where M is sized so the unseen mass is within `tol`:
    sequences escaping the enumeration must carry a digit > M at one of the
    starred slots, and each such event has stationary mass
    log2(1 + 1/(M+1)).  Returns (value, rigorous upper bound on the error);
    the value is always an underestimate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    template = _star_template(block, gaps)
    n_stars = sum(1 for s in template if s is None)
    if n_stars == 0:
        return cylinder_measure(template), 0.0
    M = _fillings_budget(tol, n_stars)
    if M**n_stars > max_fillings:
        raise GaussTruncationError(
            f"tol={tol} needs {M}^{n_stars} fillings, cap is {max_fillings}"
        )
    value = _sum_template(template, M)
    return value, n_stars * digit_tail_mass(M)

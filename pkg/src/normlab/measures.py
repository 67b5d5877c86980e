"""Exact cylinder and spread-block values for shift-invariant laws.

Supported laws: product (i.i.d.) weights, finite Markov chains with an
optional state-to-symbol labelling (covering lumped chains such as the
gap process of alternating 1/3 jumps), the continued-fraction digit law,
orbit measures of periodic words, and products of two of these.

A block spread apart by wildcard gaps keeps its value under an i.i.d.
law (spreadability); for anything else the value moves, and the witness
search below pins down a block and gap vector whose value strictly
dominates every further spreading inside a finite search box.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import contfrac
from .sources import GeometricWeights, stationary_distribution

__all__ = [
    "Bernoulli", "Markov", "GaussCF", "Periodic", "Product", "SpreadBlock",
    "WitnessResult", "cylinder_measure", "gauss_cylinder_interval",
    "spread_cylinder_measure", "gauss_spread_measure",
    "product_of_symbol_measures", "spreadability_defect", "find_witness",
    "gap_conditional_coefficients", "predicted_restricted_frequency",
    "NoWitnessError", "CertificateError", "PredictionStallError",
]


@dataclass(frozen=True)
class Bernoulli:
    """I.i.d. law; weights are a tuple (finite) or GeometricWeights."""

    weights: tuple | GeometricWeights

    def __post_init__(self):
        if isinstance(self.weights, GeometricWeights):
            return
        w = tuple(float(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        if any(v < 0 for v in w) or abs(sum(w) - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")


@dataclass(frozen=True)
class Markov:
    """Stationary finite chain, symbols = labels[state] (default identity)."""

    transition: tuple
    labels: tuple | None = None

    def __post_init__(self):
        T = tuple(tuple(float(v) for v in row) for row in self.transition)
        object.__setattr__(self, "transition", T)
        arr = np.asarray(T)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("transition must be square")
        if np.any(arr < 0) or np.max(np.abs(arr.sum(axis=1) - 1)) > 1e-12:
            raise ValueError("transition must be row-stochastic")
        if self.labels is not None:
            lab = tuple(int(v) for v in self.labels)
            if len(lab) != arr.shape[0]:
                raise ValueError("one label per state")
            object.__setattr__(self, "labels", lab)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.transition)

    @property
    def stationary(self) -> np.ndarray:
        pi = stationary_distribution(self.matrix)
        if np.max(np.abs(pi @ self.matrix - pi)) > 1e-12:
            raise ValueError("stationary vector fails pi T = pi")
        return pi

    def symbol_projectors(self) -> dict[int, np.ndarray]:
        m = self.matrix.shape[0]
        labels = self.labels if self.labels is not None else tuple(range(m))
        out: dict[int, np.ndarray] = {}
        for state, sym in enumerate(labels):
            out.setdefault(sym, np.zeros(m))[state] = 1.0
        return out


@dataclass(frozen=True)
class GaussCF:
    """Invariant law of continued-fraction digits."""


@dataclass(frozen=True)
class Periodic:
    """Uniform orbit measure of the cycle of a finite word."""

    pattern: tuple

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(int(v) for v in self.pattern))
        if not self.pattern:
            raise ValueError("pattern must be nonempty")


@dataclass(frozen=True)
class Product:
    """Independent coupling of two component laws; blocks are pair rows."""

    first: "MeasureSpec"
    second: "MeasureSpec"


MeasureSpec = Bernoulli | Markov | GaussCF | Periodic | Product


def is_countable(spec) -> bool:
    if isinstance(spec, GaussCF):
        return True
    if isinstance(spec, Bernoulli):
        return isinstance(spec.weights, GeometricWeights)
    if isinstance(spec, Product):
        return is_countable(spec.first) or is_countable(spec.second)
    return False


def symbol_space(spec, cap: int | None = None):
    """Symbols enumerated for defect tables (capped when countable)."""
    if isinstance(spec, Bernoulli):
        if isinstance(spec.weights, GeometricWeights):
            return list(range(1, (cap or 100) + 1))
        return list(range(len(spec.weights)))
    if isinstance(spec, Markov):
        labels = spec.labels or tuple(range(spec.matrix.shape[0]))
        return sorted(set(labels))
    if isinstance(spec, GaussCF):
        return list(range(1, (cap or 100) + 1))
    if isinstance(spec, Periodic):
        return sorted(set(spec.pattern))
    if isinstance(spec, Product):
        return [
            (a, b)
            for a in symbol_space(spec.first, cap)
            for b in symbol_space(spec.second, cap)
        ]
    raise TypeError(f"unknown measure spec {spec!r}")


def block_space(spec, k: int, cap: int | None = None):
    return itertools.product(symbol_space(spec, cap), repeat=k)


def symbol_measure(spec, symbol) -> float:
    return cylinder_measure(spec, (symbol,))


def cylinder_measure(spec, block) -> float:
    """Exact value of the cylinder fixed by the first len(block) symbols."""
    block = tuple(block)
    if not block:
        return 1.0
    if isinstance(spec, Bernoulli):
        w = spec.weights
        out = 1.0
        for b in block:
            if isinstance(w, GeometricWeights):
                out *= w[b]
            else:
                if not 0 <= b < len(w):
                    raise ValueError(f"symbol {b} outside the alphabet")
                out *= w[b]
        return out
    if isinstance(spec, Markov):
        proj = spec.symbol_projectors()
        T = spec.matrix
        try:
            v = spec.stationary * proj[block[0]]
        except KeyError:
            raise ValueError(f"symbol {block[0]} is not a chain label")
        for b in block[1:]:
            if b not in proj:
                raise ValueError(f"symbol {b} is not a chain label")
            v = (v @ T) * proj[b]
        return float(v.sum())
    if isinstance(spec, GaussCF):
        return contfrac.cylinder_measure(block)
    if isinstance(spec, Periodic):
        return _cyclic_matches(spec.pattern, list(enumerate(block))) / len(
            spec.pattern
        )
    if isinstance(spec, Product):
        firsts = tuple(col[0] for col in block)
        seconds = tuple(col[1] for col in block)
        return cylinder_measure(spec.first, firsts) * cylinder_measure(
            spec.second, seconds
        )
    raise TypeError(f"unknown measure spec {spec!r}")


def _cyclic_matches(pattern, fixed) -> int:
    L = len(pattern)
    hits = 0
    for phase in range(L):
        if all(pattern[(phase + off) % L] == sym for off, sym in fixed):
            hits += 1
    return hits


def gauss_cylinder_interval(block):
    """Exact rational endpoints of a digit cylinder (big-int continuants)."""
    return contfrac.cylinder_interval(block)


@dataclass(frozen=True)
class SpreadBlock:
    """Block with wildcard gaps: symbols b_i separated by gaps[i] stars."""

    symbols: tuple
    gaps: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "gaps", tuple(int(p) for p in self.gaps))
        if len(self.symbols) < 1:
            raise ValueError("block must be nonempty")
        if len(self.gaps) != len(self.symbols) - 1:
            raise ValueError("need one gap per adjacent symbol pair")
        if any(p < 0 for p in self.gaps):
            raise ValueError("gaps must be nonnegative")

    @property
    def k(self) -> int:
        return len(self.symbols)

    @property
    def span(self) -> int:
        return self.k + sum(self.gaps)

    def positions(self) -> tuple[int, ...]:
        """1-based coordinates n_i of the fixed symbols inside the window."""
        out = [1]
        for p in self.gaps:
            out.append(out[-1] + p + 1)
        return tuple(out)


def dominates(q, p) -> bool:
    """Coordinatewise >= with at least one strict coordinate."""
    return all(a >= b for a, b in zip(q, p)) and any(a > b for a, b in zip(q, p))


def spread_cylinder_measure(spec, sb: SpreadBlock) -> float:
    """Exact value of the spread cylinder for non-digit laws.

    i.i.d.: unchanged by spreading, so just the product of symbol weights.
    Markov: projectors with transition powers bridging the gaps.
    Periodic: fraction of phases matching the wildcard pattern.
    Product: componentwise with the same gaps.
    """
    if isinstance(spec, GaussCF):
        raise TypeError("use gauss_spread_measure for the digit law")
    b, gaps = sb.symbols, sb.gaps
    if isinstance(spec, Bernoulli):
        return product_of_symbol_measures(spec, b)
    if isinstance(spec, Markov):
        proj = spec.symbol_projectors()
        T = spec.matrix
        if any(s not in proj for s in b):
            raise ValueError("block symbol is not a chain label")
        v = spec.stationary * proj[b[0]]
        for sym, p in zip(b[1:], gaps):
            v = (v @ np.linalg.matrix_power(T, p + 1)) * proj[sym]
        return float(v.sum())
    if isinstance(spec, Periodic):
        fixed = []
        off = 0
        for i, sym in enumerate(b):
            fixed.append((off, sym))
            if i < len(gaps):
                off += gaps[i] + 1
        return _cyclic_matches(spec.pattern, fixed) / len(spec.pattern)
    if isinstance(spec, Product):
        sb1 = SpreadBlock(tuple(c[0] for c in b), gaps)
        sb2 = SpreadBlock(tuple(c[1] for c in b), gaps)
        return spread_cylinder_measure(spec.first, sb1) * spread_cylinder_measure(
            spec.second, sb2
        )
    raise TypeError(f"unknown measure spec {spec!r}")


def gauss_spread_measure(block, gaps, tol: float, **kw):
    """Digit-law value of a spread block, by truncated exact summation.

    Returns (value, error_bound); the value underestimates by at most the
    bound, which is (number of stars) * log2(1 + 1/(M+1)) for the digit
    cutoff M that the tolerance buys.
    """
    return contfrac.spread_measure(block, gaps, tol, **kw)


def product_of_symbol_measures(spec, block) -> float:
    """Product of the single-symbol values along the block."""
    out = 1.0
    for b in block:
        out *= symbol_measure(spec, b)
    return out


def _spread_value(spec, sb: SpreadBlock, gauss_tol: float):
    if isinstance(spec, GaussCF):
        return gauss_spread_measure(sb.symbols, sb.gaps, gauss_tol)
    return spread_cylinder_measure(spec, sb), 0.0


def spreadability_defect(spec, k: int, box: int, *, cap: int | None = None,
                         include_unspread: bool = True,
                         gauss_tol: float = 1e-4) -> float:
    """max over blocks and gap vectors in the box of |value - Pi(block)|.

    The box constrains each gap to 0..box (or 1..box when the unspread
    vector is excluded).  Zero for every i.i.d. law.
    """
    lo = 0 if include_unspread else 1
    worst = 0.0
    for block in block_space(spec, k, cap):
        pi = product_of_symbol_measures(spec, block)
        for gaps in itertools.product(range(lo, box + 1), repeat=k - 1):
            val, _ = _spread_value(spec, SpreadBlock(block, gaps), gauss_tol)
            worst = max(worst, abs(val - pi))
    return worst


class NoWitnessError(ValueError):
    """No deviation from spreadability found inside the search box."""


class CertificateError(RuntimeError):
    """A dominating gap vector fails to decrease the value; the box is too
    small relative to the law's mixing rate."""


@dataclass
class WitnessResult:
    """Block and gap vector whose spread value dominates the box beyond it.

    certificate lists (gaps, value) for every vector dominating the chosen
    one inside the box; all of them are strictly below value_at_witness.
    """

    k: int
    block: tuple
    gaps: tuple
    epsilon: float
    value: float
    pi: float
    box: int
    certificate: list
    label: str = "in-box witness"

    def __post_init__(self):
        bad = [(q, v) for q, v in self.certificate if v >= self.value]
        if bad:
            raise CertificateError(
                f"{len(bad)} dominating vectors do not decrease the value; "
                f"first: {bad[0]}"
            )

    def spread_block(self) -> SpreadBlock:
        return SpreadBlock(self.block, self.gaps)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "block": list(self.block),
            "gaps": list(self.gaps),
            "epsilon": self.epsilon,
            "value": self.value,
            "pi": self.pi,
            "box": self.box,
            "label": self.label,
            "certificate": [
                {"gaps": list(q), "value": v} for q, v in self.certificate
            ],
        }


def find_witness(spec, k_max: int = 4, box: int = 8, eps_floor: float = 1e-9,
                 *, cap: int | None = None, gauss_tol: float = 1e-5) -> WitnessResult:
    """Smallest k with an in-box deviation from spreadability, then a
    maximal gap vector at the largest positive deviation.

    Scans k = 2..k_max; at the first k where some block and gap vector
    deviate from Pi(block) by more than eps_floor, picks the block with the
    largest positive deviation (one must exist: for a fixed gap vector the
    deviations over all blocks sum to zero), takes the set of gap vectors
    achieving it, and returns a dominance-maximal element (lexicographic
    tie-break).  Every strictly dominating vector in the box is enumerated
    into the certificate and must carry a strictly smaller value.
    """
    if isinstance(spec, Bernoulli):
        raise NoWitnessError("i.i.d. laws are spreadable; no witness exists")
    for k in range(2, k_max + 1):
        best: dict[tuple, tuple] = {}
        found = False
        for block in block_space(spec, k, cap):
            pi = product_of_symbol_measures(spec, block)
            for gaps in itertools.product(range(box + 1), repeat=k - 1):
                val, bound = _spread_value(spec, SpreadBlock(block, gaps), gauss_tol)
                dev = val - pi
                if abs(dev) > eps_floor + bound:
                    found = True
                if dev > eps_floor + bound:
                    cur = best.get(block)
                    if cur is None or dev > cur[0] + 1e-15:
                        best[block] = (dev, gaps, val, pi)
        if not found:
            continue
        if not best:
            raise NoWitnessError(
                f"k={k}: deviations found but none positive inside the "
                f"capped block space; enlarge the cap"
            )
        top = max(v[0] for v in best.values())
        block = min(b for b, v in best.items() if v[0] >= top - 1e-12)
        eps, _g, _v, pi = best[block]
        values = {}
        for gaps in itertools.product(range(box + 1), repeat=k - 1):
            values[gaps], _ = _spread_value(spec, SpreadBlock(block, gaps), gauss_tol)
        peak = {q for q, v in values.items() if v >= pi + eps - 1e-15}
        maximal = [q for q in peak if not any(dominates(r, q) for r in peak)]
        gaps0 = sorted(maximal)[0]
        cert = sorted(
            (q, v) for q, v in values.items() if dominates(q, gaps0)
        )
        return WitnessResult(
            k, block, gaps0, eps, values[gaps0], pi, box, cert
        )
    raise NoWitnessError(f"no defect found up to k_max={k_max} in box {box}")


def gap_conditional_coefficients(nu_spec, n_max: int):
    """Coefficients c_n = nu([1 0^n 1]) / nu([1]) for a 0/1 law nu, plus the
    unassigned tail mass 1 - sum c_n (>= 0)."""
    nu1 = cylinder_measure(nu_spec, (1,))
    if nu1 <= 0:
        raise ValueError("law gives no mass to the symbol 1")
    cs = []
    for n in range(n_max + 1):
        block = (1,) + (0,) * n + (1,)
        cs.append(cylinder_measure(nu_spec, block) / nu1)
    tail = 1.0 - sum(cs)
    if tail < -1e-9:
        raise ValueError(f"coefficients sum to {sum(cs)} > 1")
    return cs, max(tail, 0.0)


class PredictionStallError(RuntimeError):
    """Conditional gap mass failed to reach 1 - tol within the length cap."""


def predicted_restricted_frequency(mu_spec, nu_spec, sb: SpreadBlock,
                                   tol: float = 1e-9, *,
                                   max_total_gap: int = 512):
    """Limiting frequency of the spread block along a selection with
    indicator law nu, for points generic for mu.

    Sums, over 0/1 words C that start and end with 1 and contain exactly
    span-many 1's, the mu-value of the block re-spread according to the
    positions of the relevant 1's in C, weighted by the conditional
    nu-mass of C given a leading 1.  Enumeration runs over the inner gap
    vectors of C in order of total length until the conditional mass
    reaches 1 - tol/2; digit-law terms get the other tol/2.

    Returns (value, error_bound).
    """
    span = sb.span
    positions = sb.positions()
    nu1 = cylinder_measure(nu_spec, (1,))
    if nu1 <= 0:
        raise ValueError("selection law gives no mass to 1")
    inner = span - 1  # gaps between consecutive 1's of C
    gauss_budget = tol / 2.0
    mass = 0.0
    value = 0.0
    bound = 0.0
    term_cache: dict[tuple, tuple] = {}
    for total in range(0, max_total_gap + 1):
        for gaps_c in _compositions(total, inner):
            word = (1,)
            for g in gaps_c:
                word = word + (0,) * g + (1,)
            w = cylinder_measure(nu_spec, word) / nu1
            if w <= 0.0:
                continue
            ones_pos = [1]
            for g in gaps_c:
                ones_pos.append(ones_pos[-1] + g + 1)
            q = tuple(
                ones_pos[positions[i + 1] - 1] - ones_pos[positions[i] - 1] - 1
                for i in range(sb.k - 1)
            )
            if q not in term_cache:
                term_cache[q] = _spread_value(
                    mu_spec, SpreadBlock(sb.symbols, q), gauss_budget
                )
            tv, tb = term_cache[q]
            value += w * tv
            bound += w * tb
            mass += w
        if mass >= 1.0 - tol / 2.0:
            break
    else:
        if mass < 1.0 - tol / 2.0:
            raise PredictionStallError(
                f"conditional mass reached only {mass:.12f} with words of "
                f"total inner length <= {max_total_gap}"
            )
    return value, bound + (1.0 - mass)


def _compositions(total: int, parts: int):
    """All vectors of `parts` nonnegative ints summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest

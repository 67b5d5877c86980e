"""Seeded, replayable symbol streams.

Every stream yields symbols at positions 1, 2, 3, ... and is deterministic:
two instances built with the same parameters and seed emit identical
sequences.  `prefix(n)` materialises the first n symbols as an array
without consuming the stream; iteration with `next()` advances it.

Stochastic generators (Bernoulli, Markov, digit sampler, gap processes)
draw from numpy's Generator seeded per stream.  Deterministic ones
(Thue-Morse and friends) need no seed.
"""
from __future__ import annotations

import itertools
import math
from typing import Iterator

import numpy as np

from .alphabets import CountableNaturals, Finite, PairAlphabet
from .contfrac import mirror_update, sample_digit

_CHUNK = 1 << 15


class SymbolStream:
    """Base class: stateful cursor plus non-consuming prefix access."""

    def __init__(self, alphabet, seed=None):
        self.alphabet = alphabet
        self.seed = seed
        self.position = 0
        self._cursor: Iterator[int] | None = None

    # subclasses implement one of _symbols / _prefix_array
    def _symbols(self) -> Iterator:
        n = _CHUNK
        while True:
            chunk = self._prefix_array(n)
            yield from chunk[n - _CHUNK :].tolist()
            n += _CHUNK

    def _prefix_array(self, n: int) -> np.ndarray:
        return np.fromiter(
            itertools.islice(self.replica()._symbols(), n), dtype=np.int64, count=n
        )

    def replica(self) -> "SymbolStream":
        """Fresh stream with identical parameters (replay from position 1)."""
        raise NotImplementedError

    def __iter__(self):
        return self

    def __next__(self):
        if self._cursor is None:
            self._cursor = self.replica()._symbols()
        value = next(self._cursor)
        self.position += 1
        return value

    def take(self, n: int) -> list:
        return [next(self) for _ in range(n)]

    def prefix(self, n: int) -> np.ndarray:
        """First n symbols as an int64 array; does not advance the cursor."""
        if n < 0:
            raise ValueError("prefix length must be nonnegative")
        return self._prefix_array(int(n))


class BernoulliStream(SymbolStream):
    """I.i.d. draws from a fixed weight vector (or geometric tail law)."""

    def __init__(self, weights, seed):
        self.weights = _normalise_weights(weights)
        if isinstance(self.weights, GeometricWeights):
            alphabet = CountableNaturals()
        else:
            alphabet = Finite(len(self.weights)) if len(self.weights) >= 2 else None
            if alphabet is None:
                raise ValueError("need at least two symbols")
        super().__init__(alphabet, seed)

    def replica(self):
        return BernoulliStream(self.weights, self.seed)

    def _prefix_array(self, n):
        rng = np.random.default_rng(self.seed)
        if isinstance(self.weights, GeometricWeights):
            return rng.geometric(self.weights.p, size=n).astype(np.int64)
        return rng.choice(len(self.weights), size=n, p=np.asarray(self.weights))


class GeometricWeights:
    """Weight k -> (1-p)^(k-1) p on symbols 1, 2, 3, ..."""

    def __init__(self, p: float):
        if not 0.0 < p <= 1.0:
            raise ValueError("geometric parameter must lie in (0, 1]")
        self.p = float(p)

    def __getitem__(self, k: int) -> float:
        if k < 1:
            return 0.0
        return (1.0 - self.p) ** (k - 1) * self.p

    def __eq__(self, other):
        return isinstance(other, GeometricWeights) and other.p == self.p

    def __hash__(self):
        return hash(("geometric", self.p))


def _normalise_weights(weights):
    if isinstance(weights, GeometricWeights):
        return weights
    w = tuple(float(x) for x in weights)
    if any(x < 0 for x in w):
        raise ValueError("weights must be nonnegative")
    if abs(sum(w) - 1.0) > 1e-12:
        raise ValueError(f"weights sum to {sum(w)}, not 1")
    return w


def bernoulli_stream(weights, seed) -> BernoulliStream:
    """I.i.d. stream with the given symbol law; a.s. generic for it."""
    return BernoulliStream(weights, seed)


class MarkovStream(SymbolStream):
    """Stationary (or explicitly started) finite Markov chain."""

    def __init__(self, transition, initial=None, seed=None, labels=None):
        T = np.asarray(transition, dtype=np.float64)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ValueError("transition matrix must be square")
        if np.any(T < 0) or np.max(np.abs(T.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition matrix must be row-stochastic")
        self.transition = T
        if initial is None:
            initial = stationary_distribution(T)
        initial = np.asarray(initial, dtype=np.float64)
        if abs(initial.sum() - 1.0) > 1e-12 or np.any(initial < 0):
            raise ValueError("initial vector must be a distribution")
        self.initial = initial
        self.labels = None if labels is None else tuple(int(v) for v in labels)
        n_sym = T.shape[0] if labels is None else max(self.labels) + 1
        super().__init__(Finite(max(n_sym, 2)), seed)

    def replica(self):
        return MarkovStream(self.transition, self.initial, self.seed, self.labels)

    def _prefix_array(self, n):
        rng = np.random.default_rng(self.seed)
        cdf = np.cumsum(self.transition, axis=1)
        cdf[:, -1] = 1.0
        u = rng.random(n + 1)
        states = np.empty(n, dtype=np.int64)
        s = int(np.searchsorted(np.cumsum(self.initial), u[0], side="right"))
        s = min(s, len(self.initial) - 1)
        rows = cdf.tolist()
        us = u[1:].tolist()
        out = states.tolist()
        for i in range(n):
            out[i] = s
            row = rows[s]
            ui = us[i]
            # inline linear scan; chains here are tiny
            k = 0
            while row[k] < ui:
                k += 1
            s = k
        states = np.array(out, dtype=np.int64)
        if self.labels is not None:
            states = np.asarray(self.labels, dtype=np.int64)[states]
        return states


def stationary_distribution(transition) -> np.ndarray:
    """Unique stationary vector of an irreducible row-stochastic matrix."""
    T = np.asarray(transition, dtype=np.float64)
    if not _is_irreducible(T):
        raise ValueError("chain is reducible: no unique stationary vector")
    m = T.shape[0]
    A = np.vstack([T.T - np.eye(m), np.ones(m)])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _is_irreducible(T: np.ndarray) -> bool:
    m = T.shape[0]
    reach = (T > 0) | np.eye(m, dtype=bool)
    for _ in range(m):
        reach = reach | (reach @ reach)
    return bool(reach.all())


def markov_stream(transition, initial=None, seed=None, labels=None) -> MarkovStream:
    """Markov chain trajectory; stationary start (the default) makes it
    almost surely generic for the chain's invariant measure when the chain
    is irreducible.  `labels` optionally maps states to emitted symbols."""
    return MarkovStream(transition, initial, seed, labels)


class GaussDigitStream(SymbolStream):
    """Stationary continued-fraction digit process.

    Sampling runs the two-sided extension: the mirror state y carries the
    past, the next digit is drawn from P(k|y) = (1+y)/((k+y)(k+1+y)) by a
    closed-form inverse CDF, then y <- 1/(k+y).  Seeding y from the digit
    law itself (y = 2^U - 1 has exactly that distribution) makes the digit
    process stationary from the first coordinate, with no orbit round-off:
    y stays in (0,1) by construction.
    """

    def __init__(self, seed):
        super().__init__(CountableNaturals(), seed)

    def replica(self):
        return GaussDigitStream(self.seed)

    def _symbols(self):
        rng = np.random.default_rng(self.seed)
        y = 2.0 ** rng.random() - 1.0
        while True:
            for u in rng.random(_CHUNK).tolist():
                k = sample_digit(y, u)
                y = mirror_update(k, y)
                yield k

    def _prefix_array(self, n):
        rng = np.random.default_rng(self.seed)
        y = 2.0 ** rng.random() - 1.0
        out = np.empty(n, dtype=np.int64)
        view = out.tolist()
        filled = 0
        ceil = math.ceil
        while filled < n:
            m = min(_CHUNK * 8, n - filled)
            us = rng.random(m).tolist()
            for i in range(m):
                u = us[i]
                t = (1.0 + y) * u / (1.0 - u)
                k = ceil(t)
                if k < 1:
                    k = 1
                view[filled + i] = k
                y = 1.0 / (k + y)
                if y >= 1.0:  # probability-zero boundary, see mirror_update
                    y = 1.0 - 2.0**-53
            filled += m
        return np.array(view, dtype=np.int64)


def gauss_digit_stream(seed) -> GaussDigitStream:
    """Digit stream with the exact stationary continued-fraction law."""
    return GaussDigitStream(seed)


class GarciaHedlundStream(SymbolStream):
    """x_n = 1 iff the exponent of 2 in n is even (a regular Toeplitz point)."""

    def __init__(self):
        super().__init__(Finite(2), None)

    def replica(self):
        return GarciaHedlundStream()

    def _prefix_array(self, n):
        idx = np.arange(1, n + 1, dtype=np.int64)
        low = idx & -idx  # isolate lowest set bit: 2^{v_2(n)}
        # v_2(n) is even iff the lowest set bit sits at an even position
        val = np.zeros(n, dtype=np.int64)
        bit = np.int64(1)
        parity = 1
        while bit <= n:
            val[low == bit] = parity
            bit <<= 1
            parity ^= 1
        return val


def garcia_hedlund_stream() -> GarciaHedlundStream:
    return GarciaHedlundStream()


class ThueMorseStream(SymbolStream):
    """x_n = parity of the number of ones in the binary expansion of n-1."""

    def __init__(self):
        super().__init__(Finite(2), None)

    def replica(self):
        return ThueMorseStream()

    def _prefix_array(self, n):
        idx = np.arange(0, n, dtype=np.uint64)
        out = np.zeros(n, dtype=np.int64)
        while idx.any():
            out ^= (idx & 1).astype(np.int64)
            idx >>= 1
        return out


def thue_morse_stream() -> ThueMorseStream:
    return ThueMorseStream()


class PeriodicStream(SymbolStream):
    """x_n = pattern[(n-1) mod len(pattern)]."""

    def __init__(self, pattern):
        self.pattern = tuple(int(s) for s in pattern)
        if not self.pattern:
            raise ValueError("pattern must be nonempty")
        super().__init__(Finite(max(max(self.pattern) + 1, 2)), None)

    def replica(self):
        return PeriodicStream(self.pattern)

    def _prefix_array(self, n):
        reps = n // len(self.pattern) + 1
        return np.tile(np.asarray(self.pattern, dtype=np.int64), reps)[:n]


def periodic_stream(pattern) -> PeriodicStream:
    return PeriodicStream(pattern)


class ProductStream(SymbolStream):
    """Column pairs (s1_n, s2_n); prefix arrays have shape (n, 2)."""

    def __init__(self, first: SymbolStream, second: SymbolStream):
        self.first = first
        self.second = second
        super().__init__(PairAlphabet(first.alphabet, second.alphabet), None)

    def replica(self):
        return ProductStream(self.first.replica(), self.second.replica())

    def _symbols(self):
        a = self.first.replica()
        b = self.second.replica()
        while True:
            yield (next(a), next(b))

    def _prefix_array(self, n):
        return np.column_stack([self.first.prefix(n), self.second.prefix(n)])

    def marginal(self, which: int) -> SymbolStream:
        return (self.first if which == 0 else self.second).replica()


def product_stream(s1: SymbolStream, s2: SymbolStream) -> ProductStream:
    return ProductStream(s1, s2)


class ExplicitStream(SymbolStream):
    """Stream over a materialised array, eventually repeating its tail flag.

    Utility for tests and constructions; positions beyond the array raise.
    """

    def __init__(self, values, alphabet=None):
        self.values = np.asarray(values, dtype=np.int64)
        if alphabet is None:
            alphabet = Finite(max(int(self.values.max(initial=1)) + 1, 2))
        super().__init__(alphabet, None)

    def replica(self):
        return ExplicitStream(self.values, self.alphabet)

    def _prefix_array(self, n):
        if n > len(self.values):
            raise ValueError(f"explicit stream holds {len(self.values)} symbols")
        return self.values[:n].copy()


class PreservingPairStream(SymbolStream):
    """Rebuilt point whose restriction stays generic (interval recycling).

    Given a source z and a run-structured split of the positions, the
    positions of each block segment receive fresh initial stretches
    z_1..z_i; leftover sparse positions get a fixed symbol.  Both the
    output and its restriction to the selection are then concatenations of
    ever-longer prefixes of z, so block statistics of both converge to
    those of z.
    """

    def __init__(self, source: SymbolStream, decomposition, fill_symbol=None):
        from .selectors import SuperficialDecomposition

        if not isinstance(decomposition, SuperficialDecomposition):
            raise TypeError("need a SuperficialDecomposition")
        if decomposition.selection is None:
            raise ValueError("decomposition must carry the selection it splits")
        decomposition.validate_layout()
        self.source = source
        self.decomposition = decomposition
        self.fill_symbol = 0 if fill_symbol is None else int(fill_symbol)
        super().__init__(source.alphabet, source.seed)

    def replica(self):
        return PreservingPairStream(
            self.source.replica(), self.decomposition, self.fill_symbol
        )

    def _prefix_array(self, n):
        dec = self.decomposition
        sel = dec.selection
        z = self.source.prefix(n)
        x = np.full(n, self.fill_symbol, dtype=np.int64)
        b_iv = dec.b_intervals_upto(n)
        s_idx = sel.indices_upto(n)
        if len(b_iv) == 0:
            # sparse selection: copy z, then overwrite along it with z again
            x = z.copy()
            x[s_idx - 1] = z[: len(s_idx)]
            return x
        starts = [lo for lo, _ in b_iv]
        for i, b_lo in enumerate(starts):
            seg_hi = starts[i + 1] if i + 1 < len(starts) else n + 1
            seg = s_idx[(s_idx >= b_lo) & (s_idx < seg_hi)]
            x[seg - 1] = z[: len(seg)]
        for lo, hi in dec.c_intervals_upto(n):
            x[lo - 1 : hi - 1] = z[: hi - lo]
        return x


def build_preserving_pair(z, decomposition, fill_symbol=None) -> PreservingPairStream:
    """Point x with x and its restriction both tracking the law of z."""
    return PreservingPairStream(z, decomposition, fill_symbol)


class SpoiledStream(SymbolStream):
    """Copy of x with a constant symbol written on a thinned-out subset.

    The overwritten subset captures, along a reported subsequence, at least
    two thirds of the selection, yet keeps density zero in the integers, so
    the modified point stays generic while its restriction loses even
    single-symbol statistics.  See selectors.spoiler_subset for the window
    schedule.
    """

    def __init__(self, source: SymbolStream, selection, symbol: int):
        if symbol not in source.alphabet:
            raise ValueError(f"symbol {symbol} outside the stream alphabet")
        self.source = source
        self.selection = selection
        self.symbol = int(symbol)
        super().__init__(source.alphabet, source.seed)

    def replica(self):
        return SpoiledStream(self.source.replica(), self.selection, self.symbol)

    def _prefix_array(self, n):
        from .selectors import spoiler_subset

        x = self.source.prefix(n).copy()
        chosen = spoiler_subset(self.selection, n)
        x[chosen - 1] = self.symbol
        return x


def build_density_zero_spoiler(x, selection, symbol) -> SpoiledStream:
    """Modification of x that breaks simple genericity along the selection.

    Caller guarantees the selection has lower density zero (checked
    empirically at materialisation) and that the written symbol has
    measure at most 1/2 under the intended law.
    """
    return SpoiledStream(x, selection, symbol)

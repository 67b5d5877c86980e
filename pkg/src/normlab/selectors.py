"""Infinite index sets S subset of the positive integers.

A SelectionSet is exposed two ways: as the increasing index sequence
s_1 < s_2 < ... and as its 0/1 indicator prefix.  Construction is lazy
and cached, so repeated density or restriction queries reuse work.
Seeded gap processes continue a single RNG stream while growing, which
keeps replay deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .alphabets import Finite
from .sources import ExplicitStream, SymbolStream

_GROW = 1 << 14


class SelectionSet:
    """Base: subclasses append index chunks via _extend()."""

    kind = "abstract"

    def __init__(self, params=None, seed=None):
        self.params = dict(params or {})
        self.seed = seed
        self._idx = np.empty(0, dtype=np.int64)

    def _extend(self) -> np.ndarray:
        raise NotImplementedError

    def _grow_count(self, n: int):
        while len(self._idx) < n:
            self._append(self._extend())

    def _grow_position(self, N: int):
        while len(self._idx) == 0 or self._idx[-1] < N:
            self._append(self._extend())

    def _append(self, chunk: np.ndarray):
        chunk = np.asarray(chunk, dtype=np.int64)
        if len(chunk) == 0:
            raise RuntimeError("selection chunk generator stalled")
        if len(self._idx) and chunk[0] <= self._idx[-1]:
            raise ValueError("selection indices must be strictly increasing")
        if np.any(np.diff(chunk) <= 0):
            raise ValueError("selection indices must be strictly increasing")
        self._idx = np.concatenate([self._idx, chunk])

    def indices(self, n: int) -> np.ndarray:
        """First n indices s_1..s_n."""
        self._grow_count(n)
        return self._idx[:n].copy()

    def indices_upto(self, N: int) -> np.ndarray:
        """All indices <= N."""
        self._grow_position(N)
        return self._idx[: int(np.searchsorted(self._idx, N, side="right"))].copy()

    def count_upto(self, N: int) -> int:
        self._grow_position(N)
        return int(np.searchsorted(self._idx, N, side="right"))

    def characteristic_prefix(self, N: int) -> np.ndarray:
        """Indicator 1_S on positions 1..N."""
        y = np.zeros(N, dtype=np.int64)
        y[self.indices_upto(N) - 1] = 1
        return y

    def characteristic_stream(self) -> SymbolStream:
        outer = self

        class _Char(SymbolStream):
            def __init__(self):
                super().__init__(Finite(2), outer.seed)

            def replica(self):
                return _Char()

            def _prefix_array(self, n):
                return outer.characteristic_prefix(n)

        return _Char()

    def describe(self) -> dict:
        d = {"kind": self.kind, **self.params}
        if self.seed is not None:
            d["seed"] = self.seed
        return d


class ArithmeticProgression(SelectionSet):
    kind = "arithmetic_progression"

    def __init__(self, first: int, step: int):
        if first < 1 or step < 1:
            raise ValueError("need first >= 1 and step >= 1")
        super().__init__({"first": first, "step": step})
        self.first, self.step = int(first), int(step)

    def _extend(self):
        start = len(self._idx)
        i = np.arange(start, start + _GROW, dtype=np.int64)
        return self.first + i * self.step


def arithmetic_progression(first: int, step: int) -> ArithmeticProgression:
    """S = {first, first+step, first+2*step, ...}."""
    return ArithmeticProgression(first, step)


@dataclass(frozen=True)
class IIDGaps:
    """Independent gaps drawn from a finite law on positive integers."""

    support: tuple[int, ...]
    probs: tuple[float, ...]
    start: int = 0  # s_0; indices are cumulative sums after it

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support and probs must align")
        if any(g < 1 for g in self.support):
            raise ValueError("gap law may not charge 0")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError("gap probabilities must sum to 1")


@dataclass(frozen=True)
class AlternatingGaps:
    """Gaps alternate between a fixed even-step and a random choice.

    With first_gap="random" the sequence starts with a draw from
    `choices` (so for the 4-periodic pattern 0011 the restriction
    reproduces the sequence itself); "fixed" starts with `fixed_gap`.
    """

    fixed_gap: int = 2
    choices: tuple[int, ...] = (4, 8)
    first_gap: str = "random"
    start: int = 1

    def __post_init__(self):
        if self.first_gap not in ("random", "fixed"):
            raise ValueError("first_gap must be 'random' or 'fixed'")
        if self.fixed_gap < 1 or any(c < 1 for c in self.choices):
            raise ValueError("gaps must be positive")


@dataclass(frozen=True)
class CoinMembership:
    """Each integer belongs to S independently with probability p."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("membership probability must lie in (0,1)")


class GapProcessSet(SelectionSet):
    kind = "gap_process"

    def __init__(self, rule, seed):
        super().__init__({"rule": rule}, seed)
        self.rule = rule
        self._rng = np.random.default_rng(seed)
        self._last = getattr(rule, "start", 0)
        self._first_emitted = False

    def _extend(self):
        r = self.rule
        if isinstance(r, IIDGaps):
            gaps = self._rng.choice(
                np.asarray(r.support, dtype=np.int64), size=_GROW,
                p=np.asarray(r.probs),
            )
        elif isinstance(r, CoinMembership):
            gaps = self._rng.geometric(r.p, size=_GROW).astype(np.int64)
        elif isinstance(r, AlternatingGaps):
            m = _GROW // 2
            rand = self._rng.choice(np.asarray(r.choices, dtype=np.int64), size=m)
            gaps = np.empty(2 * m, dtype=np.int64)
            if r.first_gap == "random":
                gaps[0::2] = rand
                gaps[1::2] = r.fixed_gap
            else:
                gaps[0::2] = r.fixed_gap
                gaps[1::2] = rand
            # even chunk length keeps the alternation stable across chunks
            idx = self._last + np.cumsum(gaps)
            self._last = int(idx[-1])
            if not self._first_emitted:
                # the start position itself is the first element s_1
                self._first_emitted = True
                return np.concatenate([[r.start], idx])
            return idx
        else:
            raise TypeError(f"unknown gap rule {r!r}")
        idx = self._last + np.cumsum(gaps)
        self._last = int(idx[-1])
        return idx


def gap_process_set(rule, seed) -> GapProcessSet:
    """S built by cumulative gap sums under the given rule."""
    return GapProcessSet(rule, seed)


class IntervalUnionSet(SelectionSet):
    """S = union of intervals [lo_j, hi_j) from a generator of pairs."""

    kind = "interval_union"

    def __init__(self, interval_factory, params=None):
        super().__init__(params)
        self._intervals = interval_factory()
        self._interval_log: list[tuple[int, int]] = []

    def _extend(self):
        lo, hi = next(self._intervals)
        if hi <= lo:
            raise ValueError("empty interval in union")
        self._interval_log.append((int(lo), int(hi)))
        return np.arange(lo, hi, dtype=np.int64)

    def intervals_upto(self, N: int) -> list[tuple[int, int]]:
        self._grow_position(N)
        return [(lo, min(hi, N + 1)) for lo, hi in self._interval_log if lo <= N]


def power_intervals(base: int = 4, factor: int = 2) -> IntervalUnionSet:
    """S = union over n >= 1 of [base^n, factor*base^n)."""
    if factor >= base:
        raise ValueError("factor must be < base so the intervals are disjoint")

    def gen():
        n = 1
        while True:
            yield (base**n, factor * base**n)
            n += 1

    return IntervalUnionSet(gen, {"base": base, "factor": factor})


def power_runs(base: int = 4) -> IntervalUnionSet:
    """S = union over n >= 1 of [base^n, base^n + n): density-zero runs."""

    def gen():
        n = 1
        while True:
            yield (base**n, base**n + n)
            n += 1

    return IntervalUnionSet(gen, {"base": base})


class IndexFunctionSet(SelectionSet):
    kind = "index_function"

    def __init__(self, func, params=None):
        super().__init__(params)
        self._func = func
        self._next = 1

    def _extend(self):
        out = [self._func(i) for i in range(self._next, self._next + 16)]
        if any(v >= 1 << 62 for v in out):
            raise ValueError("index function grew beyond the representable range")
        self._next += 16
        return np.asarray(out, dtype=np.int64)


def powers_of(base: int = 2) -> IndexFunctionSet:
    """S = {base, base^2, base^3, ...}."""
    return IndexFunctionSet(lambda i: base**i, {"base": base})


class CharacteristicSet(SelectionSet):
    """S = support of a 0/1 stream (positions carrying symbol 1)."""

    kind = "characteristic_support"

    def __init__(self, stream: SymbolStream, params=None):
        super().__init__(params, stream.seed)
        self._stream = stream
        self._scanned = 0

    def _extend(self):
        lo, hi = self._scanned, max(self._scanned * 2, _GROW)
        block = self._stream.prefix(hi)[lo:]
        self._scanned = hi
        idx = np.nonzero(block == 1)[0] + lo + 1
        while len(idx) == 0:
            lo, hi = self._scanned, self._scanned * 2
            block = self._stream.prefix(hi)[lo:]
            self._scanned = hi
            idx = np.nonzero(block == 1)[0] + lo + 1
        return idx


def support_set(stream: SymbolStream) -> CharacteristicSet:
    return CharacteristicSet(stream)


class ComposedSet(SelectionSet):
    """(S o T)_i = s_{t_i}: select along T inside the enumeration of S."""

    kind = "composed"

    def __init__(self, outer: SelectionSet, inner: SelectionSet):
        super().__init__()
        self.outer, self.inner = outer, inner
        self._count = 0

    def _extend(self):
        lo, hi = self._count, self._count + 1024
        t = self.inner.indices(hi)[lo:]
        out = self.outer.indices(int(t[-1]))[t - 1]
        self._count = hi
        return out


def compose(outer: SelectionSet, inner: SelectionSet) -> ComposedSet:
    return ComposedSet(outer, inner)


class RestrictedStream(SymbolStream):
    """x|_S = (x_{s_1}, x_{s_2}, ...)."""

    def __init__(self, source: SymbolStream, selection: SelectionSet):
        self.source = source
        self.selection = selection
        super().__init__(source.alphabet, source.seed)

    def replica(self):
        return RestrictedStream(self.source.replica(), self.selection)

    def _prefix_array(self, n):
        idx = self.selection.indices(n)
        base = self.source.prefix(int(idx[-1]))
        return base[idx - 1]


def restrict(x: SymbolStream, selection: SelectionSet) -> RestrictedStream:
    """Lazy restriction of the stream to the selection's positions."""
    return RestrictedStream(x, selection)


@dataclass
class DensityProfile:
    """Running counting densities #(S cap [1,n])/n at checkpoints."""

    lower_estimate: float
    upper_estimate: float
    checkpoints: list[tuple[int, float]]

    def __post_init__(self):
        if self.lower_estimate > self.upper_estimate + 1e-15:
            raise ValueError("lower estimate exceeds upper estimate")


def density_profile(selection, N: int, checkpoints=None, tail_from=None) -> DensityProfile:
    """Exact counting densities; lower/upper estimates are the min/max of
    the ratio over the checkpoint tail (default: checkpoints >= N/10)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if checkpoints is None:
        checkpoints = geometric_checkpoints(N)
    checkpoints = sorted({int(c) for c in checkpoints if 1 <= c <= N} | {N})
    idx = selection.indices_upto(N)
    counts = np.searchsorted(idx, checkpoints, side="right")
    series = [(c, cnt / c) for c, cnt in zip(checkpoints, counts)]
    cut = N // 10 if tail_from is None else tail_from
    tail = [r for c, r in series if c >= cut] or [series[-1][1]]
    return DensityProfile(min(tail), max(tail), series)


def geometric_checkpoints(N: int, ratio: float = 2.0, start: int = 1) -> list[int]:
    out = []
    c = float(start)
    while c <= N:
        out.append(int(c))
        c = max(c * ratio, c + 1)
    if not out or out[-1] != N:
        out.append(N)
    return sorted(set(out))


# ---------------------------------------------------------------------------
# superficiality analysis
# ---------------------------------------------------------------------------

@dataclass
class SuperficialDecomposition:
    """Split of [1, N] into sparse junk and constant runs.

    a_intervals hold the scheduled junk (domains of short mixed patterns
    whose empirical frequency has certifiably decayed, plus every
    occurrence of pattern lengths that keep positive frequency).
    b_intervals are the surviving maximal 1-runs, c_intervals the 0-runs.
    residual is the junk fraction |A|/N; a small residual is the
    finite-scale signature of a set whose indicator is eventually just
    ever-longer constant stretches.
    """

    a_intervals: list[tuple[int, int]]
    b_intervals: list[tuple[int, int]]
    c_intervals: list[tuple[int, int]]
    residual: float
    n: int = 0
    schedule: dict = field(default_factory=dict)
    selection: SelectionSet | None = None

    SUPERFICIAL_RESIDUAL = 0.1

    @property
    def looks_superficial(self) -> bool:
        return self.residual <= self.SUPERFICIAL_RESIDUAL

    def b_intervals_upto(self, N: int):
        return _clip_intervals(self.b_intervals, N)

    def c_intervals_upto(self, N: int):
        return _clip_intervals(self.c_intervals, N)

    def validate_layout(self):
        """Constructive use: parts disjoint, runs inside/outside S."""
        marks = []
        for tag, ivs in (("a", self.a_intervals), ("b", self.b_intervals),
                         ("c", self.c_intervals)):
            for lo, hi in ivs:
                if hi <= lo or lo < 1:
                    raise ValueError(f"bad {tag}-interval [{lo},{hi})")
                marks.append((lo, hi, tag))
        marks.sort()
        for (l0, h0, t0), (l1, h1, t1) in zip(marks, marks[1:]):
            if l1 < h0:
                raise ValueError("decomposition parts overlap")
        for name in ("b_intervals", "c_intervals"):
            lens = [hi - lo for lo, hi in getattr(self, name)]
            if any(b < a for a, b in zip(lens, lens[1:])):
                raise ValueError(f"{name} lengths must be nondecreasing")
        if self.selection is not None:
            # effectively-unbounded intervals are spot-checked on a bounded
            # prefix; full validation happens against generated prefixes
            horizon = min(max((hi - 1 for _, hi, _ in marks), default=0), 1 << 20)
            if horizon:
                y = self.selection.characteristic_prefix(horizon)
                for lo, hi in self.b_intervals:
                    if not np.all(y[lo - 1 : min(hi, horizon + 1) - 1] == 1):
                        raise ValueError("b-interval leaves the selection")
                for lo, hi in self.c_intervals:
                    if np.any(y[lo - 1 : min(hi, horizon + 1) - 1] == 1):
                        raise ValueError("c-interval meets the selection")


def _clip_intervals(intervals, N):
    return [(lo, min(hi, N + 1)) for lo, hi in intervals if lo <= N]


def interval_decomposition(selection: SelectionSet, horizon: int,
                           lead_gap: bool = True) -> SuperficialDecomposition:
    """Constructive split for an IntervalUnionSet: its intervals become the
    1-runs, the gaps between them the 0-runs."""
    if not isinstance(selection, IntervalUnionSet):
        raise TypeError("need an interval-union selection")
    b = selection.intervals_upto(horizon)
    c = []
    prev = 1
    for lo, hi in b:
        if lo > prev:
            c.append((prev, lo))
        prev = hi
    if prev <= horizon:
        c.append((prev, horizon + 1))
    if not lead_gap and c and c[0][0] == 1:
        c = c[1:]
    return SuperficialDecomposition([], b, c, 0.0, horizon, {}, selection)


def full_line_decomposition(horizon: int = 1) -> SuperficialDecomposition:
    """The trivial split where the whole line is one 1-run."""
    s = arithmetic_progression(1, 1)
    return SuperficialDecomposition(
        [], [(1, 1 << 62)], [], 0.0, horizon, {}, s
    )


def sparse_decomposition(selection: SelectionSet, horizon: int) -> SuperficialDecomposition:
    """Split with empty run parts: the selection itself is the sparse part."""
    a = [(int(s), int(s) + 1) for s in selection.indices_upto(horizon)]
    return SuperficialDecomposition(a, [], [], len(a) / horizon, horizon, {}, selection)


def _runs(y: np.ndarray):
    """Maximal constant runs as (start, end, value), 1-based half-open."""
    n = len(y)
    if n == 0:
        return []
    cuts = np.nonzero(np.diff(y))[0] + 1
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [n]])
    return [(int(s + 1), int(e + 1), int(y[s])) for s, e in zip(starts, ends)]


def superficial_decomposition(y, m_schedule=None) -> SuperficialDecomposition:
    """Scan a 0/1 prefix for the run/junk split described above.

    A "wrapped" pattern of length m is a maximal constant run of length
    m-2 together with its two opposite-symbol flanks.  For each scheduled
    m the scan finds the first position n_m after which the coverage of
    wrapped patterns of length <= m stays below n/m.  Occurrences past
    their n_m are junk; pattern lengths whose coverage never decays
    (positive-frequency structure, the hallmark of progressions and coin
    sets) are junk wholesale.  Whatever survives is classified into
    1-runs and 0-runs.
    """
    y = np.asarray(y, dtype=np.int64)
    N = len(y)
    if m_schedule is None:
        m_schedule = range(3, max(int(2 * math.log2(max(N, 2))), 8) + 1)
    m_schedule = sorted({int(m) for m in m_schedule if m >= 3})
    if not m_schedule:
        raise ValueError("schedule must contain some length >= 3")
    if N < 4 * m_schedule[0]:
        raise ValueError(f"prefix of {N} too short for scheduled length "
                         f"{m_schedule[0]}")

    runs = _runs(y)
    occs = []  # (start, end, m) wrapped-pattern domains, 1-based half-open
    for i, (lo, hi, _val) in enumerate(runs):
        if i == 0 or i == len(runs) - 1:
            continue  # no flank on one side
        occs.append((lo - 1, hi + 1, hi - lo + 2))

    cover = np.zeros(N + 2, dtype=np.int64)
    junk = np.zeros(N + 2, dtype=bool)
    schedule: dict[int, int | None] = {}
    by_len: dict[int, list[tuple[int, int]]] = {}
    for lo, hi, m in occs:
        by_len.setdefault(m, []).append((lo, hi))

    mark = np.zeros(N + 2, dtype=np.int64)
    for m in m_schedule:
        for lo, hi in by_len.get(m, ()):  # accumulate coverage of lengths <= m
            mark[lo] += 1
            mark[hi] -= 1
        covered = (np.cumsum(mark[1 : N + 1]) > 0)
        cov_cum = np.cumsum(covered)
        ns = np.arange(1, N + 1)
        bad = cov_cum * m >= ns
        if bad[-1]:
            schedule[m] = None  # coverage never certifiably decays
            for lo, hi in by_len.get(m, ()):
                junk[lo:hi] = True
        else:
            last_bad = int(np.nonzero(bad)[0][-1]) + 1 if bad.any() else 0
            schedule[m] = last_bad + 1
            for lo, hi in by_len.get(m, ()):
                if lo > last_bad:
                    junk[lo:hi] = True

    junk = junk[1 : N + 1]
    a_intervals = [(lo, hi) for lo, hi, v in _runs(junk.astype(np.int64)) if v == 1]
    keep = ~junk
    b_intervals, c_intervals = [], []
    pos = 0
    for lo, hi, val in _runs(y):
        seg = np.nonzero(keep[lo - 1 : hi - 1])[0]
        if len(seg) == 0:
            continue
        # surviving part of a constant run may be split by junk holes
        splits = np.nonzero(np.diff(seg) > 1)[0]
        starts = np.concatenate([[0], splits + 1])
        ends = np.concatenate([splits, [len(seg) - 1]])
        for s, e in zip(starts, ends):
            iv = (lo + int(seg[s]), lo + int(seg[e]) + 1)
            (b_intervals if val == 1 else c_intervals).append(iv)
    residual = float(junk.sum()) / N
    return SuperficialDecomposition(
        a_intervals, b_intervals, c_intervals, residual, N, schedule
    )


# ---------------------------------------------------------------------------
# spoiler window schedule
# ---------------------------------------------------------------------------

class PositiveLowerDensityError(ValueError):
    """The selection shows no thin checkpoints; the spoiler needs lower
    density zero."""


def spoiler_subset(selection: SelectionSet, N: int,
                   density_guard: float = 0.05) -> np.ndarray:
    """Subset S' of the selection: density zero, yet capturing >= 3/4 of
    the selection's elements at each window endpoint.

    See _spoiler_schedule for the window rule.  On sets that are thin
    everywhere the windows chain seamlessly and S' = S.
    """
    chosen, _ends = _spoiler_schedule(selection, N, density_guard)
    return chosen


def _spoiler_schedule(selection: SelectionSet, N: int, density_guard: float):
    """Window schedule: window j opens at the first position n past the
    previous window with n >= 2(j+1) * #(S cap [1, n)), then admits
    elements until max(3*a_j, j, 3) of them are taken (a_j = count at
    opening).  Inside window j the admitted total stays below
    4*a_j <= 2n/(j+1), so the density of S' vanishes, while at each
    window close the freshly taken elements outnumber the older ones
    three to one, so the capture ratio there is at least 3/4.

    Returns (chosen indices, window close positions).
    """
    idx = selection.indices_upto(N)
    if len(idx) == 0:
        return idx, []
    _check_lower_density(idx, N, density_guard)
    chosen: list[int] = []
    ends: list[int] = []
    j = 0
    capturing = False
    cap = 0
    taken = 0
    resume_at = 1  # earliest position where the next window may open
    count_before = 0
    for s in idx.tolist():
        if not capturing:
            need = 2 * (j + 1) * count_before
            open_at = max(resume_at, need)
            if open_at <= s:
                j += 1
                cap = max(3 * count_before, j, 3)
                taken = 0
                capturing = True
        if capturing:
            chosen.append(s)
            taken += 1
            if taken >= cap:
                capturing = False
                ends.append(s)
                resume_at = s + 1
        count_before += 1
    if capturing:
        ends.append(chosen[-1])
    return np.asarray(chosen, dtype=np.int64), ends


def _check_lower_density(idx: np.ndarray, N: int, guard: float):
    checks = [c for c in geometric_checkpoints(N) if c >= 1000]
    if not checks:
        return
    counts = np.searchsorted(idx, checks, side="right")
    thinnest = min(cnt / c for c, cnt in zip(checks, counts))
    if thinnest >= guard:
        raise PositiveLowerDensityError(
            f"min running density {thinnest:.3f} over the scanned prefix; "
            "the construction needs lower density zero"
        )


def spoiler_capture_series(selection: SelectionSet, N: int):
    """Checkpoints (n, |S' cap [1,n]| / |S cap [1,n]|, |S' cap [1,n]| / n).

    Window close positions are included among the checkpoints; those are
    where the capture ratio peaks.
    """
    chosen, ends = _spoiler_schedule(selection, N, 0.05)
    idx = selection.indices_upto(N)
    out = []
    for c in sorted(set(geometric_checkpoints(N)) | set(ends)):
        total = int(np.searchsorted(idx, c, side="right"))
        got = int(np.searchsorted(chosen, c, side="right"))
        if total:
            out.append((c, got / total, got / c))
    return out


def determinism_score(y, k_max: int = 6, lz_prefix: int | None = None):
    """Entropy proxies for a 0/1 prefix: plug-in conditional block entropy
    increments H_k - H_{k-1} and the normalised LZ76 production rate.
    Both near zero signals a deterministic-looking set.

    LZ76 parsing cost grows superlinearly, so it runs on the first
    `lz_prefix` symbols (default: at most 10^5); the plug-in table uses
    the whole prefix.
    """
    from .empirics import block_frequencies

    y = np.asarray(y, dtype=np.int64)
    N = len(y)
    if N - k_max + 1 < 10 * 2**k_max:
        raise UndersampledError(
            f"prefix {N} undersamples {k_max}-block tables; lower k_max"
        )
    rates = []
    prev = 0.0
    for k in range(1, k_max + 1):
        table = block_frequencies(y, k)
        freqs = np.array([c / table.total for c in table.counts.values()])
        h = float(-(freqs * np.log2(freqs)).sum())
        rates.append(h - prev)
        prev = h
    cut = min(N, lz_prefix or 100_000)
    return {"plugin_entropy_rates": rates, "lz76_rate": lz76_rate(y[:cut])}


class UndersampledError(ValueError):
    pass


def lz76_rate(y) -> float:
    """c(n) log2(n) / n with c(n) the LZ76 phrase count."""
    y = np.asarray(y, dtype=np.int64)
    n = len(y)
    if n < 2:
        raise ValueError("sequence too short")
    return lz76_phrase_count(y) * math.log2(n) / n


def lz76_phrase_count(y) -> int:
    """Number of phrases in the LZ76 parsing.

    Each phrase is the shortest extension of a previously seen word: the
    longest prefix of the remainder that occurs earlier (overlap allowed)
    plus one fresh symbol.  Found by doubling + bisection on the prefix
    length, with C-level substring search.
    """
    s = np.asarray(y).astype(np.uint8).tobytes()
    n = len(s)
    i = 0
    c = 0
    while i < n:
        lo, hi = 0, 1  # longest reproducible prefix length in [lo, hi)
        while i + hi <= n and s.find(s[i : i + hi], 0, i + hi - 1) != -1:
            lo = hi
            hi *= 2
        hi = min(hi, n - i + 1)
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if s.find(s[i : i + mid], 0, i + mid - 1) != -1:
                lo = mid
            else:
                hi = mid
        i += lo + 1
        c += 1
    return c

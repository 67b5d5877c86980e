"""Sliding-window frequency counting and genericity defects.

Counts use the window count N-k+1 as denominator (the usual definition
divides by N; the difference is O(k/N) and vanishes, see the tests).
Tables are mergeable monoids: counting a prefix equals merging the counts
of [1, M] with those of [M-k+2, N], so chunked or parallel counting is
exact as long as the k-1 boundary windows are re-covered.

Sequences are int arrays, 1-dimensional, or 2-dimensional (n, r) for
column processes; blocks are then tuples of column tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OVERFLOW = "other"


@dataclass
class EmpiricalMeasure:
    """Frequencies of k-blocks over a prefix, with an optional symbol cap.

    With a cap c (countable alphabets), any window touching a symbol > c
    lands in a single overflow bucket instead of the block table.
    """

    k: int
    counts: dict
    total: int
    cap: int | None = None
    overflow: int = 0

    def __post_init__(self):
        inside = sum(self.counts.values()) + self.overflow
        if inside != self.total:
            raise ValueError(f"counts sum to {inside}, expected {self.total}")

    def frequency(self, block) -> float:
        return self.counts.get(_as_key(block), 0) / self.total

    def overflow_frequency(self) -> float:
        return self.overflow / self.total

    def frequencies(self) -> dict:
        out = {b: c / self.total for b, c in self.counts.items()}
        if self.cap is not None:
            out[OVERFLOW] = self.overflow_frequency()
        return out


def _as_key(block):
    block = tuple(block)
    if block and isinstance(block[0], (tuple, list, np.ndarray)):
        return tuple(tuple(int(v) for v in row) for row in block)
    return tuple(int(v) for v in block)


def _window_codes(seq: np.ndarray, k: int, cap: int | None):
    """Integer codes of all k-windows plus decode parameters."""
    if seq.ndim == 1:
        cols = seq[:, None]
    else:
        cols = seq
    n, r = cols.shape
    if n < k:
        raise ValueError(f"prefix of {n} symbols is shorter than k={k}")
    if np.any(cols < 0):
        raise ValueError("symbols must be nonnegative integers")
    over_rows = None
    if cap is not None:
        over_rows = (cols > cap).any(axis=1)
        cols = np.minimum(cols, cap + 1)
    bases = cols.max(axis=0).astype(np.int64) + 1
    if cap is not None:
        bases = np.maximum(bases, cap + 2)
    row_code = np.zeros(n, dtype=np.int64)
    mult = 1
    for j in range(r - 1, -1, -1):
        row_code += cols[:, j] * mult
        mult *= int(bases[j])
    base = int(mult)
    if k * np.log2(max(base, 2)) > 62:
        raise ValueError("block code range exceeds int64; lower k or cap")
    w = n - k + 1
    codes = np.zeros(w, dtype=np.int64)
    p = 1
    for j in range(k - 1, -1, -1):
        codes += row_code[j : j + w] * p
        p *= base
    over_win = None
    if over_rows is not None:
        ov = over_rows.astype(np.int64)
        over_win = np.zeros(w, dtype=np.int64)
        for j in range(k):
            over_win += ov[j : j + w]
        over_win = over_win > 0
    return codes, over_win, base, bases, (1 if seq.ndim == 1 else r)


def _decode(code: int, k: int, base: int, bases, r: int):
    rows = []
    for _ in range(k):
        rows.append(code % base)
        code //= base
    rows.reverse()
    out = []
    for rc in rows:
        syms = []
        for b in reversed(bases.tolist()):
            syms.append(int(rc % b))
            rc //= b
        syms.reverse()
        out.append(syms[0] if r == 1 else tuple(syms))
    return tuple(out)


def block_frequencies(seq, k: int, cap: int | None = None) -> EmpiricalMeasure:
    """Counts of every k-block over the sliding windows of a prefix."""
    seq = np.asarray(seq, dtype=np.int64)
    codes, over, base, bases, r = _window_codes(seq, k, cap)
    if over is not None:
        overflow = int(over.sum())
        codes = codes[~over]
    else:
        overflow = 0
    uniq, cnt = np.unique(codes, return_counts=True)
    counts = {
        _decode(int(c), k, base, bases, r): int(m) for c, m in zip(uniq, cnt)
    }
    total = (len(seq) if seq.ndim == 1 else seq.shape[0]) - k + 1
    return EmpiricalMeasure(k, counts, total, cap, overflow)


def merge_tables(tables) -> EmpiricalMeasure:
    """Sum of count tables (same k and cap); exact, order-free."""
    tables = list(tables)
    k = tables[0].k
    cap = tables[0].cap
    if any(t.k != k or t.cap != cap for t in tables):
        raise ValueError("tables disagree on k or cap")
    counts: dict = {}
    overflow = 0
    total = 0
    for t in tables:
        for b, c in t.counts.items():
            counts[b] = counts.get(b, 0) + c
        overflow += t.overflow
        total += t.total
    return EmpiricalMeasure(k, counts, total, cap, overflow)


def chunked_block_frequencies(seq, k: int, chunk: int, cap=None) -> EmpiricalMeasure:
    """Streaming-style counting in chunks, re-covering boundary windows."""
    seq = np.asarray(seq, dtype=np.int64)
    n = len(seq) if seq.ndim == 1 else seq.shape[0]
    if chunk < k:
        raise ValueError("chunk must be at least k")
    parts = []
    lo = 0
    while lo < n:
        hi = min(lo + chunk, n)
        if n - hi < k:  # avoid a trailing fragment shorter than k
            hi = n
        parts.append(block_frequencies(seq[lo:hi], k, cap))
        if hi == n:
            break
        lo = hi - k + 1
    return merge_tables(parts)


@dataclass(frozen=True)
class WildcardPattern:
    """Fixed symbols at selected offsets inside a window of length span."""

    fixed: tuple  # ((offset, symbol), ...) with 0-based strictly increasing offsets
    span: int

    def __post_init__(self):
        offs = [o for o, _ in self.fixed]
        if not offs or offs != sorted(set(offs)):
            raise ValueError("offsets must be strictly increasing")
        if offs[0] != 0 or offs[-1] != self.span - 1:
            raise ValueError("first and last pattern positions must be fixed")

    @classmethod
    def from_block(cls, block) -> "WildcardPattern":
        block = tuple(int(b) for b in block)
        return cls(tuple(enumerate(block)), len(block))

    @classmethod
    def from_spread(cls, block, gaps) -> "WildcardPattern":
        """Pattern of a block spread apart by wildcard gaps: symbol i sits
        at offset i-1 + sum of the first i-1 gaps."""
        block = tuple(int(b) for b in block)
        gaps = tuple(int(p) for p in gaps)
        if len(gaps) != len(block) - 1:
            raise ValueError("need one gap per adjacent pair")
        fixed = [(0, block[0])]
        off = 0
        for sym, p in zip(block[1:], gaps):
            off += p + 1
            fixed.append((off, sym))
        return cls(tuple(fixed), off + 1)


def pattern_match_mask(seq, pattern: WildcardPattern) -> np.ndarray:
    seq = np.asarray(seq, dtype=np.int64)
    if seq.ndim != 1:
        raise ValueError("wildcard matching works on scalar sequences")
    w = len(seq) - pattern.span + 1
    if w < 1:
        raise ValueError("pattern span exceeds the prefix")
    mask = np.ones(w, dtype=bool)
    for off, sym in pattern.fixed:
        mask &= seq[off : off + w] == sym
    return mask


def pattern_frequency(seq, pattern: WildcardPattern) -> float:
    """Fraction of windows whose fixed offsets all match."""
    mask = pattern_match_mask(seq, pattern)
    return float(mask.mean())


def running_frequency_series(seq, pattern: WildcardPattern, checkpoints):
    """Pattern frequency over growing prefixes, one entry per checkpoint."""
    seq = np.asarray(seq, dtype=np.int64)
    checkpoints = sorted({int(c) for c in checkpoints})
    if any(c < pattern.span for c in checkpoints):
        raise ValueError("checkpoints must be at least the pattern span")
    if checkpoints and checkpoints[-1] > len(seq):
        raise ValueError("checkpoint beyond the prefix")
    cum = np.cumsum(pattern_match_mask(seq, pattern))
    out = []
    for c in checkpoints:
        w = c - pattern.span + 1
        out.append((c, float(cum[w - 1]) / w))
    return out


def normality_defect(seq, spec, k: int, cap: int | None = None) -> float:
    """Worst deviation of observed k-block frequencies from the law's
    cylinder values, plus the overflow-bucket mismatch when capped."""
    from . import measures

    if cap is None and measures.is_countable(spec):
        cap = 100
    table = block_frequencies(seq, k, cap)
    worst = 0.0
    inside_mass = 0.0
    for block in measures.block_space(spec, k, cap):
        mu = measures.cylinder_measure(spec, block)
        inside_mass += mu
        worst = max(worst, abs(table.frequency(block) - mu))
    if cap is not None:
        worst += abs(table.overflow_frequency() - (1.0 - inside_mass))
    return worst


def simple_normality_defect(seq, spec, cap: int | None = None) -> float:
    """Single-symbol version of the defect."""
    return normality_defect(seq, spec, 1, cap)


@dataclass
class JointTable:
    """Pair-block counts of a doubled sequence (x over y)."""

    k: int
    table: EmpiricalMeasure

    @property
    def total(self):
        return self.table.total

    def marginal(self, which: int) -> EmpiricalMeasure:
        counts: dict = {}
        for pair_block, c in self.table.counts.items():
            key = tuple(col[which] for col in pair_block)
            counts[key] = counts.get(key, 0) + c
        return EmpiricalMeasure(self.k, counts, self.table.total)


def joint_block_frequencies(x, y, k: int) -> JointTable:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("need two scalar prefixes of equal length")
    return JointTable(k, block_frequencies(np.column_stack([x, y]), k))


def independence_defect(joint: JointTable) -> float:
    """max over pair-blocks of |joint - product of marginals|."""
    mx = joint.marginal(0)
    my = joint.marginal(1)
    worst = 0.0
    for bx, cx in mx.counts.items():
        fx = cx / mx.total
        for by, cy in my.counts.items():
            fy = cy / my.total
            pair = tuple(zip(bx, by))
            worst = max(worst, abs(joint.table.frequency(pair) - fx * fy))
    return worst


def table_to_csv_rows(table: EmpiricalMeasure, spec=None):
    """Rows (block, count, frequency, reference_measure, deviation)."""
    from . import measures

    rows = []
    for block in sorted(table.counts):
        f = table.frequency(block)
        if spec is not None:
            mu = measures.cylinder_measure(spec, block)
            rows.append((_fmt_block(block), table.counts[block], f, mu, f - mu))
        else:
            rows.append((_fmt_block(block), table.counts[block], f, "", ""))
    if table.cap is not None:
        rows.append((OVERFLOW, table.overflow, table.overflow_frequency(), "", ""))
    return rows


def _fmt_block(block):
    return " ".join(
        ",".join(map(str, b)) if isinstance(b, tuple) else str(b) for b in block
    )

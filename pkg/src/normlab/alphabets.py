"""Alphabet descriptions for symbolic sequences.

Symbols are plain nonnegative integers.  A finite alphabet of size m uses
{0, ..., m-1}; the countable alphabet is the set of all nonnegative
integers (continued-fraction digits live in it, starting at 1).
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Finite:
    """Alphabet {0, ..., size-1}; size must be at least 2."""

    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"finite alphabet needs size >= 2, got {self.size}")

    def __contains__(self, symbol) -> bool:
        return isinstance(symbol, (int,)) and 0 <= symbol < self.size


@dataclass(frozen=True)
class CountableNaturals:
    """Unbounded alphabet of nonnegative integers."""

    def __contains__(self, symbol) -> bool:
        return isinstance(symbol, (int,)) and symbol >= 0


AlphabetSpec = Finite | CountableNaturals


@dataclass(frozen=True)
class PairAlphabet:
    """Alphabet of column pairs for doubled sequences."""

    first: "AlphabetSpec | PairAlphabet"
    second: "AlphabetSpec | PairAlphabet"

    def __contains__(self, symbol) -> bool:
        try:
            a, b = symbol
        except (TypeError, ValueError):
            return False
        return a in self.first and b in self.second

"""Finite unions of half-open subintervals of the unit interval ``[0, 1)``.

Membership and Lebesgue measure are exact up to float arithmetic on the
endpoints.  Half-open intervals make every boundary point belong to exactly
one piece of a partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = ["IntervalSet", "EMPTY", "UNIT"]


def _normalize(pieces: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    cleaned = []
    for lo, hi in pieces:
        lo, hi = max(0.0, float(lo)), min(1.0, float(hi))
        if hi > lo:
            cleaned.append((lo, hi))
    cleaned.sort()
    merged: list[list[float]] = []
    for lo, hi in cleaned:
        # [a, b) and [b, c) merge into [a, c)
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint, non-adjacent half-open pieces ``[lo, hi)`` inside ``[0, 1)``."""

    pieces: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", _normalize(self.pieces))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "IntervalSet":
        return cls(((lo, hi),))

    def measure(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, v):
        """Membership test; ``v`` may be a scalar or a numpy array."""
        if np.ndim(v) == 0:
            return any(lo <= v < hi for lo, hi in self.pieces)
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape, dtype=bool)
        for lo, hi in self.pieces:
            out |= (v >= lo) & (v < hi)
        return out

    __contains__ = contains

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.pieces + other.pieces)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self.pieces, other.pieces
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if hi > lo:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def complement(self) -> "IntervalSet":
        out = []
        cursor = 0.0
        for lo, hi in self.pieces:
            if lo > cursor:
                out.append((cursor, lo))
            cursor = hi
        if cursor < 1.0:
            out.append((cursor, 1.0))
        return IntervalSet(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    def endpoints(self) -> list[float]:
        return sorted({e for piece in self.pieces for e in piece})

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __str__(self) -> str:
        if not self.pieces:
            return "{}"
        return " u ".join(f"[{lo:.17g}, {hi:.17g})" for lo, hi in self.pieces)

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.pieces]


EMPTY = IntervalSet()
UNIT = IntervalSet.interval(0.0, 1.0)

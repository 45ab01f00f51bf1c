"""Uniform real grids and finite unions of half-open intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class RealGrid:
    """Points ``start + i * step`` for ``i = 0 .. n - 1``."""

    start: float
    step: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("a grid needs at least two points")
        if not self.step > 0:
            raise ValidationError("grid step must be positive")

    @classmethod
    def from_range(cls, start: float, stop: float, step: float) -> "RealGrid":
        """Grid from ``start`` to ``stop`` inclusive (``stop`` rounded to the step)."""
        n = int(round((stop - start) / step)) + 1
        return cls(float(start), float(step), n)

    @classmethod
    def parse(cls, spec: str) -> "RealGrid":
        """Parse ``"start:stop:step"``."""
        try:
            a, b, h = (float(s) for s in spec.split(":"))
        except ValueError:
            raise ValidationError(f"grid must look like start:stop:step, got {spec!r}") from None
        return cls.from_range(a, b, h)

    @cached_property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.n)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.n - 1)

    def refined(self) -> "RealGrid":
        """Same span with half the step."""
        return RealGrid(self.start, self.step / 2, 2 * self.n - 1)

    def to_dict(self) -> dict:
        return {"start": self.start, "step": self.step, "n": self.n}


class IntervalSet:
    """A finite disjoint union of half-open intervals ``[a, b)``.

    Endpoints may be infinite. Overlapping or touching pieces are merged on
    construction, so two sets with the same points compare equal.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals=()):
        pieces = sorted((float(a), float(b)) for a, b in intervals if b > a)
        merged: list[list[float]] = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        self.intervals = tuple((a, b) for a, b in merged)

    @classmethod
    def interval(cls, a: float, b: float) -> "IntervalSet":
        return cls([(a, b)])

    @classmethod
    def real_line(cls) -> "IntervalSet":
        return cls([(-math.inf, math.inf)])

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    def __repr__(self):
        body = " u ".join(f"[{a:g}, {b:g})" for a, b in self.intervals) or "{}"
        return f"IntervalSet({body})"

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return IntervalSet(out)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        out = list(self.intervals)
        for c, d in other.intervals:
            nxt = []
            for a, b in out:
                if d <= a or c >= b:
                    nxt.append((a, b))
                    continue
                if a < c:
                    nxt.append((a, c))
                if d < b:
                    nxt.append((d, b))
            out = nxt
        return IntervalSet(out)

    def contains(self, x) -> np.ndarray | bool:
        x = np.asarray(x, dtype=float)
        hit = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            hit |= (x >= a) & (x < b)
        return hit if hit.ndim else bool(hit)

    def issubset(self, other: "IntervalSet") -> bool:
        return not (self - other)

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return not (self & other)

    def measure(self) -> float:
        """Lebesgue measure."""
        return float(sum(b - a for a, b in self.intervals))

    def shift(self, s: float) -> "IntervalSet":
        return IntervalSet((a + s, b + s) for a, b in self.intervals)

    def to_list(self) -> list:
        return [list(iv) for iv in self.intervals]


def random_interval_set(rng: np.random.Generator, lo: float, hi: float, max_intervals: int = 10) -> IntervalSet:
    """Union of up to ``max_intervals`` disjoint random intervals inside ``[lo, hi)``."""
    k = int(rng.integers(1, max_intervals + 1))
    cuts = np.sort(rng.uniform(lo, hi, size=2 * k))
    return IntervalSet(zip(cuts[0::2], cuts[1::2]))


@dataclass(frozen=True)
class ShrinkingFamily:
    """A decreasing sequence of interval sets."""

    sets: tuple

    def __post_init__(self):
        sets = tuple(self.sets)
        object.__setattr__(self, "sets", sets)
        for i, (big, small) in enumerate(zip(sets, sets[1:])):
            if not small.issubset(big):
                raise ValidationError(f"family is not decreasing at position {i + 1}")

    def __iter__(self):
        return iter(self.sets)

    def __len__(self):
        return len(self.sets)

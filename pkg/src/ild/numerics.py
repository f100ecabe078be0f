"""Exact rationals, closed intervals and canonical unions of intervals."""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Iterable, NamedTuple, Optional

__all__ = [
    "Q",
    "RatSyntaxError",
    "parse_rat",
    "fmt_rat",
    "Interval",
    "IntervalOps",
    "interval_ops",
    "IntervalSet",
    "set_insert",
]

_RAT = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
_DECIMAL = re.compile(r"^[+-]?\d*\.\d+(?:[eE][+-]?\d+)?$|^[+-]?\d+[eE][+-]?\d+$")


class RatSyntaxError(ValueError):
    """A malformed rational literal; ``column`` is the offset of the defect."""

    def __init__(self, message: str, column: int = 0):
        super().__init__(message)
        self.column = column


def parse_rat(text: str) -> Q:
    """Parse ``p/q`` or ``p``. Decimals are rejected so documents stay exact."""
    s = text.strip()
    m = _RAT.match(s)
    if m is None:
        if _DECIMAL.match(s):
            try:
                hint = str(Q(s))
            except ValueError:
                hint = "p/q"
            raise RatSyntaxError(f"decimal literal {s!r} is not allowed; write {hint!r}")
        raise RatSyntaxError(f"malformed rational {s!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise RatSyntaxError("zero denominator", column=s.index("/") + 1)
    return Q(int(num), int(den) if den is not None else 1)


def fmt_rat(x: Q) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, order=True)
class Interval:
    """Closed interval [lo, hi]; degenerate intervals are allowed."""

    lo: Q
    hi: Q

    def __post_init__(self):
        object.__setattr__(self, "lo", Q(self.lo))
        object.__setattr__(self, "hi", Q(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def hull_of(cls, *xs: Q) -> "Interval":
        return cls(min(xs), max(xs))

    @property
    def length(self) -> Q:
        return self.hi - self.lo

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def interior_contains(self, x) -> bool:
        return self.lo < x < self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self) -> str:
        return f"[{fmt_rat(self.lo)}, {fmt_rat(self.hi)}]"


class IntervalOps(NamedTuple):
    intersection: Optional[Interval]
    hull: Interval
    contains: tuple[bool, bool, bool]


def interval_ops(a: Interval, b: Interval) -> IntervalOps:
    """Intersection and hull of two intervals.

    ``contains`` reports whether ``a`` holds ``b.lo``, the open interior
    of ``b``, and ``b.hi``.
    """
    if b.degenerate:
        inner = True
    else:
        inner = a.lo <= b.lo and b.hi <= a.hi
    return IntervalOps(a.intersect(b), a.hull(b), (b.lo in a, inner, b.hi in a))


class IntervalSet:
    """Finite union of closed intervals kept sorted, disjoint and non-adjacent."""

    __slots__ = ("parts", "_los")

    def __init__(self, parts: Iterable[Interval] = ()):
        merged: list[Interval] = []
        for p in sorted(parts):
            if merged and p.lo <= merged[-1].hi:
                if p.hi > merged[-1].hi:
                    merged[-1] = Interval(merged[-1].lo, p.hi)
            else:
                merged.append(p)
        self.parts: tuple[Interval, ...] = tuple(merged)
        self._los = [p.lo for p in self.parts]

    @classmethod
    def points(cls, xs: Iterable[Q]) -> "IntervalSet":
        return cls(Interval(x, x) for x in xs)

    def insert(self, a: Interval) -> "IntervalSet":
        return IntervalSet(self.parts + (a,))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.parts + other.parts)

    def __contains__(self, x) -> bool:
        i = bisect_left(self._los, x)
        if i < len(self.parts) and self.parts[i].lo == x:
            return True
        return i > 0 and x <= self.parts[i - 1].hi

    def covers(self, a: Interval) -> bool:
        i = bisect_left(self._los, a.lo)
        if i < len(self.parts) and self.parts[i].lo == a.lo:
            return a.hi <= self.parts[i].hi
        return i > 0 and a.hi <= self.parts[i - 1].hi

    def distance(self, x: Q) -> Q:
        """Exact distance from ``x`` to the set (0 when inside)."""
        if not self.parts:
            raise ValueError("distance to an empty set")
        best = None
        for p in self.parts:
            d = Q(0) if x in p else min(abs(x - p.lo), abs(x - p.hi))
            best = d if best is None else min(best, d)
        return best

    def is_finite(self) -> bool:
        return all(p.degenerate for p in self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __repr__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.parts) + "}"


def set_insert(s: IntervalSet, a: Interval) -> IntervalSet:
    return s.insert(a)

"""Piecewise-linear self-maps of [0,1] and their exact iterates."""

from __future__ import annotations

import hashlib
import os
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .numerics import Interval, IntervalSet, Q, fmt_rat

DEFAULT_BUDGET = 10**6
ZERO, ONE = Q(0), Q(1)


class SpecError(ValueError):
    """Breakpoint data that does not describe a valid map."""


class DomainError(ValueError):
    """Evaluation outside [0, 1]."""


class BudgetExceeded(RuntimeError):
    def __init__(self, laps: int, budget: int):
        super().__init__(f"lap budget {budget} exceeded ({laps} laps)")
        self.laps = laps
        self.budget = budget


def default_budget() -> int:
    env = os.environ.get("ILD_BUDGET")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise SpecError(f"ILD_BUDGET must be an integer, got {env!r}") from None
        if value > 0:
            return value
    return DEFAULT_BUDGET


def _sign(q: Q) -> int:
    return (q > 0) - (q < 0)


class Graph:
    """Continuous piecewise-linear function on [0,1] given by its corners.

    No validation beyond monotone ``xs``: this is the working type for
    iterates, where surjectivity and corner rules need not be rechecked.
    """

    __slots__ = ("xs", "ys")

    def __init__(self, xs: Sequence[Q], ys: Sequence[Q]):
        self.xs = tuple(xs)
        self.ys = tuple(ys)

    def __len__(self) -> int:
        return len(self.xs) - 1

    def __call__(self, x: Q) -> Q:
        xs, ys = self.xs, self.ys
        i = bisect_right(xs, x) - 1
        if i < 0 or x > xs[-1]:
            raise DomainError(f"{x} outside [{xs[0]}, {xs[-1]}]")
        if i == len(xs) - 1:
            return ys[-1]
        x0, x1, y0 = xs[i], xs[i + 1], ys[i]
        if x == x0:
            return y0
        return y0 + (ys[i + 1] - y0) * (x - x0) / (x1 - x0)

    def slope(self, i: int) -> Q:
        return (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])

    def after(self, inner: "Graph") -> "Graph":
        """The composition ``self o inner``."""
        bx, by = self.xs, self.ys
        out_x: list[Q] = [inner.xs[0]]
        out_y: list[Q] = [self(inner.ys[0])]
        for i in range(len(inner.xs) - 1):
            x0, x1 = inner.xs[i], inner.xs[i + 1]
            y0, y1 = inner.ys[i], inner.ys[i + 1]
            if y0 != y1:
                lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
                j0, j1 = bisect_right(bx, lo), bisect_left(bx, hi)
                idx = range(j0, j1) if y0 < y1 else range(j1 - 1, j0 - 1, -1)
                scale = (x1 - x0) / (y1 - y0)
                for j in idx:
                    out_x.append(x0 + (bx[j] - y0) * scale)
                    out_y.append(by[j])
            out_x.append(x1)
            out_y.append(self(y1))
        return Graph(out_x, out_y)

    def image(self, a: Q, b: Q) -> Interval:
        """Exact image of [a, b]."""
        va, vb = self(a), self(b)
        lo, hi = min(va, vb), max(va, vb)
        i, j = bisect_right(self.xs, a), bisect_left(self.xs, b)
        if i < j:
            inner = self.ys[i:j]
            lo, hi = min(lo, min(inner)), max(hi, max(inner))
        return Interval(lo, hi)

    def preimage(self, j: Interval) -> IntervalSet:
        parts = []
        xs, ys = self.xs, self.ys
        for i in range(len(xs) - 1):
            x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
            lo, hi = (y0, y1) if y0 <= y1 else (y1, y0)
            if hi < j.lo or lo > j.hi:
                continue
            if y0 == y1:
                parts.append(Interval(x0, x1))
                continue
            a, b = max(lo, j.lo), min(hi, j.hi)
            pa = x0 + (a - y0) * (x1 - x0) / (y1 - y0)
            pb = x0 + (b - y0) * (x1 - x0) / (y1 - y0)
            parts.append(Interval.hull_of(pa, pb))
        return IntervalSet(parts)

    def solve(self, v: Q) -> list[Q]:
        """All x with g(x) = v (the graph has no flat pieces)."""
        out: list[Q] = []
        xs, ys = self.xs, self.ys
        for i in range(len(xs) - 1):
            y0, y1 = ys[i], ys[i + 1]
            if (y0 - v) * (y1 - v) <= 0 and y0 != y1:
                x = xs[i] + (v - y0) * (xs[i + 1] - xs[i]) / (y1 - y0)
                if not out or out[-1] != x:
                    out.append(x)
        return out


@dataclass(frozen=True)
class Lap:
    """A maximal monotone piece of an iterate."""

    domain: Interval
    image: Interval
    direction: int


class BranchPartition:
    """Maximal monotone laps of f^n together with the exact graph of f^n."""

    def __init__(self, n: int, graph: Graph):
        self.n = n
        self.graph = graph
        laps: list[Lap] = []
        xs, ys = graph.xs, graph.ys
        start, cur = 0, 0
        for i in range(len(xs) - 1):
            d = _sign(ys[i + 1] - ys[i])
            if cur == 0:
                cur = d
            elif d != cur:
                laps.append(self._lap(start, i, cur))
                start, cur = i, d
        laps.append(self._lap(start, len(xs) - 1, cur))
        self.laps: tuple[Lap, ...] = tuple(laps)
        self._los = [lap.domain.lo for lap in self.laps]

    def _lap(self, i: int, j: int, d: int) -> Lap:
        xs, ys = self.graph.xs, self.graph.ys
        return Lap(Interval(xs[i], xs[j]), Interval.hull_of(ys[i], ys[j]), d)

    def __len__(self) -> int:
        return len(self.laps)

    def __call__(self, x: Q) -> Q:
        return self.graph(x)

    def turning_points(self) -> list[Q]:
        return [lap.domain.hi for lap in self.laps[:-1]]

    def laps_at(self, x: Q) -> list[Lap]:
        """One lap, or two when ``x`` is a turning point of f^n."""
        i = bisect_right(self._los, x) - 1
        out = [self.laps[i]]
        if i > 0 and self.laps[i].domain.lo == x:
            out.insert(0, self.laps[i - 1])
        return out

    def lap_index(self, x: Q) -> int:
        return max(bisect_right(self._los, x) - 1, 0)


class PLMap:
    """A continuous surjective piecewise-linear self-map of [0, 1]."""

    def __init__(self, points: Iterable[tuple], name: Optional[str] = None):
        pts = sorted((Q(x), Q(y)) for x, y in points)
        _validate(pts)
        self.name = name
        self.breakpoints: tuple[tuple[Q, Q], ...] = tuple(pts)
        self.graph = Graph([p[0] for p in pts], [p[1] for p in pts])
        self._iterates: dict[int, BranchPartition] = {1: BranchPartition(1, self.graph)}
        self._crit: Optional[tuple[Q, ...]] = None

    @classmethod
    def normalized(cls, points: Iterable[tuple], name: Optional[str] = None) -> "PLMap":
        """Build the map after dropping interior breakpoints that lie on a line."""
        pts = sorted((Q(x), Q(y)) for x, y in points)
        keep = [pts[0]]
        for k in range(1, len(pts) - 1):
            (x0, y0), (x1, y1), (x2, y2) = keep[-1], pts[k], pts[k + 1]
            if (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0):
                keep.append(pts[k])
        keep.append(pts[-1])
        return cls(keep, name)

    # basic evaluation -------------------------------------------------
    def __call__(self, x) -> Q:
        x = Q(x)
        if not ZERO <= x <= ONE:
            raise DomainError(f"{x} is outside [0, 1]")
        return self.graph(x)

    @property
    def xs(self) -> tuple[Q, ...]:
        return self.graph.xs

    @property
    def ys(self) -> tuple[Q, ...]:
        return self.graph.ys

    def slopes(self) -> list[Q]:
        return [self.graph.slope(i) for i in range(len(self.graph))]

    def min_abs_slope(self) -> Q:
        return min(abs(s) for s in self.slopes())

    def orbit(self, x: Q, steps: int) -> list[Q]:
        out = [Q(x)]
        for _ in range(steps):
            out.append(self.graph(out[-1]))
        return out

    def image(self, j: Interval) -> Interval:
        return self.graph.image(j.lo, j.hi)

    def is_monotone_on(self, j: Interval) -> bool:
        """True when no critical point lies in the open interior of ``j``."""
        return not any(j.lo < c < j.hi for c in self.critical_set())

    def critical_set(self) -> tuple[Q, ...]:
        if self._crit is None:
            s = self.slopes()
            inner = [self.xs[i] for i in range(1, len(s)) if _sign(s[i - 1]) != _sign(s[i])]
            self._crit = (ZERO, *inner, ONE)
        return self._crit

    def interior_critical(self) -> tuple[Q, ...]:
        return self.critical_set()[1:-1]

    def lap_bounds(self, y: Q, direction: int) -> Q:
        """First critical point strictly beyond ``y`` in ``direction``."""
        c = self.critical_set()
        if direction > 0:
            return c[bisect_right(c, y)] if y < ONE else ONE
        return c[bisect_left(c, y) - 1] if y > ZERO else ZERO

    # iterates ---------------------------------------------------------
    def iterate(self, n: int, budget: Optional[int] = None) -> BranchPartition:
        if n < 1:
            raise ValueError("iterate count must be at least 1")
        budget = default_budget() if budget is None else budget
        if n in self._iterates:
            part = self._iterates[n]
            if len(part) > budget:
                raise BudgetExceeded(len(part), budget)
            return part
        m = max(k for k in self._iterates if k < n)
        part = self._iterates[m]
        while m < n:
            if len(part) * len(self.interior_critical()) + len(part) > budget:
                # pessimistic bound failed; build and count exactly
                pass
            g = self.graph.after(part.graph)
            m += 1
            part = BranchPartition(m, g)
            if len(part) > budget or len(g) > 16 * budget:
                raise BudgetExceeded(len(part), budget)
            self._iterates[m] = part
        return part

    def iterate_eval(self, x: Q, n: int) -> Q:
        for _ in range(n):
            x = self.graph(x)
        return x

    def preimage_components(self, j: Interval, n: int = 1) -> list[Interval]:
        g = self.graph if n == 1 else self.iterate(n).graph
        return list(g.preimage(j))

    def fixed_points(self, k: int = 1, budget: Optional[int] = None) -> list[Union[Q, Interval]]:
        g = self.iterate(k, budget).graph
        pts: list[Q] = []
        segs: list[Interval] = []
        for i in range(len(g)):
            x0, x1 = g.xs[i], g.xs[i + 1]
            h0, h1 = g.ys[i] - x0, g.ys[i + 1] - x1
            if h0 == 0 and h1 == 0:
                segs.append(Interval(x0, x1))
            elif h0 == 0:
                pts.append(x0)
            elif h1 == 0:
                pts.append(x1)
            elif (h0 < 0) != (h1 < 0):
                pts.append(x0 + h0 * (x1 - x0) / (h0 - h1))
        seg_set = IntervalSet(segs)
        out: list[Union[Q, Interval]] = sorted(set(p for p in pts if p not in seg_set))
        out.extend(seg_set.parts)
        return sorted(out, key=lambda v: (v.lo, 1) if isinstance(v, Interval) else (v, 0))

    def fixed_point_values(self, k: int = 1) -> list[Q]:
        return [v for v in self.fixed_points(k) if not isinstance(v, Interval)]

    # identity ---------------------------------------------------------
    def to_text(self) -> str:
        return " ".join(f"({fmt_rat(x)},{fmt_rat(y)})" for x, y in self.breakpoints)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def __eq__(self, other) -> bool:
        return isinstance(other, PLMap) and self.breakpoints == other.breakpoints

    def __hash__(self) -> int:
        return hash(self.breakpoints)

    def __repr__(self) -> str:
        return f"PLMap({self.name or ''} {self.to_text()})"


def _validate(pts: list[tuple[Q, Q]]) -> None:
    if len(pts) < 2:
        raise SpecError("at least two breakpoints are required")
    for (xa, _), (xb, _) in zip(pts, pts[1:]):
        if xa == xb:
            raise SpecError(f"duplicate breakpoint x = {fmt_rat(xa)}")
    for x, y in pts:
        if not ZERO <= x <= ONE:
            raise SpecError(f"x = {fmt_rat(x)} is outside [0, 1]")
        if not ZERO <= y <= ONE:
            raise SpecError(f"y = {fmt_rat(y)} at x = {fmt_rat(x)} is outside [0, 1]")
    if pts[0][0] != ZERO or pts[-1][0] != ONE:
        raise SpecError("breakpoints must start at x = 0 and end at x = 1")
    for (xa, ya), (xb, yb) in zip(pts, pts[1:]):
        if ya == yb:
            raise SpecError(f"flat segment on [{fmt_rat(xa)}, {fmt_rat(xb)}]")
    for (x0, y0), (x1, y1), (x2, y2) in zip(pts, pts[1:], pts[2:]):
        if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
            raise SpecError(f"collinear interior breakpoint at x = {fmt_rat(x1)}")
    ys = [y for _, y in pts]
    if min(ys) != ZERO:
        raise SpecError("not surjective: value 0 is never attained")
    if max(ys) != ONE:
        raise SpecError("not surjective: value 1 is never attained")


# module-level operations ------------------------------------------------

def eval_map(f: PLMap, x) -> Q:
    return f(x)


def critical_set(f: PLMap) -> list[Q]:
    return list(f.critical_set())


def iterate_partition(f: PLMap, n: int, budget: Optional[int] = None) -> BranchPartition:
    return f.iterate(n, budget)


def fixed_points(f: PLMap, k: int = 1) -> list[Union[Q, Interval]]:
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    return f.fixed_points(k)


def preimage_components(f: PLMap, j: Interval) -> list[Interval]:
    if not (ZERO <= j.lo and j.hi <= ONE):
        raise DomainError(f"{j} is not inside [0, 1]")
    return f.preimage_components(j)


# gallery ------------------------------------------------------------------

@dataclass(frozen=True)
class Claim:
    prop: str
    expected: str
    provenance: str


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    map: PLMap
    claims: tuple[Claim, ...]
    note: str = ""


def _q(s: str) -> Q:
    return Q(s)


# Sampled corner list of the double-spiral leo example (left of the frame).
_SPIRAL_TAIL = [
    ("77/100", "91/100"), ("71/100", "99/100"), ("68/100", "9/10"), ("6/10", "8/10"),
    ("57/100", "715/1000"), ("53/100", "765/1000"), ("5/10", "68/100"), ("43/100", "6/10"),
    ("4/10", "54/100"), ("38/100", "565/1000"), ("35/100", "5/10"), ("29/100", "43/100"),
    ("26/100", "385/1000"), ("25/100", "395/1000"), ("22/100", "35/100"), ("18/100", "29/100"),
    ("16/100", "252/1000"), ("155/1000", "258/1000"), ("14/100", "22/100"), ("115/1000", "18/100"),
]

TRUNCATION = "truncation, qualitative only"


def spiral_truncation(k: int = 20) -> PLMap:
    """First ``k`` sampled corners of the spiral map, closed by a line to (0, 0)."""
    if not 0 <= k <= len(_SPIRAL_TAIL):
        raise ValueError(f"spiral truncation depth must be in 0..{len(_SPIRAL_TAIL)}")
    pts = [(ONE, ONE), (Q(9, 10), ZERO), (Q(8, 10), ONE)]
    pts += [(_q(x), _q(y)) for x, y in _SPIRAL_TAIL[:k]]
    pts.append((ZERO, ZERO))
    return PLMap.normalized(pts, name=f"fig5@{k}")


def countable_truncation(k: int = 4) -> PLMap:
    """Self-similar peaks at 2^-m with valleys on the diagonal, tail replaced by a line to 0."""
    if k < 1:
        raise ValueError("depth must be at least 1")
    pts = [(ONE, ZERO)]
    for m in range(1, k + 1):
        pts.append((Q(1, 2**m), Q(1, 2 ** (m - 1))))
        if m < k:
            v = Q(5, 2 ** (m + 3))
            pts.append((v, v))
    pts.append((ZERO, ZERO))
    return PLMap.normalized(pts, name=f"fig9@{k}")


T2_POINTS = [(0, 0), (Q(1, 2), 1), (1, 0)]
MINC_POINTS = [(0, 0), (Q(1, 3), 1), (Q(5, 12), Q(1, 3)), (Q(7, 12), Q(2, 3)), (Q(2, 3), 0), (1, 1)]
FIG4_POINTS = [(0, 0), (Q(1, 3), Q(5, 9)), (Q(2, 3), Q(4, 9)), (1, 1)]
FIG6_POINTS = [(0, 0), (Q(1, 3), Q(2, 3)), (Q(2, 3), Q(1, 3)), (1, 1)]
FIG7_POINTS = [(0, Q(1, 6)), (Q(1, 3), 0), (Q(2, 3), 1), (1, Q(5, 6))]
FIG8_RAW_POINTS = [
    (0, Q(1, 3)), (Q(1, 6), 0), (Q(1, 3), Q(1, 3)), (Q(4, 9), Q(5, 9)),
    (Q(5, 9), Q(4, 9)), (Q(2, 3), Q(2, 3)), (Q(5, 6), 1), (1, Q(2, 3)),
]
U2_POINTS = [(0, 0), (Q(1, 2), 1), (1, Q(1, 2))]

STATED = "stated in the source literature"


def _build_gallery() -> dict[str, GalleryEntry]:
    d = lambda how: f"derived: {how}"  # noqa: E731
    entries = [
        GalleryEntry("t2", PLMap(T2_POINTS, "t2"), (
            Claim("zigzag_free", "proven", STATED),
            Claim("leo", "proven", d("Markov covering matrix is primitive, slope 2")),
            Claim("omega", "{0}", d("critical orbits 1/2 -> 1 -> 0 -> 0")),
            Claim("recurrence(1/2)", "refuted", STATED),
            Claim("retractable", "refuted", STATED),
        )),
        GalleryEntry("minc", PLMap(MINC_POINTS, "minc"), (
            Claim("long_zigzag", "proven, epsilon >= 1/3", STATED),
            Claim("zigzag_free", "refuted at n = 1", STATED),
        )),
        GalleryEntry("fig4", PLMap(FIG4_POINTS, "fig4"), (
            Claim("arc", "proven", d("both gaps of Fix(f^2) attract to 1/2 with |slope| 1/9")),
            Claim("b_endpoint(1/2,1/2,...)", "proven", STATED),
            Claim("endpoint(1/2,1/2,...)", "refuted", STATED),
        )),
        GalleryEntry("fig6", PLMap(FIG6_POINTS, "fig6"), (
            Claim("long_zigzag", "proven, epsilon = 1/3", d("middle branch maps onto itself")),
            Claim("leo", "refuted by [1/3, 2/3]", d("f([1/3, 2/3]) = [1/3, 2/3]")),
        )),
        GalleryEntry("fig7", PLMap(FIG7_POINTS, "fig7"), (
            Claim("omega_meets_C", "false", STATED),
            Claim("arc", "proven, endpoints at 1/9 and 8/9", STATED),
        )),
        GalleryEntry("fig8", PLMap.normalized(FIG8_RAW_POINTS, "fig8"), (
            Claim("leo", "refuted by [0, 1/3]", STATED),
            Claim("arc", "refuted", STATED),
            Claim("omega_meets_C", "true", STATED),
        ), note=("1/3 and 2/3 are collinear corners and are dropped; they are fixed, "
                 "and the critical 2-cycle is {4/9, 5/9}")),
        GalleryEntry("u2", PLMap(U2_POINTS, "u2"), (
            Claim("recurrence(1/2)", "proven", d("orbit 1/2 -> 1 -> 1/2 is periodic")),
            Claim("zigzag_free", "proven", STATED),
        )),
    ]
    return {e.name: e for e in entries}


_GALLERY: Optional[dict[str, GalleryEntry]] = None


def _fixed() -> dict[str, GalleryEntry]:
    global _GALLERY
    if _GALLERY is None:
        _GALLERY = _build_gallery()
    return _GALLERY


def _spiral_entry(k: int) -> GalleryEntry:
    return GalleryEntry(f"fig5@{k}", spiral_truncation(k), (
        Claim("leo", "proven for the untruncated map", f"{STATED}; {TRUNCATION}"),
        Claim("double_spiral", "present for the untruncated map", f"{STATED}; {TRUNCATION}"),
    ), note=TRUNCATION)


def _countable_entry(k: int) -> GalleryEntry:
    return GalleryEntry(f"fig9@{k}", countable_truncation(k), (
        Claim("leo", "proven for the untruncated map", f"{STATED}; {TRUNCATION}"),
        Claim("endpoints", "countably many for the untruncated map", f"{STATED}; {TRUNCATION}"),
    ), note=TRUNCATION + "; deeper valleys follow the 5/2^(m+3) pattern")


def gallery() -> list[GalleryEntry]:
    fixed = _fixed()
    out = list(fixed.values())
    out.insert(3, _spiral_entry(20))
    out.append(_countable_entry(4))
    return out


GALLERY_NAMES = ("t2", "minc", "fig4", "fig5@k", "fig6", "fig7", "fig8", "fig9@k", "u2")


def gallery_entry(name: str) -> GalleryEntry:
    name = name.strip().lower()
    fixed = _fixed()
    if name in fixed:
        return fixed[name]
    base, _, depth = name.partition("@")
    if base in ("fig5", "fig9"):
        try:
            k = int(depth) if depth else (20 if base == "fig5" else 4)
        except ValueError:
            raise KeyError(f"bad truncation depth in {name!r}") from None
        return _spiral_entry(k) if base == "fig5" else _countable_entry(k)
    raise KeyError(f"unknown gallery map {name!r}; known: {', '.join(GALLERY_NAMES)}")


def gallery_map(name: str) -> PLMap:
    return gallery_entry(name).map

"""Random maps and brute-force oracles shared by the test modules.

The oracles here deliberately avoid the library's composition and search
code: iterates are rebuilt from the breakpoint list alone, and zigzags are
enumerated over every pair of turning points.
"""

from __future__ import annotations

import random
from fractions import Fraction as Q
from typing import Optional

from hypothesis import assume
from hypothesis import strategies as st

from ild.plmap import PLMap, SpecError

X_DENOMS = (2, 3, 4, 5, 6, 8, 9, 10, 12)
Y_DENOMS = (2, 3, 4, 6, 8, 9, 12)


def _try_map(xs, ys) -> Optional[PLMap]:
    try:
        f = PLMap.normalized(list(zip(xs, ys)))
    except SpecError:
        return None
    return f


def random_map(rng: random.Random, max_points: int = 6) -> PLMap:
    """Rejection-sample a valid map with at most ``max_points`` breakpoints."""
    while True:
        k = rng.randint(0, max_points - 2)
        inner = set()
        while len(inner) < k:
            d = rng.choice(X_DENOMS)
            inner.add(Q(rng.randint(1, d - 1), d))
        xs = [Q(0), *sorted(inner), Q(1)]
        d = rng.choice(Y_DENOMS)
        ys = [Q(rng.randint(0, d), d) for _ in xs]
        # force surjectivity at random corners
        i, j = rng.sample(range(len(xs)), 2)
        ys[i], ys[j] = Q(0), Q(1)
        f = _try_map(xs, ys)
        if f is not None:
            return f


@st.composite
def pl_maps(draw, max_points: int = 6):
    k = draw(st.integers(0, max_points - 2))
    inner = draw(st.lists(st.fractions(min_value=Q(1, 24), max_value=Q(23, 24), max_denominator=24),
                          min_size=k, max_size=k, unique=True))
    xs = [Q(0), *sorted(inner), Q(1)]
    d = draw(st.sampled_from(Y_DENOMS))
    ys = [Q(draw(st.integers(0, d)), d) for _ in xs]
    i = draw(st.integers(0, len(xs) - 1))
    j = draw(st.integers(0, len(xs) - 1).filter(lambda t: t != i))
    ys[i], ys[j] = Q(0), Q(1)
    f = _try_map(xs, ys)
    assume(f is not None)
    return f


# naive iterates -------------------------------------------------------------------

def naive_eval(points, x: Q) -> Q:
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise ValueError(x)


def naive_preimages(points, v: Q) -> set:
    out = set()
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if min(y0, y1) <= v <= max(y0, y1):
            out.add(x0 + (v - y0) * (x1 - x0) / (y1 - y0))
    return out


def naive_iterate(f: PLMap, n: int) -> list[tuple[Q, Q]]:
    """Corners of f^n: every point whose first n-1 images include a corner of f."""
    pts = list(f.breakpoints)
    corners = {x for x, _ in pts}
    layer = set(corners)
    for _ in range(n - 1):
        layer = {p for v in layer for p in naive_preimages(pts, v)}
        corners |= layer
    out = []
    for x in sorted(corners):
        y = x
        for _ in range(n):
            y = naive_eval(pts, y)
        out.append((x, y))
    return out


def turning_values(graph) -> list[tuple[Q, Q]]:
    """(x, value) at strict local extrema, plus the two ends."""
    pts = [graph[0]]
    for p in graph[1:]:
        if p[1] != pts[-1][1]:
            pts.append(p)
    out = [pts[0]]
    for a, b, c in zip(pts, pts[1:], pts[2:]):
        if (b[1] - a[1]) * (c[1] - b[1]) < 0:
            out.append(b)
    out.append(pts[-1])
    return out


def brute_zigzag_infimum(f: PLMap, n: int) -> Optional[Q]:
    """Smallest infimum of zigzag magnitudes of f^n over all runs of turning points.

    A run t_p..t_q is admissible when the monotone stretch entering t_p starts
    strictly outside the run's value range on one side and the stretch
    leaving t_q ends strictly outside on the other side, with the end
    values of the zigzag strictly inside (0, 1) reachable.
    """
    tv = turning_values(naive_iterate(f, n))
    vals = [v for _, v in tv]
    m = len(vals)
    best = None
    for p in range(1, m - 1):
        lo = hi = vals[p]
        for q in range(p + 1, m - 1):
            lo, hi = min(lo, vals[q]), max(hi, vals[q])
            before, after = vals[p - 1], vals[q + 1]
            rising = before < lo and after > hi
            falling = before > hi and after < lo
            if rising or falling:
                if best is None or hi - lo < best:
                    best = hi - lo
    return best


def has_zigzag(f: PLMap, n: int) -> bool:
    return any(brute_zigzag_infimum(f, m) is not None for m in range(1, n + 1))


def cycle_orbits(f: PLMap, om) -> list:
    """Backward orbits running around each exact critical cycle of ``om``."""
    from ild.mapspec import OrbitSpec
    out = []
    seen = set()
    for o in om.orbits:
        cyc = tuple(o.cycle)
        if not cyc or frozenset(cyc) in seen:
            continue
        seen.add(frozenset(cyc))
        # x_0 = p0, then the cycle read backwards: f(p_{-1}) = p0 and so on
        fwd = list(cyc)
        p0 = fwd[0]
        back = tuple(fwd[:0:-1]) + (p0,)
        out.append(OrbitSpec((p0,), back))
    return out


def float_map(f: PLMap):
    xs = [float(x) for x in f.xs]
    ys = [float(y) for y in f.ys]

    def g(x: float) -> float:
        for i in range(len(xs) - 1):
            if x <= xs[i + 1]:
                t = (x - xs[i]) / (xs[i + 1] - xs[i])
                return min(max(ys[i] + t * (ys[i + 1] - ys[i]), 0.0), 1.0)
        return ys[-1]
    return g


def float_slope(f: PLMap):
    xs = [float(x) for x in f.xs]
    ss = [float(f.graph.slope(i)) for i in range(len(xs) - 1)]

    def s(x: float) -> float:
        for i in range(len(xs) - 1):
            if x <= xs[i + 1]:
                return ss[i]
        return ss[-1]
    return s

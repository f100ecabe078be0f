"""Map-level properties: zigzags, long-zigzag, leo and the preimage-length (Raines) property.

Every procedure returns a :class:`Verdict`. Proven and Refuted payloads can
be re-checked from the map alone with the matching ``check_*`` function.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .numerics import Interval, Q, fmt_rat
from .plmap import BudgetExceeded, Graph, PLMap
from .verdict import Verdict, proven, refuted, unknown

DEFAULT_DEPTH = 64


# zigzags ---------------------------------------------------------------------

@dataclass(frozen=True)
class Zigzag:
    """A concrete zigzag of f^n on [a, b].

    ``inf_magnitude`` is the infimum of magnitudes over all zigzags with the
    same fold pattern; it is approached but not attained.
    """

    n: int
    a: Q
    b: Q
    image: Interval
    magnitude: Q
    inf_magnitude: Q

    def key(self):
        return (self.inf_magnitude, self.n, self.a)


def _graph_zigzags(g: Graph, n: int) -> list[Zigzag]:
    """One witness per fold run of the graph ``g`` (which is f^n)."""
    xs, ys = g.xs, g.ys
    m = len(xs)
    # corners where the direction flips
    turns = [i for i in range(1, m - 1) if (ys[i] - ys[i - 1]) * (ys[i + 1] - ys[i]) < 0]
    if len(turns) < 2:
        return []
    # lap starting values: the extreme end of the lap before turns[k] and after it
    prev_start = {}
    start = 0
    for t in turns:
        prev_start[t] = start
        start = t
    next_end = {}
    end = m - 1
    for t in reversed(turns):
        next_end[t] = end
        end = t
    out = []
    for p, i in enumerate(turns):
        is_max = ys[i] > ys[i - 1]
        lo_outer = ys[prev_start[i]]  # value at the far end of the lap entering t_i
        run_min = run_max = ys[i]
        for j in turns[p + 1:]:
            run_min = min(run_min, ys[j])
            run_max = max(run_max, ys[j])
            if is_max:
                # increasing type: need f(a) < run_min, f(b) > run_max
                if lo_outer >= run_min or run_max >= 1:
                    break
                if ys[j] > ys[j - 1]:
                    continue  # t_j must be a minimum
                hi_outer = ys[next_end[j]]
                if hi_outer <= run_max:
                    continue
                eta = min(run_min - lo_outer, hi_outer - run_max) / 2
                u, v = run_min - eta, run_max + eta
            else:
                if lo_outer <= run_max or run_min <= 0:
                    break
                if ys[j] < ys[j - 1]:
                    continue  # t_j must be a maximum
                hi_outer = ys[next_end[j]]
                if hi_outer >= run_min:
                    continue
                eta = min(lo_outer - run_max, run_min - hi_outer) / 2
                u, v = run_max + eta, run_min - eta
            a = _solve_on(g, prev_start[i], i, u)
            b = _solve_on(g, j, next_end[j], v)
            out.append(Zigzag(n, a, b, Interval.hull_of(u, v), abs(v - u), run_max - run_min))
    return out


def _solve_on(g: Graph, i0: int, i1: int, v: Q) -> Q:
    """The unique x in the monotone stretch xs[i0]..xs[i1] with g(x) = v."""
    xs, ys = g.xs, g.ys
    for i in range(i0, i1):
        y0, y1 = ys[i], ys[i + 1]
        if min(y0, y1) <= v <= max(y0, y1):
            return xs[i] + (v - y0) * (xs[i + 1] - xs[i]) / (y1 - y0)
    raise ValueError("value not attained on the stretch")


def zigzags_of(f: PLMap, n: int, budget: Optional[int] = None) -> list[Zigzag]:
    return _graph_zigzags(f.iterate(n, budget).graph, n)


def zigzag_scan(f: PLMap, n: int, budget: Optional[int] = None) -> Verdict:
    """Search f^1 .. f^n for zigzags; Refuted carries the smallest one found."""
    if n < 1:
        raise ValueError("n must be at least 1")
    best: Optional[Zigzag] = None
    for m in range(1, n + 1):
        try:
            found = zigzags_of(f, m, budget)
        except BudgetExceeded as e:
            if best is not None:
                return refuted(best, depth=m - 1, notes=[f"levels above {m - 1} not scanned: {e}"])
            return unknown({"reason": str(e), "laps": e.laps}, depth=m - 1)
        for z in found:
            if best is None or z.key() < best.key():
                best = z
    if best is None:
        return proven({"levels": n}, label=f"zigzag-free up to {n}", depth=n)
    return refuted(best, depth=n)


def check_zigzag(f: PLMap, z: Zigzag) -> Optional[str]:
    """Verify all defining conditions of a zigzag exactly; None when valid."""
    if not 0 <= z.a < z.b <= 1:
        return "endpoints out of order"
    g = f.iterate(z.n).graph
    ga, gb = g(z.a), g(z.b)
    img = g.image(z.a, z.b)
    if img != Interval.hull_of(ga, gb):
        return "image is not spanned by the endpoint values"
    if img != z.image or abs(ga - gb) != z.magnitude:
        return "recorded image or magnitude does not match"
    for v, end in ((ga, z.a), (gb, z.b)):
        if any(z.a <= x <= z.b and x != end for x in g.solve(v)):
            return "an interior point attains an endpoint value"
    if not any(z.a < x < z.b for x in _turns(g)):
        return "f^n is injective on [a, b]"
    if not z.inf_magnitude < z.magnitude:
        return "infimum must lie below the witness magnitude"
    return None


def _turns(g: Graph) -> list[Q]:
    ys = g.ys
    return [g.xs[i] for i in range(1, len(ys) - 1) if (ys[i] - ys[i - 1]) * (ys[i + 1] - ys[i]) < 0]


# long-zigzag -----------------------------------------------------------------

@dataclass(frozen=True)
class BranchBound:
    """Lower bound for one branch [c_i, c_{i+1}] of f.

    kind "a": the k-th image meets C in its interior; bound is the shortest of
    the first k images. kind "b": the images are periodic from index p with
    period q - p and never meet C; bound is the shortest image.
    """

    branch: Interval
    kind: str
    bound: Q
    k: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None


@dataclass(frozen=True)
class LongZigzagCert:
    epsilon: Q
    per_branch: tuple[BranchBound, ...]


def _hits(f: PLMap, j: Interval) -> bool:
    return any(j.lo < c < j.hi for c in f.interior_critical())


def branch_bound(f: PLMap, branch: Interval, depth: int) -> Optional[BranchBound]:
    images = [branch]
    seen = {branch: 0}
    for k in range(1, depth + 1):
        j = f.image(images[-1])
        images.append(j)
        if _hits(f, j):
            return BranchBound(branch, "a", min(x.length for x in images[1:]), k=k)
        if j in seen:
            p = seen[j]
            return BranchBound(branch, "b", min(x.length for x in images[1:]), p=p, q=k)
        seen[j] = k
    return None


def long_zigzag_certify(f: PLMap, depth: int = DEFAULT_DEPTH) -> Verdict:
    crit = f.critical_set()
    bounds = []
    open_branches = []
    for lo, hi in zip(crit, crit[1:]):
        b = branch_bound(f, Interval(lo, hi), depth)
        if b is None:
            open_branches.append(Interval(lo, hi))
        else:
            bounds.append(b)
    if open_branches:
        return unknown({"unresolved_branches": open_branches, "resolved": bounds}, depth=depth)
    eps = min(b.bound for b in bounds)
    return proven(LongZigzagCert(eps, tuple(bounds)), depth=depth)


def check_long_zigzag(f: PLMap, cert: LongZigzagCert) -> Optional[str]:
    crit = f.critical_set()
    branches = [Interval(lo, hi) for lo, hi in zip(crit, crit[1:])]
    if [b.branch for b in cert.per_branch] != branches:
        return "branches do not match the critical set"
    for b in cert.per_branch:
        steps = b.k if b.kind == "a" else b.q
        if steps is None or steps < 1:
            return f"branch {b.branch}: missing step count"
        images = [b.branch]
        for _ in range(steps):
            images.append(f.image(images[-1]))
        if any(_hits(f, j) for j in images[1:-1]):
            return f"branch {b.branch}: an earlier image already meets C"
        if b.kind == "a":
            if not _hits(f, images[-1]):
                return f"branch {b.branch}: image {b.k} does not meet C"
        elif b.kind == "b":
            if b.p is None or not 0 <= b.p < b.q or images[b.p] != images[b.q] or _hits(f, images[-1]):
                return f"branch {b.branch}: images are not periodic as claimed"
        else:
            return f"branch {b.branch}: unknown kind {b.kind!r}"
        if min(j.length for j in images[1:]) != b.bound:
            return f"branch {b.branch}: bound mismatch"
    if cert.epsilon != min(b.bound for b in cert.per_branch) or cert.epsilon <= 0:
        return "epsilon does not match the branch bounds"
    return None


# leo -------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantWitness:
    """A proper interval J with f^power(J) contained in J."""

    interval: Interval
    power: int


@dataclass(frozen=True)
class MarkovData:
    points: tuple[Q, ...]
    min_slope: Q


@dataclass(frozen=True)
class MarkovObstruction:
    """Element whose exact images f^k(element) are never all of [0, 1]."""

    points: tuple[Q, ...]
    element: Interval
    reachable: tuple[Interval, ...]


@dataclass(frozen=True)
class ExpansionData:
    min_slope: Q
    onto_times: tuple[int, ...]


def critical_orbit(f: PLMap, c: Q, depth: int) -> tuple[list[Q], Optional[int]]:
    """Orbit of ``c`` until a repeat; returns (points, index where the cycle starts)."""
    pts = [c]
    index = {c: 0}
    for _ in range(depth):
        y = f.graph(pts[-1])
        if y in index:
            return pts, index[y]
        index[y] = len(pts)
        pts.append(y)
    return pts, None


def _isolated_fixed(f: PLMap, k: int) -> list[Q]:
    out = []
    for v in f.fixed_points(k):
        if isinstance(v, Interval):
            out += [v.lo, v.hi]
        else:
            out.append(v)
    return out


def invariant_interval(f: PLMap, depth: int = 8) -> Optional[InvariantWitness]:
    """Smallest proper interval with endpoints among orbit and fixed points that is mapped into itself."""
    cand = set(f.critical_set())
    front = set(cand)
    for _ in range(depth):
        front = {f.graph(x) for x in front} - cand
        if not front:
            break
        cand |= front
    cand |= set(_isolated_fixed(f, 1))
    try:
        cand |= set(_isolated_fixed(f, 2))
    except BudgetExceeded:
        pass
    pts = sorted(cand)
    for power in (1, 2):
        g = f.graph if power == 1 else f.iterate(2).graph
        found = []
        for lo, hi in combinations(pts, 2):
            if lo == 0 and hi == 1:
                continue
            if Interval(lo, hi).contains_interval(g.image(lo, hi)):
                found.append(Interval(lo, hi))
        minimal = [j for j in found if not any(o != j and j.contains_interval(o) for o in found)]
        if minimal:
            return InvariantWitness(min(minimal), power)
    return None


def _markov_points(f: PLMap, depth: int) -> Optional[tuple[Q, ...]]:
    pts = set()
    for c in f.critical_set():
        orbit, start = critical_orbit(f, c, depth)
        if start is None:
            return None
        pts.update(orbit)
    return tuple(sorted(pts))


def _cover_sets(f: PLMap, points: tuple[Q, ...]) -> list[int]:
    """Bitmask of elements covered by f(element) for each element."""
    elems = list(zip(points, points[1:]))
    rows = []
    for lo, hi in elems:
        img = f.graph.image(lo, hi)
        mask = 0
        for j, (a, b) in enumerate(elems):
            if img.lo <= a and b <= img.hi:
                mask |= 1 << j
        rows.append(mask)
    return rows


def _step(rows: list[int], mask: int) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= rows[i]
        mask >>= 1
        i += 1
    return out


def _never_full(rows: list[int]) -> Optional[tuple[int, list[int]]]:
    """An element whose exact image sequence cycles without covering everything."""
    full = (1 << len(rows)) - 1
    for e in range(len(rows)):
        mask = 1 << e
        seen: dict[int, int] = {}
        seq = []
        while mask not in seen and mask != full:
            seen[mask] = len(seq)
            seq.append(mask)
            mask = _step(rows, mask)
        if mask != full:
            return e, seq[seen[mask]:]
    return None


def leo_certify(f: PLMap, depth: int = DEFAULT_DEPTH) -> Verdict:
    inv = invariant_interval(f)
    if inv is not None:
        return refuted(inv, label="invariant interval")
    points = _markov_points(f, depth)
    slope = f.min_abs_slope()
    if points is not None:
        rows = _cover_sets(f, points)
        bad = _never_full(rows)
        elems = [Interval(a, b) for a, b in zip(points, points[1:])]
        if bad is not None:
            e, cycle = bad
            reach = tuple(Interval(elems[i].lo, elems[i].hi) for i in range(len(elems))
                          if any(m >> i & 1 for m in cycle))
            return refuted(MarkovObstruction(points, elems[e], reach), label="markov")
        if slope > 1:
            return proven(MarkovData(points, slope), label="markov")
    if slope > 1:
        times = []
        for lo, hi in zip(f.xs, f.xs[1:]):
            j = Interval(lo, hi)
            for k in range(1, depth + 1):
                j = f.image(j)
                if j == Interval(0, 1):
                    times.append(k)
                    break
            else:
                return unknown({"reason": "a lap is not onto within depth"}, depth=depth)
        return proven(ExpansionData(slope, tuple(times)), label="up-to-expansion", depth=depth)
    return unknown({"reason": "no invariant interval found, not Markov-expanding"}, depth=depth)


def check_leo(f: PLMap, verdict: Verdict) -> Optional[str]:
    p = verdict.payload
    if verdict.refuted and isinstance(p, InvariantWitness):
        j = p.interval
        if j == Interval(0, 1) or j.degenerate:
            return "witness interval must be proper and nondegenerate"
        g = f.graph if p.power == 1 else f.iterate(p.power).graph
        return None if j.contains_interval(g.image(j.lo, j.hi)) else "witness is not invariant"
    if isinstance(p, (MarkovData, MarkovObstruction)):
        if set(p.points) != set(_markov_points(f, len(p.points) + 1) or ()):
            return "partition points are not the critical orbits"
        rows = _cover_sets(f, p.points)
        bad = _never_full(rows)
        if verdict.proven:
            if bad is not None:
                return "covering relation is not primitive"
            if p.min_slope != f.min_abs_slope() or p.min_slope <= 1:
                return "slope bound fails"
            return None
        if bad is None:
            return "covering relation is primitive"
        elems = [Interval(a, b) for a, b in zip(p.points, p.points[1:])]
        e = elems.index(p.element) if p.element in elems else None
        if e is None:
            return "obstruction element is not a partition element"
        full = (1 << len(rows)) - 1
        mask, seen = 1 << e, set()
        while mask not in seen:
            if mask == full:
                return "obstruction element eventually covers [0, 1]"
            seen.add(mask)
            mask = _step(rows, mask)
        return None
    if verdict.proven and isinstance(p, ExpansionData):
        if p.min_slope != f.min_abs_slope() or p.min_slope <= 1:
            return "slope bound fails"
        laps = list(zip(f.xs, f.xs[1:]))
        if len(laps) != len(p.onto_times):
            return "lap count mismatch"
        for (lo, hi), k in zip(laps, p.onto_times):
            j = Interval(lo, hi)
            for _ in range(k):
                j = f.image(j)
            if j != Interval(0, 1):
                return f"lap [{fmt_rat(lo)}, {fmt_rat(hi)}] is not onto after {k} steps"
        return None
    return "unrecognized leo payload"


# preimage-length property ----------------------------------------------------

@dataclass(frozen=True)
class PreimageWitness:
    target: Interval
    component: Interval


def raines_property_probe(f: PLMap, resolution: int = 10**5) -> Verdict:
    """Check |A| <= |J| for every component A of f^{-1}(J).

    The excess |A| - |J| is affine on each cell cut out by the critical and
    breakpoint values, so checking J with endpoints among those values
    decides the property exactly.
    """
    values = sorted(set(f.ys) | {Q(0), Q(1)})
    pairs = len(values) * (len(values) - 1) // 2
    if pairs > resolution:
        return unknown({"candidate_pairs": pairs}, depth=resolution)
    worst = None
    for u, v in combinations(values, 2):
        j = Interval(u, v)
        for a in f.graph.preimage(j):
            if a.length > j.length:
                key = (-(a.length / j.length), j.lo, j.hi)
                if worst is None or key < worst[0]:
                    worst = (key, PreimageWitness(j, a))
    if worst is not None:
        return refuted(worst[1])
    return proven({"candidate_pairs": pairs})


def check_raines_witness(f: PLMap, w: PreimageWitness) -> Optional[str]:
    if w.component not in list(f.graph.preimage(w.target)):
        return "component is not a preimage component of the target"
    if not w.component.length > w.target.length:
        return "component is not longer than the target"
    return None

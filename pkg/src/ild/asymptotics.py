"""Critical orbits and their limit sets, pull-backs, retractability and the r_n / R_n statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .numerics import Interval, IntervalSet, Q
from .mapspec import OrbitSpec
from .plmap import BudgetExceeded, Graph, PLMap
from .verdict import Verdict, proven, refuted, unknown

ZERO, ONE = Q(0), Q(1)
DEFAULT_TRANSIENT = 64
DEFAULT_HORIZON = 4096
# exact orbits stop once denominators exceed this many bits
MAX_DENOMINATOR_BITS = 4096


class OrbitTooShort(ValueError):
    pass


class UndefinedTilde(ValueError):
    """No iterate f^k(c), k <= 3, lies in the open unit interval."""


# forward orbits ----------------------------------------------------------------

@dataclass(frozen=True)
class Attraction:
    """Linear contraction certificate: f^period is affine on ``window`` around ``point``
    with |slope| < 1 and ``window`` contains orbit index ``index``."""

    index: int
    point: Q
    period: int
    window: Interval
    slope: Q


@dataclass
class CriticalOrbit:
    c: Q
    points: list[Q]
    cycle_start: Optional[int] = None  # eventually periodic: points[cycle_start:] repeats
    attraction: Optional[Attraction] = None
    cycle: tuple[Q, ...] = ()

    @property
    def kind(self) -> str:
        if self.cycle_start is not None:
            return "periodic"
        if self.attraction is not None:
            return "attracted"
        return "open"


def _piece_breaks(g: Graph, lo: Q, hi: Q) -> bool:
    """True if ``g`` has a corner strictly inside (lo, hi)."""
    from bisect import bisect_left, bisect_right
    return bisect_left(g.xs, hi) > bisect_right(g.xs, lo)


def attraction_certificate(f: PLMap, x: Q, index: int, targets) -> Optional[Attraction]:
    for p, m, g in targets:
        d = abs(x - p)
        if d == 0:
            continue
        lo, hi = min(x, p), max(x, p)
        if _piece_breaks(g, lo, hi):
            continue
        s = (g(x) - g(p)) / (x - p)
        if not abs(s) < 1:
            continue
        if s < 0:
            lo, hi = p - d, p + d
            if lo < 0 or hi > 1 or _piece_breaks(g, lo, hi):
                continue
        return Attraction(index, p, m, Interval(lo, hi), s)
    return None


def _contracts_somewhere(g: Graph, p: Q) -> bool:
    """Some linear piece of g ending at p has |slope| < 1; otherwise no certificate can use p."""
    from bisect import bisect_left, bisect_right
    xs = g.xs
    pieces = {bisect_right(xs, p) - 1, bisect_left(xs, p) - 1}
    return any(0 <= i < len(xs) - 1 and abs(g.slope(i)) < 1 for i in pieces)


def _targets(f: PLMap):
    out = []
    g1 = f.graph
    for p in f.fixed_point_values(1):
        out.append((p, 1, g1))
    try:
        g2 = f.iterate(2).graph
        fix1 = set(f.fixed_point_values(1))
        for p in f.fixed_point_values(2):
            if p not in fix1:
                out.append((p, 2, g2))
    except BudgetExceeded:
        pass
    return [t for t in out if _contracts_somewhere(t[2], t[0])]


def _cycle_of(f: PLMap, p: Q) -> tuple[Q, ...]:
    pts = [p]
    while True:
        y = f.graph(pts[-1])
        if y == p:
            return tuple(pts)
        pts.append(y)


def critical_orbit(f: PLMap, c: Q, horizon: int = DEFAULT_HORIZON, targets=None) -> CriticalOrbit:
    targets = _targets(f) if targets is None else targets
    pts = [Q(c)]
    index = {pts[0]: 0}
    for k in range(horizon):
        x = pts[-1]
        cert = attraction_certificate(f, x, k, targets)
        if cert is not None:
            return CriticalOrbit(c, pts, attraction=cert, cycle=_cycle_of(f, cert.point))
        y = f.graph(x)
        if y in index:
            s = index[y]
            return CriticalOrbit(c, pts, cycle_start=s, cycle=tuple(pts[s:]))
        if y.denominator.bit_length() > MAX_DENOMINATOR_BITS:
            break
        index[y] = len(pts)
        pts.append(y)
    return CriticalOrbit(c, pts)


# omega(C) ----------------------------------------------------------------------

@dataclass
class OmegaApprox:
    """Certified outer approximation of the limit set of the critical orbits.

    With ``exact`` set, ``cover`` is exactly the finite limit set.
    """

    transient: int
    horizon: int
    cover: IntervalSet
    fattening: Q
    exact: bool
    orbits: list[CriticalOrbit] = field(default_factory=list)
    requested_fattening: Optional[Q] = None

    def membership(self, x: Q) -> str:
        """'exact-in', 'in-cover' or 'out' (provably outside the limit set)."""
        if x not in self.cover:
            return "out"
        return "exact-in" if self.exact else "in-cover"

    def points(self) -> list[Q]:
        if not self.exact:
            raise ValueError("limit set is not known exactly")
        return [p.lo for p in self.cover.parts]

    def meets_critical(self, f: PLMap) -> Optional[bool]:
        hit = any(c in self.cover for c in f.critical_set())
        if self.exact or not hit:
            return hit
        return None

    def to_data(self):
        from .verdict import to_data
        return {
            "transient": self.transient,
            "horizon": self.horizon,
            "exact": self.exact,
            "fattening": to_data(self.fattening),
            "cover": to_data(self.cover),
            "orbits": [
                {"c": to_data(o.c), "kind": o.kind, "cycle": to_data(list(o.cycle)),
                 "attraction": to_data(o.attraction)}
                for o in self.orbits
            ],
        }


def _round_out(x: Q, step: Q, up: bool) -> Q:
    k = x / step
    n = -((-k.numerator) // k.denominator) if up else k.numerator // k.denominator
    return min(max(n * step, ZERO), ONE)


def _invariant(f: PLMap, cover: IntervalSet) -> bool:
    return all(cover.covers(f.image(p)) for p in cover.parts)


def omega_approx(f: PLMap, transient: int = DEFAULT_TRANSIENT, horizon: int = DEFAULT_HORIZON,
                 fattening: Optional[Q] = None) -> OmegaApprox:
    if transient >= horizon:
        raise ValueError("transient must be smaller than horizon")
    targets = _targets(f)
    orbits = [critical_orbit(f, c, horizon, targets) for c in f.critical_set()]
    if all(o.kind != "open" for o in orbits):
        pts = sorted({p for o in orbits for p in o.cycle})
        return OmegaApprox(transient, horizon, IntervalSet.points(pts), ZERO, True, orbits, fattening)
    # tails: every orbit point from the transient on, plus exact cycles
    tail = set()
    for o in orbits:
        if o.kind == "open":
            tail.update(o.points[min(transient, len(o.points) - 1):])
        else:
            tail.update(o.cycle)
            if o.attraction is not None:
                # the tail of an attracted orbit stays in its contraction window
                tail.update(o.points[o.attraction.index:])
    eps = Q(fattening) if fattening else Q(1, 1024)
    while eps < 1:
        step = eps / 4
        parts = [Interval(_round_out(x - eps, step, False), _round_out(x + eps, step, True)) for x in tail]
        for o in orbits:
            if o.attraction is not None:
                parts.append(o.attraction.window)
        cover = IntervalSet(parts)
        if _invariant(f, cover):
            return OmegaApprox(transient, horizon, cover, eps, False, orbits, fattening)
        eps *= 2
    return OmegaApprox(transient, horizon, IntervalSet([Interval(0, 1)]), ONE, False, orbits, fattening)


def check_omega(f: PLMap, om: OmegaApprox) -> Optional[str]:
    """Re-derive the soundness facts behind an approximation."""
    if not _invariant(f, om.cover):
        return "cover is not mapped into itself"
    for o in om.orbits:
        if o.kind == "periodic":
            x = o.c
            for _ in range(len(o.points)):
                x = f.graph(x)
            if x not in set(o.cycle) or f.graph(o.cycle[-1]) != o.cycle[0]:
                return f"orbit of {o.c} is not periodic as claimed"
        elif o.kind == "attracted":
            a = o.attraction
            x = f.iterate_eval(o.c, a.index)
            g = f.graph if a.period == 1 else f.iterate(a.period).graph
            if x not in a.window or g(a.point) != a.point or _piece_breaks(g, a.window.lo, a.window.hi):
                return f"attraction certificate for {o.c} fails"
            if not abs(a.slope) < 1 or g(a.window.hi) - g(a.window.lo) != a.slope * a.window.length:
                return f"attraction slope for {o.c} fails"
            if a.slope > 0 and a.point not in (a.window.lo, a.window.hi):
                return f"one-sided window for {o.c} must end at the attracting point"
            if a.slope < 0 and a.point != (a.window.lo + a.window.hi) / 2:
                return f"two-sided window for {o.c} must be centred"
        if om.exact and not all(p in om.cover for p in o.cycle):
            return "cycle point missing from the exact cover"
    if om.exact and any(o.kind == "open" for o in om.orbits):
        return "exact flag set with an unresolved orbit"
    return None


# recurrence -------------------------------------------------------------------

def recurrence_check(f: PLMap, c: Q, depth: int = DEFAULT_HORIZON) -> Verdict:
    c = Q(c)
    if c not in f.critical_set():
        raise ValueError(f"{c} is not a critical point")
    o = critical_orbit(f, c, depth)
    if o.kind == "periodic":
        if c in o.cycle:
            return proven({"cycle": list(o.cycle)})
        dist = min(abs(c - p) for p in o.cycle)
        return refuted({"cycle": list(o.cycle), "distance": dist, "kind": "periodic"})
    if o.kind == "attracted":
        dist = min(abs(c - p) for p in o.cycle)
        return refuted({"cycle": list(o.cycle), "distance": dist, "kind": "attracted",
                        "attraction": o.attraction})
    returns = []
    best = None
    for k, x in enumerate(o.points[1:], start=1):
        d = abs(x - c)
        if best is None or d < best:
            best = d
            returns.append({"n": k, "distance": d})
    return unknown({"closest_returns": returns[-16:]}, depth=len(o.points) - 1)


# pull-backs -------------------------------------------------------------------

@dataclass
class PullBack:
    orbit: OrbitSpec
    j0: Interval
    intervals: list[Interval]
    monotone_up_to: int

    @property
    def depth(self) -> int:
        return len(self.intervals) - 1

    @property
    def monotone(self) -> bool:
        return self.monotone_up_to > self.depth


def _orbit_coords(orbit: OrbitSpec, n: int) -> list[Q]:
    if not orbit.cycle and len(orbit.prefix) < n:
        raise OrbitTooShort(f"orbit has {len(orbit.prefix)} coordinates, {n} needed")
    return orbit.coords(n)


def pull_back(f: PLMap, j0: Interval, orbit: OrbitSpec, K: int) -> PullBack:
    xs = _orbit_coords(orbit, K + 1)
    if xs[0] not in j0:
        raise ValueError("x_0 must lie in the initial interval")
    crit = f.interior_critical()
    intervals = [j0]
    first = K + 1
    for k in range(K):
        comps = f.graph.preimage(intervals[-1])
        part = next(p for p in comps if xs[k + 1] in p)
        intervals.append(part)
        if first > K and any(part.lo < c < part.hi for c in crit):
            first = k + 1
    return PullBack(orbit, j0, intervals, first)


def check_pull_back(f: PLMap, pb: PullBack) -> Optional[str]:
    K = pb.depth
    xs = _orbit_coords(pb.orbit, K + 1)
    for k in range(1, len(xs)):
        if f(xs[k]) != xs[k - 1]:
            return f"orbit link {k} fails"
    if pb.intervals[0] != pb.j0:
        return "first interval differs from j0"
    again = pull_back(f, pb.j0, pb.orbit, K)
    if again.intervals != pb.intervals or again.monotone_up_to != pb.monotone_up_to:
        return "pull-back intervals do not match"
    return None


# retractability --------------------------------------------------------------

def _predecessors(f: PLMap, pts: list[Q]) -> dict[Q, list[Q]]:
    s = set(pts)
    return {x: sorted(y for y in f.graph.solve(x) if y in s) for x in pts}


def retract_probe(f: PLMap, omega: OmegaApprox, K: int = 32, seeds: int = 64) -> Verdict:
    """Finite-depth retractability along the exact limit set.

    For an open U around x_0, the k-th pull-back shrinks to x_k as U shrinks,
    so a monotone pull-back of depth K exists for some U exactly when some
    backward orbit inside the limit set avoids interior critical points at
    indices 1..K. The search over the finite predecessor graph is therefore
    exact at depth K; if every backward orbit hits C, no U can be pulled back
    monotonically at all.
    """
    if not omega.exact:
        return unknown({"reason": "limit set known only as an outer cover; no retraction claimed"},
                       depth=K)
    pts = omega.points()
    interior = [x for x in pts if 0 < x < 1]
    if not interior:
        return refuted({"reason": "limit set lies in {0, 1}", "omega": pts}, label="non-retractable")
    crit = set(f.interior_critical())
    preds = _predecessors(f, pts)

    # longest critical-free backward path from each point, capped at K
    def paths(x0: Q) -> Optional[list[Q]]:
        stack = [[x0]]
        seen_depth: dict[tuple[Q, int], bool] = {}
        while stack:
            path = stack.pop()
            if len(path) == K + 1:
                return path
            for y in preds[path[-1]]:
                if y in crit:
                    continue
                key = (y, len(path))
                if key in seen_depth:
                    continue
                seen_depth[key] = True
                stack.append(path + [y])
        return None

    for x0 in interior:
        path = paths(x0)
        if path is None:
            continue
        orbit = _as_orbit(path, preds, crit)
        for m in range(1, seeds + 1):
            r = Q(1, 2**m)
            j0 = Interval(max(x0 - r, ZERO), min(x0 + r, ONE))
            pb = pull_back(f, j0, orbit, K)
            if pb.monotone:
                return proven(pb, label=f"retractable@{K}", depth=K)
        return unknown({"reason": "critical-free backward orbit found but no seed radius worked",
                        "orbit": orbit}, depth=K)
    # every backward orbit from every interior point meets C: exact obstruction
    bound = _all_paths_hit(interior, preds, crit, K)
    if bound is not None:
        return refuted({"reason": "every backward orbit in the limit set meets an interior critical point",
                        "omega": pts, "hit_within": bound}, label="non-retractable")
    return unknown({"reason": f"no monotone pull-back of depth {K}"}, depth=K)


def _as_orbit(path: list[Q], preds, crit) -> OrbitSpec:
    """Extend a finite backward path with a periodic tail inside the limit set when possible."""
    last = path[-1]
    # follow critical-free predecessors until a repeat
    seq = [last]
    index = {last: 0}
    while True:
        nxt = [y for y in preds[seq[-1]] if y not in crit]
        if not nxt:
            return OrbitSpec(tuple(path))
        y = nxt[0]
        if y in index:
            cyc = seq[index[y]:]
            head = path[:-1] + seq[:index[y]]
            # tail must satisfy f(cycle[0]) = last element of prefix
            return OrbitSpec(tuple(head), tuple(cyc))
        index[y] = len(seq)
        seq.append(y)


def _all_paths_hit(starts, preds, crit, K) -> Optional[int]:
    """Largest index at which a backward orbit first meets C, if all do within K."""
    worst = 0
    level = [(x, 0) for x in starts]
    seen = set()
    while level:
        nxt = []
        for x, d in level:
            for y in preds[x]:
                if y in crit:
                    worst = max(worst, d + 1)
                    continue
                if d + 1 > K:
                    return None
                if (y, d + 1) not in seen:
                    seen.add((y, d + 1))
                    nxt.append((y, d + 1))
        level = nxt
    return worst


# r_n, R_n ----------------------------------------------------------------------

@dataclass(frozen=True)
class LapState:
    """Value y = f^n(x) and the far ends of the images of both sides of x's lap(s)."""

    y: Q
    left: Q
    right: Q

    @property
    def folded(self) -> bool:
        dl, dr = self.left - self.y, self.right - self.y
        return dl != 0 and dr != 0 and (dl > 0) == (dr > 0)

    def stats(self) -> tuple[Interval, Q, Q]:
        dl, dr = abs(self.left - self.y), abs(self.right - self.y)
        if self.folded:
            far = self.left if dl >= dr else self.right
            return Interval.hull_of(self.y, far), ZERO, max(dl, dr)
        return Interval.hull_of(self.left, self.right), min(dl, dr), max(dl, dr)


def _advance(f: PLMap, s: LapState) -> LapState:
    def side(e: Q) -> Q:
        if e > s.y:
            e = min(e, f.lap_bounds(s.y, +1))
        elif e < s.y:
            e = max(e, f.lap_bounds(s.y, -1))
        return f.graph(e)

    return LapState(f.graph(s.y), side(s.left), side(s.right))


def lap_states(f: PLMap, x: Q, steps: int) -> tuple[list[LapState], Optional[int]]:
    """States for n = 0..steps; second value is the index where they start repeating."""
    states = [LapState(Q(x), ZERO, ONE)]
    seen = {states[0]: 0}
    for _ in range(steps):
        nxt = _advance(f, states[-1])
        if nxt in seen:
            return states, seen[nxt]
        seen[nxt] = len(states)
        states.append(nxt)
    return states, None


@dataclass(frozen=True)
class BranchStats:
    c: Q
    n: int
    reference: Q
    shift: int
    M_n: Interval
    r_n: Q
    R_n: Q


def tilde(f: PLMap, c: Q) -> tuple[Q, int]:
    x = Q(c)
    for k in range(1, 4):
        x = f.graph(x)
        if 0 < x < 1:
            return x, k
    raise UndefinedTilde(f"no iterate f^k({c}), k <= 3, lies in (0, 1)")


def _reference(f: PLMap, c: Q, mode: str) -> tuple[Q, int]:
    if mode == "raw":
        return f.graph(Q(c)), 1
    if mode != "tilde":
        raise ValueError("reference must be 'tilde' or 'raw'")
    return tilde(f, c)


def _state_at(states, start, m):
    if m < len(states):
        return states[m]
    period = len(states) - start
    return states[start + (m - start) % period]


def branch_stats(f: PLMap, c: Q, n_max: int, reference: str = "tilde") -> list[BranchStats]:
    """Exact M_n, r_n, R_n of f(c) for n = 1..n_max.

    With the shifted reference c~ = f^k(c) the n-th entry is taken at the
    (n + 1 - k)-th iterate of c~; entries whose index would be negative are
    omitted.
    """
    ref, k = _reference(f, c, reference)
    states, start = lap_states(f, ref, n_max)
    out = []
    for n in range(1, n_max + 1):
        m = n + 1 - k
        if m < 0:
            continue
        if m >= len(states) and start is None:
            break
        M, r, R = _state_at(states, start, m).stats()
        out.append(BranchStats(Q(c), n, ref, k, M, r, R))
    return out


@dataclass
class SequenceVerdict:
    c: Q
    quantity: str
    reference: Optional[Q]
    shift: Optional[int]
    values: list[Q]
    trend: str  # supports-convergence | refutes | unknown | undefined
    exact_cycle: Optional[tuple[int, int]] = None
    note: str = ""


def _classify(f: PLMap, c: Q, n_max: int, threshold: Q, which: str, mode: str) -> SequenceVerdict:
    try:
        ref, k = _reference(f, c, mode)
    except UndefinedTilde:
        return SequenceVerdict(c, which, None, None, [], "undefined",
                               note="no interior iterate within three steps")
    states, start = lap_states(f, ref, n_max + 1)
    vals = []
    for n in range(1, n_max + 1):
        m = n + 1 - k
        if m < 0 or (m >= len(states) and start is None):
            continue
        M, r, R = _state_at(states, start, m).stats()
        vals.append(r if which == "r" else R)
    if start is not None:
        cyc = [s.stats()[1 if which == "r" else 2] for s in states[start:]]
        period = len(states) - start
        if max(cyc) > 0:
            return SequenceVerdict(c, which, ref, k, vals, "refutes", (start, period),
                                   note="periodic lap configuration with a positive value")
        return SequenceVerdict(c, which, ref, k, vals, "supports-convergence", (start, period),
                               note="periodic lap configuration, identically zero")
    tail = vals[len(vals) // 2:]
    if tail and all(v < threshold for v in tail):
        return SequenceVerdict(c, which, ref, k, vals, "supports-convergence",
                               note="trend only: below threshold over the second half")
    return SequenceVerdict(c, which, ref, k, vals, "unknown")


@dataclass
class RnReport:
    per_point: list[SequenceVerdict]
    closure: list[SequenceVerdict]
    omega_in_boundary: Optional[bool]
    retractable: str  # verdict on non-retractability via r_n
    closure_retractable: str


def rn_limit_classifier(f: PLMap, n_max: int = 64, threshold: Q = Q(1, 1000),
                        omega: Optional[OmegaApprox] = None) -> RnReport:
    """Classify r_n(f(c)) -> 0 and limsup R_n(f(c)) = 0 for every critical point.

    R_n uses the shifted reference when it exists and the raw critical value
    otherwise.
    """
    per, clo = [], []
    for c in f.critical_set():
        per.append(_classify(f, c, n_max, threshold, "r", "tilde"))
        rv = _classify(f, c, n_max, threshold, "R", "tilde")
        if rv.trend == "undefined":
            rv = _classify(f, c, n_max, threshold, "R", "raw")
            rv.note = "raw critical value used: shifted reference undefined"
        clo.append(rv)
    boundary = None
    if omega is not None and omega.exact:
        boundary = all(p in (0, 1) for p in omega.points())
    trends = [v.trend for v in per]
    if boundary:
        verdict = "non-retractable"
    elif "refutes" in trends:
        verdict = "retractable-evidence"
    elif all(t in ("supports-convergence", "undefined") for t in trends):
        verdict = "non-retractable-evidence"
    else:
        verdict = "unknown"
    ctr = [v.trend for v in clo]
    if "refutes" in ctr:
        cverdict = "closure-retractable"
    elif all(t == "supports-convergence" for t in ctr) and all(v.exact_cycle for v in clo):
        cverdict = "closure-non-retractable"
    elif all(t == "supports-convergence" for t in ctr):
        cverdict = "closure-non-retractable-evidence"
    else:
        cverdict = "unknown"
    return RnReport(per, clo, boundary, verdict, cverdict)


# non-contraction ----------------------------------------------------------------

@dataclass(frozen=True)
class Excursion:
    """Closed J inside a component of B(C, delta0) minus C whose first hit of C
    happens at step ``steps`` with |f^steps(J)| <= 2|J|."""

    component: tuple[Q, Q]
    interval: Interval
    steps: int
    image: Interval


def _components(f: PLMap, delta0: Q) -> list[tuple[Q, Q]]:
    """Components of B(C, delta0) minus C, with B the union of open balls (clipped to [0, 1])."""
    crit = f.critical_set()
    balls: list[list[Q]] = []
    for c in crit:
        lo, hi = max(c - delta0, ZERO), min(c + delta0, ONE)
        if balls and lo < balls[-1][1]:
            balls[-1][1] = max(balls[-1][1], hi)
        else:
            balls.append([lo, hi])
    out = []
    for lo, hi in balls:
        cuts = [lo] + [c for c in crit if lo < c < hi] + [hi]
        for a, b in zip(cuts, cuts[1:]):
            if a < b:
                out.append((a, b))
    return out


def _restrict(f: PLMap, a: Q, b: Q) -> Graph:
    xs = [a] + [x for x in f.xs if a < x < b] + [b]
    return Graph(xs, [f.graph(x) for x in xs])


def _open_hits(f: PLMap, lo: Q, hi: Q) -> list[Q]:
    return [c for c in f.interior_critical() if lo < c < hi]


def non_contraction_check(f: PLMap, delta0: Q, depth: int = 64) -> Verdict:
    """Fixed-delta0 check of: the first image of J meeting C is more than twice as long as J."""
    delta0 = Q(delta0)
    if delta0 <= 0:
        raise ValueError("delta0 must be positive")
    s_min = f.min_abs_slope()
    comps = _components(f, delta0)
    first_hits = []
    for a, b in comps:
        g = _restrict(f, a, b)
        seen = set()
        hit = None
        cycles = False
        for m in range(1, depth + 1):
            img = Interval.hull_of(g.ys[0], g.ys[-1])
            if _open_hits(f, img.lo, img.hi):
                hit = m
                break
            if img in seen:
                cycles = True  # images repeat without meeting C: vacuous here
                break
            seen.add(img)
            g = f.graph.after(g)
        if hit is None:
            if not cycles:
                first_hits.append(depth + 1)
            continue
        first_hits.append(hit)
        # exact contracting excursion at the first hit
        for c in _open_hits(f, min(g.ys[0], g.ys[-1]), max(g.ys[0], g.ys[-1])):
            x = g.solve(c)[0]
            i = next(i for i in range(len(g)) if g.xs[i] <= x < g.xs[i + 1]) if x < b else len(g) - 1
            for lo_i in (i - 1, i) if x == g.xs[i] else (i,):
                if lo_i < 0:
                    continue
                slope = abs(g.slope(lo_i))
                if slope > 2:
                    continue
                left, right = g.xs[lo_i], g.xs[lo_i + 1]
                # closed J between x and the far end of the piece, kept inside (a, b)
                if left < x:
                    lo = (left + x) / 2 if left == a else left
                    J = Interval(lo, x)
                else:
                    hi = (x + right) / 2 if right == b else right
                    J = Interval(x, hi)
                img = Interval.hull_of(g(J.lo), g(J.hi))
                return refuted(Excursion((a, b), J, hit, img))
    if not first_hits:
        return proven({"reason": "no component ever meets C", "components": comps},
                      label="vacuous", depth=depth)
    j_low = min(first_hits)
    if s_min > 2 or (s_min >= 1 and s_min**j_low > 2):
        return proven({"min_slope": s_min, "first_hit_lower_bound": j_low, "components": comps})
    return unknown({"min_slope": s_min, "first_hit_lower_bound": j_low}, depth=depth)


def check_excursion(f: PLMap, delta0: Q, e: Excursion) -> Optional[str]:
    a, b = e.component
    if (a, b) not in _components(f, Q(delta0)):
        return "not a component of the punctured neighbourhood"
    J = e.interval
    if not (a < J.lo and J.hi <= b) and not (a <= J.lo and J.hi < b):
        return "interval leaves the component"
    if not (a < J.lo or J.hi < b) or J.degenerate:
        return "interval must be nondegenerate and inside the open component"
    img = J
    crit = f.critical_set()
    for m in range(1, e.steps + 1):
        img = f.image(img)
        meets = any(c in img for c in crit)
        if meets and m < e.steps:
            return "meets C before the recorded step"
        if m == e.steps and not meets:
            return "does not meet C at the recorded step"
    if img != e.image or img.length > 2 * J.length:
        return "image is not contracting as recorded"
    return None

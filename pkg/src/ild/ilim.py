"""Points of the inverse limit, given as backward orbits: basic arcs, endpoint and
folding probes, endpoint construction, and the arc decision."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Optional, Union

from .asymptotics import (LapState, OmegaApprox, OrbitTooShort, _advance, omega_approx,
                          recurrence_check, retract_probe)
from .certify import leo_certify, long_zigzag_certify, zigzag_scan
from .mapspec import OrbitSpec, validate_orbit
from .numerics import Interval, IntervalSet, Q
from .plmap import BudgetExceeded, Graph, PLMap
from .verdict import Verdict, proven, refuted, unknown

ZERO, ONE = Q(0), Q(1)
DEFAULT_DEPTH = 64
SCAN_DEPTH = 4


class NotRecurrent(ValueError):
    pass


class PostconditionError(AssertionError):
    pass


# basic arcs -------------------------------------------------------------------

def _arms(s: LapState) -> tuple[Q, Q]:
    """Interior margins (left, right) of y inside its window; folded windows put y at an end."""
    window, _, _ = s.stats()
    return s.y - window.lo, window.hi - s.y


def _truncated(f: PLMap, s: LapState) -> Interval:
    """Domain of the monotone piece(s) around s.y that the next step maps."""
    lo = max(min(s.left, s.right, s.y), f.lap_bounds(s.y, -1))
    hi = min(max(s.left, s.right, s.y), f.lap_bounds(s.y, +1))
    return Interval(lo, hi)


def _descend(f: PLMap, orbit: OrbitSpec, top: int, bottom: int) -> tuple[LapState, dict[int, Interval]]:
    """Start with full arms at coordinate ``top`` and step down to ``bottom``."""
    s = LapState(orbit[top], ZERO, ONE)
    domains = {}
    for j in range(top, bottom, -1):
        domains[j] = _truncated(f, s)
        s = _advance(f, s)
    return s, domains


@dataclass
class BasicArcTrace:
    """Windows of the i-th basic arc through an orbit.

    ``projections[k]`` is the i-th projection at depth k (nested in k) and
    ``position[k]`` the margins of x_i inside it. ``windows`` is the chain
    J_i, ..., J_{i+K} at the final depth: f^k maps J_{i+k} onto J_i one-to-one.
    ``limit`` holds the exact limiting margins when the orbit has a periodic tail.
    """

    orbit: OrbitSpec
    i: int
    windows: list[Interval]
    position: list[tuple[Q, Q]]
    projections: list[Interval]
    folded_at: Optional[int] = None
    limit: Optional[tuple[Q, Q]] = None

    @property
    def depth(self) -> int:
        return len(self.windows) - 1


def _need(orbit: OrbitSpec, n: int) -> None:
    if not orbit.cycle and len(orbit.prefix) < n:
        raise OrbitTooShort(f"orbit has {len(orbit.prefix)} coordinates, {n} needed")


def basic_arc(f: PLMap, orbit: OrbitSpec, i: int, K: int) -> BasicArcTrace:
    _need(orbit, i + K + 1)
    projections, position = [], []
    folded_at = None
    final_domains: dict[int, Interval] = {}
    for k in range(K + 1):
        s, doms = _descend(f, orbit, i + k, i)
        w, _, _ = s.stats()
        projections.append(w)
        position.append(_arms(s))
        if s.folded and folded_at is None:
            folded_at = k
        final_domains = doms
    chain = [projections[-1]]
    for j in range(i + 1, i + K + 1):
        x = orbit[j]
        comps = f.graph.preimage(chain[-1])
        part = next(p for p in comps if x in p)
        part = part.intersect(final_domains[j]) or Interval(x, x)
        if not f.is_monotone_on(part):
            right = Interval(x, part.hi)
            part = right if f.image(right) == chain[-1] else Interval(part.lo, x)
        chain.append(part)
    limit = None
    if orbit.cycle:
        lim = _limit_state(f, orbit, i, DEFAULT_DEPTH)
        if lim is not None:
            limit = _arms(lim)
    return BasicArcTrace(orbit, i, chain, position, projections, folded_at, limit)


def check_basic_arc(f: PLMap, tr: BasicArcTrace) -> Optional[str]:
    for a, b in zip(tr.projections, tr.projections[1:]):
        if not a.contains_interval(b):
            return "projections are not nested"
    g = None
    for k, w in enumerate(tr.windows):
        x = tr.orbit[tr.i + k]
        if x not in w:
            return f"x_{tr.i + k} outside its window"
        if k == 0:
            continue
        g = f.graph if g is None else f.graph.after(g)
        if g.image(w.lo, w.hi) != tr.windows[0]:
            return f"f^{k} does not map window {k} onto the first"
        lo, hi = bisect_right(g.xs, w.lo), bisect_left(g.xs, w.hi)
        vals = [g(w.lo)] + list(g.ys[lo:hi]) + [g(w.hi)]
        steps = [b - a for a, b in zip(vals, vals[1:]) if b != a]
        if steps and not (all(d > 0 for d in steps) or all(d < 0 for d in steps)):
            return f"f^{k} is not one-to-one on window {k}"
    return None


# exact limits of the margins along a periodic tail -----------------------------

def _corner_inside(xs, y: Q, e: Q) -> bool:
    """True when a corner in ``xs`` lies strictly between y and e."""
    lo, hi = (y, e) if y < e else (e, y)
    return bisect_left(xs, hi) > bisect_right(xs, lo)


def _limit_state(f: PLMap, orbit: OrbitSpec, i: int, passes: int) -> Optional[LapState]:
    """Limit, as depth grows, of the arm state at coordinate i, or None if unresolved.

    Arms evolve independently. Iterating the map over two periods of the
    tail from full arms gives a non-increasing sequence per arm; an arm is
    settled once it repeats exactly, or once a whole double period runs
    inside single linear pieces with total factor below one (then it tends
    to zero and stays in that regime).
    """
    m = len(orbit.prefix)
    start = max(i, m)
    period = 2 * len(orbit.cycle)
    s = LapState(orbit[start], ZERO, ONE)
    limit: dict[str, Q] = {}
    for _ in range(passes):
        if s.folded:
            break
        t = s
        linear = {"left": True, "right": True}
        for j in range(start + period, start, -1):
            for side in ("left", "right"):
                e = getattr(t, side)
                if e != t.y and _corner_inside(f.xs, t.y, e):
                    linear[side] = False
            t = _advance(f, t)
            if t.folded:
                break
        if t.folded:
            s = t
            break
        for side in ("left", "right"):
            if side in limit:
                continue
            old, new = getattr(s, side), getattr(t, side)
            d_old, d_new = abs(old - s.y), abs(new - t.y)
            if d_new == d_old:
                limit[side] = new
            elif linear[side] and d_new < d_old:
                limit[side] = t.y
        s = LapState(t.y, limit.get("left", t.left), limit.get("right", t.right))
        if len(limit) == 2:
            break
    if not s.folded and len(limit) < 2:
        return None
    # walk from the tail down to coordinate i; limits pass through continuously
    for _ in range(start - i):
        s = _advance(f, s)
    return s


# B-endpoints --------------------------------------------------------------------

def b_endpoint_test(f: PLMap, orbit: OrbitSpec, K: int = DEFAULT_DEPTH) -> Verdict:
    """Is x an endpoint of every basic arc through it?

    With a periodic tail only coordinates 0 .. m+p-1 are distinct, so the
    exact limit per coordinate settles the question for all i.
    """
    if not orbit.cycle:
        raise OrbitTooShort("a periodic tail is needed to reach every coordinate")
    count = len(orbit.prefix) + len(orbit.cycle)
    coords = []
    open_coords = []
    for i in range(count):
        s = _limit_state(f, orbit, i, K)
        if s is None:
            open_coords.append(i)
            continue
        left, right = _arms(s)
        entry = {"i": i, "x": s.y, "folded": s.folded, "margins": [left, right]}
        if not s.folded and left > 0 and right > 0:
            return refuted({"interior": entry, "orbit": orbit}, depth=K)
        coords.append(entry)
    if open_coords:
        return unknown({"unresolved": open_coords, "settled": coords}, depth=K)
    return proven({"coordinates": coords, "orbit": orbit}, label="periodic tail")


# folding points -------------------------------------------------------------------

def _coords(orbit: OrbitSpec) -> list[Q]:
    return list(orbit.prefix) + list(orbit.cycle)


def folding_test(f: PLMap, orbit: OrbitSpec, omega: Optional[OmegaApprox] = None,
                 K: int = DEFAULT_DEPTH) -> Verdict:
    omega = omega_approx(f) if omega is None else omega
    for n, x in enumerate(_coords(orbit)):
        if omega.membership(x) == "out":
            return refuted({"n": n, "x": x, "distance": omega.cover.distance(x),
                            "cover": omega.cover}, label="outside limit set cover")
    if not orbit.cycle:
        return unknown({"reason": "finite orbit: later coordinates are not known"}, depth=K)
    if not omega.exact:
        return unknown({"reason": "coordinates lie in an outer cover only"}, depth=K)
    lz = long_zigzag_certify(f, K)
    if not lz.proven:
        return unknown({"reason": "every coordinate is in the limit set but long-zigzag is not proven"},
                       depth=K)
    return proven({"omega": omega.points(), "long_zigzag": lz.payload}, label="coordinates in limit set")


# endpoints ----------------------------------------------------------------------

@dataclass
class PointClass:
    orbit: OrbitSpec
    folding: Verdict
    b_endpoint: Verdict
    endpoint: Verdict
    double_spiral: Verdict
    hypotheses_used: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _hypotheses(f: PLMap, scan_depth: int, depth: int) -> tuple[list[str], Optional[str], dict]:
    """Hypotheses under which B-endpoints are exactly the endpoints."""
    facts = {}
    zz = zigzag_scan(f, scan_depth)
    facts["zigzag"] = zz
    if zz.proven:
        return [f"zigzag-free up to {scan_depth}"], None, facts
    lz = long_zigzag_certify(f, depth)
    leo = leo_certify(f, depth)
    facts["long_zigzag"], facts["leo"] = lz, leo
    used = []
    if lz.proven:
        used.append("long-zigzag Proven")
    if leo.proven:
        used.append(f"leo Proven({leo.label})")
    if lz.proven and leo.proven:
        return used, None, facts
    missing = [name for name, v in (("long-zigzag", lz), ("leo", leo)) if not v.proven]
    return used, "zigzag-free, or " + " and ".join(missing), facts


def _b_or_unknown(f: PLMap, orbit: OrbitSpec, K: int) -> Verdict:
    try:
        return b_endpoint_test(f, orbit, K)
    except OrbitTooShort as e:
        return unknown({"reason": str(e)}, depth=K)


def endpoint_classify(f: PLMap, orbit: OrbitSpec, K: int = DEFAULT_DEPTH,
                      omega: Optional[OmegaApprox] = None, scan_depth: int = SCAN_DEPTH) -> PointClass:
    validate_orbit(orbit, f)
    omega = omega_approx(f) if omega is None else omega
    fold = folding_test(f, orbit, omega, K)
    b = _b_or_unknown(f, orbit, K)
    used, missing, facts = _hypotheses(f, scan_depth, K)
    notes = []
    if missing is not None:
        ep = unknown({"missing_hypothesis": missing, "b_endpoint": b.status.value}, depth=K)
    elif b.unknown:
        ep = unknown({"reason": "B-endpoint status unresolved"}, depth=K)
    elif b.proven:
        ep = proven({"b_endpoint": b.payload, "hypotheses": used}, label="B-endpoint")
    else:
        ep = refuted({"b_endpoint": b.payload, "hypotheses": used}, label="not a B-endpoint")
    lz, leo = facts.get("long_zigzag"), facts.get("leo")
    if lz is not None and lz.proven and leo is not None and leo.proven and omega.exact:
        rp = retract_probe(f, omega, min(K, 16))
        notes.append(f"retractability along the limit set: {rp}; folding {fold.status.value}, "
                     f"B-endpoint {b.status.value}")
    ds = double_spiral_probe(f, orbit, K, b_endpoint=b, long_zigzag=facts.get("long_zigzag"))
    return PointClass(orbit, fold, b, ep, ds, used, notes)


# double spirals --------------------------------------------------------------------

@dataclass
class OntoChains:
    """Pull-back chains on both sides of x: f maps A[k+1] onto A[k] and B[k+1] onto B[k],
    and A[k], B[k] meet only in x_k."""

    left: list[Interval]
    right: list[Interval]
    cycle_factor: Q


def _side_slope(f: PLMap, x: Q, side: int) -> Optional[Q]:
    xs = f.xs
    i = bisect_right(xs, x) - 1 if side > 0 else bisect_left(xs, x) - 1
    if i < 0 or i >= len(xs) - 1:
        return None
    return f.graph.slope(i)


def _pull_side(f: PLMap, x_prev: Q, x: Q, seg: Interval) -> Optional[Interval]:
    """The interval next to x mapped onto ``seg`` (which has x_prev as an end) by one linear piece."""
    target_side = 1 if seg.hi > x_prev else -1
    length = seg.length
    for side in (1, -1):
        s = _side_slope(f, x, side)
        if s is None or (1 if s * side > 0 else -1) != target_side:
            continue
        end = x + side * length / abs(s)
        if not 0 <= end <= 1 or _corner_inside(f.xs, x, end):
            return None
        return Interval.hull_of(x, end)
    return None


def _onto_chains(f: PLMap, orbit: OrbitSpec, K: int, radius: Q) -> Optional[OntoChains]:
    x0 = orbit[0]
    if radius > x0 or x0 + radius > 1:
        return None
    A, B = [Interval(x0 - radius, x0)], [Interval(x0, x0 + radius)]
    for k in range(1, K + 1):
        xp, x = orbit[k - 1], orbit[k]
        a, b = _pull_side(f, xp, x, A[-1]), _pull_side(f, xp, x, B[-1])
        if a is None or b is None or a.intersect(b) != Interval(x, x):
            return None
        A.append(a)
        B.append(b)
    factor = ONE
    for x in orbit.cycle:
        factor *= abs(_side_slope(f, x, 1) or ONE)
    return OntoChains(A, B, factor)


def double_spiral_probe(f: PLMap, orbit: OrbitSpec, K: int = DEFAULT_DEPTH,
                        b_endpoint: Optional[Verdict] = None,
                        long_zigzag: Optional[Verdict] = None) -> Verdict:
    lz = long_zigzag_certify(f) if long_zigzag is None else long_zigzag
    if lz.proven:
        return refuted({"reason": "long-zigzag maps have no double spiral points"}, label="long-zigzag")
    b = _b_or_unknown(f, orbit, K) if b_endpoint is None else b_endpoint
    if b.refuted:
        return refuted({"reason": "not a B-endpoint"}, label="not a B-endpoint")
    if not b.proven:
        return unknown({"reason": "B-endpoint status unresolved"}, depth=K)
    if not orbit.cycle or any(x in f.interior_critical() for x in _coords(orbit)):
        return unknown({"reason": "two-sided chains need a critical-free periodic tail"}, depth=K)
    for m in range(1, 4 * K + 8):
        ch = _onto_chains(f, orbit, K, Q(1, 2**m))
        if ch is not None:
            return proven(ch, label=f"two-sided@{K}", depth=K)
    return unknown({"reason": "no two-sided onto chains found"}, depth=K)


def check_onto_chains(f: PLMap, orbit: OrbitSpec, ch: OntoChains) -> Optional[str]:
    for k in range(1, len(ch.left)):
        x = orbit[k]
        if f(orbit[k]) != orbit[k - 1]:
            return f"orbit link {k} fails"
        for name, seq in (("left", ch.left), ("right", ch.right)):
            if seq[k].degenerate or f.image(seq[k]) != seq[k - 1] or not f.is_monotone_on(seq[k]):
                return f"{name} chain fails at {k}"
        if ch.left[k].intersect(ch.right[k]) != Interval(x, x):
            return f"chains overlap at {k}"
    return None


# endpoint construction --------------------------------------------------------------

@dataclass
class ConstructionStep:
    j: int
    k: int
    L: Interval
    K: Interval


def endpoint_construct(f: PLMap, c: Q, depth: int = 8) -> tuple[OrbitSpec, list[ConstructionStep]]:
    """Build an endpoint from a recurrent critical point c.

    Only the exactly periodic case is constructive: every return time equals
    the period p, L_j is a dyadic neighbourhood of c and K_j is the component
    of the f^p-preimage of L_j around c.
    """
    c = Q(c)
    rec = recurrence_check(f, c)
    if not rec.proven:
        raise NotRecurrent(f"{c} is not shown recurrent ({rec.status.value})")
    cycle = list(rec.payload["cycle"])
    p = len(cycle)
    rot = cycle.index(c)
    fwd = cycle[rot:] + cycle[:rot]
    backward = [fwd[0]] + fwd[:0:-1]
    g = f.iterate(p).graph
    log = []
    for j in range(1, depth + 1):
        r = Q(1, 2**j)
        L = Interval(max(c - r, ZERO), min(c + r, ONE))
        comp = next(part for part in g.preimage(L) if c in part)
        if not L.contains_interval(g.image(comp.lo, comp.hi)):
            raise PostconditionError("pull-back does not land in L")
        log.append(ConstructionStep(j, p, L, comp))
    orbit = validate_orbit(OrbitSpec(tuple(backward), tuple(backward)), f)
    return orbit, log


# arc decision -----------------------------------------------------------------------

@dataclass
class Trap:
    """Neighbourhood of a fixed point of g where g is affine on each side with |slope| < 1."""

    point: Q
    interval: Interval
    slopes: tuple[Q, ...]


@dataclass
class Escape:
    """g(z) = e + s (z - e) on (e, e + width] with s > 1: points there leave it."""

    point: Q
    width: Q
    slope: Q


@dataclass
class ComponentCert:
    component: Interval
    target: Q
    trap: Trap
    escape: Optional[Escape]
    core: Optional[Interval]
    steps: int


@dataclass
class ComponentRefutation:
    component: Interval
    kind: str
    witness: dict


@dataclass
class ArcDecision:
    fix2: list[Union[Q, Interval]]
    components: list[Interval]
    per_component: list[Union[ComponentCert, ComponentRefutation, None]]
    verdict: Verdict


def _nearest_corner(g: Graph, x: Q, side: int) -> Q:
    xs = g.xs
    if side > 0:
        i = bisect_right(xs, x)
        return xs[i] if i < len(xs) else ONE
    i = bisect_left(xs, x) - 1
    return xs[i] if i >= 0 else ZERO


def _piece_slope(g: Graph, x: Q, side: int) -> Optional[Q]:
    xs = g.xs
    i = bisect_right(xs, x) - 1 if side > 0 else bisect_left(xs, x) - 1
    if i < 0 or i >= len(xs) - 1:
        return None
    return g.slope(i)


def _trap(g: Graph, t: Q, side_in: int) -> Optional[Trap]:
    """Two-sided trap if both sides contract, else one-sided on ``side_in`` with positive slope."""
    sl = {s: _piece_slope(g, t, s) for s in (-1, 1)}
    reach = {s: abs(_nearest_corner(g, t, s) - t) for s in (-1, 1)}
    both = [s for s in (-1, 1) if sl[s] is not None]
    if all(abs(sl[s]) < 1 for s in both):
        r = min(reach[s] for s in both)
        return Trap(t, Interval(max(t - r, ZERO), min(t + r, ONE)), tuple(sl[s] for s in both))
    s = sl[side_in]
    if s is not None and 0 < s < 1:
        r = reach[side_in]
        return Trap(t, Interval.hull_of(t, t + side_in * r), (s,))
    return None


def _escape(g: Graph, e: Q, side_in: int, span: Q) -> Optional[Escape]:
    s = _piece_slope(g, e, side_in)
    if s is None or not s > 1:
        return None
    width = min(abs(_nearest_corner(g, e, side_in) - e), span / (2 * s))
    return Escape(e, width, s)


def _certify_component(g: Graph, comp: Interval, fixed_lo: bool, fixed_hi: bool,
                       depth: int) -> tuple[Optional[ComponentCert], list[Trap]]:
    a, b = comp.lo, comp.hi
    traps = []
    for t, side_in, other, other_fixed in ((b, -1, a, fixed_lo), (a, 1, b, fixed_hi)):
        if not (fixed_hi if t == b else fixed_lo):
            continue
        trap = _trap(g, t, side_in)
        if trap is None:
            continue
        traps.append(trap)
        esc = None
        if other_fixed:
            esc = _escape(g, other, -side_in, comp.length)
            if esc is None:
                continue
        # compact part between the escape zone and the trap
        lo = a + esc.width if (esc is not None and other == a) else a
        hi = b - esc.width if (esc is not None and other == b) else b
        lo, hi = max(lo, a), min(hi, b)
        if trap.interval.lo <= lo and hi <= trap.interval.hi:
            return ComponentCert(comp, t, trap, esc, None, 0), traps
        core = Interval(lo, hi)
        j = core
        for n in range(1, depth + 1):
            j = g.image(j.lo, j.hi)
            if trap.interval.contains_interval(j):
                return ComponentCert(comp, t, trap, esc, core, n), traps
    return None, traps


class _PeriodicPoints:
    """Periodic points of f^2 by period, computed once per period and shared across components."""

    def __init__(self, f: PLMap, max_period: int, budget: int):
        self.f, self.max_period, self.budget = f, max_period, budget
        self.fix2 = set(f.fixed_point_values(2))
        self.levels: dict[int, Optional[list[Q]]] = {}

    def level(self, m: int) -> Optional[list[Q]]:
        if m not in self.levels:
            try:
                pts = self.f.fixed_points(2 * m, self.budget)
                self.levels[m] = [v for v in pts if not isinstance(v, Interval) and v not in self.fix2]
            except BudgetExceeded:
                self.levels[m] = None
        return self.levels[m]

    def witness(self, comp: Interval) -> Optional[dict]:
        for m in range(2, self.max_period + 1):
            pts = self.level(m)
            if pts is None:
                return None
            for p in pts:
                if comp.interior_contains(p):
                    return {"point": p, "period": m}
        return None


def _segment_witness(g: Graph, comp: Interval, segments: list[Interval]) -> Optional[dict]:
    """A piece of the component that g maps onto part of a segment of fixed points.

    Its points are fixed after one step at different places, so they cannot
    share one limit."""
    for seg in segments:
        for part in g.preimage(seg):
            piece = part.intersect(comp)
            if piece is None or piece.degenerate:
                continue
            if comp.interior_contains(piece.lo) or comp.interior_contains(piece.hi):
                lo = max(piece.lo, comp.lo)
                hi = min(piece.hi, comp.hi)
                img = g.image(lo, hi)
                if not img.degenerate and seg.contains_interval(img):
                    return {"piece": Interval(lo, hi), "segment": seg, "image": img}
    return None


def arc_check(f: PLMap, depth: int = DEFAULT_DEPTH, max_period: int = 8,
              budget: Optional[int] = None) -> ArcDecision:
    budget = 20000 if budget is None else budget
    g = f.iterate(2).graph
    fix2 = f.fixed_points(2)
    fixed = IntervalSet(v if isinstance(v, Interval) else Interval(v, v) for v in fix2)
    comps: list[tuple[Interval, bool, bool]] = []
    prev = None
    for part in fixed.parts:
        if prev is None:
            if part.lo > 0:
                comps.append((Interval(ZERO, part.lo), False, True))
        else:
            comps.append((Interval(prev, part.lo), True, True))
        prev = part.hi
    if prev is None:
        raise ValueError("f^2 has no fixed point")
    if prev < 1:
        comps.append((Interval(prev, ONE), True, False))
    per: list = []
    periodic = _PeriodicPoints(f, max_period, budget)
    segments = [v for v in fix2 if isinstance(v, Interval)]
    refutation = None
    unresolved = []
    for comp, flo, fhi in comps:
        cert, traps = _certify_component(g, comp, flo, fhi, depth)
        if cert is not None:
            per.append(cert)
            continue
        w = periodic.witness(comp)
        seg = _segment_witness(g, comp, segments) if w is None else None
        if w is not None:
            r = ComponentRefutation(comp, "periodic point", w)
        elif seg is not None:
            r = ComponentRefutation(comp, "lands on fixed segment", seg)
        elif len(traps) == 2:
            # points near each end converge to that end: two different limits
            r = ComponentRefutation(comp, "two attracting ends",
                                    {"traps": [t.interval for t in traps], "targets": [t.point for t in traps]})
        else:
            r = None
        per.append(r)
        if r is None:
            unresolved.append(comp)
        elif refutation is None:
            refutation = r
    components = [c for c, _, _ in comps]
    if refutation is not None:
        v = refuted(refutation, label="not an arc")
    elif unresolved:
        v = unknown({"unresolved": unresolved}, depth=depth)
    else:
        targets = sorted({c.target for c in per})
        v = proven({"targets": targets}, label="arc")
    return ArcDecision(fix2, components, per, v)


def check_arc_decision(f: PLMap, d: ArcDecision) -> Optional[str]:
    g = f.iterate(2).graph
    for item in d.per_component:
        if isinstance(item, ComponentCert):
            t, tr = item.target, item.trap
            if g(t) != t:
                return f"target {t} is not fixed by f^2"
            for s in (-1, 1):
                end = tr.interval.hi if s > 0 else tr.interval.lo
                if end == t:
                    continue
                if _corner_inside(g.xs, t, end):
                    return "trap is not a single linear piece"
                slope = (g(end) - t) / (end - t)
                if not abs(slope) < 1:
                    return "trap does not contract"
                if len(tr.slopes) == 1 and not slope > 0:
                    return "one-sided trap reverses orientation"
            if item.core is not None:
                j = item.core
                for _ in range(item.steps):
                    j = g.image(j.lo, j.hi)
                if not tr.interval.contains_interval(j):
                    return "core does not land in the trap"
            if item.escape is not None:
                e = item.escape
                side = 1 if e.point == item.component.lo else -1
                end = e.point + side * e.width
                if _corner_inside(g.xs, e.point, end) or g(e.point) != e.point:
                    return "escape zone is not linear"
                if (g(end) - e.point) / (end - e.point) != e.slope or not e.slope > 1:
                    return "escape slope mismatch"
        elif isinstance(item, ComponentRefutation) and item.kind == "periodic point":
            p, m = item.witness["point"], item.witness["period"]
            if g(p) == p or f.iterate_eval(p, 2 * m) != p:
                return f"{p} is not a periodic point of f^2 of period {m}"
        elif isinstance(item, ComponentRefutation) and item.kind == "lands on fixed segment":
            piece, seg = item.witness["piece"], item.witness["segment"]
            if not item.component.contains_interval(piece) or piece.degenerate:
                return "piece is not inside the component"
            img = g.image(piece.lo, piece.hi)
            if img.degenerate or not seg.contains_interval(img):
                return "piece does not land on the segment"
            if g(seg.lo) != seg.lo or g(seg.hi) != seg.hi or _corner_inside(g.xs, seg.lo, seg.hi):
                return "segment is not fixed pointwise"
        elif isinstance(item, ComponentRefutation) and item.kind == "two attracting ends":
            return None if len(item.witness["traps"]) == 2 else "two traps required"
    return None


# virtually increasing preimages -------------------------------------------------------

def _adjacent_pair(g: Graph) -> Optional[tuple[Q, Q]]:
    """Minimal [c, d] with g(c) = 0, g(d) = 1 and c < d."""
    events = sorted([(x, 0) for x in g.solve(ZERO)] + [(x, 1) for x in g.solve(ONE)])
    for (x0, v0), (x1, v1) in zip(events, events[1:]):
        if v0 == 0 and v1 == 1:
            return x0, x1
    return None


def _vi_step(g: Graph, cd: tuple[Q, Q], x: Q, y: Q) -> tuple[Q, Q]:
    c, d = cd
    t_y = min(z for z in g.solve(y) if c <= z <= d)
    a = max(z for z in g.solve(x) if c <= z <= t_y)
    return a, t_y


def check_virtually_increasing(g: Graph, dom: Interval, target: Interval) -> Optional[str]:
    a, b = dom.lo, dom.hi
    if not a < b:
        return "degenerate domain"
    if g(a) != target.lo or g(b) != target.hi:
        return "endpoints do not map to the target ends"
    if g.image(a, b) != target:
        return "image differs from the target"
    i, j = bisect_right(g.xs, a), bisect_left(g.xs, b)
    if any(not target.lo < v < target.hi for v in g.ys[i:j]):
        return "an interior point reaches an end value"
    return None


def virtually_increasing_preimage(f: PLMap, target: Interval) -> Interval:
    """[x', y'] with f^2 mapping it onto ``target``, increasing at the ends and hitting
    the end values only at the ends."""
    x, y = target.lo, target.hi
    if not (0 <= x < y <= 1):
        raise ValueError("target must be a nondegenerate subinterval of [0, 1]")
    g2 = f.iterate(2).graph
    cd = _adjacent_pair(f.graph)
    if cd is not None:
        a, b = _vi_step(f.graph, cd, x, y)
        out = Interval(*_vi_step(f.graph, cd, a, b))
    else:
        cd2 = _adjacent_pair(g2)
        if cd2 is None:
            raise PostconditionError("f^2 has no increasing pair of 0 and 1 values")
        out = Interval(*_vi_step(g2, cd2, x, y))
    err = check_virtually_increasing(g2, out, target)
    if err is not None:
        raise PostconditionError(err)
    return out


__all__ = [
    "NotRecurrent", "PostconditionError", "BasicArcTrace", "basic_arc", "check_basic_arc",
    "b_endpoint_test", "folding_test", "PointClass", "endpoint_classify", "OntoChains",
    "double_spiral_probe", "check_onto_chains", "ConstructionStep", "endpoint_construct",
    "Trap", "Escape", "ComponentCert", "ComponentRefutation", "ArcDecision", "arc_check",
    "check_arc_decision", "check_virtually_increasing", "virtually_increasing_preimage",
]

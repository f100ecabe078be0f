"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line (also collected
in the terminal summary)."""

import json
import random
import time
from fractions import Fraction as Q

import pytest

from ild import report as rp
from ild.asymptotics import (check_pull_back, omega_approx, recurrence_check, retract_probe,
                             rn_limit_classifier)
from ild.certify import (check_leo, check_long_zigzag, leo_certify, long_zigzag_certify,
                         raines_property_probe, zigzag_scan, zigzags_of)
from ild.cli import main
from ild.ilim import (b_endpoint_test, check_arc_decision, check_onto_chains,
                      check_virtually_increasing, double_spiral_probe, endpoint_classify,
                      endpoint_construct, folding_test, arc_check, virtually_increasing_preimage)
from ild.mapspec import parse_orbit
from ild.numerics import Interval
from ild.plmap import gallery
from ild.plmap import gallery_map
from mapgen import (brute_zigzag_infimum, cycle_orbits, float_map, float_slope, has_zigzag,
                    random_map)
from test_ilim import vi_postconditions

criterion = pytest.mark.criterion


def say(n, ok, detail):
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def gallery_run(tmp_path_factory):
    """One full-gallery analysis through the CLI, timed."""
    out = tmp_path_factory.mktemp("gallery") / "all.json"
    t = time.perf_counter()
    code = main(["analyze", "gallery:*", "--out", str(out)])
    return code, out.read_bytes(), time.perf_counter() - t


# 1 -----------------------------------------------------------------------------------

@criterion(1, "gallery regression")
def test_gallery_regression(gallery_run):
    failures = []

    def want(cond, what):
        if not cond:
            failures.append(what)

    t2 = gallery_map("t2")
    want(zigzag_scan(t2, 4).proven, "t2 zigzag-free n<=4")
    leo = leo_certify(t2)
    want(leo.proven and leo.label == "markov" and check_leo(t2, leo) is None, "t2 leo markov")
    om = omega_approx(t2)
    want(om.exact and om.points() == [0], "t2 omega {0}")
    want(all(retract_probe(t2, om, K).refuted for K in (1, 2, 4, 8, 16, 32)), "t2 non-retractable at all depths")
    pc = endpoint_classify(t2, parse_orbit("0 | cycle: 0", t2))
    want(pc.folding.proven and pc.endpoint.proven, "t2 (0,0,...) folding + endpoint")

    minc = gallery_map("minc")
    lz = long_zigzag_certify(minc)
    want(lz.proven and lz.payload.epsilon >= Q(1, 3) and check_long_zigzag(minc, lz.payload) is None,
         "minc long-zigzag eps>=1/3")
    zz = zigzag_scan(minc, 1)
    want(zz.refuted and zz.payload.n == 1, "minc zigzag at n=1")

    fig7 = gallery_map("fig7")
    om7 = omega_approx(fig7)
    want(om7.exact and om7.meets_critical(fig7) is False, "fig7 omega misses C")
    d7 = arc_check(fig7)
    want(d7.verdict.proven and d7.verdict.payload["targets"] == [Q(1, 9), Q(8, 9)]
         and check_arc_decision(fig7, d7) is None, "fig7 arc with ends over 1/9, 8/9")

    fig4 = gallery_map("fig4")
    d4 = arc_check(fig4)
    want(d4.verdict.proven and check_arc_decision(fig4, d4) is None, "fig4 arc")
    half = parse_orbit("1/2 | cycle: 1/2", fig4)
    want(b_endpoint_test(fig4, half).proven, "fig4 B-endpoint")
    ds = double_spiral_probe(fig4, half, 16)
    want(ds.proven and check_onto_chains(fig4, half, ds.payload) is None, "fig4 double spiral")
    rp4 = retract_probe(fig4, omega_approx(fig4))
    want(rp4.proven and check_pull_back(fig4, rp4.payload) is None, "fig4 retractable")

    fig8 = gallery_map("fig8")
    l8 = leo_certify(fig8)
    want(l8.refuted and l8.payload.interval == Interval(0, Q(1, 3)), "fig8 leo refuted by [0,1/3]")
    d8 = arc_check(fig8)
    ok8 = d8.verdict.refuted and d8.verdict.payload.kind == "periodic point"
    if ok8:
        p, m = d8.verdict.payload.witness["point"], d8.verdict.payload.witness["period"]
        ok8 = fig8.iterate_eval(p, 2) != p and fig8.iterate_eval(p, 2 * m) == p
    want(ok8 and check_arc_decision(fig8, d8) is None, "fig8 arc refuted by f^2-periodic point")
    om8 = omega_approx(fig8)
    want(om8.exact and om8.meets_critical(fig8) is True, "fig8 omega meets C")

    u2 = gallery_map("u2")
    want(recurrence_check(u2, Q(1, 2)).proven, "u2 recurrence")
    orbit, _ = endpoint_construct(u2, Q(1, 2))
    want(b_endpoint_test(u2, orbit).proven, "u2 constructed endpoint is a B-endpoint")

    code, _, seconds = gallery_run
    want(code == 0 and seconds < 60, f"full gallery under 60 s (took {seconds:.1f} s)")
    say(1, not failures, "; ".join(failures) or f"all gallery pins hold, gallery analysed in {seconds:.1f} s")
    assert not failures


# 2 -----------------------------------------------------------------------------------

@criterion(2, "iterates of zigzag-free maps are zigzag-free")
def test_zigzag_free_iterates():
    rng = random.Random(2)
    maps = []
    while len(maps) < 50:
        f = random_map(rng)
        # rejection by both routes: engine scan and brute-force enumeration at n = 1
        if zigzag_scan(f, 1).proven and not has_zigzag(f, 1):
            maps.append(f)
    bad = []
    for f in maps:
        for n in (2, 3, 4):
            if not zigzag_scan(f, n).proven or brute_zigzag_infimum(f, n) is not None:
                bad.append((f, n))
    nontrivial = sum(len(f.interior_critical()) >= 2 for f in maps)
    say(2, not bad, f"50 maps ({nontrivial} with two or more turns), {len(bad)} failures")
    assert not bad, bad[:3]


# 3 -----------------------------------------------------------------------------------

@criterion(3, "long-zigzag bound is sound")
def test_long_zigzag_soundness():
    checked, bad = [], []
    for e in gallery():
        v = long_zigzag_certify(e.map)
        if not v.proven:
            continue
        eps = v.payload.epsilon
        checked.append(e.name)
        for n in range(1, 6):
            inf = brute_zigzag_infimum(e.map, n)
            if inf is not None and inf < eps:
                bad.append((e.name, n, inf, eps))
            # the engine's witnesses obey the same bound
            if any(z.magnitude < eps for z in zigzags_of(e.map, n)):
                bad.append((e.name, n, "engine witness"))
    say(3, not bad and bool(checked), f"checked {', '.join(checked)} at n <= 5; {len(bad)} violations")
    assert checked and not bad, bad


# 4 -----------------------------------------------------------------------------------

@criterion(4, "leo and Raines imply long-zigzag")
def test_implications():
    rng = random.Random(4)
    leo_n = raines_n = 0
    bad = []
    for _ in range(100):
        f = random_map(rng)
        leo = leo_certify(f)
        rai = raines_property_probe(f)
        if not (leo.proven or rai.proven):
            continue
        lz = long_zigzag_certify(f)
        leo_n += leo.proven
        raines_n += rai.proven
        if not lz.proven:
            bad.append(f)
    say(4, not bad, f"leo Proven on {leo_n}, Raines Proven on {raines_n}, {len(bad)} violations")
    assert leo_n and raines_n and not bad, bad


# 5 -----------------------------------------------------------------------------------

@criterion(5, "retractability matches folding points versus endpoints")
def test_retraction_consistency():
    K = 16
    maps, bad = [], []
    for e in gallery():
        f = e.map
        if not (long_zigzag_certify(f).proven and leo_certify(f).proven):
            continue
        maps.append(e.name)
        om = omega_approx(f)
        rp_v = retract_probe(f, om, K)
        folding = [o for o in cycle_orbits(f, om) if folding_test(f, o, om, K).proven]
        all_b = bool(folding) and all(b_endpoint_test(f, o, K).proven for o in folding)
        if rp_v.proven and om.exact and all_b:
            bad.append(e.name)
    say(5, not bad and bool(maps), f"maps with both hypotheses: {', '.join(maps)}; violations: {bad or 'none'}")
    assert maps and not bad


# 6 -----------------------------------------------------------------------------------

@criterion(6, "r_n classifier agrees with the retraction probe")
def test_rn_coherence():
    notes, ok = [], True
    for name in ("u2", "t2"):
        f = gallery_map(name)
        om = omega_approx(f)
        rn = rn_limit_classifier(f, omega=om)
        probe = retract_probe(f, om)
        agree = rn.retractable.startswith("non-retractable") and probe.refuted
        ok &= agree
        notes.append(f"{name}: {rn.retractable} vs {probe}")
    fig4 = gallery_map("fig4")
    om = omega_approx(fig4)
    rn = rn_limit_classifier(fig4, omega=om)
    exact_floor = [v for v in rn.closure if v.trend == "refutes" and v.exact_cycle is not None
                   and min(v.values) > 0]
    probe = retract_probe(fig4, om)
    agree = rn.closure_retractable == "closure-retractable" and bool(exact_floor) and probe.proven
    ok &= agree
    notes.append(f"fig4: {rn.closure_retractable}, R_n >= {min(exact_floor[0].values) if exact_floor else '?'}, "
                 f"probe {probe}")
    say(6, ok, "; ".join(notes))
    assert ok


# 7 -----------------------------------------------------------------------------------

@criterion(7, "virtually increasing preimages")
def test_virtually_increasing():
    rng = random.Random(7)
    bad = 0
    for _ in range(200):
        f = random_map(rng)
        d = rng.choice((4, 6, 8, 12, 16, 24))
        a, b = sorted(rng.sample(range(d + 1), 2))
        t = Interval(Q(a, d), Q(b, d))
        out = virtually_increasing_preimage(f, t)
        if check_virtually_increasing(f.iterate(2).graph, out, t) is not None or not vi_postconditions(f, out, t):
            bad += 1
    say(7, bad == 0, f"200 pairs, {bad} postcondition failures")
    assert bad == 0


# 8 -----------------------------------------------------------------------------------

GRID = 4096
TOL = 1e-6
MARGIN = 1e-3


def _grid_zigzag_margin(g, n):
    """Largest admissibility margin of a zigzag of g^n seen on the grid, or 0."""
    vals = []
    for i in range(GRID + 1):
        x = i / GRID
        for _ in range(n):
            x = g(x)
        vals.append(x)
    ext = [vals[0]] + [vals[i] for i in range(1, GRID)
                       if (vals[i] - vals[i - 1]) * (vals[i + 1] - vals[i]) < 0] + [vals[-1]]
    best = 0.0
    for p in range(1, len(ext) - 1):
        lo = hi = ext[p]
        for q in range(p + 1, len(ext) - 1):
            lo, hi = min(lo, ext[q]), max(hi, ext[q])
            m = max(min(lo - ext[p - 1], ext[q + 1] - hi), min(ext[p - 1] - hi, lo - ext[q + 1]))
            best = max(best, m)
    return best


@criterion(8, "float-grid oracle agrees with the exact engine")
def test_float_oracle():
    contradictions = []
    compared = {"orbit": 0, "target": 0, "zigzag": 0}
    for e in gallery():
        f = e.map
        g, slope = float_map(f), float_slope(f)
        om = omega_approx(f)
        for c in f.critical_set():
            # orbits: early iterates agree to the tolerance
            x, y = float(c), c
            for k in range(12):
                compared["orbit"] += 1
                if abs(x - float(y)) > TOL:
                    contradictions.append((e.name, "orbit", c, k))
                    break
                x, y = g(x), f(y)
            # attraction targets: a settled, contracting float cycle must sit on the
            # certified limit set; the oracle's margin is how far it is from neutral
            x = float(c)
            tail = []
            for k in range(GRID):
                x = g(x)
                if k >= GRID - 64:
                    tail.append(x)
            period = next((p for p in range(1, 17) if abs(tail[-1] - tail[-1 - p]) < TOL), None)
            if period is not None:
                factor = 1.0
                for z in tail[-period:]:
                    factor *= abs(slope(z))
                if 1 - factor <= MARGIN:
                    continue
                compared["target"] += 1
                if om.exact:
                    gap = min(abs(tail[-1] - float(p)) for p in om.points())
                else:
                    gap = min(max(float(p.lo) - tail[-1], tail[-1] - float(p.hi), 0.0) for p in om.cover.parts)
                if gap > MARGIN:
                    contradictions.append((e.name, "target", c, tail[-1]))
        # zigzag presence for f, f^2, f^3
        for n in (1, 2, 3):
            m = _grid_zigzag_margin(g, n)
            if m > MARGIN:
                compared["zigzag"] += 1
                if zigzag_scan(f, n).proven:
                    contradictions.append((e.name, "zigzag", n, m))
    kinds = ", ".join(f"{v} {k}" for k, v in compared.items())
    say(8, not contradictions, f"decisive comparisons: {kinds}; {len(contradictions)} contradictions")
    assert not contradictions, contradictions


# 9 -----------------------------------------------------------------------------------

@criterion(9, "deterministic reports that re-validate")
def test_determinism(gallery_run, tmp_path, capsys):
    code, first, _ = gallery_run
    again = tmp_path / "again.json"
    main(["analyze", "gallery:*", "--out", str(again)])
    identical = again.read_bytes() == first
    docs = rp.load_reports(first.decode())
    extra = []
    for argv in (["classify", "gallery:fig4", "--orbit", "1/2 | cycle: 1/2"],
                 ["construct-endpoint", "gallery:u2", "--critical", "1/2"],
                 ["certify", "non-contraction", "gallery:t2", "--delta", "1/4"],
                 ["arc-check", "gallery:fig8"]):
        out = tmp_path / "x.json"
        main(argv + ["--out", str(out)])
        extra.append(json.loads(out.read_text()))
    all_ok = main(["check-cert", str(again)]) == 0
    failing = [d["map"]["name"] for d in docs + extra if rp.check_report(d) is not None]
    capsys.readouterr()
    ok = code == 0 and identical and all_ok and not failing
    say(9, ok, f"{len(docs) + len(extra)} reports, byte-identical rerun: {identical}, "
               f"re-validation failures: {failing or 'none'}")
    assert ok

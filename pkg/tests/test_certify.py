import dataclasses
from fractions import Fraction as Q

from hypothesis import given
from hypothesis import strategies as st

from ild.certify import (check_leo, check_long_zigzag, check_raines_witness, check_zigzag,
                         leo_certify, long_zigzag_certify, raines_property_probe, zigzag_scan,
                         zigzags_of)
from ild.numerics import Interval
from ild.plmap import PLMap, gallery_map
from mapgen import brute_zigzag_infimum, pl_maps

T2, MINC, FIG6 = gallery_map("t2"), gallery_map("minc"), gallery_map("fig6")
IDENT = PLMap([(0, 0), (1, 1)])


def test_tent_is_zigzag_free():
    v = zigzag_scan(T2, 4)
    assert v.proven and v.depth == 4


def test_minc_zigzag_inside_middle():
    v = zigzag_scan(MINC, 1)
    assert v.refuted
    z = v.payload
    assert Q(1, 3) <= z.a < z.b <= Q(2, 3)
    assert check_zigzag(MINC, z) is None


def test_fig6_zigzag_spans_both_folds():
    z = zigzag_scan(FIG6, 1).payload
    assert 0 < z.a < Q(1, 3) and Q(2, 3) < z.b < 1
    assert z.magnitude > Q(1, 3)
    assert check_zigzag(FIG6, z) is None


def test_tampered_zigzag_rejected():
    z = zigzag_scan(MINC, 1).payload
    assert check_zigzag(MINC, dataclasses.replace(z, b=Q(1))) is not None
    assert check_zigzag(MINC, dataclasses.replace(z, magnitude=z.magnitude / 2)) is not None


def test_minc_long_zigzag():
    v = long_zigzag_certify(MINC)
    assert v.proven and v.payload.epsilon >= Q(1, 3)
    assert check_long_zigzag(MINC, v.payload) is None


def test_fig6_long_zigzag_branches():
    cert = long_zigzag_certify(FIG6).payload
    kinds = [(b.branch, b.kind) for b in cert.per_branch]
    assert kinds == [(Interval(0, Q(1, 3)), "a"), (Interval(Q(1, 3), Q(2, 3)), "b"), (Interval(Q(2, 3), 1), "a")]
    assert cert.per_branch[0].k == 1
    assert cert.per_branch[1].bound == Q(1, 3)


def test_monotone_long_zigzag_vacuous():
    cert = long_zigzag_certify(IDENT).payload
    assert len(cert.per_branch) == 1
    assert cert.per_branch[0].kind == "b" and cert.epsilon == 1


def test_tampered_epsilon_rejected():
    cert = long_zigzag_certify(MINC).payload
    assert check_long_zigzag(MINC, dataclasses.replace(cert, epsilon=Q(1, 2))) is not None


def test_leo_examples():
    v = leo_certify(T2)
    assert v.proven and v.label == "markov"
    assert check_leo(T2, v) is None
    w = leo_certify(gallery_map("fig8"))
    assert w.refuted and w.payload.interval == Interval(0, Q(1, 3))
    assert check_leo(gallery_map("fig8"), w) is None
    assert leo_certify(FIG6).payload.interval == Interval(Q(1, 3), Q(2, 3))


def test_raines_examples():
    assert raines_property_probe(T2).proven
    assert raines_property_probe(IDENT).proven
    v = raines_property_probe(gallery_map("fig4"))
    assert v.refuted
    w = v.payload
    assert w.target == Interval(Q(4, 9), Q(5, 9))
    assert w.component.contains_interval(Interval(Q(1, 3), Q(2, 3)))
    assert check_raines_witness(gallery_map("fig4"), w) is None


# properties ------------------------------------------------------------------------

@given(pl_maps(), st.integers(1, 3))
def test_zigzag_witnesses_valid(f, n):
    for z in zigzags_of(f, n):
        assert check_zigzag(f, z) is None


@given(pl_maps(), st.integers(1, 3))
def test_scan_agrees_with_brute_force(f, n):
    v = zigzag_scan(f, n)
    brute = [b for b in (brute_zigzag_infimum(f, m) for m in range(1, n + 1)) if b is not None]
    assert v.proven == (not brute)
    if brute:
        assert v.payload.inf_magnitude == min(brute)


@given(pl_maps())
def test_long_zigzag_certificates_check(f):
    v = long_zigzag_certify(f)
    if v.proven:
        assert check_long_zigzag(f, v.payload) is None
        assert 0 < v.payload.epsilon <= 1


@given(pl_maps())
def test_long_zigzag_bound_holds_on_iterates(f):
    v = long_zigzag_certify(f)
    if v.proven:
        for n in (1, 2, 3):
            b = brute_zigzag_infimum(f, n)
            assert b is None or b >= v.payload.epsilon


@given(pl_maps())
def test_leo_verdicts_check(f):
    v = leo_certify(f)
    if not v.unknown:
        assert check_leo(f, v) is None


@given(pl_maps(), st.fractions(0, 1, max_denominator=30), st.fractions(0, 1, max_denominator=30))
def test_raines_proven_bounds_random_targets(f, u, v):
    if u == v or not raines_property_probe(f).proven:
        return
    j = Interval(min(u, v), max(u, v))
    assert all(a.length <= j.length for a in f.graph.preimage(j))


@given(pl_maps())
def test_raines_refutations_check(f):
    v = raines_property_probe(f)
    if v.refuted:
        assert check_raines_witness(f, v.payload) is None


@given(pl_maps(), st.integers(1, 3))
def test_zigzags_through_two_critical_points_are_long(f, n):
    crit = f.critical_set()
    floor = min(abs(f(a) - f(b)) for a, b in zip(crit, crit[1:]))
    prev = f.iterate(n - 1).graph if n > 1 else None
    for z in zigzags_of(f, n):
        j = prev.image(z.a, z.b) if prev else Interval(z.a, z.b)
        if sum(j.lo <= c <= j.hi for c in crit) >= 2:
            assert z.magnitude >= floor

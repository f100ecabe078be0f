"""Versioned JSON reports and their offline re-validation.

A report stores the map, the settings used, and one entry per computed
section. ``check_report`` trusts none of it: embedded certificates are
decoded and checked by the independent validators, then every section is
recomputed from the recorded settings and compared field by field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from typing import Any, Callable, Optional

from . import __version__
from .asymptotics import (DEFAULT_HORIZON, DEFAULT_TRANSIENT, Excursion, OmegaApprox, PullBack,
                          check_excursion, check_omega, check_pull_back, non_contraction_check,
                          omega_approx, recurrence_check, retract_probe, rn_limit_classifier)
from .certify import (BranchBound, ExpansionData, InvariantWitness, LongZigzagCert, MarkovData,
                      MarkovObstruction, PreimageWitness, Zigzag, check_leo, check_long_zigzag,
                      check_raines_witness, check_zigzag, leo_certify, long_zigzag_certify,
                      raines_property_probe, zigzag_scan)
from .ilim import (ArcDecision, ComponentCert, ComponentRefutation, Escape, OntoChains, PointClass,
                   Trap, arc_check, b_endpoint_test, check_arc_decision, check_onto_chains,
                   endpoint_classify, endpoint_construct)
from .mapspec import OrbitSpec, validate_orbit
from .numerics import Interval, Q, fmt_rat, parse_rat
from .plmap import PLMap, default_budget
from .verdict import Status, Verdict, to_data

SCHEMA = "ild-report/1"
SECTIONS = ("zigzag", "long_zigzag", "leo", "raines", "omega", "rn", "retract", "arc",
            "non_contraction", "recurrence")
ANALYZE_SECTIONS = ("zigzag", "long_zigzag", "leo", "raines", "omega", "rn", "retract", "arc")
TOP_KEYS = {"schema", "tool", "map", "settings", "properties", "orbits", "construction", "timing"}
REQUIRED_KEYS = {"schema", "tool", "map", "settings", "properties", "orbits"}


class ReportFormatError(ValueError):
    """The document is not a report at all (bad JSON, wrong schema)."""


@dataclass(frozen=True)
class Settings:
    depth: int = 64
    horizon: int = DEFAULT_HORIZON
    transient: int = DEFAULT_TRANSIENT
    budget: int = 10**6
    scan_depth: int = 4
    retract_depth: int = 32
    fattening: Optional[Q] = None
    delta: Optional[Q] = None
    critical: Optional[Q] = None

    def to_data(self) -> dict:
        return {f.name: to_data(getattr(self, f.name)) for f in fields(self)}

    @classmethod
    def from_data(cls, d: dict) -> "Settings":
        names = {f.name for f in fields(cls)}
        if set(d) != names:
            raise ValueError(f"settings fields differ: {sorted(set(d) ^ names)}")
        kw = {}
        for k, v in d.items():
            if k in ("fattening", "delta", "critical"):
                kw[k] = None if v is None else parse_rat(v)
            else:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise ValueError(f"settings.{k} must be an integer")
                kw[k] = v
        return cls(**kw)


def default_settings(**kw) -> Settings:
    return replace(Settings(budget=default_budget()), **kw)


# computing sections ----------------------------------------------------------------

class _Context:
    def __init__(self, f: PLMap, s: Settings):
        self.f, self.s = f, s
        self._omega: Optional[OmegaApprox] = None

    @property
    def omega(self) -> OmegaApprox:
        if self._omega is None:
            s = self.s
            self._omega = omega_approx(self.f, s.transient, s.horizon, s.fattening)
        return self._omega


def _recurrence(ctx: _Context):
    crit = [ctx.s.critical] if ctx.s.critical is not None else list(ctx.f.critical_set())
    return [{"c": c, "verdict": recurrence_check(ctx.f, c, ctx.s.horizon)} for c in crit]


def _non_contraction(ctx: _Context):
    if ctx.s.delta is None:
        raise ValueError("non-contraction needs a delta")
    return non_contraction_check(ctx.f, ctx.s.delta, ctx.s.depth)


_COMPUTE: dict[str, Callable[[_Context], Any]] = {
    "zigzag": lambda c: zigzag_scan(c.f, c.s.scan_depth, c.s.budget),
    "long_zigzag": lambda c: long_zigzag_certify(c.f, c.s.depth),
    "leo": lambda c: leo_certify(c.f, c.s.depth),
    "raines": lambda c: raines_property_probe(c.f),
    "omega": lambda c: c.omega,
    "rn": lambda c: rn_limit_classifier(c.f, c.s.depth, omega=c.omega),
    "retract": lambda c: retract_probe(c.f, c.omega, c.s.retract_depth),
    "arc": lambda c: arc_check(c.f, c.s.depth),
    "non_contraction": _non_contraction,
    "recurrence": _recurrence,
}


def compute_sections(f: PLMap, s: Settings, names) -> dict[str, Any]:
    ctx = _Context(f, s)
    return {name: _COMPUTE[name](ctx) for name in names}


def classify_orbits(f: PLMap, s: Settings, orbits) -> list[PointClass]:
    om = omega_approx(f, s.transient, s.horizon, s.fattening)
    return [endpoint_classify(f, o, s.depth, omega=om, scan_depth=s.scan_depth) for o in orbits]


def construction_section(f: PLMap, s: Settings) -> dict:
    if s.critical is None:
        raise ValueError("endpoint construction needs a critical point")
    orbit, log = endpoint_construct(f, s.critical, min(s.depth, 16))
    return {"c": s.critical, "orbit": orbit, "log": log, "b_endpoint": b_endpoint_test(f, orbit, s.depth)}


def map_data(f: PLMap) -> dict:
    return {"name": f.name or "", "digest": f.digest(),
            "points": [[fmt_rat(x), fmt_rat(y)] for x, y in zip(f.xs, f.ys)]}


def build_report(f: PLMap, s: Settings, properties: dict[str, Any], orbits=(),
                 construction: Optional[dict] = None, timing: Optional[dict] = None) -> dict:
    doc = {
        "schema": SCHEMA,
        "tool": {"name": "ild", "version": __version__},
        "map": map_data(f),
        "settings": s.to_data(),
        "properties": {k: to_data(v) for k, v in properties.items()},
        "orbits": [to_data(pc) for pc in orbits],
    }
    if construction is not None:
        doc["construction"] = to_data(construction)
    if timing is not None:
        doc["timing"] = timing
    return doc


def analyze(f: PLMap, s: Settings, orbits=(), sections=ANALYZE_SECTIONS) -> dict:
    props = compute_sections(f, s, sections)
    return build_report(f, s, props, classify_orbits(f, s, orbits) if orbits else ())


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# decoding certificates ---------------------------------------------------------------

def _r(v) -> Q:
    if not isinstance(v, str):
        raise ValueError(f"expected a rational string, got {v!r}")
    return parse_rat(v)


def _iv(v) -> Interval:
    if not isinstance(v, list) or len(v) != 2:
        raise ValueError(f"expected an interval, got {v!r}")
    return Interval(_r(v[0]), _r(v[1]))


def _keys(d, expected: set, where: str) -> dict:
    if not isinstance(d, dict):
        raise ValueError(f"{where}: expected an object")
    if set(d) != expected:
        raise ValueError(f"{where}: unexpected fields {sorted(set(d) ^ expected)}")
    return d


def _opt_int(v):
    if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
        raise ValueError(f"expected an integer, got {v!r}")
    return v


def _orbit(d) -> OrbitSpec:
    _keys(d, {"prefix", "cycle"}, "orbit")
    return OrbitSpec(tuple(_r(x) for x in d["prefix"]), tuple(_r(x) for x in d["cycle"]))


def _verdict_shell(d, where: str) -> tuple[Status, Any, str]:
    if not isinstance(d, dict) or not {"status", "payload"} <= set(d) or not set(d) <= {
            "status", "payload", "depth", "label", "notes"}:
        raise ValueError(f"{where}: malformed verdict")
    return Status(d["status"]), d["payload"], d.get("label", "")


def _zigzag(p) -> Zigzag:
    _keys(p, {"n", "a", "b", "image", "magnitude", "inf_magnitude"}, "zigzag")
    return Zigzag(_opt_int(p["n"]), _r(p["a"]), _r(p["b"]), _iv(p["image"]), _r(p["magnitude"]),
                  _r(p["inf_magnitude"]))


def _check_zigzag(f, d, s) -> Optional[str]:
    st, p, _ = _verdict_shell(d, "zigzag")
    return check_zigzag(f, _zigzag(p)) if st is Status.REFUTED else None


def _check_long_zigzag(f, d, s) -> Optional[str]:
    st, p, _ = _verdict_shell(d, "long_zigzag")
    if st is not Status.PROVEN:
        return None
    _keys(p, {"epsilon", "per_branch"}, "long_zigzag")
    bounds = []
    for b in p["per_branch"]:
        _keys(b, {"branch", "kind", "bound", "k", "p", "q"}, "branch")
        bounds.append(BranchBound(_iv(b["branch"]), b["kind"], _r(b["bound"]), _opt_int(b["k"]),
                                  _opt_int(b["p"]), _opt_int(b["q"])))
    return check_long_zigzag(f, LongZigzagCert(_r(p["epsilon"]), tuple(bounds)))


def _check_leo(f, d, s) -> Optional[str]:
    st, p, label = _verdict_shell(d, "leo")
    if st is Status.UNKNOWN:
        return None
    if st is Status.REFUTED and label == "invariant interval":
        _keys(p, {"interval", "power"}, "leo")
        payload = InvariantWitness(_iv(p["interval"]), _opt_int(p["power"]))
    elif label == "markov" and st is Status.PROVEN:
        _keys(p, {"points", "min_slope"}, "leo")
        payload = MarkovData(tuple(_r(x) for x in p["points"]), _r(p["min_slope"]))
    elif label == "markov":
        _keys(p, {"points", "element", "reachable"}, "leo")
        payload = MarkovObstruction(tuple(_r(x) for x in p["points"]), _iv(p["element"]),
                                    tuple(_iv(x) for x in p["reachable"]))
    elif label == "up-to-expansion":
        _keys(p, {"min_slope", "onto_times"}, "leo")
        payload = ExpansionData(_r(p["min_slope"]), tuple(_opt_int(k) for k in p["onto_times"]))
    else:
        return f"unrecognized leo certificate label {label!r}"
    return check_leo(f, Verdict(st, payload, label=label))


def _check_raines(f, d, s) -> Optional[str]:
    st, p, _ = _verdict_shell(d, "raines")
    if st is not Status.REFUTED:
        return None
    _keys(p, {"target", "component"}, "raines")
    return check_raines_witness(f, PreimageWitness(_iv(p["target"]), _iv(p["component"])))


def _check_retract(f, d, s) -> Optional[str]:
    st, p, _ = _verdict_shell(d, "retract")
    if st is not Status.PROVEN:
        return None
    _keys(p, {"orbit", "j0", "intervals", "monotone_up_to"}, "retract")
    pb = PullBack(_orbit(p["orbit"]), _iv(p["j0"]), [_iv(x) for x in p["intervals"]],
                  _opt_int(p["monotone_up_to"]))
    if not pb.monotone:
        return "pull-back is not monotone"
    return check_pull_back(f, pb)


def _check_non_contraction(f, d, s) -> Optional[str]:
    st, p, _ = _verdict_shell(d, "non_contraction")
    if st is not Status.REFUTED:
        return None
    _keys(p, {"component", "interval", "steps", "image"}, "excursion")
    a, b = p["component"]
    e = Excursion((_r(a), _r(b)), _iv(p["interval"]), _opt_int(p["steps"]), _iv(p["image"]))
    return check_excursion(f, s.delta, e)


def _component(d):
    if isinstance(d, dict) and set(d) == {"component", "kind", "witness"}:
        w = d["witness"]
        if d["kind"] == "periodic point":
            _keys(w, {"point", "period"}, "witness")
            w = {"point": _r(w["point"]), "period": _opt_int(w["period"])}
        elif d["kind"] == "lands on fixed segment":
            _keys(w, {"piece", "segment", "image"}, "witness")
            w = {k: _iv(v) for k, v in w.items()}
        elif d["kind"] == "two attracting ends":
            _keys(w, {"traps", "targets"}, "witness")
            w = {"traps": [_iv(x) for x in w["traps"]], "targets": [_r(x) for x in w["targets"]]}
        else:
            raise ValueError(f"unknown refutation kind {d['kind']!r}")
        return ComponentRefutation(_iv(d["component"]), d["kind"], w)
    if d is None:
        return None
    _keys(d, {"component", "target", "trap", "escape", "core", "steps"}, "component")
    t = _keys(d["trap"], {"point", "interval", "slopes"}, "trap")
    trap = Trap(_r(t["point"]), _iv(t["interval"]), tuple(_r(x) for x in t["slopes"]))
    esc = None
    if d["escape"] is not None:
        e = _keys(d["escape"], {"point", "width", "slope"}, "escape")
        esc = Escape(_r(e["point"]), _r(e["width"]), _r(e["slope"]))
    core = None if d["core"] is None else _iv(d["core"])
    return ComponentCert(_iv(d["component"]), _r(d["target"]), trap, esc, core, _opt_int(d["steps"]))


def _check_arc(f, d, s) -> Optional[str]:
    _keys(d, {"fix2", "components", "per_component", "verdict"}, "arc")
    st, _, _ = _verdict_shell(d["verdict"], "arc.verdict")
    per = [_component(x) for x in d["per_component"]]
    comps = [_iv(x) for x in d["components"]]
    if [getattr(x, "component", c) for x, c in zip(per, comps)] != comps:
        return "per-component entries do not match the components"
    if st is Status.PROVEN and not all(isinstance(x, ComponentCert) for x in per):
        return "arc claimed without a certificate for every component"
    if st is Status.REFUTED and not any(isinstance(x, ComponentRefutation) for x in per):
        return "refutation without a witness"
    return check_arc_decision(f, ArcDecision([], comps, per, Verdict(st)))


def _check_omega(f, d, s) -> Optional[str]:
    return None  # soundness is re-derived on the recomputed object in check_report


_DECODERS = {
    "zigzag": _check_zigzag,
    "long_zigzag": _check_long_zigzag,
    "leo": _check_leo,
    "raines": _check_raines,
    "retract": _check_retract,
    "arc": _check_arc,
    "non_contraction": _check_non_contraction,
    "omega": _check_omega,
}


def _check_orbit_entry(f, d) -> Optional[str]:
    _keys(d, {"orbit", "folding", "b_endpoint", "endpoint", "double_spiral", "hypotheses_used",
              "notes"}, "orbit entry")
    orbit = _orbit(d["orbit"])
    validate_orbit(orbit, f)
    st, p, _ = _verdict_shell(d["double_spiral"], "double_spiral")
    if st is Status.PROVEN:
        _keys(p, {"left", "right", "cycle_factor"}, "double_spiral")
        ch = OntoChains([_iv(x) for x in p["left"]], [_iv(x) for x in p["right"]], _r(p["cycle_factor"]))
        return check_onto_chains(f, orbit, ch)
    return None


# comparison ----------------------------------------------------------------------------

def first_difference(a, b, path: str = "") -> Optional[str]:
    if type(a) is not type(b):
        return path or "/"
    if isinstance(a, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                return f"{path}/{k}"
            d = first_difference(a[k], b[k], f"{path}/{k}")
            if d:
                return d
        return None
    if isinstance(a, list):
        if len(a) != len(b):
            return path or "/"
        for i, (x, y) in enumerate(zip(a, b)):
            d = first_difference(x, y, f"{path}/{i}")
            if d:
                return d
        return None
    return None if a == b else (path or "/")


def load_reports(text: str) -> list[dict]:
    """Parse one report or several concatenated ones (as written for a whole gallery)."""
    dec = json.JSONDecoder()
    docs, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        try:
            doc, pos = dec.raw_decode(text, pos)
        except json.JSONDecodeError as e:
            raise ReportFormatError(f"not valid JSON: {e}") from None
        if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
            raise ReportFormatError(f"not an {SCHEMA} document")
        docs.append(doc)
    if not docs:
        raise ReportFormatError("empty document")
    return docs


def check_report(doc: dict) -> Optional[str]:
    """None when every certificate re-validates; otherwise the first failing path and reason."""
    try:
        return _check(doc)
    except (ValueError, KeyError, TypeError, IndexError) as e:
        return f"malformed certificate: {e}"


def _check(doc: dict) -> Optional[str]:
    keys = set(doc)
    if not REQUIRED_KEYS <= keys or not keys <= TOP_KEYS:
        return f"/: unexpected top-level fields {sorted((keys - TOP_KEYS) | (REQUIRED_KEYS - keys))}"
    if doc["tool"] != {"name": "ild", "version": __version__}:
        return "/tool: produced by a different tool version"
    m = _keys(doc["map"], {"name", "digest", "points"}, "map")
    f = PLMap([(_r(x), _r(y)) for x, y in m["points"]], name=m["name"] or None)
    if f.digest() != m["digest"]:
        return "/map/digest: digest does not match the breakpoints"
    s = Settings.from_data(doc["settings"])
    props = doc["properties"]
    if not isinstance(props, dict) or not set(props) <= set(SECTIONS):
        return f"/properties: unknown sections {sorted(set(props) - set(SECTIONS))}"
    for name in SECTIONS:
        if name in props and name in _DECODERS:
            err = _DECODERS[name](f, props[name], s)
            if err:
                return f"/properties/{name}: {err}"
    for i, entry in enumerate(doc["orbits"]):
        err = _check_orbit_entry(f, entry)
        if err:
            return f"/orbits/{i}: {err}"
    # recompute everything from the recorded settings
    fresh = compute_sections(f, s, [n for n in SECTIONS if n in props])
    if "omega" in fresh:
        err = check_omega(f, fresh["omega"])
        if err:
            return f"/properties/omega: {err}"
    for name, obj in fresh.items():
        d = first_difference(to_data(obj), props[name], f"/properties/{name}")
        if d:
            return f"{d}: does not match recomputation"
    if doc["orbits"]:
        orbits = [_orbit(e["orbit"]) for e in doc["orbits"]]
        again = [to_data(pc) for pc in classify_orbits(f, s, orbits)]
        d = first_difference(again, doc["orbits"], "/orbits")
        if d:
            return f"{d}: does not match recomputation"
    if "construction" in doc:
        d = first_difference(to_data(construction_section(f, s)), doc["construction"], "/construction")
        if d:
            return f"{d}: does not match recomputation"
    if "timing" in doc and doc["timing"] is not None and not isinstance(doc["timing"], dict):
        return "/timing: must be an object"
    return None


__all__ = ["SCHEMA", "SECTIONS", "ANALYZE_SECTIONS", "Settings", "default_settings", "ReportFormatError",
           "compute_sections", "classify_orbits", "construction_section", "build_report", "analyze",
           "dumps", "load_reports", "check_report", "first_difference", "map_data"]

"""Command-line front end: ``ild <verb> <map> [flags]``.

Exit codes: 0 ok, 1 certificate failure, 2 input error, 3 lap budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Optional

from . import report as rp
from .asymptotics import pull_back
from .ilim import NotRecurrent
from .mapspec import ConsistencyError, ParseError, parse_map, parse_orbit
from .numerics import Interval, RatSyntaxError, parse_rat
from .plmap import GALLERY_NAMES, BudgetExceeded, PLMap, SpecError, gallery, gallery_map
from .svg import DEFAULT_PRECISION, render

OK, CERT_FAILURE, INPUT_ERROR, BUDGET = 0, 1, 2, 3

PROPERTIES = {
    "zigzag-free": "zigzag",
    "long-zigzag": "long_zigzag",
    "leo": "leo",
    "raines": "raines",
    "omega": "omega",
    "rn": "rn",
    "retractable": "retract",
    "non-contraction": "non_contraction",
    "recurrence": "recurrence",
}


class InputError(Exception):
    pass


def load_map(source: str) -> PLMap:
    if source.startswith("gallery:"):
        name = source.split(":", 1)[1]
        try:
            return gallery_map(name)
        except KeyError:
            raise InputError(f"unknown gallery map {name!r}; known: {', '.join(GALLERY_NAMES)}") from None
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {source}: {e.strerror}") from None
    try:
        return parse_map(text).to_map()
    except ParseError as e:
        raise InputError(f"{source}:{e.line}:{e.column}: {e.message}") from None


def _rat(text: Optional[str], flag: str):
    if text is None:
        return None
    try:
        return parse_rat(text)
    except RatSyntaxError as e:
        raise InputError(f"{flag}: {e}") from None


def _orbit_text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read {arg[1:]}: {e.strerror}") from None
    return arg


def _settings(args) -> rp.Settings:
    kw = dict(depth=args.depth, horizon=args.horizon, retract_depth=args.retract_depth,
              fattening=_rat(args.fattening, "--fattening"), delta=_rat(args.delta, "--delta"),
              critical=_rat(args.critical, "--critical"))
    if args.budget is not None:
        kw["budget"] = args.budget
    return rp.default_settings(**kw)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _timed(args, fn):
    t = time.perf_counter()
    value = fn()
    return value, ({"seconds": round(time.perf_counter() - t, 3)} if args.timing else None)


# verbs ---------------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    s = _settings(args)
    if args.map == "gallery:*":
        docs = []
        for entry in gallery():
            doc, timing = _timed(args, lambda: rp.analyze(entry.map, s))
            if timing:
                doc["timing"] = timing
            docs.append(doc)
        _emit("".join(rp.dumps(d) for d in docs), args.out)
        return OK
    f = load_map(args.map)
    orbits = [parse_orbit(_orbit_text(o), f) for o in args.orbit or ()]
    doc, timing = _timed(args, lambda: rp.analyze(f, s, orbits))
    if timing:
        doc["timing"] = timing
    _emit(rp.dumps(doc), args.out)
    return OK


def cmd_classify(args) -> int:
    f = load_map(args.map)
    if not args.orbit:
        raise InputError("classify needs --orbit")
    s = _settings(args)
    orbits = [parse_orbit(_orbit_text(o), f) for o in args.orbit]
    classes = rp.classify_orbits(f, s, orbits)
    _emit(rp.dumps(rp.build_report(f, s, {}, classes)), args.out)
    return OK


def cmd_certify(args) -> int:
    f = load_map(args.map)
    s = _settings(args)
    section = PROPERTIES[args.property]
    if section == "non_contraction" and s.delta is None:
        raise InputError("non-contraction needs --delta")
    names = ["omega", section] if section in ("rn", "retract") else [section]
    _emit(rp.dumps(rp.build_report(f, s, rp.compute_sections(f, s, names))), args.out)
    return OK


def cmd_arc_check(args) -> int:
    f = load_map(args.map)
    s = _settings(args)
    _emit(rp.dumps(rp.build_report(f, s, rp.compute_sections(f, s, ["arc"]))), args.out)
    return OK


def cmd_retract_probe(args) -> int:
    f = load_map(args.map)
    s = _settings(args)
    _emit(rp.dumps(rp.build_report(f, s, rp.compute_sections(f, s, ["omega", "retract"]))), args.out)
    return OK


def cmd_construct_endpoint(args) -> int:
    f = load_map(args.map)
    s = _settings(args)
    if s.critical is None:
        raise InputError("construct-endpoint needs --critical")
    if s.critical not in f.critical_set():
        raise InputError(f"{args.critical} is not a critical point of the map")
    try:
        section = rp.construction_section(f, s)
    except NotRecurrent as e:
        print(f"ild: NotRecurrent: {e}", file=sys.stderr)
        return INPUT_ERROR
    _emit(rp.dumps(rp.build_report(f, s, {}, construction=section)), args.out)
    return OK


def cmd_render(args) -> int:
    f = load_map(args.map)
    box = None
    if args.pullback:
        lo, _, hi = args.pullback.partition(",")
        if not args.orbit:
            raise InputError("--pullback needs --orbit")
        orbit = parse_orbit(_orbit_text(args.orbit[0]), f)
        j0 = Interval(_rat(lo, "--pullback"), _rat(hi, "--pullback"))
        box = pull_back(f, j0, orbit, min(args.depth, 12)).intervals
    svg = render(f, args.iterate, args.svg_precision, cobweb=_rat(args.cobweb, "--cobweb"),
                 pullback=box, budget=args.budget)
    _emit(svg, args.out)
    return OK


def cmd_check_cert(args) -> int:
    try:
        text = Path(args.report).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {args.report}: {e.strerror}") from None
    try:
        docs = rp.load_reports(text)
    except rp.ReportFormatError as e:
        raise InputError(str(e)) from None
    for i, doc in enumerate(docs):
        err = rp.check_report(doc)
        if err:
            where = f"document {i}: " if len(docs) > 1 else ""
            print(f"ild: certificate failure: {where}{err}", file=sys.stderr)
            return CERT_FAILURE
    print(f"ok: {len(docs)} report(s) re-validated")
    return OK


# parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=64, help="search depth (default 64)")
    common.add_argument("--horizon", type=int, default=4096, help="orbit horizon (default 4096)")
    common.add_argument("--budget", type=int, default=None, help="lap budget (default 10^6 or ILD_BUDGET)")
    common.add_argument("--retract-depth", type=int, default=32, help="pull-back depth (default 32)")
    common.add_argument("--fattening", help="initial cover fattening, p/q")
    common.add_argument("--delta", help="neighbourhood radius for non-contraction, p/q")
    common.add_argument("--critical", help="critical point, p/q")
    common.add_argument("--orbit", action="append", help="backward orbit text, or @file")
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--timing", action="store_true", help="record wall time (breaks byte identity)")

    p = argparse.ArgumentParser(prog="ild", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("analyze", parents=[common], help="run every property check").add_argument("map")
    sub.add_parser("classify", parents=[common], help="classify orbits").add_argument("map")
    c = sub.add_parser("certify", parents=[common], help="check a single property")
    c.add_argument("property", choices=sorted(PROPERTIES))
    c.add_argument("map")
    sub.add_parser("arc-check", parents=[common], help="decide whether the inverse limit is an arc").add_argument("map")
    sub.add_parser("retract-probe", parents=[common], help="retractability along the limit set").add_argument("map")
    sub.add_parser("construct-endpoint", parents=[common], help="build an endpoint orbit").add_argument("map")
    r = sub.add_parser("render", parents=[common], help="draw an SVG")
    r.add_argument("map")
    r.add_argument("--iterate", type=int, default=1)
    r.add_argument("--cobweb", help="cobweb seed, p/q")
    r.add_argument("--pullback", help="initial interval lo,hi (with --orbit)")
    r.add_argument("--svg-precision", type=int, default=DEFAULT_PRECISION)
    sub.add_parser("check-cert", help="re-validate a report").add_argument("report")
    return p


VERBS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "certify": cmd_certify,
    "arc-check": cmd_arc_check,
    "retract-probe": cmd_retract_probe,
    "construct-endpoint": cmd_construct_endpoint,
    "render": cmd_render,
    "check-cert": cmd_check_cert,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "budget", None) is not None:
        os.environ["ILD_BUDGET"] = str(args.budget)
    try:
        return VERBS[args.verb](args)
    except InputError as e:
        print(f"ild: {e}", file=sys.stderr)
        return INPUT_ERROR
    except ParseError as e:
        print(f"ild: parse error at {e.line}:{e.column}: {e.message}", file=sys.stderr)
        return INPUT_ERROR
    except ConsistencyError as e:
        print(f"ild: ConsistencyError({e.k}): {e}", file=sys.stderr)
        return INPUT_ERROR
    except SpecError as e:
        print(f"ild: invalid map: {e}", file=sys.stderr)
        return INPUT_ERROR
    except BudgetExceeded as e:
        print(f"ild: budget exceeded: {e}", file=sys.stderr)
        return BUDGET


if __name__ == "__main__":
    sys.exit(main())

"""Line-oriented text format for maps (``.ildmap``) and backward orbits (``.ildorbit``).

A map document looks like::

    map minc
    meta source figure
    point 0 0
    point 1/3 1      # comments run to end of line
    ...
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .numerics import Q, RatSyntaxError, fmt_rat, parse_rat
from .plmap import PLMap, SpecError

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.@-]*$")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class ConsistencyError(ValueError):
    """Link ``k`` of a backward orbit fails f(x_k) = x_{k-1}."""

    def __init__(self, k: int, message: str = ""):
        super().__init__(message or f"orbit link {k} is inconsistent")
        self.k = k


@dataclass
class MapSpecDocument:
    name: str
    breakpoints: list[tuple[Q, Q]]
    metadata: dict[str, str] = field(default_factory=dict)

    def to_map(self) -> PLMap:
        return PLMap(self.breakpoints, self.name)


def _tokens(line: str) -> list[tuple[int, str]]:
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _rat(tok: tuple[int, str], lineno: int) -> Q:
    col, text = tok
    try:
        return parse_rat(text)
    except RatSyntaxError as e:
        raise ParseError(lineno, col + e.column, str(e)) from None


def parse_map(text: str) -> MapSpecDocument:
    name: Optional[str] = None
    points: list[tuple[Q, Q]] = []
    meta: dict[str, str] = {}
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0].rstrip()
        toks = _tokens(line)
        if not toks:
            continue
        col, kw = toks[0]
        if kw == "map":
            if name is not None:
                raise ParseError(lineno, col, "duplicate 'map' header")
            if len(toks) != 2 or not _NAME.match(toks[1][1]):
                raise ParseError(lineno, col, "expected 'map <name>'")
            name = toks[1][1]
        elif kw == "point":
            if len(toks) != 3:
                c = toks[3][0] if len(toks) > 3 else len(line) + 1
                raise ParseError(lineno, c, "expected 'point <x> <y>'")
            points.append((_rat(toks[1], lineno), _rat(toks[2], lineno)))
        elif kw == "meta":
            if len(toks) < 3:
                raise ParseError(lineno, col, "expected 'meta <key> <value>'")
            key = toks[1][1]
            if key in meta:
                raise ParseError(lineno, toks[1][0], f"duplicate meta key {key!r}")
            meta[key] = line[toks[2][0] - 1:].strip()
        else:
            raise ParseError(lineno, col, f"unknown directive {kw!r}")
    if name is None:
        raise ParseError(1, 1, "missing 'map <name>' header")
    points.sort()
    PLMap(points, name)  # raises SpecError on invalid geometry
    return MapSpecDocument(name, points, meta)


def serialize(doc: MapSpecDocument) -> str:
    lines = [f"map {doc.name}"]
    lines += [f"meta {k} {v}" for k, v in doc.metadata.items()]
    lines += [f"point {fmt_rat(x)} {fmt_rat(y)}" for x, y in sorted(doc.breakpoints)]
    return "\n".join(lines) + "\n"


def document_of(f: PLMap, name: Optional[str] = None) -> MapSpecDocument:
    return MapSpecDocument(name or f.name or "unnamed", list(f.breakpoints))


# orbits ----------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSpec:
    """Backward orbit x_0, x_1, ... with f(x_{k+1}) = x_k.

    ``cycle`` continues the prefix: x_{m+1+j} = cycle[j mod len(cycle)].
    """

    prefix: tuple[Q, ...]
    cycle: tuple[Q, ...] = ()

    def __getitem__(self, k: int) -> Q:
        m = len(self.prefix)
        if k < m:
            return self.prefix[k]
        if not self.cycle:
            raise IndexError(k)
        return self.cycle[(k - m) % len(self.cycle)]

    @property
    def infinite(self) -> bool:
        return bool(self.cycle)

    def length(self) -> Optional[int]:
        return None if self.cycle else len(self.prefix)

    def coords(self, n: int) -> list[Q]:
        return [self[k] for k in range(n)]

    def shift(self, j: int) -> "OrbitSpec":
        """The point (x_j, x_{j+1}, ...)."""
        if j <= len(self.prefix):
            return OrbitSpec(self.prefix[j:], self.cycle)
        if not self.cycle:
            raise IndexError(j)
        r = (j - len(self.prefix)) % len(self.cycle)
        return OrbitSpec((), self.cycle[r:] + self.cycle[:r])

    def __str__(self) -> str:
        s = ", ".join(fmt_rat(x) for x in self.prefix)
        if self.cycle:
            c = ", ".join(fmt_rat(x) for x in self.cycle)
            s = f"{s} | cycle: {c}" if s else f"| cycle: {c}"
        return s

    def to_data(self):
        return {"prefix": [fmt_rat(x) for x in self.prefix],
                "cycle": [fmt_rat(x) for x in self.cycle]}


def _rat_list(text: str, offset: int) -> list[Q]:
    out = []
    pos = 0
    for piece in text.split(","):
        stripped = piece.strip()
        col = offset + pos + (len(piece) - len(piece.lstrip())) + 1
        if not stripped:
            raise ParseError(1, col, "empty entry in coordinate list")
        try:
            out.append(parse_rat(stripped))
        except RatSyntaxError as e:
            raise ParseError(1, col + e.column, str(e)) from None
        pos += len(piece) + 1
    return out


def parse_orbit_text(text: str) -> OrbitSpec:
    body = " ".join(l.split("#", 1)[0] for l in text.replace("\r\n", "\n").split("\n")).rstrip()
    head, bar, tail = body.partition("|")
    prefix = _rat_list(head, 0) if head.strip() else []
    cycle: list[Q] = []
    if bar:
        t = tail.lstrip()
        start = len(head) + 1 + (len(tail) - len(t))
        if not t.startswith("cycle:"):
            raise ParseError(1, start + 1, "expected 'cycle:' after '|'")
        cycle = _rat_list(t[len("cycle:"):], start + len("cycle:"))
        if not cycle:
            raise ParseError(1, start + 1, "empty cycle")
    if not prefix and not cycle:
        raise ParseError(1, 1, "empty orbit")
    return OrbitSpec(tuple(prefix), tuple(cycle))


def validate_orbit(orbit: OrbitSpec, f: PLMap) -> OrbitSpec:
    for k, x in enumerate(orbit.prefix + orbit.cycle):
        if not 0 <= x <= 1:
            raise ConsistencyError(k, f"coordinate {k} = {fmt_rat(x)} is outside [0, 1]")
    seq = list(orbit.prefix) + list(orbit.cycle)
    for k in range(1, len(seq)):
        if f(seq[k]) != seq[k - 1]:
            raise ConsistencyError(
                k, f"f(x_{k}) = {fmt_rat(f(seq[k]))} but x_{k - 1} = {fmt_rat(seq[k - 1])}")
    if orbit.cycle:
        k = len(seq)
        if f(orbit.cycle[0]) != seq[k - 1]:
            raise ConsistencyError(
                k, f"cycle seam: f(x_{k}) = {fmt_rat(f(orbit.cycle[0]))} but x_{k - 1} = {fmt_rat(seq[k - 1])}")
    return orbit


def parse_orbit(text: str, f: Optional[PLMap] = None) -> OrbitSpec:
    orbit = parse_orbit_text(text)
    return validate_orbit(orbit, f) if f is not None else orbit


__all__ = ["ParseError", "ConsistencyError", "SpecError", "MapSpecDocument", "OrbitSpec",
           "parse_map", "serialize", "document_of", "parse_orbit", "parse_orbit_text",
           "validate_orbit"]

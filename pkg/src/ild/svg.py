"""Deterministic SVG drawings of maps, iterates, cobwebs and pull-back boxes.

The drawing lives in the unit square (y up), so every coordinate is an exact
rational written as a fixed-precision decimal. This is the only place where
decimals are produced.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .numerics import Interval, Q
from .plmap import PLMap

DEFAULT_PRECISION = 9
PIXELS = 512


def decimal(x: Q, precision: int = DEFAULT_PRECISION) -> str:
    """Round half to even at ``precision`` digits, then drop trailing zeros."""
    n = round(Q(x) * 10**precision)
    if n == 0 or precision == 0:
        return str(n)
    sign = "-" if n < 0 else ""
    digits = str(abs(n)).rjust(precision + 1, "0")
    whole, frac = digits[:-precision], digits[-precision:].rstrip("0")
    return sign + whole + ("." + frac if frac else "")


class _Canvas:
    def __init__(self, precision: int):
        self.p = precision
        self.items: list[str] = []

    def pt(self, x: Q, y: Q) -> str:
        return f"{decimal(x, self.p)},{decimal(1 - Q(y), self.p)}"

    def polyline(self, pts: Sequence[tuple[Q, Q]], cls: str) -> None:
        body = " ".join(self.pt(x, y) for x, y in pts)
        self.items.append(f'<polyline class="{cls}" points="{body}"/>')

    def line(self, a: tuple[Q, Q], b: tuple[Q, Q], cls: str) -> None:
        self.polyline([a, b], cls)

    def rect(self, xs: Interval, ys: Interval, cls: str) -> None:
        self.polyline([(xs.lo, ys.lo), (xs.hi, ys.lo), (xs.hi, ys.hi), (xs.lo, ys.hi), (xs.lo, ys.lo)], cls)

    def render(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{PIXELS}" height="{PIXELS}" '
                f'viewBox="-0.05 -0.05 1.1 1.1" data-precision="{self.p}">')
        style = ("<style>polyline{fill:none;stroke-width:0.004}"
                 ".frame{stroke:#000}.diagonal{stroke:#999;stroke-dasharray:0.01}"
                 ".critical{stroke:#c33;stroke-width:0.002;stroke-dasharray:0.005}"
                 ".graph{stroke:#036}.cobweb{stroke:#393;stroke-width:0.002}"
                 ".pullback{stroke:#a60;stroke-dasharray:0.008}</style>")
        esc = title.replace("&", "&amp;").replace("<", "&lt;")
        return "\n".join([head, f"<title>{esc}</title>", style, *self.items, "</svg>"]) + "\n"


def render(f: PLMap, iterate: int = 1, precision: int = DEFAULT_PRECISION, diagonal: bool = True,
           cobweb: Optional[Q] = None, cobweb_steps: int = 32,
           pullback: Optional[Sequence[Interval]] = None, budget: Optional[int] = None) -> str:
    c = _Canvas(precision)
    zero, one = Q(0), Q(1)
    c.rect(Interval(0, 1), Interval(0, 1), "frame")
    if diagonal:
        c.line((zero, zero), (one, one), "diagonal")
    part = f.iterate(iterate, budget)
    for t in part.turning_points():
        c.line((t, zero), (t, one), "critical")
    g = part.graph
    c.polyline(list(zip(g.xs, g.ys)), "graph")
    if cobweb is not None:
        x = Q(cobweb)
        pts = [(x, zero)]
        for _ in range(cobweb_steps):
            y = g(x)
            pts += [(x, y), (y, y)]
            x = y
        c.polyline(pts, "cobweb")
    if pullback:
        # box k spans J_{k+1} horizontally and J_k vertically: the graph of f crosses it
        for k in range(len(pullback) - 1):
            c.rect(pullback[k + 1], pullback[k], "pullback")
    name = f.name or "map"
    return c.render(f"{name}, iterate {iterate}")


__all__ = ["decimal", "render", "DEFAULT_PRECISION"]

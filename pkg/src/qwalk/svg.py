"""Minimal self-contained SVG 1.1 line/scatter plots.

No external plotting library: the output is a single XML document with
axes, ticks, optional log scales and a legend. Enough to eyeball a curve
or a scaling plot, nothing more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=170, top=40, bottom=55)
COLORS = ["#222222", "#1f5fbf", "#8b4513", "#2e8b57", "#c03030", "#7a3fa0"]


@dataclass
class Series:
    label: str
    x: list
    y: list
    style: str = "points"   # "points" or "line"
    color: str | None = None
    dashed: bool = False


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False
    series: list[Series] = field(default_factory=list)

    def add(self, *args, **kwargs) -> "Plot":
        self.series.append(Series(*args, **kwargs))
        return self


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float, log: bool) -> str:
    if log:
        e = int(round(math.log10(v)))
        return f"1e{e}"
    return f"{v:.4g}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0 ** e for e in range(a, b + 1)]
    span = hi - lo
    raw = span / 5 if span > 0 else 1.0
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _finite(vals, log):
    return [v for v in vals if math.isfinite(v) and (v > 0 or not log)]


def render(plot: Plot) -> str:
    """Return the SVG document as a string."""
    xs = _finite([x for s in plot.series for x in s.x], plot.logx)
    ys = _finite([y for s in plot.series for y in s.y], plot.logy)
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if plot.logx:
        xlo, xhi = 10 ** math.floor(math.log10(xlo)), 10 ** math.ceil(math.log10(xhi))
    if plot.logy:
        ylo, yhi = 10 ** math.floor(math.log10(ylo)), 10 ** math.ceil(math.log10(yhi))
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0

    L, R, T, B = MARGIN["left"], MARGIN["right"], MARGIN["top"], MARGIN["bottom"]
    pw, ph = WIDTH - L - R, HEIGHT - T - B

    def tx(v):
        if plot.logx:
            return L + pw * (math.log10(v) - math.log10(xlo)) / (math.log10(xhi) - math.log10(xlo))
        return L + pw * (v - xlo) / (xhi - xlo)

    def ty(v):
        if plot.logy:
            return T + ph * (1 - (math.log10(v) - math.log10(ylo)) / (math.log10(yhi) - math.log10(ylo)))
        return T + ph * (1 - (v - ylo) / (yhi - ylo))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if plot.title:
        out.append(f'<text x="{L + pw / 2:.1f}" y="{T - 14}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{escape(plot.title)}</text>')
    for v in _ticks(xlo, xhi, plot.logx):
        x = tx(v)
        out.append(f'<line x1="{_fmt(x)}" y1="{T + ph}" x2="{_fmt(x)}" y2="{T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{T + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_tick_label(v, plot.logx)}</text>')
    for v in _ticks(ylo, yhi, plot.logy):
        y = ty(v)
        out.append(f'<line x1="{L - 5}" y1="{_fmt(y)}" x2="{L}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_tick_label(v, plot.logy)}</text>')
    if plot.xlabel:
        out.append(f'<text x="{L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{escape(plot.xlabel)}</text>')
    if plot.ylabel:
        out.append(f'<text x="16" y="{T + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="12" transform="rotate(-90 16 {T + ph / 2:.1f})">{escape(plot.ylabel)}</text>')

    out.append(f'<clipPath id="area"><rect x="{L}" y="{T}" width="{pw}" height="{ph}"/></clipPath>')
    for k, s in enumerate(plot.series):
        color = s.color or COLORS[k % len(COLORS)]
        pts = [(tx(x), ty(y)) for x, y in zip(s.x, s.y)
               if math.isfinite(x) and math.isfinite(y)
               and (x > 0 or not plot.logx) and (y > 0 or not plot.logy)]
        if s.style == "line":
            if pts:
                dash = ' stroke-dasharray="6,4"' if s.dashed else ""
                path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
                out.append(f'<polyline clip-path="url(#area)" fill="none" stroke="{color}" '
                           f'stroke-width="1.5"{dash} points="{path}"/>')
        else:
            for a, b in pts:
                out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="2.5" fill="{color}"/>')
        ly = T + 14 + 18 * k
        lx = L + pw + 12
        if s.style == "line":
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="1.5"{dash}/>')
        else:
            out.append(f'<circle cx="{lx + 9}" cy="{ly - 4}" r="3" fill="{color}"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write(plot: Plot, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render(plot))

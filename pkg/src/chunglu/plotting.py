"""Minimal static SVG output: line/scatter charts and heatmap grids."""

from __future__ import annotations

import math
from html import escape
from typing import Sequence

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=55)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= n:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        out.append(round(v, 12))
        v += step
    return out


def _fmt(v: float) -> str:
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-2):
        return f"{v:.0e}"
    return f"{v:g}"


def line_chart(series: Sequence[dict], title: str = "", xlabel: str = "", ylabel: str = "",
               logy: bool = False) -> str:
    """Each series: ``{"label", "x", "y", "style": "line"|"marker"}``."""
    xs = [x for s in series for x in s["x"]]
    ys = [y for s in series for y in s["y"] if not (logy and y <= 0)]
    tf = (lambda v: math.log10(v)) if logy else (lambda v: v)
    x0, x1 = min(xs), max(xs)
    y0, y1 = (tf(min(ys)), tf(max(ys))) if ys else (0.0, 1.0)
    if not logy:
        y0 = min(y0, 0.0)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + ph - (tf(v) - y0) / (y1 - y0) * ph

    parts = [_header(title)]
    parts.append(f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
                 'fill="none" stroke="#333"/>')
    for t in _ticks(x0, x1):
        parts.append(f'<text x="{px(t):.1f}" y="{MARGIN["top"] + ph + 18}" font-size="11" '
                     f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        label = _fmt(10 ** t) if logy else _fmt(t)
        yy = MARGIN["top"] + ph - (t - y0) / (y1 - y0) * ph
        parts.append(f'<text x="{MARGIN["left"] - 6}" y="{yy + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{label}</text>')
    for idx, s in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        pts = [(px(x), py(y)) for x, y in zip(s["x"], s["y"]) if not (logy and y <= 0)]
        if s.get("style", "line") == "line" and len(pts) > 1:
            d = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
            dash = ' stroke-dasharray="6,4"' if s.get("dashed") else ""
            parts.append(f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>')
        else:
            for a, b in pts:
                parts.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="3" fill="none" stroke="{color}"/>')
        ly = MARGIN["top"] + 14 + 18 * idx
        lx = WIDTH - MARGIN["right"] + 12
        parts.append(f'<rect x="{lx}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{lx + 16}" y="{ly + 1}" font-size="11">{escape(s["label"])}</text>')
    parts.append(_axis_labels(xlabel, ylabel))
    parts.append("</svg>\n")
    return "\n".join(parts)


def heatmap(grid: Sequence[Sequence[float]], xvals: Sequence[float], yvals: Sequence[float],
            title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Rows of ``grid`` follow ``yvals`` (bottom to top), columns ``xvals``."""
    flat = [v for row in grid for v in row if v == v]
    lo, hi = (min(flat), max(flat)) if flat else (0.0, 1.0)
    span = (hi - lo) or 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    cw = pw / max(len(xvals), 1)
    ch = ph / max(len(yvals), 1)
    parts = [_header(title)]
    for r, row in enumerate(grid):
        for c, v in enumerate(row):
            x = MARGIN["left"] + c * cw
            y = MARGIN["top"] + ph - (r + 1) * ch
            fill = _color((v - lo) / span) if v == v else "#ccc"
            parts.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{cw + 0.5:.1f}" height="{ch + 0.5:.1f}" '
                         f'fill="{fill}"><title>{v:.4g}</title></rect>')
    step = max(1, len(xvals) // 8)
    for c in range(0, len(xvals), step):
        parts.append(f'<text x="{MARGIN["left"] + (c + 0.5) * cw:.1f}" y="{MARGIN["top"] + ph + 18}" '
                     f'font-size="11" text-anchor="middle">{_fmt(xvals[c])}</text>')
    step = max(1, len(yvals) // 8)
    for r in range(0, len(yvals), step):
        parts.append(f'<text x="{MARGIN["left"] - 6}" y="{MARGIN["top"] + ph - (r + 0.5) * ch + 4:.1f}" '
                     f'font-size="11" text-anchor="end">{_fmt(yvals[r])}</text>')
    lx = WIDTH - MARGIN["right"] + 20
    for s in range(11):
        yy = MARGIN["top"] + ph - (s + 1) * ph / 11
        parts.append(f'<rect x="{lx}" y="{yy:.1f}" width="16" height="{ph / 11 + 0.5:.1f}" fill="{_color(s / 10)}"/>')
    parts.append(f'<text x="{lx + 22}" y="{MARGIN["top"] + 10}" font-size="11">{hi:.3g}</text>')
    parts.append(f'<text x="{lx + 22}" y="{MARGIN["top"] + ph}" font-size="11">{lo:.3g}</text>')
    parts.append(_axis_labels(xlabel, ylabel))
    parts.append("</svg>\n")
    return "\n".join(parts)


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    # blue -> white -> red
    if t < 0.5:
        s = t / 0.5
        r, g, b = int(40 + 215 * s), int(70 + 185 * s), 255
    else:
        s = (t - 0.5) / 0.5
        r, g, b = 255, int(255 - 205 * s), int(255 - 215 * s)
    return f"#{r:02x}{g:02x}{b:02x}"


def _header(title: str) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n'
            f'<text x="{WIDTH / 2}" y="22" font-size="15" text-anchor="middle">{escape(title)}</text>')


def _axis_labels(xlabel: str, ylabel: str) -> str:
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    cx = MARGIN["left"] + (WIDTH - MARGIN["left"] - MARGIN["right"]) / 2
    cy = MARGIN["top"] + ph / 2
    return (f'<text x="{cx:.1f}" y="{HEIGHT - 14}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>\n'
            f'<text x="18" y="{cy:.1f}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 18 {cy:.1f})">{escape(ylabel)}</text>')

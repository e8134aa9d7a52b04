"""Minimal SVG line charts for diagnostic figures."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * step:
        out.append(round(v, 12))
        v += step
    return out


def line_chart(series: Mapping[str, tuple[Sequence[float], Sequence[float]]], path, *,
               title: str = "", xlabel: str = "", ylabel: str = "", logy: bool = False,
               width: int = 640, height: int = 400) -> Path:
    """Write ``series`` (name -> (xs, ys)) as polylines into an SVG file.

    Non-finite points (and nonpositive ones on a log axis) are skipped.
    """
    ml, mr, mt, mb = 70, 20, 30 if title else 15, 45
    pts = {}
    for name, (xs, ys) in series.items():
        keep = []
        for x, y in zip(xs, ys):
            x, y = float(x), float(y)
            if not (math.isfinite(x) and math.isfinite(y)) or (logy and y <= 0):
                continue
            keep.append((x, math.log10(y) if logy else y))
        pts[name] = keep
    allp = [p for v in pts.values() for p in v]
    if allp:
        x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
        y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = width - ml - mr, height - mt - mb

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">'
                   f'{escape(title)}</text>')
    for v in _ticks(x0, x1):
        out.append(f'<line x1="{sx(v):.2f}" y1="{mt + ph}" x2="{sx(v):.2f}" y2="{mt + ph + 4}" stroke="#444"/>')
        out.append(f'<text x="{sx(v):.2f}" y="{mt + ph + 16}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1):
        label = f"1e{v:g}" if logy else f"{v:g}"
        out.append(f'<line x1="{ml - 4}" y1="{sy(v):.2f}" x2="{ml}" y2="{sy(v):.2f}" stroke="#444"/>')
        out.append(f'<text x="{ml - 6}" y="{sy(v) + 4:.2f}" text-anchor="end">{label}</text>')
    if xlabel:
        out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{mt + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {mt + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (name, p) in enumerate(pts.items()):
        color = PALETTE[i % len(PALETTE)]
        if len(p) > 1:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        for x, y in p if len(p) <= 64 else ():
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" fill="{color}"/>')
        ly = mt + 14 + 14 * i
        out.append(f'<line x1="{ml + pw - 110}" y1="{ly - 4}" x2="{ml + pw - 92}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw - 88}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path

"""Minimal deterministic SVG line plots.

Hand-rolled polylines and axes so that figure files are byte-stable across
reruns (plotting libraries embed timestamps and session ids). Only what the
sweep figures need: multiple labeled series, nice-number ticks, a legend.
"""

from __future__ import annotations

import math

__all__ = ["line_plot"]

_PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
    "#bcbd22",
    "#e377c2",
]

_W, _H = 720, 460
_ML, _MR, _MT, _MB = 64, 16, 36, 48


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_plot(series, title: str, xlabel: str, ylabel: str) -> str:
    """Render labeled (xs, ys) series to an SVG document string.

    ``series`` is a list of (label, xs, ys) with equal-length sequences.
    """
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    drawable = [(lab, list(xs), list(ys)) for lab, xs, ys in series if len(xs)]
    if not drawable:
        parts.append(
            f'<text x="{_W / 2:.1f}" y="{_H / 2:.1f}" text-anchor="middle">no data</text></svg>'
        )
        return "\n".join(parts)

    x_lo = min(min(xs) for _, xs, _ in drawable)
    x_hi = max(max(xs) for _, xs, _ in drawable)
    y_lo = min(min(ys) for _, _, ys in drawable)
    y_hi = max(max(ys) for _, _, ys in drawable)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    px_w = _W - _ML - _MR
    px_h = _H - _MT - _MB

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y):
        return _MT + (y_hi - y) / (y_hi - y_lo) * px_h

    for t in _nice_ticks(x_lo, x_hi):
        x = sx(t)
        parts.append(f'<line x1="{x:.2f}" y1="{_MT + px_h}" x2="{x:.2f}" y2="{_MT + px_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{_MT + px_h + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        parts.append(f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
        parts.append(
            f'<line x1="{_ML}" y1="{y:.2f}" x2="{_ML + px_w}" y2="{y:.2f}" stroke="#dddddd" stroke-width="0.5"/>'
        )
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{px_w}" height="{px_h}" fill="none" stroke="black"/>'
    )
    parts.append(
        f'<text x="{_ML + px_w / 2:.1f}" y="{_H - 10}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MT + px_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT + px_h / 2:.1f})">{ylabel}</text>'
    )

    for idx, (label, xs, ys) in enumerate(drawable):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = _MT + 14 + 16 * idx
        parts.append(
            f'<line x1="{_ML + px_w - 150}" y1="{ly - 4}" x2="{_ML + px_w - 126}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{_ML + px_w - 120}" y="{ly}">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts)

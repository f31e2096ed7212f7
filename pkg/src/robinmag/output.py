"""CSV, JSON and SVG emission.

Floats are written with ``repr`` (shortest string that round-trips), so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .spectrum import SweepTable

SWEEP_HEADER = ("b", "m", "lambda", "converged", "n_used", "residual")
EFFECTIVE_HEADER = ("b", "e_value", "argmin_m")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def sweep_csv(table: SweepTable) -> str:
    return _csv_text(
        SWEEP_HEADER,
        ((r.b, r.m, r.lam, r.converged, r.n_used, r.residual) for r in table.rows),
    )


def effective_csv(per_b) -> str:
    return _csv_text(EFFECTIVE_HEADER, per_b)


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


# SVG chart

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e")


def line_style(m: int) -> str:
    """Solid for m in {0, 1}, dotted for m >= 2, dashed for m < 0."""
    if m < 0:
        return 'stroke-dasharray="9,5"'
    if m >= 2:
        return 'stroke-dasharray="2,4" stroke-linecap="round"'
    return ""


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    k = 0
    while first + k * step <= hi + 1e-9 * step:
        out.append(round(first + k * step, 12))
        k += 1
    return out


def sweep_svg(table: SweepTable, title: str = "lowest eigenvalue of each mode") -> str:
    pts = [(r.b, r.lam) for r in table.rows if r.converged and math.isfinite(r.lam)]
    if not pts:
        raise ValueError("no converged rows to plot")
    bs = [p[0] for p in pts]
    ls = [p[1] for p in pts]
    x0, x1 = min(bs), max(bs)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    y0, y1 = min(ls), max(ls)
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(b):
        return LEFT + (b - x0) / (x1 - x0) * pw

    def sy(v):
        return TOP + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.2f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        y = sy(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">b</text>')
    out.append(
        f'<text x="18" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + ph / 2:.2f})">lambda_m(b)</text>'
    )
    for i, m in enumerate(table.modes()):
        b, lam = table.curve(m)
        keep = [(bb, ll) for bb, ll in zip(b, lam) if math.isfinite(ll)]
        if not keep:
            continue
        color = PALETTE[i % len(PALETTE)]
        path = " ".join(f"{sx(bb):.2f},{sy(ll):.2f}" for bb, ll in keep)
        style = line_style(m)
        out.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2" {style}/>'
        )
        ly = TOP + 15 + 20 * i
        lx = WIDTH - RIGHT + 15
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 35}" y2="{ly}" stroke="{color}" '
            f'stroke-width="2" {style}/>'
        )
        out.append(f'<text x="{lx + 42}" y="{ly + 4}">m = {m}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

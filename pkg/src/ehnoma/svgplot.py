"""Minimal SVG line plot of sweep results (log-scaled outage axis).

Closed-form series are drawn as lines, Monte Carlo series as hollow square
markers in the same colour. Values below ``Y_MIN`` are pinned to ``Y_MIN``
and tagged ``class="clamped"``.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from pathlib import Path
from xml.sax.saxutils import escape

Y_MIN, Y_MAX = 1e-8, 1.0
WIDTH, HEIGHT = 760, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 250, 24, 55
DASHES = ("", "6,3", "2,2", "8,3,2,3")
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
          "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")
AXIS_LABELS = {
    "p_s_db": "P_s (dB)",
    "noise_db": "noise power (dB)",
    "sigma_e2": "channel estimation error variance",
    "sigma_ic2": "residual SIC power",
    "delta": "relay power split delta",
    "eta": "harvesting efficiency eta",
    "r1": "R1 (bit/s/Hz)",
    "r2": "R2 (bit/s/Hz)",
}
LOG_X_PARAMS = ("sigma_e2", "sigma_ic2")


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi == lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def emit_plot(rows, path, title: str = "") -> Path:
    """Render ``rows`` (one series per series x scheme x user x method) to SVG."""
    rows = [r for r in rows if r.outage is not None]
    if not rows:
        raise ValueError("emit_plot: no plottable rows")
    path = Path(path)

    series = OrderedDict()
    for r in rows:
        series.setdefault((r.series, r.scheme, r.user, r.method), []).append((r.value, r.outage))

    xs = [r.value for r in rows]
    log_x = rows[0].sweep_param in LOG_X_PARAMS and min(xs) > 0
    tx = math.log10 if log_x else (lambda v: v)
    x_lo, x_hi = tx(min(xs)), tx(max(xs))
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    p_min = min(max(r.outage, Y_MIN) for r in rows)
    y_lo, y_hi = min(math.floor(math.log10(p_min)), -1), math.log10(Y_MAX)

    def px(v):
        return LEFT + (tx(v) - x_lo) / (x_hi - x_lo) * pw

    def py(p):
        return TOP + (y_hi - math.log10(p)) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    if title:
        out.append(f'<text x="{LEFT + pw / 2:.1f}" y="14" text-anchor="middle">{escape(title)}</text>')

    # grid and ticks
    for e in range(int(y_lo), int(y_hi) + 1):
        y = py(10.0 ** e)
        out.append(f'<line x1="{LEFT}" y1="{y:.1f}" x2="{LEFT + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y + 4:.1f}" text-anchor="end">1e{e}</text>')
    if log_x:
        xticks = [10.0 ** e for e in range(math.ceil(x_lo - 1e-9), math.floor(x_hi + 1e-9) + 1)]
        xlabel = lambda v: f"1e{round(math.log10(v))}"  # noqa: E731
    else:
        xticks = _nice_ticks(x_lo, x_hi)
        xlabel = lambda v: f"{v:g}"  # noqa: E731
    for v in xticks:
        x = px(v)
        out.append(f'<line x1="{x:.1f}" y1="{TOP}" x2="{x:.1f}" y2="{TOP + ph}" stroke="#eee"/>')
        out.append(f'<text x="{x:.1f}" y="{TOP + ph + 16}" text-anchor="middle">{xlabel(v)}</text>')
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
               f'{escape(AXIS_LABELS.get(rows[0].sweep_param, rows[0].sweep_param))}</text>')
    out.append(f'<text transform="translate(18 {TOP + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">Outage probability</text>')

    # one colour per (scheme, user), one dash style per family member;
    # analytic = line, mc = hollow squares
    curves = OrderedDict()
    for (fam, scheme, user, method), pts in series.items():
        curves.setdefault((fam, scheme, user), {})[method] = sorted(pts)
    colour_of = {}
    dash_of = {}
    for idx, ((fam, scheme, user), methods) in enumerate(curves.items()):
        color = colour_of.setdefault((scheme, user), COLORS[len(colour_of) % len(COLORS)])
        dash = dash_of.setdefault(fam, DASHES[len(dash_of) % len(DASHES)])
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        for method, pts in methods.items():
            coords = [(px(v), py(min(max(p, Y_MIN), Y_MAX)), p < Y_MIN) for v, p in pts]
            if method == "analytic" and len(coords) > 1:
                d = " ".join(f"{x:.2f},{y:.2f}" for x, y, _ in coords)
                out.append(f'<polyline points="{d}" fill="none" stroke="{color}" '
                           f'stroke-width="1.5"{dash_attr}/>')
            for x, y, clamped in coords:
                extra = ' class="clamped"' if clamped else ""
                if method == "mc":
                    out.append(f'<rect x="{x - 3.5:.2f}" y="{y - 3.5:.2f}" width="7" height="7" '
                               f'fill="none" stroke="{color}"{extra}/>')
                elif clamped or len(coords) == 1:
                    fill = "none" if clamped else color
                    out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{fill}" '
                               f'stroke="{color}"{extra}/>')
        ly = TOP + 12 + 16 * idx
        lx = LEFT + pw + 10
        if "analytic" in methods:
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        if "mc" in methods:
            out.append(f'<rect x="{lx + 8.5}" y="{ly - 7.5}" width="7" height="7" fill="none" stroke="{color}"/>')
        label = f"{scheme} U{user}" + (f" [{fam}]" if fam else "")
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')

    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path

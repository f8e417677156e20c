"""Minimal self-contained SVG charts (no plotting toolchain dependency)."""

import math

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=50)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


class Axis:
    """Maps data coordinates to pixels, linearly or in log10."""

    def __init__(self, lo, hi, pix_lo, pix_hi, log=False):
        self.log = log
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi <= lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, v):
        v = math.log10(v) if self.log else v
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self, n=5):
        if self.log:
            lo, hi = math.floor(self.lo), math.ceil(self.hi)
            decades = range(int(lo), int(hi) + 1)
            return [10.0**d for d in decades if self.lo <= d <= self.hi] or [10.0**self.lo]
        span = self.hi - self.lo
        step = 10 ** math.floor(math.log10(span / max(n - 1, 1) + 1e-300))
        for mult in (1, 2, 5, 10):
            if span / (step * mult) <= n:
                step *= mult
                break
        first = math.ceil(self.lo / step) * step
        out = []
        v = first
        while v <= self.hi + 1e-12 * abs(step):
            out.append(v)
            v += step
        return out or [self.lo]

    def label(self, v):
        if self.log:
            exp = round(math.log10(v))
            return f"1e{exp}" if abs(exp) > 3 else f"{v:g}"
        return f"{v:g}"


def _finite_positive(values, log):
    vals = [v for v in values if np.isfinite(v)]
    if log:
        vals = [v for v in vals if v > 0]
    return vals


def _frame(title, xlabel, ylabel, ax_x, ax_y):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH/2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    parts.append(
        f'<rect x="{x0}" y="{y1}" width="{x1-x0}" height="{y0-y1}" '
        'fill="none" stroke="#333"/>'
    )
    for t in ax_x.ticks():
        px = ax_x(t)
        parts.append(f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0+4}" stroke="#333"/>')
        parts.append(
            f'<text x="{px:.1f}" y="{y0+18}" text-anchor="middle">{ax_x.label(t)}</text>'
        )
    for t in ax_y.ticks():
        py = ax_y(t)
        parts.append(f'<line x1="{x0-4}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="#333"/>')
        parts.append(
            f'<text x="{x0-8}" y="{py+4:.1f}" text-anchor="end">{ax_y.label(t)}</text>'
        )
    parts.append(
        f'<text x="{(x0+x1)/2:.0f}" y="{HEIGHT-12}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0+y1)/2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0+y1)/2:.0f})">{ylabel}</text>'
    )
    return parts


def line_chart(series, xlabel="", ylabel="", title="", logx=False, logy=False):
    """Render labelled (xs, ys) series as polylines; returns SVG text.

    series: list of (label, xs, ys).  Non-finite points are dropped; for
    log axes non-positive points are dropped too.
    """
    xs_all, ys_all = [], []
    for _, xs, ys in series:
        xs_all += _finite_positive(xs, logx)
        ys_all += _finite_positive(ys, logy)
    if not xs_all or not ys_all:
        xs_all, ys_all = [1.0], [1.0]
    ax_x = Axis(min(xs_all), max(xs_all), MARGIN["left"], WIDTH - MARGIN["right"], logx)
    ax_y = Axis(min(ys_all), max(ys_all), HEIGHT - MARGIN["bottom"], MARGIN["top"], logy)
    parts = _frame(title, xlabel, ylabel, ax_x, ax_y)
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = [
            f"{ax_x(x):.1f},{ax_y(y):.1f}"
            for x, y in zip(xs, ys)
            if np.isfinite(x) and np.isfinite(y)
            and (not logx or x > 0) and (not logy or y > 0)
        ]
        if pts:
            parts.append(
                f'<polyline points="{" ".join(pts)}" fill="none" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
        ly = MARGIN["top"] + 14 * (i + 1)
        parts.append(
            f'<text x="{WIDTH - MARGIN["right"] - 6}" y="{ly}" text-anchor="end" '
            f'fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def box_chart(groups, xlabel="", ylabel="", title="", logy=False):
    """Quartile boxes with min/max whiskers per labelled group."""
    vals_all = []
    for _, vals in groups:
        vals_all += _finite_positive(vals, logy)
    if not vals_all:
        vals_all = [1.0]
    ax_y = Axis(min(vals_all), max(vals_all), HEIGHT - MARGIN["bottom"], MARGIN["top"], logy)
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    slot = (x1 - x0) / max(len(groups), 1)

    class _CatAxis:
        log = False

        def ticks(self):
            return []

        def label(self, v):
            return ""

        def __call__(self, v):
            return x0

    parts = _frame(title, xlabel, ylabel, _CatAxis(), ax_y)
    for i, (label, vals) in enumerate(groups):
        vals = _finite_positive(vals, logy)
        cx = x0 + slot * (i + 0.5)
        parts.append(
            f'<text x="{cx:.1f}" y="{HEIGHT - MARGIN["bottom"] + 18}" '
            f'text-anchor="middle">{label}</text>'
        )
        if not vals:
            continue
        q1, q2, q3 = np.percentile(vals, [25, 50, 75])
        lo, hi = min(vals), max(vals)
        w = slot * 0.3
        color = PALETTE[i % len(PALETTE)]
        parts.append(
            f'<line x1="{cx:.1f}" y1="{ax_y(lo):.1f}" x2="{cx:.1f}" '
            f'y2="{ax_y(hi):.1f}" stroke="{color}"/>'
        )
        parts.append(
            f'<rect x="{cx-w:.1f}" y="{ax_y(q3):.1f}" width="{2*w:.1f}" '
            f'height="{abs(ax_y(q1)-ax_y(q3)):.1f}" fill="{color}" '
            'fill-opacity="0.3" stroke="#333"/>'
        )
        parts.append(
            f'<line x1="{cx-w:.1f}" y1="{ax_y(q2):.1f}" x2="{cx+w:.1f}" '
            f'y2="{ax_y(q2):.1f}" stroke="#333" stroke-width="2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def write_svg(path, svg_text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_text)

"""Static SVG plots for sweep curves and shortest-path scatters.

Hand-rolled SVG so that identical inputs produce byte-identical files;
no plotting library keeps that promise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f"]

_WIDTH, _HEIGHT = 720, 460
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 180, 40, 55


@dataclass
class Series:
    label: str
    xs: list
    ys: list


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def _axis_range(values):
    lo, hi = min(values), max(values)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("non-finite plot data")
    if hi == lo:
        pad = abs(hi) * 0.5 or 0.5
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


class _Canvas:
    def __init__(self, x_range, y_range, title, x_label, y_label):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
            f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
            f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
            f'<text x="{_WIDTH // 2}" y="24" font-size="15" text-anchor="middle" '
            f'font-family="sans-serif">{title}</text>',
        ]
        self._frame(x_label, y_label)

    def px(self, x):
        span = self.x1 - self.x0
        return _MARGIN_L + (x - self.x0) / span * (_WIDTH - _MARGIN_L - _MARGIN_R)

    def py(self, y):
        span = self.y1 - self.y0
        return _HEIGHT - _MARGIN_B - (y - self.y0) / span * (_HEIGHT - _MARGIN_T - _MARGIN_B)

    def _frame(self, x_label, y_label):
        left, right = _MARGIN_L, _WIDTH - _MARGIN_R
        top, bottom = _MARGIN_T, _HEIGHT - _MARGIN_B
        self.parts.append(
            f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
            f'fill="none" stroke="black"/>'
        )
        for k in range(5):
            xv = self.x0 + (self.x1 - self.x0) * k / 4
            yv = self.y0 + (self.y1 - self.y0) * k / 4
            xp, yp = self.px(xv), self.py(yv)
            self.parts.append(f'<line x1="{_fmt(xp)}" y1="{bottom}" x2="{_fmt(xp)}" '
                              f'y2="{bottom + 5}" stroke="black"/>')
            self.parts.append(f'<text x="{_fmt(xp)}" y="{bottom + 20}" font-size="11" '
                              f'text-anchor="middle" font-family="sans-serif">{_tick_label(xv)}</text>')
            self.parts.append(f'<line x1="{left - 5}" y1="{_fmt(yp)}" x2="{left}" '
                              f'y2="{_fmt(yp)}" stroke="black"/>')
            self.parts.append(f'<text x="{left - 8}" y="{_fmt(yp + 4)}" font-size="11" '
                              f'text-anchor="end" font-family="sans-serif">{_tick_label(yv)}</text>')
        self.parts.append(f'<text x="{(left + right) // 2}" y="{_HEIGHT - 14}" font-size="13" '
                          f'text-anchor="middle" font-family="sans-serif">{x_label}</text>')
        self.parts.append(f'<text x="18" y="{(top + bottom) // 2}" font-size="13" '
                          f'text-anchor="middle" font-family="sans-serif" '
                          f'transform="rotate(-90 18 {(top + bottom) // 2})">{y_label}</text>')

    def polyline(self, xs, ys, color, width=1.5):
        pts = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                          f'stroke-width="{width}"/>')

    def markers(self, xs, ys, color, radius=3.0):
        for x, y in zip(xs, ys):
            self.parts.append(f'<circle cx="{_fmt(self.px(x))}" cy="{_fmt(self.py(y))}" '
                              f'r="{radius}" fill="{color}"/>')

    def legend(self, entries):
        x = _WIDTH - _MARGIN_R + 12
        y = _MARGIN_T + 10
        for label, color in entries:
            self.parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" '
                              f'stroke="{color}" stroke-width="2"/>')
            self.parts.append(f'<text x="{x + 28}" y="{y + 4}" font-size="12" '
                              f'font-family="sans-serif">{label}</text>')
            y += 18

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"])


def line_plot_svg(series: list[Series], title: str = "", x_label: str = "C",
                  y_label: str = "average error") -> str:
    """Multi-series line chart with legend; deterministic output."""
    series = [s for s in series if len(s.xs)]
    if not series:
        raise ValueError("nothing to plot")
    all_x = [x for s in series for x in s.xs]
    all_y = [y for s in series for y in s.ys]
    canvas = _Canvas(_axis_range(all_x), _axis_range(all_y), title, x_label, y_label)
    legend = []
    for k, s in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        order = sorted(range(len(s.xs)), key=lambda t: s.xs[t])
        xs = [s.xs[t] for t in order]
        ys = [s.ys[t] for t in order]
        if len(xs) > 1:
            canvas.polyline(xs, ys, color)
        canvas.markers(xs, ys, color)
        legend.append((s.label, color))
    canvas.legend(legend)
    return canvas.render()


def scatter_plot_svg(true_distances, estimates, bound_slope: float | None = None,
                     bound_intercept: float | None = None, title: str = "",
                     x_label: str = "true distance", y_label: str = "estimate",
                     max_points: int = 4000) -> str:
    """Estimate-vs-distance scatter with the lower (y=x) and, optionally,
    the affine upper bound overlaid.  Points beyond ``max_points`` are
    thinned deterministically by stride."""
    xs = [float(v) for v in true_distances]
    ys = [float(v) for v in estimates]
    if not xs or len(xs) != len(ys):
        raise ValueError("nothing to plot")
    if len(xs) > max_points:
        stride = (len(xs) + max_points - 1) // max_points
        xs, ys = xs[::stride], ys[::stride]
    canvas = _Canvas(_axis_range(xs + [0.0]), _axis_range(ys + [0.0]), title, x_label, y_label)
    canvas.markers(xs, ys, "#1f77b4", radius=1.5)
    hi = max(xs)
    legend = [("samples", "#1f77b4")]
    canvas.polyline([0.0, hi], [0.0, hi], "#2ca02c")
    legend.append(("lower bound", "#2ca02c"))
    if bound_slope is not None:
        b0 = bound_intercept or 0.0
        canvas.polyline([0.0, hi], [b0, bound_slope * hi + b0], "#d62728")
        legend.append(("upper bound", "#d62728"))
    canvas.legend(legend)
    return canvas.render()


def sweep_series(rows: list[dict], y_key: str, x_key: str = "C",
                 group_keys=("alpha", "beta")) -> list[Series]:
    """Group sweep records into per-(alpha, beta) series of x vs mean y.

    Rows whose metric field is empty (failed or inapplicable trials) are
    skipped; grouping follows the values found in the rows.
    """
    buckets: dict = {}
    for row in rows:
        val = row.get(y_key, "")
        if val in ("", None):
            continue
        group = tuple(row[k] for k in group_keys)
        buckets.setdefault(group, {}).setdefault(float(row[x_key]), []).append(float(val))
    series = []
    for group in sorted(buckets):
        label = ", ".join(f"{k}={v}" for k, v in zip(group_keys, group))
        xs = sorted(buckets[group])
        ys = [sum(buckets[group][x]) / len(buckets[group][x]) for x in xs]
        series.append(Series(label, xs, ys))
    if not series:
        raise ValueError("no plottable rows")
    return series


def write_svg(path, text: str):
    with open(path, "w") as fh:
        fh.write(text)

"""Static SVG 1.1 line charts with no external resources."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 160, 40, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
N_TICKS = 6


@dataclass
class ChartSpec:
    title: str = ""
    x_label: str = "severity"
    y_label: str = "value"
    series: dict = field(default_factory=dict)  # name -> [(x, y), ...]

    def validate(self):
        if not self.series:
            raise ValueError("chart needs at least one series")
        for name, points in self.series.items():
            if not points:
                raise ValueError(f"series {name!r} is empty")
            xs = [x for x, _ in points]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError(f"series {name!r}: x must be strictly increasing")


def _range(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        return lo - 0.5, hi + 0.5
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _num(v: float) -> str:
    text = f"{v:.2f}"
    return "0.00" if text == "-0.00" else text


def render_svg(spec: ChartSpec) -> str:
    spec.validate()
    xs = [x for pts in spec.series.values() for x, _ in pts]
    ys = [y for pts in spec.series.values() for _, y in pts]
    x_lo, x_hi = (min(xs), max(xs)) if max(xs) > min(xs) else _range(xs)
    y_lo, y_hi = _range(ys)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2 - MARGIN_RIGHT / 2:.2f}" y="24" text-anchor="middle" font-size="15">'
        f'{escape(spec.title)}</text>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333"/>',
    ]
    for i in range(N_TICKS):
        xv = x_lo + (x_hi - x_lo) * i / (N_TICKS - 1)
        yv = y_lo + (y_hi - y_lo) * i / (N_TICKS - 1)
        out.append(f'<line x1="{_num(px(xv))}" y1="{MARGIN_TOP + plot_h}" x2="{_num(px(xv))}" '
                   f'y2="{MARGIN_TOP + plot_h + 5}" stroke="#333333"/>')
        out.append(f'<text x="{_num(px(xv))}" y="{MARGIN_TOP + plot_h + 18}" '
                   f'text-anchor="middle">{_num(xv)}</text>')
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{_num(py(yv))}" x2="{MARGIN_LEFT}" '
                   f'y2="{_num(py(yv))}" stroke="#333333"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{_num(py(yv) + 4)}" '
                   f'text-anchor="end">{yv:.3f}</text>')
    out.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(spec.x_label)}</text>')
    cy = MARGIN_TOP + plot_h / 2
    out.append(f'<text x="18" y="{cy:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {cy:.2f})">{escape(spec.y_label)}</text>')

    legend_x = WIDTH - MARGIN_RIGHT + 15
    for i, (name, points) in enumerate(spec.series.items()):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in points)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = MARGIN_TOP + 10 + 20 * i
        out.append(f'<g class="legend-entry"><line x1="{legend_x}" y1="{ly}" x2="{legend_x + 20}" '
                   f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
                   f'<text x="{legend_x + 26}" y="{ly + 4}">{escape(name)}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

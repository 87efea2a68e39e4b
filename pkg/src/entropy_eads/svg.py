"""Minimal dependency-free SVG scatter plots.

Every data point is drawn as one element carrying ``class="mark ..."``;
axes, legend and boundary curves never use that class, so the number of
marks always equals the number of plotted data rows.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from xml.sax.saxutils import escape

WIDTH, HEIGHT, MARGIN = 640, 480, 60

STYLES = {
    "full": ("#2ca02c", "fully anomalous node"),
    "partial": ("#d62728", "partially anomalous node"),
    "other": ("#1f77b4", "other nodes"),
}


@dataclass(frozen=True)
class Mark:
    x: float
    y: float
    group: str
    node_id: int


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class _Frame:
    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.x0, self.x1 = self._span(xs)
        self.y0, self.y1 = self._span(ys)

    @staticmethod
    def _span(vals: Sequence[float]) -> tuple[float, float]:
        if not vals:
            return 0.0, 1.0
        lo, hi = min(vals), max(vals)
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        return lo - pad, hi + pad

    def px(self, x: float) -> float:
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y: float) -> float:
        return HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def _triangle(cx: float, cy: float, r: float = 4.0) -> str:
    pts = [(cx, cy - r), (cx - r, cy + r * 0.8), (cx + r, cy + r * 0.8)]
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)


def scatter(
    marks: Sequence[Mark],
    *,
    title: str,
    xlabel: str,
    ylabel: str,
    curve: Sequence[tuple[float, float]] = (),
) -> str:
    frame = _Frame(
        [m.x for m in marks] + [c[0] for c in curve],
        [m.y for m in marks] + [c[1] for c in curve],
    )
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line class="axis" x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line class="axis" x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 20}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="20" y="{HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 20 {HEIGHT / 2})">{escape(ylabel)}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 14}" font-size="10">{_fmt(frame.x0)}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 14}" font-size="10" '
        f'text-anchor="end">{_fmt(frame.x1)}</text>',
        f'<text x="{MARGIN - 4}" y="{HEIGHT - MARGIN}" font-size="10" text-anchor="end">{_fmt(frame.y0)}</text>',
        f'<text x="{MARGIN - 4}" y="{MARGIN + 10}" font-size="10" text-anchor="end">{_fmt(frame.y1)}</text>',
    ]
    if curve:
        pts = " ".join(f"{_fmt(frame.px(x))},{_fmt(frame.py(y))}" for x, y in curve)
        out.append(f'<polygon class="boundary" points="{pts}" fill="none" stroke="#0000cc" stroke-width="1.5"/>')
    # other nodes first so the highlighted nodes are drawn on top
    order = {"other": 0, "partial": 1, "full": 2}
    for m in sorted(marks, key=lambda m: order[m.group]):
        colour = STYLES[m.group][0]
        out.append(
            f'<polygon class="mark {m.group}" data-node="{m.node_id}" '
            f'points="{_triangle(frame.px(m.x), frame.py(m.y))}" fill="{colour}" fill-opacity="0.7"/>'
        )
    for i, (group, (colour, label)) in enumerate(STYLES.items()):
        y = MARGIN + 14 * i
        out.append(
            f'<text class="legend" x="{WIDTH - MARGIN}" y="{y}" font-size="11" '
            f'text-anchor="end" fill="{colour}">&#9650; {escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"

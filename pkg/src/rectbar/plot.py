"""Rectangle diagrams as SVG and as a text occupancy map.

The SVG is a fixed 800x800 canvas.  The horizontal axis is the lower
window bound ``a``, the vertical axis the upper bound ``b``; every
rectangle sits above the diagonal with its lower-right corner on it.
Closed edges (left, bottom) are solid, open edges (right, top) dashed,
and an infinite side runs to the plot border where it ends in a dotted
terminator.  The sublevel bars are drawn as vertical segments in the
left margin, against the same ``b`` scale.

Output depends only on the inputs: no timestamps, no ids, and every
number goes through one formatter.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .barcode import Bar, Rectangle, RectangleBarcode, fmt_num

__all__ = ["render_svg", "render_ascii"]

INF = math.inf
SIZE = 800
PLOT_X0, PLOT_Y0, PLOT_W = 170, 30, 600
MARGIN_X0, MARGIN_X1 = 20, 150
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
)
DEGREE_COLORS = ("#333333", "#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _data_range(rb: RectangleBarcode, bars: Sequence[Bar]) -> Tuple[float, float]:
    vals = []
    for r in rb:
        vals.append(r.c)
        if r.ell1 != INF:
            vals.append(r.left)
        if r.ell2 != INF:
            vals.append(r.top)
    for b in bars:
        vals.append(b.birth)
        if b.death != INF:
            vals.append(b.death)
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    span = hi - lo if hi > lo else 1.0
    return lo - 0.1 * span, hi + 0.1 * span


class _Frame:
    def __init__(self, lo: float, hi: float):
        self.lo, self.hi = lo, hi

    def x(self, a: float) -> float:
        if a == -INF:
            return PLOT_X0
        if a == INF:
            return PLOT_X0 + PLOT_W
        return PLOT_X0 + (a - self.lo) / (self.hi - self.lo) * PLOT_W

    def y(self, b: float) -> float:
        if b == INF:
            return PLOT_Y0
        if b == -INF:
            return PLOT_Y0 + PLOT_W
        return PLOT_Y0 + PLOT_W - (b - self.lo) / (self.hi - self.lo) * PLOT_W


def _line(x1, y1, x2, y2, color, dash: Optional[str] = None, width: float = 2) -> str:
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{color}" stroke-width="{width}"{extra}/>')


def _rect_svg(r: Rectangle, fr: _Frame, color: str) -> List[str]:
    xl, xr = fr.x(r.left), fr.x(r.c)
    yb, yt = fr.y(r.c), fr.y(r.top)
    out = [
        f'<rect x="{_f(xl)}" y="{_f(yt)}" width="{_f(xr - xl)}" height="{_f(yb - yt)}" '
        f'fill="{color}" fill-opacity="0.15" stroke="none"/>'
    ]
    closed, open_, term = None, "6,4", "1,3"
    # bottom edge b = c (closed), right edge a = c (open)
    out.append(_line(xl, yb, xr, yb, color, closed))
    out.append(_line(xr, yb, xr, yt, color, open_))
    # left edge a = c - ell1 (closed) or the border terminator
    out.append(_line(xl, yb, xl, yt, color, term if r.ell1 == INF else closed))
    # top edge b = c + ell2 (open) or the border terminator
    out.append(_line(xl, yt, xr, yt, color, term if r.ell2 == INF else open_))
    return out


def render_svg(rb: RectangleBarcode, bars: Sequence[Bar] = (), title: str = "") -> str:
    """SVG text of the rectangle diagram, with ``bars`` in the margin."""
    lo, hi = _data_range(rb, bars)
    fr = _Frame(lo, hi)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<rect x="{PLOT_X0}" y="{PLOT_Y0}" width="{PLOT_W}" height="{PLOT_W}" '
        f'fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    if title:
        parts.append(f'<text x="{PLOT_X0}" y="20" font-family="monospace" font-size="14">'
                     f'{escape(title)}</text>')
    # axis ticks at the data extremes
    for v in (lo, hi):
        parts.append(f'<text x="{_f(fr.x(v))}" y="{_f(PLOT_Y0 + PLOT_W + 14)}" '
                     f'font-family="monospace" font-size="10" text-anchor="middle">{fmt_num(round(v, 6))}</text>')
        parts.append(f'<text x="{_f(PLOT_X0 - 4)}" y="{_f(fr.y(v) + 3)}" '
                     f'font-family="monospace" font-size="10" text-anchor="end">{fmt_num(round(v, 6))}</text>')
    parts.append(_line(fr.x(lo), fr.y(lo), fr.x(hi), fr.y(hi), "#000000", None, 1))

    for i, r in enumerate(rb):
        parts.extend(_rect_svg(r, fr, PALETTE[i % len(PALETTE)]))

    if bars:
        step = (MARGIN_X1 - MARGIN_X0) / max(len(bars), 1)
        for i, b in enumerate(sorted(bars)):
            x = MARGIN_X0 + (i + 0.5) * step
            color = DEGREE_COLORS[b.degree % len(DEGREE_COLORS)]
            parts.append(_line(x, fr.y(b.birth), x, fr.y(b.death), color, None, 3))
        parts.append(f'<text x="{MARGIN_X0}" y="{_f(PLOT_Y0 + PLOT_W + 14)}" '
                     f'font-family="monospace" font-size="10">bars</text>')

    y = PLOT_Y0 + PLOT_W + 34
    for k in rb.degrees:
        text = f"deg {k}: " + ", ".join(r.label() for r in rb.in_degree(k))
        parts.append(f'<text x="{MARGIN_X0}" y="{y}" font-family="monospace" font-size="12">'
                     f'{escape(text)}</text>')
        y += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_ascii(rb: RectangleBarcode) -> str:
    """Per degree, a table of how many rectangles cover each grid cell.

    Columns are cells of ``a``, rows cells of ``b`` (top row highest);
    cells start at the finite endpoints, plus one cell below them.
    ``.`` is empty, ``\\`` marks an empty diagonal cell.
    """
    out = []
    for k in rb.degrees:
        rects = rb.in_degree(k)
        ends = sorted({v for r in rects for v in (r.c, r.left, r.top) if math.isfinite(v)})
        pts = [ends[0] - 1] + ends
        labels = ["<" + fmt_num(ends[0])] + [fmt_num(v) for v in ends]
        w = max(len(s) for s in labels)
        out.append(f"degree {k}")
        for j in range(len(pts) - 1, -1, -1):
            b = pts[j]
            row = []
            for i, a in enumerate(pts):
                n = sum(1 for r in rects if r.contains(a, b))
                if n:
                    ch = str(n) if n < 10 else "+"
                else:
                    ch = "\\" if i == j else "."
                row.append(ch.rjust(w))
            out.append(labels[j].rjust(w) + " |" + " ".join(row))
        out.append(" " * w + " +" + "-" * ((w + 1) * len(pts) - 1))
        out.append(" " * w + "  " + " ".join(s.rjust(w) for s in labels))
    if not out:
        return "no rectangles\n"
    return "\n".join(out) + "\n"

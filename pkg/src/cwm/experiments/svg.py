"""Small dependency-free SVG line plots and heatmaps."""
from __future__ import annotations

from typing import Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf")


def _num(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5):
    return np.linspace(lo, hi, n)


def _range(values: np.ndarray) -> Tuple[float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(series: Sequence[Tuple[str, Sequence[float], Sequence[float]]], title: str = "",
              xlabel: str = "", ylabel: str = "", dashed: Sequence[str] = (),
              ylim: Optional[Tuple[float, float]] = None, width: int = 720, height: int = 360,
              max_points: int = 2000) -> str:
    """One panel with a line per ``(label, xs, ys)``; labels in ``dashed`` draw dashed."""
    ml, mr, mt, mb = 60, 130, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.zeros(1)
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series]) if series else np.zeros(1)
    x0, x1 = _range(xs_all)
    y0, y1 = ylim if ylim is not None else _range(ys_all)

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_num(px(t))}" y="{mt + ph + 15}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{ml - 5}" y="{_num(py(t) + 4)}" text-anchor="end">{t:.3g}</text>')
        out.append(f'<line x1="{ml}" x2="{ml + pw}" y1="{_num(py(t))}" y2="{_num(py(t))}" stroke="#eee"/>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2})">{escape(ylabel)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        stride = max(1, len(xs) // max_points)
        xs, ys = xs[::stride], np.clip(ys[::stride], y0, y1)
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_num(px(a))},{_num(py(b))}" for a, b in zip(xs, ys) if np.isfinite(b))
        dash = ' stroke-dasharray="5,4"' if label in dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"{dash}/>')
        ly = mt + 12 + 15 * i
        out.append(f'<line x1="{ml + pw + 10}" x2="{ml + pw + 30}" y1="{ly}" y2="{ly}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{ml + pw + 35}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _color(v: float, vmin: float, vmax: float) -> str:
    """Diverging blue-white-red map."""
    if not np.isfinite(v):
        return "#cccccc"
    t = min(max((v - vmin) / (vmax - vmin), 0.0), 1.0)
    if t < 0.5:
        a = t / 0.5
        r, g, b = int(40 + 215 * a), int(80 + 175 * a), 255
    else:
        a = (t - 0.5) / 0.5
        r, g, b = 255, int(255 - 175 * a), int(255 - 215 * a)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_grid(panels: Sequence[Tuple[str, np.ndarray]], row_labels: Sequence[float],
                 col_labels: Sequence[float], title: str = "", vmin: float = -1.0, vmax: float = 1.0,
                 cell: int = 14, ncols: int = 4) -> str:
    """Small multiples of square heatmaps sharing axes and colour scale."""
    nr, nc = len(row_labels), len(col_labels)
    pw, ph = nc * cell + 40, nr * cell + 40
    rows = (len(panels) + ncols - 1) // ncols
    width, height = ncols * pw + 20, rows * ph + 40
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="8">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2}" y="16" text-anchor="middle" font-size="12">{escape(title)}</text>']
    for k, (name, M) in enumerate(panels):
        ox = 10 + (k % ncols) * pw + 30
        oy = 30 + (k // ncols) * ph + 12
        out.append(f'<text x="{ox + nc * cell / 2}" y="{oy - 3}" text-anchor="middle" font-size="10">'
                   f'{escape(name)}</text>')
        for i in range(nr):
            for j in range(nc):
                out.append(f'<rect x="{ox + j * cell}" y="{oy + i * cell}" width="{cell}" height="{cell}" '
                           f'fill="{_color(float(M[i, j]), vmin, vmax)}"/>')
        for i, lab in enumerate(row_labels):
            out.append(f'<text x="{ox - 2}" y="{oy + i * cell + cell * 0.7}" text-anchor="end">{lab:g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

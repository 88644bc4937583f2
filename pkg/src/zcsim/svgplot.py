"""Minimal deterministic SVG figures.

Every figure is assembled from explicit element strings with "%.6g"
number formatting and no timestamps or generator metadata, so identical
inputs yield byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

W, H = 640, 480
MARGIN = 56


def _fmt(x: float) -> str:
    return "%.6g" % float(x)


def _header(title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W // 2}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{_escape(title)}</text>',
    ]


def _escape(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def _ticks(lo: float, hi: float, count: int = 5) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, count)
    return [float(t) for t in raw]


class _Frame:
    """Linear data-to-pixel mapping with a drawn axes box."""

    def __init__(self, xlo, xhi, ylo, yhi, xlabel="", ylabel=""):
        if xhi <= xlo:
            xhi = xlo + 1.0
        if yhi <= ylo:
            yhi = ylo + 1.0
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.xlabel, self.ylabel = xlabel, ylabel

    def px(self, x):
        return MARGIN + (x - self.xlo) / (self.xhi - self.xlo) * (W - 2 * MARGIN)

    def py(self, y):
        return H - MARGIN - (y - self.ylo) / (self.yhi - self.ylo) * (H - 2 * MARGIN)

    def frame_elements(self) -> list:
        out = [f'<rect x="{MARGIN}" y="{MARGIN}" width="{W - 2 * MARGIN}" '
               f'height="{H - 2 * MARGIN}" fill="none" stroke="black"/>']
        for t in _ticks(self.xlo, self.xhi):
            x = self.px(t)
            out.append(f'<line x1="{_fmt(x)}" y1="{H - MARGIN}" x2="{_fmt(x)}" '
                       f'y2="{H - MARGIN + 5}" stroke="black"/>')
            out.append(f'<text x="{_fmt(x)}" y="{H - MARGIN + 18}" '
                       f'text-anchor="middle" font-family="monospace" '
                       f'font-size="10">{_fmt(t)}</text>')
        for t in _ticks(self.ylo, self.yhi):
            y = self.py(t)
            out.append(f'<line x1="{MARGIN - 5}" y1="{_fmt(y)}" x2="{MARGIN}" '
                       f'y2="{_fmt(y)}" stroke="black"/>')
            out.append(f'<text x="{MARGIN - 8}" y="{_fmt(y)}" '
                       f'text-anchor="end" font-family="monospace" '
                       f'font-size="10">{_fmt(t)}</text>')
        if self.xlabel:
            out.append(f'<text x="{W // 2}" y="{H - 12}" text-anchor="middle" '
                       f'font-family="monospace" font-size="12">'
                       f'{_escape(self.xlabel)}</text>')
        if self.ylabel:
            out.append(f'<text x="16" y="{H // 2}" text-anchor="middle" '
                       f'font-family="monospace" font-size="12" '
                       f'transform="rotate(-90 16 {H // 2})">'
                       f'{_escape(self.ylabel)}</text>')
        return out


def scatter_svg(points, title: str = "zeros") -> str:
    """Scatter of complex points (dimension 1) or coordinate pairs taken
    as (|z|, |w|) is left to the caller; this draws what it is given."""
    pts = np.asarray(points)
    if pts.ndim == 2 and pts.shape[1] == 2:
        xs, ys = pts[:, 0].astype(float), pts[:, 1].astype(float)
    else:
        pts = pts.astype(complex)
        xs, ys = pts.real, pts.imag
    if xs.size:
        pad_x = 0.05 * max(xs.max() - xs.min(), 1e-9)
        pad_y = 0.05 * max(ys.max() - ys.min(), 1e-9)
        fr = _Frame(xs.min() - pad_x, xs.max() + pad_x,
                    ys.min() - pad_y, ys.max() + pad_y, "Re", "Im")
    else:
        fr = _Frame(-1, 1, -1, 1, "Re", "Im")
    parts = _header(title) + fr.frame_elements()
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{_fmt(fr.px(x))}" cy="{_fmt(fr.py(y))}" '
                     f'r="2" fill="steelblue" fill-opacity="0.7"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _color(v: float) -> str:
    """Two-ramp colormap on [0, 1]: dark blue -> teal -> yellow."""
    v = min(max(v, 0.0), 1.0)
    r = int(255 * max(0.0, 2 * v - 1))
    g = int(255 * min(1.0, 1.5 * v))
    b = int(255 * max(0.0, 1 - 1.4 * v) * 0.6 + 40 * (1 - v))
    return f"rgb({r},{g},{b})"


def heatmap_svg(x_axis, y_axis, values, title: str = "density",
                max_cells: int = 120) -> str:
    """Cell heatmap of a 2-d field; large grids are block-averaged down to
    at most max_cells per axis to keep files small."""
    vals = np.asarray(values, dtype=float)
    nx, ny = vals.shape
    fx = max(1, int(math.ceil(nx / max_cells)))
    fy = max(1, int(math.ceil(ny / max_cells)))
    if fx > 1 or fy > 1:
        cx = nx // fx * fx
        cy = ny // fy * fy
        vals = vals[:cx, :cy].reshape(cx // fx, fx, cy // fy, fy).mean(axis=(1, 3))
        x_axis = np.asarray(x_axis)[:cx:fx]
        y_axis = np.asarray(y_axis)[:cy:fy]
    x_axis = np.asarray(x_axis, dtype=float)
    y_axis = np.asarray(y_axis, dtype=float)
    fr = _Frame(float(x_axis[0]), float(x_axis[-1]),
                float(y_axis[0]), float(y_axis[-1]), "Re", "Im")
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo if hi > lo else 1.0
    parts = _header(title) + fr.frame_elements()
    cw = (W - 2 * MARGIN) / vals.shape[0]
    ch = (H - 2 * MARGIN) / vals.shape[1]
    for i in range(vals.shape[0]):
        for j in range(vals.shape[1]):
            x = MARGIN + i * cw
            y = H - MARGIN - (j + 1) * ch
            c = _color((vals[i, j] - lo) / span)
            parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" '
                         f'width="{_fmt(cw + 0.5)}" height="{_fmt(ch + 0.5)}" '
                         f'fill="{c}"/>')
    parts.append(f'<text x="{W - MARGIN}" y="{MARGIN - 8}" text-anchor="end" '
                 f'font-family="monospace" font-size="10">'
                 f'range [{_fmt(lo)}, {_fmt(hi)}]</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def loglog_svg(xs, ys, slope: float = None, intercept: float = None,
               title: str = "variance") -> str:
    """log-log points with an optional fitted power-law line."""
    lx = np.log10(np.asarray(xs, dtype=float))
    ly = np.log10(np.asarray(ys, dtype=float))
    fr = _Frame(lx.min() - 0.1, lx.max() + 0.1, ly.min() - 0.3, ly.max() + 0.3,
                "log10 N", "log10 Var")
    parts = _header(title) + fr.frame_elements()
    if slope is not None and intercept is not None:
        # fitted line y = intercept + slope * ln(x), converted to log10
        y0 = (intercept + slope * lx[0] * math.log(10)) / math.log(10)
        y1 = (intercept + slope * lx[-1] * math.log(10)) / math.log(10)
        parts.append(f'<line x1="{_fmt(fr.px(lx[0]))}" y1="{_fmt(fr.py(y0))}" '
                     f'x2="{_fmt(fr.px(lx[-1]))}" y2="{_fmt(fr.py(y1))}" '
                     f'stroke="firebrick" stroke-width="1.5"/>')
        parts.append(f'<text x="{W - MARGIN}" y="{MARGIN - 8}" text-anchor="end" '
                     f'font-family="monospace" font-size="11">slope '
                     f'{_fmt(slope)}</text>')
    for x, y in zip(lx, ly):
        parts.append(f'<circle cx="{_fmt(fr.px(x))}" cy="{_fmt(fr.py(y))}" '
                     f'r="4" fill="steelblue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def line_svg(xs, ys, title: str = "", ylabel: str = "", hline: float = None) -> str:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ylo = min(float(ys.min()), hline if hline is not None else ys.min())
    yhi = max(float(ys.max()), hline if hline is not None else ys.max())
    pad = 0.08 * max(yhi - ylo, 1e-9)
    fr = _Frame(float(xs.min()), float(xs.max()), ylo - pad, yhi + pad,
                "N", ylabel)
    parts = _header(title) + fr.frame_elements()
    if hline is not None:
        parts.append(f'<line x1="{MARGIN}" y1="{_fmt(fr.py(hline))}" '
                     f'x2="{W - MARGIN}" y2="{_fmt(fr.py(hline))}" '
                     f'stroke="gray" stroke-dasharray="4 3"/>')
    coords = " ".join(f"{_fmt(fr.px(x))},{_fmt(fr.py(y))}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{coords}" fill="none" stroke="steelblue" '
                 f'stroke-width="1.5"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{_fmt(fr.px(x))}" cy="{_fmt(fr.py(y))}" '
                     f'r="2.5" fill="steelblue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

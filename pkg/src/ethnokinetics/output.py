"""CSV and minimal SVG writers."""

from __future__ import annotations

import csv
import os
from xml.sax.saxutils import escape

import numpy as np

# one colour per plotted series, cycled
PALETTE = ("#1f4e9c", "#c0392b", "#222222", "#2e8b57", "#8e44ad", "#d35400")
NULLCLINE_COLOUR = "#3a7bd5"


def fmt(v) -> str:
    """Shortest repr that round-trips; independent of the locale."""
    if isinstance(v, (str, bytes)):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path: str, header, rows) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_columns(path: str, header, columns) -> str:
    """CSV of equal-length numeric columns."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    return write_csv(path, header, data.tolist())


def read_csv(path: str):
    """``(header, float array)`` for a numeric CSV written by :func:`write_columns`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def _thin(n, max_points):
    step = max(1, -(-n // max_points))
    idx = np.arange(0, n, step)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


def _polyline(xs, ys, box, xr, yr, colour, dash=None):
    x0, y0, w, h = box
    sx = w / ((xr[1] - xr[0]) or 1.0)
    sy = h / ((yr[1] - yr[0]) or 1.0)
    pts = " ".join(f"{x0 + (x - xr[0]) * sx:.2f},{y0 + h - (y - yr[0]) * sy:.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{colour}" stroke-width="1.2"{extra} points="{pts}"/>'


def _frame(box, title, xr, yr):
    x0, y0, w, h = box
    return [
        f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#999"/>',
        f'<text x="{x0}" y="{y0 - 6}" font-size="12" font-family="sans-serif">{escape(title)}</text>',
        f'<text x="{x0}" y="{y0 + h + 14}" font-size="10" font-family="sans-serif">{xr[0]:.4g}</text>',
        f'<text x="{x0 + w - 30}" y="{y0 + h + 14}" font-size="10" font-family="sans-serif">{xr[1]:.4g}</text>',
        f'<text x="{x0 - 4}" y="{y0 + h}" font-size="10" text-anchor="end" font-family="sans-serif">{yr[0]:.3g}</text>',
        f'<text x="{x0 - 4}" y="{y0 + 10}" font-size="10" text-anchor="end" font-family="sans-serif">{yr[1]:.3g}</text>',
    ]


def _range(arrays):
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    return (lo, hi if hi > lo else lo + 1.0)


def write_time_series_svg(path: str, t, series: dict, title: str = "", max_points: int = 2000) -> str:
    """One stacked panel per series, time on the horizontal axis."""
    width, panel_h, margin = 720, 160, 50
    height = margin + len(series) * (panel_h + margin)
    idx = _thin(len(t), max_points)
    tt = np.asarray(t)[idx]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    if title:
        parts.append(f'<text x="{margin}" y="20" font-size="14" font-family="sans-serif">{escape(title)}</text>')
    xr = (float(tt[0]), float(tt[-1]))
    for k, (label, values) in enumerate(series.items()):
        v = np.asarray(values)[idx]
        box = (margin, margin + k * (panel_h + margin), width - 2 * margin, panel_h)
        yr = _range([v])
        parts += _frame(box, label, xr, yr)
        parts.append(_polyline(tt, v, box, xr, yr, PALETTE[k % len(PALETTE)]))
    parts.append("</svg>")
    return _write(path, parts)


def write_phase_svg(path: str, nullclines, trajectories=(), window=None, labels=("x", "y"), title="") -> str:
    """Phase-plane panel: nullcline polylines plus optional trajectory curves."""
    size, margin = 520, 50
    arrays_x = [ln[:, 0] for ln in nullclines] + [tr[:, 0] for tr in trajectories]
    arrays_y = [ln[:, 1] for ln in nullclines] + [tr[:, 1] for tr in trajectories]
    if window is None:
        xr, yr = _range(arrays_x), _range(arrays_y)
    else:
        xr, yr = window
    box = (margin, margin, size - 2 * margin, size - 2 * margin)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    parts += _frame(box, title or f"{labels[0]}-{labels[1]} plane", xr, yr)
    for ln in nullclines:
        parts.append(_polyline(ln[:, 0], ln[:, 1], box, xr, yr, NULLCLINE_COLOUR))
    for k, tr in enumerate(trajectories):
        idx = _thin(len(tr), 2000)
        parts.append(_polyline(tr[idx, 0], tr[idx, 1], box, xr, yr, PALETTE[1], dash="4,2" if k else None))
    parts.append("</svg>")
    return _write(path, parts)


def _write(path, parts):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
    return path

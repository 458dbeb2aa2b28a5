"""CSV, JSON and SVG writers shared by the command-line front end."""

from __future__ import annotations

import csv
import json
import math
import platform
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (str, bool)) or value is None:
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if hasattr(obj, "value") and not isinstance(obj, (int, str)):
        return obj.value
    return obj


def write_json(path: Path, payload: dict) -> Path:
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def versions() -> dict:
    import scipy

    from . import __version__

    return {
        "cantorcalc": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


# --- SVG -------------------------------------------------------------------

WIDTH, HEIGHT, MARGIN = 640, 420, 56
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _svg(body: list[str], title: str) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    caption = f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>'
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', caption, *body, "</svg>\n"])


class _Axes:
    def __init__(self, xlim, ylim, logx=False, logy=False):
        self.logx, self.logy = logx, logy
        self.x0, self.x1 = (math.log10(v) for v in xlim) if logx else xlim
        self.y0, self.y1 = (math.log10(v) for v in ylim) if logy else ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1

    def px(self, x):
        x = np.log10(x) if self.logx else np.asarray(x, dtype=float)
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y):
        y = np.log10(y) if self.logy else np.asarray(y, dtype=float)
        return HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)

    def frame(self, xlabel: str, ylabel: str) -> list[str]:
        out = [
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
            f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="black"/>',
            f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
            f'<text x="14" y="{HEIGHT / 2:.1f}" font-size="12" transform="rotate(-90 14 {HEIGHT / 2:.1f})" '
            f'text-anchor="middle">{escape(ylabel)}</text>',
        ]
        for frac in (0.0, 0.5, 1.0):
            xv = self.x0 + frac * (self.x1 - self.x0)
            yv = self.y0 + frac * (self.y1 - self.y0)
            xl = f"1e{xv:.1f}" if self.logx else f"{xv:.3g}"
            yl = f"1e{yv:.1f}" if self.logy else f"{yv:.3g}"
            xp = MARGIN + frac * (WIDTH - 2 * MARGIN)
            yp = HEIGHT - MARGIN - frac * (HEIGHT - 2 * MARGIN)
            out.append(f'<text x="{xp:.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle" font-size="10">{xl}</text>')
            out.append(f'<text x="{MARGIN - 4}" y="{yp + 3:.1f}" text-anchor="end" font-size="10">{yl}</text>')
        return out


def _limits(values, log=False):
    arr = np.concatenate([np.ravel(np.asarray(v, dtype=float)) for v in values])
    arr = arr[np.isfinite(arr)]
    if log:
        arr = arr[arr > 0]
    if arr.size == 0:
        return (1.0, 10.0) if log else (0.0, 1.0)
    return float(arr.min()), float(arr.max())


def line_plot(path: Path, series: dict, title: str, xlabel: str, ylabel: str, logx=False, logy=False) -> Path:
    """``series`` maps a label to ``(x, y)``."""
    xs = [s[0] for s in series.values()]
    ys = [s[1] for s in series.values()]
    ax = _Axes(_limits(xs, logx), _limits(ys, logy), logx, logy)
    body = ax.frame(xlabel, ylabel)
    for i, (label, (x, y)) in enumerate(series.items()):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if logx:
            ok &= x > 0
        if logy:
            ok &= y > 0
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(ax.px(x[ok]), ax.py(y[ok])))
        color = COLORS[i % len(COLORS)]
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        body.append(
            f'<text x="{WIDTH - MARGIN - 4}" y="{MARGIN + 14 + 14 * i}" text-anchor="end" '
            f'font-size="11" fill="{color}">{escape(label)}</text>'
        )
    path.write_text(_svg(body, title))
    return path


def bar_plot(path: Path, x, y, title: str, xlabel: str, ylabel: str) -> Path:
    """Vertical bars from zero to ``y`` at each ``x`` (functions with fractal support)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = _limits([y, [0.0]])
    ax = _Axes((0.0, 1.0) if x.size == 0 else _limits([x]), (lo, hi))
    body = ax.frame(xlabel, ylabel)
    base = ax.py(0.0)
    for a, b in zip(ax.px(x), ax.py(y)):
        body.append(f'<line x1="{a:.2f}" y1="{base:.2f}" x2="{a:.2f}" y2="{b:.2f}" stroke="{COLORS[0]}" stroke-width="1"/>')
    path.write_text(_svg(body, title))
    return path


def construction_diagram(path: Path, sets, title: str) -> Path:
    """One row of bars per construction depth."""
    rows = len(sets)
    row_h = (HEIGHT - 2 * MARGIN) / max(rows, 1)
    body = []
    for r, pf in enumerate(sets):
        y = MARGIN + r * row_h + 0.25 * row_h
        body.append(f'<text x="{MARGIN - 8}" y="{y + 0.3 * row_h:.1f}" text-anchor="end" font-size="11">k={pf.depth}</text>')
        for l, rt in zip(pf.lefts, pf.rights):
            x0 = MARGIN + l * (WIDTH - 2 * MARGIN)
            w = max((rt - l) * (WIDTH - 2 * MARGIN), 0.5)
            body.append(f'<rect x="{x0:.3f}" y="{y:.1f}" width="{w:.3f}" height="{0.5 * row_h:.1f}" fill="black"/>')
    path.write_text(_svg(body, title))
    return path

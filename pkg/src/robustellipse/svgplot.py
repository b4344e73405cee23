"""SVG overlay of a point set and fitted ellipses.

Self-contained renderer (no plotting dependency): data coordinates are
mapped into a fixed-size canvas with the y-axis flipped and 5% padding
around the data's bounding box. Each fit contributes exactly one
<ellipse> element with class "fit"; the truth, when given, is drawn
dashed with class "truth".
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .conic import GeometricEllipse
from .validation import as_points

__all__ = ["render_svg", "write_svg"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _extent(points: np.ndarray, ellipses) -> tuple[float, float, float, float]:
    xs = [points[:, 0].min(), points[:, 0].max()]
    ys = [points[:, 1].min(), points[:, 1].max()]
    for e in ellipses:
        r = max(e.a, e.b)
        xs += [e.cx - r, e.cx + r]
        ys += [e.cy - r, e.cy + r]
    return min(xs), max(xs), min(ys), max(ys)


def render_svg(points, fits=(), truth: GeometricEllipse | None = None,
               width: int = 640, height: int = 480) -> str:
    """Build the SVG document as a string.

    ``fits`` is a sequence of (label, GeometricEllipse) pairs.
    """
    pts = as_points(points)
    fits = list(fits)
    ellipses = [e for _, e in fits] + ([truth] if truth else [])
    x0, x1, y0, y1 = _extent(pts, ellipses)
    span_x = x1 - x0 or 1.0
    span_y = y1 - y0 or 1.0
    pad_x, pad_y = 0.05 * span_x, 0.05 * span_y
    x0, x1 = x0 - pad_x, x1 + pad_x
    y0, y1 = y0 - pad_y, y1 + pad_y
    scale = min(width / (x1 - x0), height / (y1 - y0))

    def tx(x: float) -> float:
        return (x - x0) * scale

    def ty(y: float) -> float:
        return (y1 - y) * scale

    def ellipse_elem(e: GeometricEllipse, color: str, cls: str,
                     dashed: bool = False) -> str:
        cx, cy = tx(e.cx), ty(e.cy)
        # The y-flip mirrors orientation, hence the sign change.
        rot = -math.degrees(e.theta)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        return (f'<ellipse class="{cls}" cx="{cx:.3f}" cy="{cy:.3f}" '
                f'rx="{e.a * scale:.3f}" ry="{e.b * scale:.3f}" '
                f'transform="rotate({rot:.3f} {cx:.3f} {cy:.3f})" '
                f'fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for x, y in pts:
        parts.append(f'<circle cx="{tx(x):.3f}" cy="{ty(y):.3f}" r="2" '
                     f'fill="#444" fill-opacity="0.6"/>')
    legend_y = 16
    if truth is not None:
        parts.append(ellipse_elem(truth, "#777", "truth", dashed=True))
        parts.append(f'<text x="8" y="{legend_y}" font-size="12" '
                     f'fill="#777">truth (dashed)</text>')
        legend_y += 16
    for i, (label, e) in enumerate(fits):
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(ellipse_elem(e, color, "fit"))
        parts.append(f'<text x="8" y="{legend_y}" font-size="12" '
                     f'fill="{color}">{escape(str(label))}</text>')
        legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, points, fits=(), truth=None, width: int = 640,
              height: int = 480) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(points, fits, truth, width, height))

"""
SVG 1.1 rendering of contour sets: one path per contour, one per median,
a legend, and distinct stroke styles per overlaid group (fit vs oracle).
"""

from dataclasses import dataclass
from typing import Optional
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np
import numpy.typing as npt

from vqar.core.quantile import ContourSet

FloatArray = npt.NDArray[np.float64]

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN"
"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">
<svg width="{width:.2f}" height="{height:.2f}" viewBox="{min_x:.6g} {min_y:.6g} {span_x:.6g} {span_y:.6g}" version="1.1" xmlns="http://www.w3.org/2000/svg">
<rect x="{min_x:.6g}" y="{min_y:.6g}" width="{span_x:.6g}" height="{span_y:.6g}" style="fill:#ffffff"/>
"""

POSTAMBLE = "</svg>\n"

# tau colors of the published figures; other orders cycle through the tail
TAU_COLORS = {0.2: "#006400", 0.4: "#2e8b57", 0.8: "#9acd32"}
EXTRA_COLORS = ["#1f77b4", "#9467bd", "#8c564b", "#17becf"]
MEDIAN_COLOR = "#d62728"
GROUP_DASHES = ["", "6,3", "2,2", "8,2,2,2"]


@dataclass
class ContourGroup:
    """One contour set drawn in a common stroke style."""

    label: str
    contours: ContourSet


def catmull_rom(polygon: FloatArray, samples: int = 8) -> FloatArray:
    """Closed Catmull-Rom spline through the vertices. Cosmetic only."""
    p = np.asarray(polygon, dtype=np.float64)
    n = p.shape[0]
    if n < 3:
        return p
    t = np.linspace(0.0, 1.0, samples, endpoint=False)[:, None]
    out = []
    for i in range(n):
        p0, p1, p2, p3 = p[i - 1], p[i], p[(i + 1) % n], p[(i + 2) % n]
        out.append(
            0.5
            * (
                2 * p1
                + (-p0 + p2) * t
                + (2 * p0 - 5 * p1 + 4 * p2 - p3) * t**2
                + (-p0 + 3 * p1 - 3 * p2 + p3) * t**3
            )
        )
    return np.vstack(out)


class SvgCanvas:
    """Collects path commands and tracks the drawing's bounding box."""

    def __init__(self, size: float = 480.0) -> None:
        self.size = size
        self.min_x: Optional[float] = None
        self.max_x: Optional[float] = None
        self.min_y: Optional[float] = None
        self.max_y: Optional[float] = None
        self.commands: list[str] = []

    def require(self, x: float, y: float) -> None:
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            assert self.max_x is not None and self.min_y is not None and self.max_y is not None
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def polygon(self, points: FloatArray, color: str, width: float, dash: str = "") -> None:
        # svg y grows downward
        pts = [(float(x), -float(y)) for x, y in points]
        for x, y in pts:
            self.require(x, y)
        d = "M " + " L ".join(f"{x:.6g},{y:.6g}" for x, y in pts) + " Z"
        dash_attr = f";stroke-dasharray:{dash}" if dash else ""
        self.commands.append(
            f'<path d="{d}" style="fill:none;stroke:{color};stroke-width:{width:.4g}{dash_attr}"/>'
        )

    def dot(self, x: float, y: float, radius: float, color: str) -> None:
        cx, cy = float(x), -float(y)
        self.require(cx - radius, cy - radius)
        self.require(cx + radius, cy + radius)
        d = (
            f"M {cx - radius:.6g},{cy:.6g} "
            f"a {radius:.6g},{radius:.6g} 0 1,0 {2 * radius:.6g},0 "
            f"a {radius:.6g},{radius:.6g} 0 1,0 {-2 * radius:.6g},0 Z"
        )
        self.commands.append(f'<path d="{d}" style="fill:{color};stroke:none"/>')

    def text(self, x: float, y: float, text: str, size: float, color: str = "#333333") -> None:
        self.commands.append(
            f'<text x="{x:.6g}" y="{y:.6g}" fill="{color}" font-size="{size:.4g}" '
            f'font-family="sans-serif">{escape(text)}</text>'
        )

    def render(self, legend: Sequence[tuple[str, str, str]] = ()) -> str:
        if self.min_x is None:
            self.require(0.0, 0.0)
        assert self.min_x is not None and self.max_x is not None
        assert self.min_y is not None and self.max_y is not None
        span = max(self.max_x - self.min_x, self.max_y - self.min_y, 1e-9)
        pad = 0.1 * span
        legend_h = 0.07 * span * len(legend)
        min_x, min_y = self.min_x - pad, self.min_y - pad
        span_x = self.max_x - self.min_x + 2 * pad
        span_y = self.max_y - self.min_y + 2 * pad + legend_h

        lines = [
            PREAMBLE.format(
                width=self.size,
                height=self.size * span_y / span_x,
                min_x=min_x,
                min_y=min_y,
                span_x=span_x,
                span_y=span_y,
            )
        ]
        lines.extend(self.commands)
        if legend:
            font = 0.045 * span
            lines.append('<g id="legend">')
            y0 = self.max_y + pad + 0.5 * font
            for n, (label, color, dash) in enumerate(legend):
                y = y0 + n * 1.4 * font
                dash_attr = f";stroke-dasharray:{dash}" if dash else ""
                lines.append(
                    f'<line x1="{min_x + pad:.6g}" y1="{y:.6g}" x2="{min_x + pad + 2 * font:.6g}" '
                    f'y2="{y:.6g}" style="stroke:{color};stroke-width:{0.004 * span:.4g}{dash_attr}"/>'
                )
                lines.append(
                    f'<text x="{min_x + pad + 2.5 * font:.6g}" y="{y + 0.35 * font:.6g}" '
                    f'fill="#333333" font-size="{font:.4g}" font-family="sans-serif">{escape(label)}</text>'
                )
            lines.append("</g>")
        lines.append(POSTAMBLE)
        return "\n".join(lines)


def _tau_color(tau: float, fallback: int) -> str:
    for key, color in TAU_COLORS.items():
        if abs(key - tau) < 1e-9:
            return color
    return EXTRA_COLORS[fallback % len(EXTRA_COLORS)]


def render_contours(groups: Sequence[ContourGroup], smooth: bool = False) -> str:
    """SVG document overlaying every group; group n uses dash style n."""
    canvas = SvgCanvas()
    spans = [
        float(np.ptp(np.vstack([*g.contours.contours, g.contours.median[None, :]]), axis=0).max())
        for g in groups
    ]
    width = 0.004 * max(max(spans, default=1.0), 1e-9)
    legend: list[tuple[str, str, str]] = []
    for n, group in enumerate(groups):
        dash = GROUP_DASHES[n % len(GROUP_DASHES)]
        cs = group.contours
        for m, (tau, poly) in enumerate(zip(cs.taus, cs.contours)):
            color = _tau_color(tau, m)
            canvas.polygon(catmull_rom(poly) if smooth else poly, color, width, dash)
            entry = (f"{group.label} tau={tau:g}", color, dash)
            if entry not in legend:
                legend.append(entry)
        canvas.dot(cs.median[0], cs.median[1], 2.5 * width, MEDIAN_COLOR)
        legend.append((f"{group.label} median", MEDIAN_COLOR, dash))
    return canvas.render(legend)

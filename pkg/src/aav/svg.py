"""Static SVG rendering of revisualization outputs (the CLI `render`
backend and the parity reference for the browser overlay)."""

from __future__ import annotations

from typing import Sequence
from xml.etree import ElementTree as ET

import numpy as np

from .grid import GridConfig
from .revis import (
    VIRIDIS,
    Axis,
    BorderMarginal,
    Colormap,
    ContourRing,
    MarginalStyle,
    heatmap,
)

CONTOUR_STROKE = "#ff5533"
BAR_FILL = "#4477aa"


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _svg_root(width: float, height: float) -> ET.Element:
    return ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": _fmt(width),
        "height": _fmt(height),
        "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}",
    })


def _tostring(root: ET.Element) -> str:
    return ET.tostring(root, encoding="unicode") + "\n"


def ring_path_d(points: Sequence[tuple[float, float]]) -> str:
    """SVG path data for one closed ring, vertices at 2-decimal precision."""
    cmds = [f"M {_fmt(points[0][0])} {_fmt(points[0][1])}"]
    cmds.extend(f"L {_fmt(x)} {_fmt(y)}" for x, y in points[1:])
    cmds.append("Z")
    return " ".join(cmds)


def svg_heatmap(grid_values: np.ndarray, config: GridConfig,
                colormap: Colormap = VIRIDIS) -> str:
    """One rect per cell, colored by the normalized value."""
    colors = heatmap(grid_values, colormap)
    root = _svg_root(config.width_px, config.height_px)
    for row in range(config.rows):
        for col in range(config.cols):
            x0, y0, x1, y1 = config.cell_rect(row, col)
            r, g, b = (int(c) for c in colors[row, col])
            ET.SubElement(root, "rect", {
                "x": _fmt(x0), "y": _fmt(y0),
                "width": _fmt(x1 - x0), "height": _fmt(y1 - y0),
                "fill": f"rgb({r},{g},{b})",
            })
    return _tostring(root)


def svg_contours(rings: Sequence[ContourRing], config: GridConfig,
                 stroke: str = CONTOUR_STROKE) -> str:
    """One closed path per contour ring."""
    root = _svg_root(config.width_px, config.height_px)
    for ring in rings:
        ET.SubElement(root, "path", {
            "d": ring_path_d(ring.points),
            "fill": "none",
            "stroke": stroke,
            "stroke-width": "1.5",
            "data-level": _fmt(ring.iso_level),
        })
    return _tostring(root)


def svg_border(marginal: BorderMarginal, config: GridConfig,
               thickness_px: float = 40.0,
               colormap: Colormap = VIRIDIS) -> str:
    """Border strip for one axis: bars, an area path, or a linear heatmap.

    The strip is rendered standalone: x-axis strips are width x thickness,
    y-axis strips thickness x height.
    """
    along_x = marginal.axis == Axis.X
    cell = config.cell_px
    length = config.width_px if along_x else config.height_px
    width, height = (length, thickness_px) if along_x else (thickness_px, length)
    root = _svg_root(width, height)
    values = marginal.values

    if marginal.style == MarginalStyle.BAR:
        for i, v in enumerate(values):
            extent = v * thickness_px
            lo = i * cell
            size = min(cell, length - lo)
            if along_x:
                attrs = {"x": _fmt(lo), "y": _fmt(thickness_px - extent),
                         "width": _fmt(size), "height": _fmt(extent)}
            else:
                attrs = {"x": "0", "y": _fmt(lo),
                         "width": _fmt(extent), "height": _fmt(size)}
            ET.SubElement(root, "rect", {**attrs, "fill": BAR_FILL,
                                         "data-index": str(i)})
    elif marginal.style == MarginalStyle.AREA:
        pts = []
        for i, v in enumerate(values):
            mid = min((i + 0.5) * cell, length)
            extent = v * thickness_px
            pts.append((mid, thickness_px - extent) if along_x else (extent, mid))
        first = (0.0, thickness_px) if along_x else (0.0, 0.0)
        last = (length, thickness_px) if along_x else (0.0, length)
        d = (f"M {_fmt(first[0])} {_fmt(first[1])} "
             + " ".join(f"L {_fmt(x)} {_fmt(y)}" for x, y in pts)
             + f" L {_fmt(last[0])} {_fmt(last[1])} Z")
        ET.SubElement(root, "path", {"d": d, "fill": BAR_FILL})
    else:  # linear heatmap
        colors = colormap(np.asarray(values))
        for i, v in enumerate(values):
            lo = i * cell
            size = min(cell, length - lo)
            r, g, b = (int(c) for c in colors[i])
            if along_x:
                attrs = {"x": _fmt(lo), "y": "0",
                         "width": _fmt(size), "height": _fmt(thickness_px)}
            else:
                attrs = {"x": "0", "y": _fmt(lo),
                         "width": _fmt(thickness_px), "height": _fmt(size)}
            ET.SubElement(root, "rect", {**attrs, "fill": f"rgb({r},{g},{b})",
                                         "data-index": str(i)})
    return _tostring(root)

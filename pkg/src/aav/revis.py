"""Revisualization payloads computed from attention map snapshots: colormap
heatmaps, marching-squares contour rings, border marginals, per-cell mesh
filter parameters, and per-mark emphasis/de-emphasis styles.

Everything here is a pure function of a map snapshot, so frames can be
built concurrently with the next integration tick.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .model import normalize
from .triggers import FLAG_CODES, Flag, TriggerMode

#: emphasis recolor; "bright yellow"
EMPHASIS_YELLOW = (255, 230, 0)

#: mesh de-emphasis strengths: darken = MESH_DARKEN * s, blur = MESH_BLUR_PX * s
MESH_DARKEN = 0.6
MESH_BLUR_PX = 3.0


class Colormap:
    """Piecewise-linear RGB ramp over [0, 1]. Value 0 maps exactly to the
    first stop, 1 to the last."""

    def __init__(self, stops: Sequence[tuple[float, tuple[int, int, int]]],
                 name: str = "custom"):
        if len(stops) < 2:
            raise ValueError("colormap needs at least 2 stops")
        self.name = name
        self._pos = np.asarray([s[0] for s in stops], dtype=np.float64)
        if (np.diff(self._pos) <= 0).any() or self._pos[0] != 0 or self._pos[-1] != 1:
            raise ValueError("stops must increase from 0 to 1")
        self._rgb = np.asarray([s[1] for s in stops], dtype=np.float64)

    def __call__(self, values) -> np.ndarray:
        """Map values in [0, 1] to an (..., 3) uint8 array."""
        v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
        out = np.empty(v.shape + (3,), dtype=np.uint8)
        for ch in range(3):
            out[..., ch] = np.rint(
                np.interp(v, self._pos, self._rgb[:, ch])).astype(np.uint8)
        return out


#: default sequential ramp (dark blue -> teal -> green -> yellow),
#: perceptually ordered; override per mount to fit the visualization
VIRIDIS = Colormap(
    [
        (0.0, (68, 1, 84)),
        (0.25, (59, 82, 139)),
        (0.5, (33, 145, 140)),
        (0.75, (94, 201, 98)),
        (1.0, (253, 231, 37)),
    ],
    name="viridis",
)


def heatmap(values, colormap: Colormap = VIRIDIS) -> np.ndarray:
    """Per-target colors: colormap of the max-normalized values. Zero
    attention lands exactly on the colormap's zero endpoint."""
    arr = np.asarray(values, dtype=np.float64)
    return colormap(np.asarray(normalize(arr)))


# -- contours (marching squares over the cell-center lattice) ----------

@dataclass
class ContourRing:
    """One closed isoline. Points are pixel coordinates on the edges of
    the cell-center lattice, ordered with the above-level region on the
    left of the direction of travel."""

    iso_level: float
    points: list[tuple[float, float]]
    closed: bool = True


_T, _R, _B, _L = 0, 1, 2, 3  # marching-cell edges: top, right, bottom, left

# case index bits: TL<<3 | TR<<2 | BR<<1 | BL ("inside" = value > level);
# segments oriented so the inside region lies on the left (y-down coords)
_SEGMENTS = {
    0: [],
    1: [(_B, _L)],
    2: [(_R, _B)],
    3: [(_R, _L)],
    4: [(_T, _R)],
    6: [(_T, _B)],
    7: [(_T, _L)],
    8: [(_L, _T)],
    9: [(_B, _T)],
    11: [(_R, _T)],
    12: [(_L, _R)],
    13: [(_B, _R)],
    14: [(_L, _B)],
    15: [],
}
_SADDLE_CENTER_IN = {5: [(_T, _L), (_B, _R)], 10: [(_R, _T), (_L, _B)]}
_SADDLE_CENTER_OUT = {5: [(_T, _R), (_B, _L)], 10: [(_L, _T), (_R, _B)]}

#: padding value below any iso level, so every contour closes inside the
#: padded lattice instead of running off the grid boundary
_PAD_VALUE = -1.0


def contours(values: np.ndarray, iso_levels: Sequence[float],
             cell_px: float = 1.0) -> list[ContourRing]:
    """Marching-squares isolines of a (rows, cols) field of normalized cell
    values. The field is sampled at cell centers; crossings are linearly
    interpolated along lattice edges, and saddles are disambiguated by the
    cell-center average.
    """
    levels = list(iso_levels)
    if any(not 0 < lv < 1 for lv in levels):
        raise ValueError("iso levels must lie strictly inside (0, 1)")

    grid = np.asarray(values, dtype=np.float64)
    rows, cols = grid.shape
    padded = np.full((rows + 2, cols + 2), _PAD_VALUE)
    padded[1:-1, 1:-1] = grid

    def node_xy(r: int, c: int) -> tuple[float, float]:
        # padded node (r, c) sits at the center of attention cell (r-1, c-1)
        return ((c - 0.5) * cell_px, (r - 0.5) * cell_px)

    rings: list[ContourRing] = []
    for level in levels:
        rings.extend(_march_level(padded, level, node_xy))
    return rings


def _march_level(padded, level, node_xy) -> list[ContourRing]:
    nrows, ncols = padded.shape
    inside = padded > level

    # segment endpoints keyed by lattice edge so shared crossings chain up
    # exactly; each key is ((r, c), (r2, c2)) with node order fixed
    seg_from: dict[tuple, tuple] = {}

    def crossing(a, b):
        va, vb = padded[a], padded[b]
        t = (level - va) / (vb - va)
        t = min(1.0, max(0.0, t))
        xa, ya = node_xy(*a)
        xb, yb = node_xy(*b)
        return (xa + (xb - xa) * t, ya + (yb - ya) * t)

    for r in range(nrows - 1):
        for c in range(ncols - 1):
            tl, tr = (r, c), (r, c + 1)
            bl, br = (r + 1, c), (r + 1, c + 1)
            case = int(inside[tl]) << 3 | int(inside[tr]) << 2 \
                | int(inside[br]) << 1 | int(inside[bl])
            if case in _SEGMENTS:
                segs = _SEGMENTS[case]
            else:
                center = (padded[tl] + padded[tr] + padded[br] + padded[bl]) / 4.0
                table = _SADDLE_CENTER_IN if center > level else _SADDLE_CENTER_OUT
                segs = table[case]
            if not segs:
                continue
            edge_nodes = {_T: (tl, tr), _R: (tr, br), _B: (bl, br), _L: (tl, bl)}
            for e_from, e_to in segs:
                a = edge_nodes[e_from]
                b = edge_nodes[e_to]
                seg_from[a] = (b, crossing(*a), crossing(*b))

    rings = []
    while seg_from:
        start_edge = next(iter(seg_from))
        pts = []
        edge = start_edge
        while True:
            nxt, p_from, p_to = seg_from.pop(edge)
            if not pts:
                pts.append(p_from)
            pts.append(p_to)
            edge = nxt
            if edge == start_edge:
                break
        # drop the repeated closing point and any consecutive duplicates
        pts = pts[:-1]
        deduped = [p for i, p in enumerate(pts) if p != pts[i - 1]]
        if len(deduped) >= 3:
            rings.append(ContourRing(iso_level=level, points=deduped))
    return rings


# -- border marginals ---------------------------------------------------

class Axis(str, Enum):
    X = "x"
    Y = "y"


class MarginalStyle(str, Enum):
    BAR = "bar"
    AREA = "area"
    LINEAR_HEATMAP = "linear_heatmap"


class Stat(str, Enum):
    SHORT_TERM = "short_term"
    CUMULATIVE = "cumulative"


@dataclass
class BorderMarginal:
    """Normalized attention profile along one axis, for the frame border."""

    axis: Axis
    values: list[float]
    style: MarginalStyle = MarginalStyle.BAR


def marginal_sums(grid_values: np.ndarray, axis: Axis) -> np.ndarray:
    """Pre-normalization marginal: per-column sums for x, per-row for y."""
    grid = np.asarray(grid_values, dtype=np.float64)
    return grid.sum(axis=0) if axis == Axis.X else grid.sum(axis=1)


def border_marginals(grid_values: np.ndarray, axis: Axis,
                     style: MarginalStyle = MarginalStyle.BAR) -> BorderMarginal:
    """Attention collapsed onto one axis and scaled to [0, 1]."""
    axis = Axis(axis)
    sums = marginal_sums(grid_values, axis)
    return BorderMarginal(axis=axis, values=normalize(sums.tolist()), style=style)


# -- mesh filters --------------------------------------------------------

@dataclass(frozen=True)
class MeshCellFilter:
    """CSS-filter-style parameters for one cell; identity when untouched."""

    saturation: float = 1.0
    blur_px: float = 0.0
    darken: float = 0.0


def mesh_filters(short_term_norm, darken: float = MESH_DARKEN,
                 blur_px: float = MESH_BLUR_PX) -> list[MeshCellFilter]:
    """De-emphasize already-seen cells: the higher the short-term value,
    the more desaturated, darkened and blurred the cell gets."""
    values = np.clip(np.asarray(short_term_norm, dtype=np.float64).ravel(), 0.0, 1.0)
    return [
        MeshCellFilter(saturation=1.0 - s, blur_px=blur_px * s, darken=darken * s)
        for s in values.tolist()
    ]


# -- 3D mark styles -------------------------------------------------------

class StyleMode(str, Enum):
    NORMAL = "normal"
    EMPHASIS = "emphasis"
    DE_EMPHASIS = "de_emphasis"
    HEATMAP = "heatmap"


@dataclass
class MarkStyle:
    """Rendering override for one mark/face; color None keeps the mark's
    own color."""

    mode: StyleMode = StyleMode.NORMAL
    color: Optional[tuple[int, int, int]] = None
    saturation_factor: float = 1.0


def mark_styles(cumulative, short_term_norm, flags,
                mode: TriggerMode,
                colormap: Colormap = VIRIDIS,
                emphasis_color: tuple[int, int, int] = EMPHASIS_YELLOW
                ) -> list[MarkStyle]:
    """Per-mark styles.

    Implicit flags win: emphasized marks turn bright yellow, de-emphasized
    marks desaturate in proportion to their short-term value. Otherwise
    always-on/explicit sessions show the cumulative heatmap.
    """
    flags = np.asarray(flags, dtype=np.int8)
    st = np.asarray(short_term_norm, dtype=np.float64)
    styles: list[MarkStyle] = []
    heat = heatmap(cumulative, colormap) if mode in (
        TriggerMode.ALWAYS_ON, TriggerMode.EXPLICIT) else None
    for i in range(len(flags)):
        if flags[i] == FLAG_CODES[Flag.EMPHASIZE]:
            styles.append(MarkStyle(mode=StyleMode.EMPHASIS, color=emphasis_color,
                                    saturation_factor=1.0))
        elif flags[i] == FLAG_CODES[Flag.DE_EMPHASIZE]:
            styles.append(MarkStyle(mode=StyleMode.DE_EMPHASIS,
                                    saturation_factor=1.0 - float(st[i])))
        elif heat is not None:
            styles.append(MarkStyle(mode=StyleMode.HEATMAP,
                                    color=tuple(int(v) for v in heat[i]),
                                    saturation_factor=1.0))
        else:
            styles.append(MarkStyle())
    return styles

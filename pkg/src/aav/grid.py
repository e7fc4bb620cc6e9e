"""Data-agnostic attention recording: a regular lattice of square cells over
a mounted rectangular region. A sample's attention circle feeds every cell
whose rectangle it intersects; positions outside the mount are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import (
    AttentionSample,
    LayeredAttentionMap,
    ModelParams,
    resolve_position,
    sample_radius,
    step_session,
)

DEFAULT_CELL_PX = 32.0


@dataclass(frozen=True)
class GridConfig:
    """Mounted region size and cell granularity. Edge cells are clipped to
    the mount rather than dropped, so the lattice tiles the whole region."""

    width_px: float
    height_px: float
    cell_px: float = DEFAULT_CELL_PX

    def __post_init__(self):
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("mount size must be positive")
        if self.cell_px <= 0:
            raise ValueError("cell_px must be positive")
        if self.cell_px > min(self.width_px, self.height_px):
            raise ValueError("cell_px must not exceed the mount's smaller side")

    @property
    def cols(self) -> int:
        return math.ceil(self.width_px / self.cell_px)

    @property
    def rows(self) -> int:
        return math.ceil(self.height_px / self.cell_px)

    def cell_rect(self, row: int, col: int) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) of a cell, clipped to the mount."""
        x0 = col * self.cell_px
        y0 = row * self.cell_px
        x1 = min(x0 + self.cell_px, self.width_px)
        y1 = min(y0 + self.cell_px, self.height_px)
        return x0, y0, x1, y1

    def to_dict(self) -> dict:
        return {"width_px": self.width_px, "height_px": self.height_px,
                "cell_px": self.cell_px}

    @classmethod
    def from_dict(cls, d: dict) -> "GridConfig":
        return cls(**d)


def cells_intersecting_circle(config: GridConfig,
                              center: tuple[float, float],
                              radius_px: float) -> set[tuple[int, int]]:
    """All (row, col) cells whose closed rectangle meets the closed disk.

    A disk entirely outside the mount yields the empty set.
    """
    if radius_px < 0:
        raise ValueError("radius_px must be >= 0")
    cx, cy = float(center[0]), float(center[1])
    cell = config.cell_px

    # scan one cell beyond the bounding box so exactly-tangent cells
    # (distance == radius on a cell boundary) are not skipped
    col_lo = max(0, math.floor((cx - radius_px) / cell) - 1)
    col_hi = min(config.cols - 1, math.floor((cx + radius_px) / cell) + 1)
    row_lo = max(0, math.floor((cy - radius_px) / cell) - 1)
    row_hi = min(config.rows - 1, math.floor((cy + radius_px) / cell) + 1)

    r2 = radius_px * radius_px
    out: set[tuple[int, int]] = set()
    for row in range(row_lo, row_hi + 1):
        for col in range(col_lo, col_hi + 1):
            x0, y0, x1, y1 = config.cell_rect(row, col)
            # distance from center to the rectangle (0 when inside)
            dx = cx - min(max(cx, x0), x1)
            dy = cy - min(max(cy, y0), y1)
            if dx * dx + dy * dy <= r2:
                out.add((row, col))
    return out


class AttentionGrid(LayeredAttentionMap):
    """Row-major lattice of attention states over a mounted region."""

    def __init__(self, config: GridConfig):
        super().__init__(config.rows * config.cols)
        self.config = config

    def index_of(self, target: tuple[int, int]) -> int:
        row, col = target
        if not (0 <= row < self.config.rows and 0 <= col < self.config.cols):
            raise ValueError(f"unknown grid cell {target!r}")
        return row * self.config.cols + col

    def target_at(self, index: int) -> tuple[int, int]:
        return divmod(index, self.config.cols)

    def cumulative_grid(self) -> np.ndarray:
        """Fused cumulative values as a rows x cols array."""
        return self.fused_cumulative().reshape(self.config.rows, self.config.cols)

    def short_term_grid(self) -> np.ndarray:
        return self.fused_short_term().reshape(self.config.rows, self.config.cols)


def apply_sample(grid: AttentionGrid,
                 sample: Optional[AttentionSample],
                 dt_s: float,
                 params: ModelParams) -> AttentionGrid:
    """One tick of the grid: cells under the sample's attention circle are
    attended, everything else decays. sample=None is a pure decay tick."""
    hit: set[tuple[int, int]] = set()
    if sample is not None:
        pos = resolve_position(sample, (grid.config.width_px, grid.config.height_px))
        hit = cells_intersecting_circle(grid.config, pos,
                                        sample_radius(sample, params))
    return step_session(grid, sample if hit else None, hit, params, dt_s)


def coverage(grid: AttentionGrid) -> float:
    """Fraction of cells that have ever been attended."""
    return float(np.count_nonzero(grid.fused_cumulative() > 0)) / grid.n_targets

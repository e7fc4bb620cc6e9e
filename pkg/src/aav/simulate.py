"""Synthetic scanpath generation: seeded fixation/saccade streams that
stand in for eyetracker input when testing without hardware.

Fixations are stationary dwells emitting one sample per tick; saccades are
instantaneous (no samples in between).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import cos, sin, tau
from typing import Optional

from .grid import GridConfig
from .model import ModelParams, Source
from .session import Mode, SessionLog, make_header, sample_event
from .triggers import TriggerMode


@dataclass(frozen=True)
class Hotspot:
    x: float
    y: float
    radius_px: float
    weight: float = 1.0


@dataclass
class ScanpathSpec:
    """Parameters of a synthetic gaze stream."""

    seed: int = 0
    fixation_count: int = 50
    duration_mean_ms: float = 400.0
    duration_sd_ms: float = 120.0
    hotspots: list[Hotspot] = field(default_factory=list)  # empty: uniform
    source: Source = Source.GAZE

    def __post_init__(self):
        if self.fixation_count <= 0:
            raise ValueError("fixation_count must be positive")
        if self.duration_mean_ms <= 0 or self.duration_sd_ms < 0:
            raise ValueError("durations must be positive")


def generate_scanpath(spec: ScanpathSpec, config: GridConfig,
                      params: Optional[ModelParams] = None,
                      trigger_mode: TriggerMode = TriggerMode.ALWAYS_ON
                      ) -> SessionLog:
    """Deterministic fixation log for a mounted grid: same spec, same log."""
    params = params or ModelParams()
    rng = random.Random(spec.seed)
    header = make_header(Mode.GRID, params, trigger_mode, grid_config=config,
                         seed=spec.seed)
    log = SessionLog(header)

    weights = [h.weight for h in spec.hotspots]
    t = 0
    for _ in range(spec.fixation_count):
        if spec.hotspots:
            spot = rng.choices(spec.hotspots, weights=weights)[0]
            # uniform over the hotspot disk, clipped to the mount
            r = spot.radius_px * rng.random() ** 0.5
            theta = rng.uniform(0, tau)
            x = min(max(spot.x + r * cos(theta), 0.0), config.width_px)
            y = min(max(spot.y + r * sin(theta), 0.0), config.height_px)
        else:
            x = rng.uniform(0, config.width_px)
            y = rng.uniform(0, config.height_px)

        duration = max(params.tick_ms,
                       rng.gauss(spec.duration_mean_ms, spec.duration_sd_ms))
        ticks = max(1, round(duration / params.tick_ms))
        for _ in range(ticks):
            t += params.tick_ms
            log.record(sample_event(t, (x, y), source=spec.source))
    return log

"""Core attention value model shared by grid (data-agnostic) and mark
(data-aware) recording.

Every attention target carries two values: a cumulative dwell counter that
only ever grows, and a capped short-term value that rises while the target
is attended and decays exponentially while it is not. Maps keep one layer
of values per input source (gaze, pointer, ...) and fuse layers by maximum
only when read out for revisualization.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np


class Source(str, Enum):
    """Where an attention measurement came from."""

    GAZE = "gaze"
    POINTER = "pointer"
    TOUCH = "touch"
    HEAD = "head"


#: Sentinel accepted by AttentionSample.position meaning "center of the view".
SCREEN_CENTER = None


@dataclass(frozen=True)
class AttentionSample:
    """One timestamped attention measurement.

    position is an (x, y) pixel pair in element/screen coordinates, or None
    for the screen-center capture strategy used by headsets without
    eyetracking.
    """

    timestamp_ms: int
    position: Optional[tuple[float, float]]
    source: Source = Source.POINTER
    radius_px: Optional[float] = None  # None: use ModelParams.default_radius_px

    def __post_init__(self):
        if self.radius_px is not None and self.radius_px < 0:
            raise ValueError(f"radius_px must be >= 0, got {self.radius_px}")
        if self.position is not None:
            x, y = self.position
            object.__setattr__(self, "position", (float(x), float(y)))
        object.__setattr__(self, "source", Source(self.source))


@dataclass(frozen=True)
class AttentionState:
    """Dual attention values for a single target."""

    cumulative: float = 0.0
    short_term: float = 0.0

    def __post_init__(self):
        if self.cumulative < 0:
            raise ValueError("cumulative must be >= 0")


@dataclass(frozen=True)
class ModelParams:
    """Tuning knobs of the attention integrator.

    Defaults: short-term gain 1.0/s clamped at 1.0, decay half-life 10 s,
    48 px attention circle, 100 ms integration ticks.
    """

    gain_per_s: float = 1.0
    half_life_s: float = 10.0
    cap: float = 1.0
    default_radius_px: float = 48.0
    tick_ms: int = 100

    def __post_init__(self):
        for name in ("gain_per_s", "half_life_s", "cap", "default_radius_px"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not isinstance(self.tick_ms, int) or self.tick_ms <= 0:
            raise ValueError("tick_ms must be a positive integer")

    @property
    def tick_s(self) -> float:
        return self.tick_ms / 1000.0

    def to_dict(self) -> dict:
        return {
            "gain_per_s": self.gain_per_s,
            "half_life_s": self.half_life_s,
            "cap": self.cap,
            "default_radius_px": self.default_radius_px,
            "tick_ms": self.tick_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(**d)


def decay_factor(dt_s: float, half_life_s: float) -> float:
    """Per-step exponential decay multiplier: halves every half_life_s."""
    return 2.0 ** (-dt_s / half_life_s)


def tick(state: AttentionState, attended: bool, dt_s: float,
         params: ModelParams) -> AttentionState:
    """Advance one target by dt_s seconds.

    Attended targets accumulate dwell time (cumulative) and gain short-term
    value up to the cap; unattended targets keep their cumulative value and
    lose short-term value exponentially.
    """
    if dt_s <= 0:
        raise ValueError(f"dt_s must be > 0, got {dt_s}")
    if attended:
        return AttentionState(
            cumulative=state.cumulative + dt_s,
            short_term=min(params.cap, state.short_term + params.gain_per_s * dt_s),
        )
    return AttentionState(
        cumulative=state.cumulative,
        short_term=state.short_term * decay_factor(dt_s, params.half_life_s),
    )


def normalize(values):
    """Scale non-negative values into [0, 1] by the maximum.

    All-zero input stays all zero; otherwise the largest element maps to
    exactly 1. Returns an ndarray for array input, a list otherwise.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size and arr.min() < 0:
        raise ValueError("normalize expects non-negative values")
    peak = arr.max() if arr.size else 0.0
    out = arr / peak if peak > 0 else np.zeros_like(arr)
    if isinstance(values, np.ndarray):
        return out
    return out.tolist()


@dataclass
class AttentionLayer:
    """Value arrays for one source over a fixed target domain."""

    cumulative: np.ndarray
    short_term: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "AttentionLayer":
        return cls(np.zeros(n, dtype=np.float64), np.zeros(n, dtype=np.float64))


class LayeredAttentionMap:
    """Per-source attention layers over a fixed, indexable target domain.

    Subclasses define the target domain (grid cells, mesh faces) and how a
    target maps to a flat index. One logical writer advances the map via
    step(); reads for revisualization fuse the layers by elementwise max.
    """

    def __init__(self, n_targets: int):
        self.n_targets = n_targets
        self.layers: dict[Source, AttentionLayer] = {}

    # -- domain hooks -------------------------------------------------

    def index_of(self, target) -> int:
        raise NotImplementedError

    def target_at(self, index: int):
        raise NotImplementedError

    # -- integration --------------------------------------------------

    def step(self, source: Optional[Source], hit_indices: Sequence[int],
             dt_s: float, params: ModelParams) -> None:
        """One integration tick: attended indices (for source) accumulate,
        everything else decays. hit_indices are ignored when source is None.
        """
        if dt_s <= 0:
            raise ValueError(f"dt_s must be > 0, got {dt_s}")
        factor = decay_factor(dt_s, params.half_life_s)
        gain = params.gain_per_s * dt_s

        hits = np.asarray(sorted(set(int(i) for i in hit_indices)), dtype=np.intp)
        if hits.size and (hits[0] < 0 or hits[-1] >= self.n_targets):
            raise ValueError("hit index out of target domain")

        if source is not None and hits.size and source not in self.layers:
            self.layers[Source(source)] = AttentionLayer.zeros(self.n_targets)

        for layer_source, layer in self.layers.items():
            if source is not None and layer_source == source and hits.size:
                attended_prev = layer.short_term[hits].copy()
                layer.short_term *= factor
                layer.short_term[hits] = np.minimum(params.cap, attended_prev + gain)
                layer.cumulative[hits] += dt_s
            else:
                layer.short_term *= factor

    # -- fused readouts -----------------------------------------------

    def fused_cumulative(self) -> np.ndarray:
        return self._fused("cumulative")

    def fused_short_term(self) -> np.ndarray:
        return self._fused("short_term")

    def _fused(self, attr: str) -> np.ndarray:
        out = np.zeros(self.n_targets, dtype=np.float64)
        for layer in self.layers.values():
            np.maximum(out, getattr(layer, attr), out=out)
        return out

    def state_of(self, target, source: Optional[Source] = None) -> AttentionState:
        """Attention state of one target: one source's, or the fused view."""
        i = self.index_of(target)
        if source is not None:
            layer = self.layers.get(Source(source))
            if layer is None:
                return AttentionState()
            return AttentionState(float(layer.cumulative[i]), float(layer.short_term[i]))
        return AttentionState(float(self.fused_cumulative()[i]),
                              float(self.fused_short_term()[i]))

    # -- serialization ------------------------------------------------

    def layers_to_dict(self) -> dict:
        return {
            source.value: {
                "cumulative": layer.cumulative.tolist(),
                "short_term": layer.short_term.tolist(),
            }
            for source, layer in sorted(self.layers.items(), key=lambda kv: kv[0].value)
        }

    def layers_from_dict(self, d: dict) -> None:
        self.layers = {}
        for source, arrays in d.items():
            cum = np.asarray(arrays["cumulative"], dtype=np.float64)
            st = np.asarray(arrays["short_term"], dtype=np.float64)
            if cum.shape != (self.n_targets,) or st.shape != (self.n_targets,):
                raise ValueError("layer arrays do not match target domain")
            self.layers[Source(source)] = AttentionLayer(cum, st)


def step_session(attention_map: LayeredAttentionMap,
                 sample: Optional[AttentionSample],
                 targets_hit: Iterable,
                 params: ModelParams,
                 dt_s: Optional[float] = None) -> LayeredAttentionMap:
    """Apply one tick to every target of the map.

    Targets in targets_hit (which must belong to the map's domain) are
    attended for the sample's source; all others decay. Iteration order has
    no effect on the resulting values.
    """
    if dt_s is None:
        dt_s = params.tick_s
    indices = [attention_map.index_of(t) for t in targets_hit]
    source = sample.source if sample is not None else None
    attention_map.step(source, indices, dt_s, params)
    return attention_map


def sample_radius(sample: AttentionSample, params: ModelParams) -> float:
    return params.default_radius_px if sample.radius_px is None else sample.radius_px


def resolve_position(sample: AttentionSample,
                     view_size: tuple[float, float]) -> tuple[float, float]:
    """Concrete pixel position of a sample; screen-center samples resolve
    to the middle of the given view."""
    if sample.position is None:
        return (view_size[0] / 2.0, view_size[1] / 2.0)
    return sample.position

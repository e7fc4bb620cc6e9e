"""Triggering policies: when revisualization is shown and when attention
capture is gated.

Always-on shows the revisualization continuously and never gates capture.
Explicit is spring-loaded on a hotkey and suspends capture while visible so
the overlay cannot reinforce itself. Implicit raises per-target emphasis /
de-emphasis flags from thresholds on the cap-normalized short-term value,
with a hysteresis band to stop flag chatter; flagged targets keep capturing
so emphasis can extinguish itself once the user looks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class TriggerMode(str, Enum):
    ALWAYS_ON = "always_on"
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class Flag(str, Enum):
    NONE = "none"
    EMPHASIZE = "emphasize"
    DE_EMPHASIZE = "de_emphasize"


@dataclass(frozen=True)
class ImplicitParams:
    """Thresholds on [0, 1] short-term values plus a hysteresis dead band."""

    theta_lo: float = 0.1
    theta_hi: float = 0.9
    hysteresis: float = 0.05

    def __post_init__(self):
        if not (0 < self.theta_lo < self.theta_hi < 1):
            raise ValueError("need 0 < theta_lo < theta_hi < 1")
        if self.hysteresis <= 0:
            raise ValueError("hysteresis must be positive")
        if self.theta_lo + self.hysteresis >= self.theta_hi - self.hysteresis:
            raise ValueError("hysteresis bands must not overlap")

    def to_dict(self) -> dict:
        return {"theta_lo": self.theta_lo, "theta_hi": self.theta_hi,
                "hysteresis": self.hysteresis}

    @classmethod
    def from_dict(cls, d: dict) -> "ImplicitParams":
        return cls(**d)


@dataclass(frozen=True)
class TriggerState:
    """Session-level trigger bookkeeping. Per-target implicit flags live in
    the session next to the attention map."""

    revis_visible: bool = False
    capture_enabled: bool = True


def on_explicit(state: TriggerState, pressed: bool,
                mode: TriggerMode = TriggerMode.EXPLICIT) -> TriggerState:
    """Spring-loaded hotkey transition: visible while pressed, and capture
    suspended exactly while visible."""
    if mode != TriggerMode.EXPLICIT:
        raise ValueError(f"explicit trigger events not valid in {mode.value} mode")
    return replace(state, revis_visible=pressed, capture_enabled=not pressed)


def evaluate_implicit(short_term_norm: float, flag: Flag,
                      params: ImplicitParams) -> Flag:
    """Next flag for one target given its normalized short-term value.

    Emphasis raises when the value decays below theta_lo and clears once it
    climbs back past theta_lo + hysteresis; de-emphasis mirrors that around
    theta_hi.
    """
    v = short_term_norm
    if flag == Flag.NONE:
        if v < params.theta_lo:
            return Flag.EMPHASIZE
        if v > params.theta_hi:
            return Flag.DE_EMPHASIZE
        return flag
    if flag == Flag.EMPHASIZE:
        return Flag.NONE if v >= params.theta_lo + params.hysteresis else flag
    # DE_EMPHASIZE
    return Flag.NONE if v <= params.theta_hi - params.hysteresis else flag


#: int codes used when flags are stored as arrays (session snapshots, frames)
FLAG_CODES = {Flag.NONE: 0, Flag.EMPHASIZE: 1, Flag.DE_EMPHASIZE: 2}
FLAGS_BY_CODE = {code: flag for flag, code in FLAG_CODES.items()}


def evaluate_implicit_array(short_term_norm, flags, params: ImplicitParams):
    """Vectorized evaluate_implicit over int8 flag codes; elementwise
    identical to the scalar transition function."""
    v = np.asarray(short_term_norm, dtype=np.float64)
    flags = np.asarray(flags, dtype=np.int8)
    out = flags.copy()
    none = flags == FLAG_CODES[Flag.NONE]
    out[none & (v < params.theta_lo)] = FLAG_CODES[Flag.EMPHASIZE]
    out[none & (v > params.theta_hi)] = FLAG_CODES[Flag.DE_EMPHASIZE]
    out[(flags == FLAG_CODES[Flag.EMPHASIZE])
        & (v >= params.theta_lo + params.hysteresis)] = FLAG_CODES[Flag.NONE]
    out[(flags == FLAG_CODES[Flag.DE_EMPHASIZE])
        & (v <= params.theta_hi - params.hysteresis)] = FLAG_CODES[Flag.NONE]
    return out


def gate_capture(state: TriggerState, mode: TriggerMode) -> bool:
    """Whether this tick's sample may feed the attention map.

    Only explicit mode ever suspends capture; implicit flags style single
    targets but must keep capturing so a flag can clear itself.
    """
    if mode == TriggerMode.EXPLICIT:
        return state.capture_enabled
    return True


def frame_visible(state: TriggerState, mode: TriggerMode) -> bool:
    """Whether a revisualization frame should be emitted this tick."""
    if mode == TriggerMode.EXPLICIT:
        return state.revis_visible
    return True

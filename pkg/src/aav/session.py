"""Deterministic attention sessions: an append-only event log, the tick
engine that both the live server and offline replay share, and bit-exact
snapshot persistence.

Log format (.aav.jsonl): UTF-8 JSON objects, one per line; line 1 is the
header, every following line one event. Samples are stamped with the
boundary of the tick that consumed them, so replaying a live session's log
reproduces its maps bit for bit. Snapshots (.aav.snap) are a single JSON
object with the full map state.
"""

from __future__ import annotations

import json
import math
import os
from typing import Iterator, Optional

import numpy as np

from .grid import AttentionGrid, GridConfig, apply_sample, coverage
from .marks import (
    Camera,
    MarkAttentionMap,
    SceneObject,
    apply_sample_3d,
    load_scene,
)
from .model import AttentionSample, ModelParams, Source, normalize
from .revis import (
    Axis,
    border_marginals,
    contours,
    mark_styles,
    mesh_filters,
)
from .triggers import (
    ImplicitParams,
    TriggerMode,
    TriggerState,
    evaluate_implicit_array,
    frame_visible,
    gate_capture,
    on_explicit,
)

FORMAT_VERSION = 1
LOG_SUFFIX = ".aav.jsonl"
SNAPSHOT_SUFFIX = ".aav.snap"

DEFAULT_CONTOUR_LEVELS = (0.25, 0.5, 0.75)

EVENT_KINDS = ("sample", "trigger", "camera")


class LogError(ValueError):
    """Malformed log data; carries the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class Mode:
    GRID = "grid"
    MARKS = "marks"


def make_header(mode: str,
                params: ModelParams,
                trigger_mode: TriggerMode,
                grid_config: Optional[GridConfig] = None,
                scene_paths: Optional[list] = None,
                scene_inline: Optional[list[SceneObject]] = None,
                camera: Optional[Camera] = None,
                implicit: Optional[ImplicitParams] = None,
                seed: Optional[int] = None,
                contour_levels=DEFAULT_CONTOUR_LEVELS) -> dict:
    """Assemble a session header dict (line 1 of the log)."""
    header = {
        "v": FORMAT_VERSION,
        "kind": "header",
        "mode": mode,
        "params": params.to_dict(),
        "trigger_mode": TriggerMode(trigger_mode).value,
        "implicit": (implicit or ImplicitParams()).to_dict(),
        "seed": seed,
        "contour_levels": list(contour_levels),
    }
    if mode == Mode.GRID:
        if grid_config is None:
            raise ValueError("grid mode needs a grid_config")
        header["grid"] = grid_config.to_dict()
    elif mode == Mode.MARKS:
        if camera is None:
            raise ValueError("marks mode needs a camera")
        if scene_inline is not None:
            header["scene_inline"] = [
                {"object_id": o.object_id,
                 "vertices": o.vertices.tolist(),
                 "faces": o.faces.tolist()}
                for o in scene_inline
            ]
        elif scene_paths:
            header["scene_paths"] = [str(p) for p in scene_paths]
        else:
            raise ValueError("marks mode needs scene_paths or scene_inline")
        header["camera"] = camera.to_dict()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return header


def sample_event(timestamp_ms: int, position, source=Source.POINTER,
                 radius_px: Optional[float] = None) -> dict:
    x, y = (None, None) if position is None else position
    return {"t": int(timestamp_ms), "kind": "sample", "x": x, "y": y,
            "source": Source(source).value, "radius": radius_px}


def trigger_event(timestamp_ms: int, pressed: bool) -> dict:
    return {"t": int(timestamp_ms), "kind": "trigger", "pressed": bool(pressed)}


def camera_event(timestamp_ms: int, camera: Camera) -> dict:
    return {"t": int(timestamp_ms), "kind": "camera", "camera": camera.to_dict()}


class SessionLog:
    """Header plus time-ordered events, loadable from / savable to JSONL."""

    def __init__(self, header: dict):
        if header.get("v") != FORMAT_VERSION:
            raise LogError(f"unsupported format version {header.get('v')!r}", line=1)
        if header.get("kind") != "header":
            raise LogError("first record must be the header", line=1)
        self.header = header
        self.events: list[dict] = []

    def record(self, event: dict) -> "SessionLog":
        """Append one event; timestamps must be non-decreasing."""
        kind = event.get("kind")
        if kind not in EVENT_KINDS:
            raise LogError(f"unknown event kind {kind!r}")
        t = event.get("t")
        if not isinstance(t, int) or t < 0:
            raise LogError(f"event timestamp must be a non-negative int, got {t!r}")
        if self.events and t < self.events[-1]["t"]:
            raise LogError(
                f"out-of-order event: {t} < {self.events[-1]['t']}")
        self.events.append(event)
        return self

    @property
    def last_timestamp_ms(self) -> int:
        return self.events[-1]["t"] if self.events else 0

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(self.header, sort_keys=True) + "\n")
            for ev in self.events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "SessionLog":
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise LogError("empty log file", line=1)
        log = cls(_parse_line(lines[0], 1))
        for number, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            event = _parse_line(line, number)
            try:
                log.record(event)
            except LogError as exc:
                raise LogError(str(exc), line=number) from None
        return log


def _parse_line(line: str, number: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogError(f"invalid JSON ({exc.msg})", line=number) from None
    if not isinstance(obj, dict):
        raise LogError("record must be a JSON object", line=number)
    return obj


class SessionState:
    """The tick engine: one attention session advanced on a fixed lattice.

    Both the live server and replay feed it the same per-tick event
    buckets, which is what makes record-then-replay exact.
    """

    def __init__(self, header: dict, base_dir=None):
        self.header = header
        self.mode = header["mode"]
        self.params = ModelParams.from_dict(header["params"])
        self.trigger_mode = TriggerMode(header["trigger_mode"])
        self.implicit = ImplicitParams.from_dict(header["implicit"])
        self.contour_levels = tuple(header.get("contour_levels",
                                               DEFAULT_CONTOUR_LEVELS))
        self.tick = 0
        self.trigger = TriggerState()

        if self.mode == Mode.GRID:
            self.grid_config = GridConfig.from_dict(header["grid"])
            self.map: AttentionGrid | MarkAttentionMap = AttentionGrid(self.grid_config)
            self.scene = None
            self.camera = None
        elif self.mode == Mode.MARKS:
            if "scene_inline" in header:
                self.scene = [
                    SceneObject(object_id=o["object_id"],
                                vertices=np.asarray(o["vertices"], dtype=np.float64),
                                faces=np.asarray(o["faces"], dtype=np.int32))
                    for o in header["scene_inline"]
                ]
            else:
                paths = header["scene_paths"]
                if base_dir is not None:
                    paths = [p if os.path.isabs(p) else os.path.join(base_dir, p)
                             for p in paths]
                self.scene = load_scene(paths)
            self.camera = Camera.from_dict(header["camera"])
            self.grid_config = None
            self.map = MarkAttentionMap(self.scene)
        else:
            raise LogError(f"unknown mode {self.mode!r}", line=1)

        self.flags = np.zeros(self.map.n_targets, dtype=np.int8)

    # -- tick engine ----------------------------------------------------

    @property
    def t_ms(self) -> int:
        return self.tick * self.params.tick_ms

    def apply_tick(self, events: list[dict]) -> None:
        """Advance one tick given all events consumed by it (in arrival
        order). Multiple samples coalesce to the latest; trigger and camera
        changes apply before integration."""
        self.tick += 1
        sample: Optional[AttentionSample] = None
        for ev in events:
            kind = ev["kind"]
            if kind == "trigger":
                self.trigger = on_explicit(self.trigger, ev["pressed"],
                                           self.trigger_mode)
            elif kind == "camera":
                if self.mode != Mode.MARKS:
                    raise LogError("camera event in grid session")
                self.camera = Camera.from_dict(ev["camera"])
            elif kind == "sample":
                position = None if ev["x"] is None else (ev["x"], ev["y"])
                sample = AttentionSample(
                    timestamp_ms=ev["t"],
                    position=position,
                    source=Source(ev.get("source", "pointer")),
                    radius_px=ev.get("radius"),
                )
            else:
                raise LogError(f"unknown event kind {kind!r}")

        if not gate_capture(self.trigger, self.trigger_mode):
            sample = None

        dt_s = self.params.tick_s
        if self.mode == Mode.GRID:
            apply_sample(self.map, sample, dt_s, self.params)
        else:
            apply_sample_3d(self.map, self.scene, self.camera, sample,
                            dt_s, self.params)

        if self.trigger_mode == TriggerMode.IMPLICIT:
            st_norm = self.map.fused_short_term() / self.params.cap
            self.flags = evaluate_implicit_array(st_norm, self.flags,
                                                 self.implicit)

    # -- outputs ----------------------------------------------------------

    def build_frame(self, force: bool = False) -> Optional[dict]:
        """Revisualization payload for the current tick, or None while the
        trigger policy keeps it hidden (force bypasses the visibility gate,
        for offline rendering)."""
        if not force and not frame_visible(self.trigger, self.trigger_mode):
            return None
        frame = {
            "kind": "frame",
            "tick": self.tick,
            "t_ms": self.t_ms,
            "mode": self.mode,
            "trigger_mode": self.trigger_mode.value,
        }
        if self.mode == Mode.GRID:
            grid: AttentionGrid = self.map
            cum = grid.cumulative_grid()
            st = grid.short_term_grid()
            heat_cum = np.asarray(normalize(cum.ravel())).reshape(cum.shape)
            st_norm = st / self.params.cap
            frame["grid"] = self.grid_config.to_dict() | {
                "rows": self.grid_config.rows, "cols": self.grid_config.cols}
            frame["heat_cumulative"] = heat_cum.ravel().tolist()
            frame["heat_short_term"] = st_norm.ravel().tolist()
            frame["contours"] = [
                {"level": ring.iso_level, "points": [list(p) for p in ring.points]}
                for ring in contours(heat_cum, self.contour_levels,
                                     self.grid_config.cell_px)
            ]
            frame["marginal_x"] = border_marginals(cum, Axis.X).values
            frame["marginal_y"] = border_marginals(cum, Axis.Y).values
            frame["mesh"] = [
                {"saturation": f.saturation, "blur_px": f.blur_px,
                 "darken": f.darken}
                for f in mesh_filters(st_norm.ravel())
            ]
            frame["coverage"] = coverage(grid)
        else:
            st_norm = self.map.fused_short_term() / self.params.cap
            styles = mark_styles(self.map.fused_cumulative(), st_norm,
                                 self.flags, self.trigger_mode)
            frame["styles"] = [
                {"object_id": key[0], "face_id": key[1], "mode": s.mode.value,
                 "color": list(s.color) if s.color else None,
                 "saturation_factor": s.saturation_factor}
                for key, s in zip(self.map.face_keys, styles)
            ]
        if self.trigger_mode == TriggerMode.IMPLICIT:
            frame["flags"] = self.flags.tolist()
        return frame

    def snapshot(self) -> dict:
        """Full serializable state; reload(serialize(x)) == x."""
        return {
            "v": FORMAT_VERSION,
            "kind": "snapshot",
            "tick": self.tick,
            "t_ms": self.t_ms,
            "header": self.header,
            "layers": self.map.layers_to_dict(),
            "trigger": {"revis_visible": self.trigger.revis_visible,
                        "capture_enabled": self.trigger.capture_enabled},
            "flags": self.flags.tolist(),
        }

    @classmethod
    def from_snapshot(cls, snap: dict, base_dir=None) -> "SessionState":
        state = cls(snap["header"], base_dir=base_dir)
        state.tick = snap["tick"]
        state.map.layers_from_dict(snap["layers"])
        state.trigger = TriggerState(
            revis_visible=snap["trigger"]["revis_visible"],
            capture_enabled=snap["trigger"]["capture_enabled"])
        state.flags = np.asarray(snap["flags"], dtype=np.int8)
        return state


def serialize_snapshot(snap: dict) -> str:
    return json.dumps(snap, sort_keys=True)


def save_snapshot(snap: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_snapshot(snap) + "\n")


def load_snapshot(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        snap = json.load(fh)
    if snap.get("v") != FORMAT_VERSION or snap.get("kind") != "snapshot":
        raise LogError("not a snapshot file")
    return snap


def tick_of(timestamp_ms: int, tick_ms: int) -> int:
    """Tick that consumes an event: tick k covers ((k-1)*tick_ms, k*tick_ms].
    Events at t=0 belong to the first tick."""
    return max(1, math.ceil(timestamp_ms / tick_ms))


def iter_tick_buckets(events: list[dict], tick_ms: int,
                      last_tick: int) -> Iterator[tuple[int, list[dict]]]:
    """Yield (tick, events) for every tick from 1 to last_tick inclusive,
    including empty decay-only ticks."""
    by_tick: dict[int, list[dict]] = {}
    for ev in events:
        by_tick.setdefault(tick_of(ev["t"], tick_ms), []).append(ev)
    for k in range(1, last_tick + 1):
        yield k, by_tick.get(k, [])


def replay(log: SessionLog,
           until_ms: Optional[int] = None,
           state: Optional[SessionState] = None,
           collect_frames: bool = False,
           base_dir=None) -> tuple[SessionState, list[dict]]:
    """Rebuild session state from a log, deterministically.

    Processes ticks on the tick_ms lattice up to floor(until_ms / tick_ms);
    by default runs through the tick that consumes the last event. Pass the
    state returned by an earlier replay to continue it forward (the prefix
    property).
    """
    if state is None:
        state = SessionState(log.header, base_dir=base_dir)
    tick_ms = state.params.tick_ms
    if until_ms is None:
        last_tick = tick_of(log.last_timestamp_ms, tick_ms) if log.events else 0
    else:
        last_tick = until_ms // tick_ms
    frames: list[dict] = []
    for k, bucket in iter_tick_buckets(log.events, tick_ms, last_tick):
        if k <= state.tick:
            continue
        state.apply_tick(bucket)
        if collect_frames:
            frame = state.build_frame()
            if frame is not None:
                frames.append(frame)
    return state, frames

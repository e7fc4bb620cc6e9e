"""Data-aware attention recording for 3D scenes.

Visibility is resolved per triangle by rendering an ID buffer with a small
software rasterizer: every face gets a unique 24-bit color (red channel =
object id, green/blue = face id), the buffer keeps the nearest front-facing
triangle per pixel, and the attention circle then collects the ids visible
around the gaze point (or the screen center for headsets without
eyetracking). Headless and deterministic, no GPU involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import fill_triangles
from .model import (
    AttentionSample,
    LayeredAttentionMap,
    ModelParams,
    resolve_position,
    step_session,
)

MAX_OBJECT_ID = 255
MAX_FACE_ID = 65535

#: default pick-buffer resolution; a display-size-independent compromise
#: between picking accuracy and per-tick rasterization cost
PICK_BUFFER_SIZE = (256, 256)

#: screen-center strategy: attention disk radius as a fraction of buffer width
CENTER_RADIUS_FRACTION = 0.1


def encode_id(object_id: int, face_id: int) -> tuple[int, int, int]:
    """Unique 24-bit picking color for one face: (object, face-high, face-low).
    (0, 0, 0) stays reserved for background."""
    if not 1 <= object_id <= MAX_OBJECT_ID:
        raise ValueError(f"object_id must be in [1, {MAX_OBJECT_ID}], got {object_id}")
    if not 0 <= face_id <= MAX_FACE_ID:
        raise ValueError(f"face_id must be in [0, {MAX_FACE_ID}], got {face_id}")
    return (object_id, face_id // 256, face_id % 256)


def decode_id(color: tuple[int, int, int]) -> Optional[tuple[int, int]]:
    """Exact inverse of encode_id; background (0, 0, 0) decodes to None."""
    r, g, b = color
    if (r, g, b) == (0, 0, 0):
        return None
    if not (1 <= r <= MAX_OBJECT_ID and 0 <= g <= 255 and 0 <= b <= 255):
        raise ValueError(f"not a pick color: {color!r}")
    return (r, g * 256 + b)


@dataclass
class SceneObject:
    """One triangle mesh with a stable picking id.

    Faces are triples of vertex indices, wound counter-clockwise when seen
    from outside; back faces never enter the pick buffer.
    """

    object_id: int
    vertices: np.ndarray  # (n, 3) float64, world units
    faces: np.ndarray     # (m, 3) int32

    def __post_init__(self):
        if not 1 <= self.object_id <= MAX_OBJECT_ID:
            raise ValueError(f"object_id must be in [1, {MAX_OBJECT_ID}]")
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int32).reshape(-1, 3)
        if len(self.faces) > MAX_FACE_ID + 1:
            raise ValueError(f"too many faces ({len(self.faces)} > {MAX_FACE_ID + 1})")
        if len(self.faces) and (self.faces.min() < 0
                                or self.faces.max() >= len(self.vertices)):
            raise ValueError("face vertex index out of range")

    @property
    def face_count(self) -> int:
        return len(self.faces)


def validate_scene(scene: Sequence[SceneObject]) -> None:
    ids = [obj.object_id for obj in scene]
    if len(set(ids)) != len(ids):
        raise ValueError("scene object_ids must be unique")


@dataclass
class Camera:
    """Perspective pinhole view of the picking scene."""

    position: tuple[float, float, float]
    forward: tuple[float, float, float]
    up: tuple[float, float, float] = (0.0, 1.0, 0.0)
    vfov_deg: float = 60.0
    near: float = 0.05
    far: float = 1000.0
    viewport: tuple[int, int] = PICK_BUFFER_SIZE

    def __post_init__(self):
        if not 0 < self.vfov_deg < 180:
            raise ValueError("vfov_deg must be in (0, 180)")
        if not 0 < self.near < self.far:
            raise ValueError("need 0 < near < far")
        if self.viewport[0] <= 0 or self.viewport[1] <= 0:
            raise ValueError("viewport must be positive")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(right, up, forward) orthonormal view basis."""
        fwd = np.asarray(self.forward, dtype=np.float64)
        norm = np.linalg.norm(fwd)
        if norm == 0:
            raise ValueError("camera forward vector must be non-zero")
        fwd = fwd / norm
        up_hint = np.asarray(self.up, dtype=np.float64)
        right = np.cross(fwd, up_hint)
        rnorm = np.linalg.norm(right)
        if rnorm < 1e-12:
            raise ValueError("camera up vector is parallel to forward")
        right = right / rnorm
        up = np.cross(right, fwd)
        return right, up, fwd

    def to_dict(self) -> dict:
        return {
            "position": list(self.position),
            "forward": list(self.forward),
            "up": list(self.up),
            "vfov_deg": self.vfov_deg,
            "near": self.near,
            "far": self.far,
            "viewport": list(self.viewport),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Camera":
        return cls(
            position=tuple(d["position"]),
            forward=tuple(d["forward"]),
            up=tuple(d.get("up", (0.0, 1.0, 0.0))),
            vfov_deg=d.get("vfov_deg", 60.0),
            near=d.get("near", 0.05),
            far=d.get("far", 1000.0),
            viewport=tuple(d.get("viewport", PICK_BUFFER_SIZE)),
        )


def project_vertices(camera: Camera,
                     vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Screen x, screen y (pixels, y down) and view depth for each vertex."""
    right, up, fwd = camera.basis()
    rel = np.asarray(vertices, dtype=np.float64) - np.asarray(camera.position,
                                                              dtype=np.float64)
    xv = rel @ right
    yv = rel @ up
    zv = rel @ fwd
    w, h = camera.viewport
    focal = 1.0 / math.tan(math.radians(camera.vfov_deg) / 2.0)
    aspect = w / h
    with np.errstate(divide="ignore", invalid="ignore"):
        ndc_x = (focal / aspect) * xv / zv
        ndc_y = focal * yv / zv
    sx = (ndc_x + 1.0) * 0.5 * w
    sy = (1.0 - ndc_y) * 0.5 * h
    return sx, sy, zv


@dataclass
class PickBuffer:
    """Per-pixel visibility: object/face ids of the nearest front-facing
    triangle (0 = background) plus its view depth (+inf where empty)."""

    object_ids: np.ndarray  # (h, w) int32
    face_ids: np.ndarray    # (h, w) int32
    depth: np.ndarray       # (h, w) float64

    @property
    def height(self) -> int:
        return self.object_ids.shape[0]

    @property
    def width(self) -> int:
        return self.object_ids.shape[1]

    def pixel(self, x: int, y: int) -> Optional[tuple[int, int]]:
        obj = int(self.object_ids[y, x])
        if obj == 0:
            return None
        return (obj, int(self.face_ids[y, x]))


def rasterize(scene: Sequence[SceneObject], camera: Camera) -> PickBuffer:
    """Render the scene's ID colors into a fresh pick buffer.

    Triangles with any vertex closer than the near plane, entirely beyond
    the far plane, or facing away from the camera are dropped; ties in
    depth keep the first-drawn face (scene order, then face order).
    """
    validate_scene(scene)
    w, h = camera.viewport
    obj_buf = np.zeros((h, w), dtype=np.int32)
    face_buf = np.zeros((h, w), dtype=np.int32)
    depth_buf = np.zeros((h, w), dtype=np.float64)  # stores 1/z, 0 = empty

    tx, ty, tz, tobj, tface = [], [], [], [], []
    for obj in scene:
        if not obj.face_count:
            continue
        sx, sy, zv = project_vertices(camera, obj.vertices)
        fz = zv[obj.faces]
        keep = (fz >= camera.near).all(axis=1) & (fz <= camera.far).any(axis=1)
        if not keep.any():
            continue
        faces = obj.faces[keep]
        tx.append(sx[faces])
        ty.append(sy[faces])
        tz.append(1.0 / fz[keep])
        tobj.append(np.full(len(faces), obj.object_id, dtype=np.int32))
        tface.append(np.flatnonzero(keep).astype(np.int32))

    if tx:
        fill_triangles(
            np.ascontiguousarray(np.concatenate(tx)),
            np.ascontiguousarray(np.concatenate(ty)),
            np.ascontiguousarray(np.concatenate(tz)),
            np.concatenate(tobj),
            np.concatenate(tface),
            obj_buf, face_buf, depth_buf,
        )

    covered = depth_buf > 0
    depth = np.full((h, w), np.inf)
    depth[covered] = 1.0 / depth_buf[covered]
    return PickBuffer(object_ids=obj_buf, face_ids=face_buf, depth=depth)


def sample_visible_faces(buffer: PickBuffer,
                         center_px: tuple[float, float],
                         radius_px: float) -> set[tuple[int, int]]:
    """Ids of every non-background pixel whose center lies in the disk."""
    if radius_px < 0:
        raise ValueError("radius_px must be >= 0")
    cx, cy = center_px
    lo_c = max(0, int(math.floor(cx - radius_px - 0.5)))
    hi_c = min(buffer.width - 1, int(math.ceil(cx + radius_px - 0.5)) + 1)
    lo_r = max(0, int(math.floor(cy - radius_px - 0.5)))
    hi_r = min(buffer.height - 1, int(math.ceil(cy + radius_px - 0.5)) + 1)
    if lo_c > hi_c or lo_r > hi_r:
        return set()

    px = np.arange(lo_c, hi_c + 1, dtype=np.float64) + 0.5
    py = np.arange(lo_r, hi_r + 1, dtype=np.float64) + 0.5
    dx2 = (px - cx) ** 2
    dy2 = (py - cy) ** 2
    in_disk = dy2[:, None] + dx2[None, :] <= radius_px * radius_px

    objs = buffer.object_ids[lo_r:hi_r + 1, lo_c:hi_c + 1]
    faces = buffer.face_ids[lo_r:hi_r + 1, lo_c:hi_c + 1]
    mask = in_disk & (objs != 0)
    return set(zip(objs[mask].tolist(), faces[mask].tolist()))


class MarkAttentionMap(LayeredAttentionMap):
    """Attention states keyed by (object_id, face_id), covering exactly the
    scene's faces."""

    def __init__(self, scene: Sequence[SceneObject]):
        validate_scene(scene)
        self.face_keys = [(obj.object_id, f)
                          for obj in scene for f in range(obj.face_count)]
        super().__init__(len(self.face_keys))
        self._index = {key: i for i, key in enumerate(self.face_keys)}

    def index_of(self, target: tuple[int, int]) -> int:
        try:
            return self._index[tuple(target)]
        except KeyError:
            raise ValueError(f"unknown face {target!r}") from None

    def target_at(self, index: int) -> tuple[int, int]:
        return self.face_keys[index]


def sample_radius_3d(sample: AttentionSample, params: ModelParams,
                     buffer_width: int) -> float:
    """Attention disk radius: explicit radius wins, the screen-center
    strategy defaults to a fraction of the buffer width."""
    if sample.radius_px is not None:
        return sample.radius_px
    if sample.position is None:
        return CENTER_RADIUS_FRACTION * buffer_width
    return params.default_radius_px


def apply_sample_3d(attention_map: MarkAttentionMap,
                    scene: Sequence[SceneObject],
                    camera: Camera,
                    sample: Optional[AttentionSample],
                    dt_s: float,
                    params: ModelParams,
                    buffer: Optional[PickBuffer] = None) -> MarkAttentionMap:
    """One tick of the mark map: faces visible inside the attention disk
    are attended, everything else decays. Pass a precomputed buffer to
    avoid re-rasterizing within the same tick."""
    hits: set[tuple[int, int]] = set()
    if sample is not None:
        if buffer is None:
            buffer = rasterize(scene, camera)
        pos = resolve_position(sample, (buffer.width, buffer.height))
        radius = sample_radius_3d(sample, params, buffer.width)
        hits = sample_visible_faces(buffer, pos, radius)
    return step_session(attention_map, sample if hits else None, hits, params, dt_s)


def load_obj(path, object_id: int) -> SceneObject:
    """Minimal OBJ subset loader: "v x y z" vertices and "f i j k ..."
    faces (1-based indices; polygons are fan-triangulated; "i/j/k" index
    forms keep only the vertex index)."""
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ValueError(f"{path}:{lineno}: vertex needs 3 coords")
                vertices.append([float(v) for v in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                if len(idx) < 3:
                    raise ValueError(f"{path}:{lineno}: face needs 3+ vertices")
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    return SceneObject(object_id=object_id,
                       vertices=np.asarray(vertices, dtype=np.float64),
                       faces=np.asarray(faces, dtype=np.int32))


def load_scene(paths: Iterable) -> list[SceneObject]:
    """One object per file, object_id assigned by load order from 1."""
    return [load_obj(p, i) for i, p in enumerate(paths, start=1)]

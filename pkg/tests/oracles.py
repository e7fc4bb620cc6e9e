"""Independent reference implementations used to check the engine.

Each oracle recomputes a result by brute force along a different route
than the code under test: exhaustive disk-rectangle scans, per-pixel ray
casting, scalar replay of the attention model, and pixel-level threshold
topology for contours.
"""

from __future__ import annotations

import math

import numpy as np

from aav.grid import GridConfig
from aav.model import AttentionState, ModelParams, tick


def disk_rect_cells(config: GridConfig, center, radius):
    """Exhaustive intersection scan: test every cell's clamped distance."""
    cx, cy = center
    out = set()
    for row in range(config.rows):
        for col in range(config.cols):
            x0, y0, x1, y1 = config.cell_rect(row, col)
            nx = min(max(cx, x0), x1)
            ny = min(max(cy, y0), y1)
            if (cx - nx) ** 2 + (cy - ny) ** 2 <= radius * radius:
                out.add((row, col))
    return out


def scalar_replay(event_seq, params: ModelParams, n_targets: int):
    """Replay (hit_set per tick) sequences one target at a time with the
    scalar tick function."""
    states = [AttentionState() for _ in range(n_targets)]
    for hit_set in event_seq:
        states = [
            tick(s, i in hit_set, params.tick_s, params)
            for i, s in enumerate(states)
        ]
    return states


def raycast_pick(scene, camera):
    """Per-pixel nearest front-facing triangle via Moller-Trumbore,
    broadcast over all pixel rays and triangles at once.

    Returns (h, w) int32 object and face id images (0 = background). View
    depth equals the ray parameter because rays are scaled to unit forward
    component.
    """
    right, up, fwd = camera.basis()
    w, h = camera.viewport
    focal = 1.0 / math.tan(math.radians(camera.vfov_deg) / 2.0)
    aspect = w / h

    v0s, e1s, e2s, objs, faces = [], [], [], [], []
    for obj in scene:
        verts = obj.vertices
        for fi, (a, b, c) in enumerate(obj.faces):
            v0s.append(verts[a])
            e1s.append(verts[b] - verts[a])
            e2s.append(verts[c] - verts[a])
            objs.append(obj.object_id)
            faces.append(fi)
    obj_img = np.zeros((h, w), dtype=np.int32)
    face_img = np.zeros((h, w), dtype=np.int32)
    if not v0s:
        return obj_img, face_img
    v0s = np.asarray(v0s)
    e1s = np.asarray(e1s)
    e2s = np.asarray(e2s)
    objs = np.asarray(objs, dtype=np.int32)
    faces = np.asarray(faces, dtype=np.int32)
    origin = np.asarray(camera.position, dtype=np.float64)

    cols = np.arange(w) + 0.5
    rows = np.arange(h) + 0.5
    ndc_x = (2.0 * cols / w - 1.0)[None, :]
    ndc_y = (1.0 - 2.0 * rows / h)[:, None]
    dirs = (fwd[None, None, :]
            + (ndc_x * aspect / focal)[:, :, None] * right[None, None, :]
            + (ndc_y / focal)[:, :, None] * up[None, None, :]).reshape(-1, 3)

    pvec = np.cross(dirs[:, None, :], e2s[None, :, :])       # (P, T, 3)
    det = np.einsum("ptk,tk->pt", pvec, e1s)
    tvec = origin[None, :] - v0s                              # (T, 3)
    qvec = np.cross(tvec, e1s)                                # (T, 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.einsum("ptk,tk->pt", pvec, tvec) / det
        v = np.einsum("pk,tk->pt", dirs, qvec) / det
        t = np.einsum("tk,tk->t", e2s, qvec)[None, :] / det
    hit = (det > 1e-12) & (u >= 0) & (v >= 0) & (u + v <= 1) \
        & (t >= camera.near) & (t <= camera.far)
    t = np.where(hit, t, np.inf)
    best = np.argmin(t, axis=1)
    any_hit = np.isfinite(t[np.arange(len(best)), best])
    obj_flat = np.where(any_hit, objs[best], 0).astype(np.int32)
    face_flat = np.where(any_hit, faces[best], 0).astype(np.int32)
    return obj_flat.reshape(h, w), face_flat.reshape(h, w)


def projected_edge_mask(scene, camera, dist_px: float = 1.0):
    """Pixels whose center lies within dist_px of any projected triangle
    edge (the exclusion zone for rasterizer/raycast comparison)."""
    from aav.marks import project_vertices

    w, h = camera.viewport
    mask = np.zeros((h, w), dtype=bool)
    ys, xs = np.mgrid[0:h, 0:w]
    pxs = xs + 0.5
    pys = ys + 0.5
    for obj in scene:
        sx, sy, zv = project_vertices(camera, obj.vertices)
        for a, b, c in obj.faces:
            if (zv[[a, b, c]] < camera.near).any():
                continue
            for i, j in ((a, b), (b, c), (c, a)):
                x0, y0, x1, y1 = sx[i], sy[i], sx[j], sy[j]
                dx, dy = x1 - x0, y1 - y0
                denom = dx * dx + dy * dy
                if denom == 0:
                    t = np.zeros_like(pxs)
                else:
                    t = np.clip(((pxs - x0) * dx + (pys - y0) * dy) / denom, 0, 1)
                d2 = (pxs - (x0 + t * dx)) ** 2 + (pys - (y0 + t * dy)) ** 2
                mask |= d2 <= dist_px * dist_px
    return mask


def fan_interpolant(values: np.ndarray, upsample: int = 16):
    """Dense sampling of the interpolant whose level sets the contour
    contract describes: linear along lattice edges, each cell split into
    four triangles meeting at the corner-average center point.

    Returns (fine_values, x_coords, y_coords) with coordinates in contour
    space for cell_px=1 (interior node (r, c) sits at (c + 0.5, r + 0.5)).
    """
    rows, cols = values.shape
    padded = np.full((rows + 2, cols + 2), -1.0)
    padded[1:-1, 1:-1] = values

    n_y = (padded.shape[0] - 1) * upsample + 1
    n_x = (padded.shape[1] - 1) * upsample + 1
    ry = np.linspace(0, padded.shape[0] - 1, n_y)
    rx = np.linspace(0, padded.shape[1] - 1, n_x)
    fy = np.floor(ry).astype(int).clip(0, padded.shape[0] - 2)
    fx = np.floor(rx).astype(int).clip(0, padded.shape[1] - 2)
    v = (ry - fy)[:, None] + np.zeros((1, n_x))
    u = (rx - fx)[None, :] + np.zeros((n_y, 1))
    a = padded[fy][:, fx]      # top-left
    b = padded[fy][:, fx + 1]  # top-right
    c = padded[fy + 1][:, fx]  # bottom-left
    d = padded[fy + 1][:, fx + 1]
    m = (a + b + c + d) / 4.0

    top = a + (b - a) * u + (2 * m - a - b) * v
    bottom = c + (d - c) * u + (2 * m - c - d) * (1 - v)
    left = a + (c - a) * v + (2 * m - a - c) * u
    right = b + (d - b) * v + (2 * m - b - d) * (1 - u)
    fine = np.select(
        [(v <= u) & (v <= 1 - u), (v >= u) & (v >= 1 - u), u <= v],
        [top, bottom, left],
        default=right,
    )
    # padded node (r, c) sits at (c - 0.5, r - 0.5) in contour space
    return fine, rx - 0.5, ry - 0.5


def threshold_ring_count(values: np.ndarray, level: float,
                         upsample: int = 16):
    """Number of closed boundary curves of the thresholded upsampled field:
    inside components plus enclosed holes. Only meaningful when the level
    set is well separated (no near-critical saddles), since pixelization
    cannot resolve arbitrarily thin channels."""
    from scipy import ndimage

    fine, _, _ = fan_interpolant(values, upsample)
    inside = fine > level
    _, n_in = ndimage.label(inside)
    _, n_out = ndimage.label(~inside)
    return n_in + (n_out - 1)


def rings_parity_mask(rings, points: np.ndarray) -> np.ndarray:
    """Vectorized even-odd membership: True where a point lies inside an
    odd number of rings."""
    px = points[:, 0]
    py = points[:, 1]
    total = np.zeros(len(points), dtype=np.int64)
    for ring in rings:
        pts = np.asarray(ring.points)
        x0 = pts[:, 0]
        y0 = pts[:, 1]
        x1 = np.roll(pts[:, 0], -1)
        y1 = np.roll(pts[:, 1], -1)
        crossings = np.zeros(len(points), dtype=np.int64)
        for i in range(len(pts)):
            straddles = (y0[i] > py) != (y1[i] > py)
            if not straddles.any():
                continue
            x_at = x0[i] + (py - y0[i]) / (y1[i] - y0[i]) * (x1[i] - x0[i])
            crossings += (straddles & (x_at > px)).astype(np.int64)
        total += crossings % 2
    return (total % 2) == 1


def smooth_random_field(rng: np.random.Generator, shape=(16, 16),
                        sigma: float = 1.5) -> np.ndarray:
    """Random field with gentle gradients (gaussian-filtered uniform noise,
    rescaled to [0, 1]) so level-set topology is well separated."""
    from scipy import ndimage

    noise = rng.uniform(0, 1, shape)
    smooth = ndimage.gaussian_filter(noise, sigma=sigma, mode="nearest")
    lo, hi = smooth.min(), smooth.max()
    return (smooth - lo) / (hi - lo)


def level_separation(values: np.ndarray, level: float) -> float:
    """Distance from the level to the interpolant's critical values (node
    values and cell-center averages, including the below-everything pad).
    Zero separation means the level set can pinch arbitrarily thin."""
    rows, cols = values.shape
    padded = np.full((rows + 2, cols + 2), -1.0)
    padded[1:-1, 1:-1] = values
    centers = (padded[:-1, :-1] + padded[:-1, 1:]
               + padded[1:, :-1] + padded[1:, 1:]) / 4.0
    return min(np.abs(padded - level).min(), np.abs(centers - level).min())


def distance_to_rings(rings, points: np.ndarray) -> np.ndarray:
    """Min distance from each point to any ring segment."""
    best = np.full(len(points), np.inf)
    px = points[:, 0]
    py = points[:, 1]
    for ring in rings:
        pts = ring.points
        for i in range(len(pts)):
            x0, y0 = pts[i - 1]
            x1, y1 = pts[i]
            dx, dy = x1 - x0, y1 - y0
            denom = dx * dx + dy * dy
            if denom == 0:
                t = 0.0
            else:
                t = np.clip(((px - x0) * dx + (py - y0) * dy) / denom, 0, 1)
            d2 = (px - (x0 + t * dx)) ** 2 + (py - (y0 + t * dy)) ** 2
            np.minimum(best, np.sqrt(d2), out=best)
    return best


def point_in_rings(point, rings) -> int:
    """Number of rings whose interior contains the point (even-odd rule
    per ring, horizontal ray cast)."""
    px, py = point
    count = 0
    for ring in rings:
        pts = ring.points
        crossings = 0
        for i in range(len(pts)):
            x0, y0 = pts[i - 1]
            x1, y1 = pts[i]
            if (y0 > py) != (y1 > py):
                x_at = x0 + (py - y0) / (y1 - y0) * (x1 - x0)
                if x_at > px:
                    crossings += 1
        if crossings % 2 == 1:
            count += 1
    return count


def random_scene(rng: np.random.Generator, n_triangles: int = 20,
                 obj_count: int = 3):
    """Random triangle soup in front of an origin camera looking +z."""
    from aav.marks import SceneObject

    per = max(1, n_triangles // obj_count)
    scene = []
    remaining = n_triangles
    for oid in range(1, obj_count + 1):
        take = per if oid < obj_count else remaining
        remaining -= take
        base = rng.uniform([-3, -3, 4], [3, 3, 10], (take, 3))
        spread = rng.uniform(-1.6, 1.6, (take, 3, 3))
        verts = (base[:, None, :] + spread).reshape(-1, 3)
        verts[:, 2] = np.clip(verts[:, 2], 3.0, 12.0)
        faces = np.arange(take * 3, dtype=np.int32).reshape(-1, 3)
        scene.append(SceneObject(object_id=oid, vertices=verts, faces=faces))
    return scene


def front_camera(size: int = 64):
    from aav.marks import Camera

    return Camera(position=(0.0, 0.0, 0.0), forward=(0.0, 0.0, 1.0),
                  up=(0.0, 1.0, 0.0), vfov_deg=60.0, near=0.1, far=100.0,
                  viewport=(size, size))

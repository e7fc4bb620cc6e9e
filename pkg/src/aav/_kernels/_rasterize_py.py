"""Pure-numpy triangle fill, the fallback for the compiled kernel.

Must stay expression-for-expression identical to _rasterize.pyx: the same
edge functions, the same left-associated interpolation sum, the same strict
depth test, so both backends produce bit-identical buffers.
"""

from __future__ import annotations

import math

import numpy as np


def fill_triangles(tri_x, tri_y, tri_invz, tri_obj, tri_face,
                   obj_buf, face_buf, depth_buf):
    """Rasterize screen-space triangles with inverse-depth z-buffering.

    tri_x, tri_y, tri_invz: (n, 3) float64 vertex screen coords / 1-over-depth.
    tri_obj, tri_face: (n,) int32 ids written for covered pixels.
    obj_buf, face_buf: (h, w) int32, 0 = background. depth_buf: (h, w)
    float64 holding the current 1/z (0 = empty); strict greater-than test,
    so exact ties keep the first-drawn triangle. Triangles whose screen
    winding is counter-clockwise (y-down) are back faces and are skipped.
    """
    h, w = obj_buf.shape
    n = tri_x.shape[0]
    for t in range(n):
        x0, x1, x2 = tri_x[t, 0], tri_x[t, 1], tri_x[t, 2]
        y0, y1, y2 = tri_y[t, 0], tri_y[t, 1], tri_y[t, 2]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 >= 0.0:  # back-facing or degenerate
            continue

        lo_c = max(0, int(math.floor(min(x0, x1, x2) - 0.5)))
        hi_c = min(w - 1, int(math.ceil(max(x0, x1, x2) - 0.5)))
        lo_r = max(0, int(math.floor(min(y0, y1, y2) - 0.5)))
        hi_r = min(h - 1, int(math.ceil(max(y0, y1, y2) - 0.5)))
        if lo_c > hi_c or lo_r > hi_r:
            continue

        px = np.arange(lo_c, hi_c + 1, dtype=np.float64) + 0.5
        py = np.arange(lo_r, hi_r + 1, dtype=np.float64) + 0.5
        pxg, pyg = np.meshgrid(px, py)

        e0 = (x2 - x1) * (pyg - y1) - (y2 - y1) * (pxg - x1)
        e1 = (x0 - x2) * (pyg - y2) - (y0 - y2) * (pxg - x2)
        e2 = (x1 - x0) * (pyg - y0) - (y1 - y0) * (pxg - x0)
        inside = (e0 <= 0.0) & (e1 <= 0.0) & (e2 <= 0.0)
        if not inside.any():
            continue

        iz0, iz1, iz2 = tri_invz[t, 0], tri_invz[t, 1], tri_invz[t, 2]
        invz = (e0 * iz0 + e1 * iz1 + e2 * iz2) / area2

        window = np.s_[lo_r:hi_r + 1, lo_c:hi_c + 1]
        write = inside & (invz > depth_buf[window])
        depth_buf[window] = np.where(write, invz, depth_buf[window])
        obj_buf[window] = np.where(write, tri_obj[t], obj_buf[window])
        face_buf[window] = np.where(write, tri_face[t], face_buf[window])

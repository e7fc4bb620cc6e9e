# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled triangle fill. Semantics and floating-point expression order
mirror _rasterize_py.fill_triangles exactly; keep the two in sync."""

from libc.math cimport ceil, floor

import numpy as np

cimport numpy as cnp

cnp.import_array()


def fill_triangles(cnp.float64_t[:, ::1] tri_x,
                   cnp.float64_t[:, ::1] tri_y,
                   cnp.float64_t[:, ::1] tri_invz,
                   cnp.int32_t[::1] tri_obj,
                   cnp.int32_t[::1] tri_face,
                   cnp.int32_t[:, ::1] obj_buf,
                   cnp.int32_t[:, ::1] face_buf,
                   cnp.float64_t[:, ::1] depth_buf):
    cdef Py_ssize_t h = obj_buf.shape[0]
    cdef Py_ssize_t w = obj_buf.shape[1]
    cdef Py_ssize_t n = tri_x.shape[0]
    cdef Py_ssize_t t, r, c
    cdef Py_ssize_t lo_c, hi_c, lo_r, hi_r
    cdef double x0, x1, x2, y0, y1, y2, iz0, iz1, iz2
    cdef double area2, px, py, e0, e1, e2, invz
    cdef double xmin, xmax, ymin, ymax
    cdef cnp.int32_t obj_id, face_id

    for t in range(n):
        x0 = tri_x[t, 0]; x1 = tri_x[t, 1]; x2 = tri_x[t, 2]
        y0 = tri_y[t, 0]; y1 = tri_y[t, 1]; y2 = tri_y[t, 2]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 >= 0.0:  # back-facing or degenerate
            continue

        xmin = min(x0, min(x1, x2)); xmax = max(x0, max(x1, x2))
        ymin = min(y0, min(y1, y2)); ymax = max(y0, max(y1, y2))
        lo_c = <Py_ssize_t>floor(xmin - 0.5)
        hi_c = <Py_ssize_t>ceil(xmax - 0.5)
        lo_r = <Py_ssize_t>floor(ymin - 0.5)
        hi_r = <Py_ssize_t>ceil(ymax - 0.5)
        if lo_c < 0: lo_c = 0
        if hi_c > w - 1: hi_c = w - 1
        if lo_r < 0: lo_r = 0
        if hi_r > h - 1: hi_r = h - 1
        if lo_c > hi_c or lo_r > hi_r:
            continue

        iz0 = tri_invz[t, 0]; iz1 = tri_invz[t, 1]; iz2 = tri_invz[t, 2]
        obj_id = tri_obj[t]; face_id = tri_face[t]

        for r in range(lo_r, hi_r + 1):
            py = r + 0.5
            for c in range(lo_c, hi_c + 1):
                px = c + 0.5
                e0 = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
                if e0 > 0.0:
                    continue
                e1 = (x0 - x2) * (py - y2) - (y0 - y2) * (px - x2)
                if e1 > 0.0:
                    continue
                e2 = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
                if e2 > 0.0:
                    continue
                invz = (e0 * iz0 + e1 * iz1 + e2 * iz2) / area2
                if invz > depth_buf[r, c]:
                    depth_buf[r, c] = invz
                    obj_buf[r, c] = obj_id
                    face_buf[r, c] = face_id

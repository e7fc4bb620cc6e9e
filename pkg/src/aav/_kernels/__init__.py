"""Kernel selection: compiled rasterizer when built, numpy fallback otherwise.

Both backends compute identical IEEE double expressions in the same order,
so pick buffers are bit-identical whichever one is active. Set
AAV_PURE_PYTHON=1 to force the fallback (used by the parity tests and the
benchmark).
"""

import os

from ._rasterize_py import fill_triangles as _fill_triangles_py

fill_triangles_py = _fill_triangles_py

if os.environ.get("AAV_PURE_PYTHON"):
    fill_triangles = _fill_triangles_py
    KERNEL_BACKEND = "python"
else:
    try:
        from ._rasterize import fill_triangles as _fill_triangles_c

        fill_triangles = _fill_triangles_c
        KERNEL_BACKEND = "c"
    except ImportError:
        fill_triangles = _fill_triangles_py
        KERNEL_BACKEND = "python"

__all__ = ["fill_triangles", "fill_triangles_py", "KERNEL_BACKEND"]

"""aav: attention-aware visualization engine.

Measures a viewer's attention stream (gaze, pointer, touch or head proxy),
integrates it into dual cumulative / short-term attention maps over grid
cells or 3D mesh faces, and computes revisualization payloads (heatmaps,
contours, border marginals, emphasis styles) under always-on, explicit and
implicit triggering. Ships a library, a streaming server, and a CLI.
"""

from ._kernels import KERNEL_BACKEND
from .grid import AttentionGrid, GridConfig, apply_sample, cells_intersecting_circle, coverage
from .marks import (
    Camera,
    MarkAttentionMap,
    PickBuffer,
    SceneObject,
    apply_sample_3d,
    decode_id,
    encode_id,
    load_obj,
    load_scene,
    rasterize,
    sample_visible_faces,
)
from .model import (
    AttentionSample,
    AttentionState,
    ModelParams,
    Source,
    normalize,
    step_session,
    tick,
)
from .revis import (
    VIRIDIS,
    BorderMarginal,
    Colormap,
    ContourRing,
    MarkStyle,
    MeshCellFilter,
    border_marginals,
    contours,
    heatmap,
    mark_styles,
    mesh_filters,
)
from .session import SessionLog, SessionState, make_header, replay
from .triggers import (
    Flag,
    ImplicitParams,
    TriggerMode,
    TriggerState,
    evaluate_implicit,
    gate_capture,
    on_explicit,
)

__version__ = "0.1.0"

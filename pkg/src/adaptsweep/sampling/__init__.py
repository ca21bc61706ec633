from .adaptive import (
    AdaptiveConfig,
    AdaptiveResult,
    ModelOptions,
    Step,
    adaptive_run,
    build_model,
    vf_order,
)
from .distributions import chebyshev_indices, chebyshev_points, double_sided, snap_to_grid
from .rules import (
    GMatrixSet,
    SweepComplete,
    ThetaPick,
    condition_trace,
    interpolant_family,
    make_g_matrices,
    node_sum,
    pick_pradovera,
    pick_theta1,
    pick_theta2,
    pick_vuillemin,
    spectral_norm_trace,
    unitary_g_matrices,
)

__all__ = [
    "AdaptiveConfig",
    "AdaptiveResult",
    "GMatrixSet",
    "ModelOptions",
    "Step",
    "SweepComplete",
    "ThetaPick",
    "adaptive_run",
    "build_model",
    "chebyshev_indices",
    "chebyshev_points",
    "condition_trace",
    "double_sided",
    "interpolant_family",
    "make_g_matrices",
    "node_sum",
    "pick_pradovera",
    "pick_theta1",
    "pick_theta2",
    "pick_vuillemin",
    "snap_to_grid",
    "spectral_norm_trace",
    "unitary_g_matrices",
    "vf_order",
]

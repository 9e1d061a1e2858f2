"""Joint activity detection and channel estimation via group-sparse recovery.

Submodules
----------
model
    Instance generation and the complex/real embedding.
statdim
    Statistical-dimension bounds and phase-transition predictions.
solvers
    Smoothed dual solver and the projected-gradient reference solver.
detect
    Activity detection and error metrics.
harness
    Seeded experiment sweeps written as CSV.
"""

from . import detect, harness, model, solvers, statdim
from .detect import detect_activity, recovery_success
from .model import SystemConfig, generate_system
from .solvers import SolverOptions, solve_pb_projected_gradient, solve_smoothed_dual
from .statdim import predict_transition, statdim_plain, statdim_smoothed

__version__ = "0.1.0"

__all__ = [
    "detect", "harness", "model", "solvers", "statdim",
    "SystemConfig", "generate_system",
    "statdim_plain", "statdim_smoothed", "predict_transition",
    "SolverOptions", "solve_smoothed_dual", "solve_pb_projected_gradient",
    "detect_activity", "recovery_success",
]

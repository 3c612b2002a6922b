"""Adaptive Dormand-Prince propagation with event location.

The stepping loop runs in a compiled extension when it is available and in
an equivalent pure-Python kernel otherwise; see :data:`BACKEND`.
"""

from ._backend import DEFAULT_BACKEND as BACKEND
from ._backend import KERNELS, get_kernel
from .core import (
    Drift,
    IntegratorConfig,
    PeriodMeasurement,
    Trajectory,
    conserved_drift,
    diagnostics,
    find_closure,
    find_crossings,
    integrate,
    measure_period,
    pericenter_time,
    phase_distance,
    radial_turning_points,
    verify_orbit_equation,
)

__all__ = [
    "BACKEND",
    "KERNELS",
    "Drift",
    "IntegratorConfig",
    "PeriodMeasurement",
    "Trajectory",
    "conserved_drift",
    "diagnostics",
    "find_closure",
    "find_crossings",
    "get_kernel",
    "integrate",
    "measure_period",
    "pericenter_time",
    "phase_distance",
    "radial_turning_points",
    "verify_orbit_equation",
]

"""Classical Kepler-Coulomb motion on the single-sheeted hyperboloid H^3_1.

Closed-form Hamilton-Jacobi orbits (:mod:`hyperkepler.hjorbits`) and an
independent numerical propagator (:mod:`hyperkepler.integrator`) that
checks them.
"""

from .dynamics import OrbitConstants, PhasePoint, hamiltonian
from .geometry import AmbientPoint, Params, PseudoSphericalPoint
from .hjorbits import ConicParams, OrbitKind, classify, conic_params, period

__version__ = "0.1.0"

__all__ = [
    "AmbientPoint",
    "ConicParams",
    "OrbitConstants",
    "OrbitKind",
    "Params",
    "PhasePoint",
    "PseudoSphericalPoint",
    "classify",
    "conic_params",
    "hamiltonian",
    "period",
]

"""Pseudo-spherical chart on the single-sheeted hyperboloid H^3_1.

The hyperboloid is ``-x0^2 + x1^2 + x2^2 + x3^2 = R^2`` inside Minkowski
space M(3,1), parametrised by

    x0 = R sinh(tau)
    x1 = R cosh(tau) sin(theta) cos(phi)
    x2 = R cosh(tau) sin(theta) sin(phi)
    x3 = R cosh(tau) cos(theta)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConstraintViolation, DegeneratePoint

TWO_PI = 2.0 * math.pi
DEFAULT_CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True)
class Params:
    """Coupling ``alpha`` and curvature radius ``R`` (both > 0)."""

    alpha: float = 1.0
    R: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not (self.R > 0.0 and math.isfinite(self.R)):
            raise ValueError(f"R must be positive, got {self.R!r}")


def normalize_phi(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    # fmod of a tiny negative number can round back up to 2*pi
    return 0.0 if phi >= TWO_PI else phi


@dataclass(frozen=True)
class PseudoSphericalPoint:
    """Chart coordinates; phi is stored in [0, 2pi), theta clamped to [0, pi]."""

    tau: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", min(max(float(self.theta), 0.0), math.pi))
        object.__setattr__(self, "phi", normalize_phi(float(self.phi)))


@dataclass(frozen=True)
class AmbientPoint:
    x0: float
    x1: float
    x2: float
    x3: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x1, self.x2, self.x3)


def to_embedding(pt: PseudoSphericalPoint, params: Params) -> AmbientPoint:
    R = params.R
    rc = R * math.cosh(pt.tau)
    st = math.sin(pt.theta)
    return AmbientPoint(
        R * math.sinh(pt.tau),
        rc * st * math.cos(pt.phi),
        rc * st * math.sin(pt.phi),
        rc * math.cos(pt.theta),
    )


def constraint_residual(x: AmbientPoint, params: Params) -> float:
    """Return ``(-x0^2 + x1^2 + x2^2 + x3^2) / R^2 - 1``."""
    R2 = params.R * params.R
    return (-x.x0 * x.x0 + x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3) / R2 - 1.0


def from_embedding(
    x: AmbientPoint, params: Params, tol: float = DEFAULT_CONSTRAINT_TOL
) -> PseudoSphericalPoint:
    """Invert :func:`to_embedding`.

    ``tol`` bounds the constraint residual relative to the size of the
    point, since cosh/sinh rounding grows with |tau|. At the poles
    (theta = 0 or pi) phi is returned as 0.
    """
    rho = math.sqrt(x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3)
    if rho == 0.0:
        raise DegeneratePoint("x1 = x2 = x3 = 0 has no pseudo-spherical angles")
    res = constraint_residual(x, params)
    scale = max(1.0, (x.x0 * x.x0 + rho * rho) / (params.R * params.R))
    if abs(res) > tol * scale:
        raise ConstraintViolation(f"constraint residual {res:.3e} exceeds {tol:.1e}")
    tau = math.asinh(x.x0 / params.R)
    theta = math.atan2(math.hypot(x.x1, x.x2), x.x3)
    phi = 0.0 if x.x1 == 0.0 and x.x2 == 0.0 else math.atan2(x.x2, x.x1)
    return PseudoSphericalPoint(tau, theta, phi)


def line_element_sq(
    pt: PseudoSphericalPoint,
    d: tuple[float, float, float],
    params: Params,
) -> float:
    """Squared interval ``R^2 [dtau^2 - cosh^2(tau)(dtheta^2 + sin^2(theta) dphi^2)]``.

    The metric is indefinite, so angular displacements give negative values.
    """
    dtau, dtheta, dphi = d
    ch2 = math.cosh(pt.tau) ** 2
    st2 = math.sin(pt.theta) ** 2
    return params.R**2 * (dtau * dtau - ch2 * (dtheta * dtheta + st2 * dphi * dphi))


def minkowski_interval(a: AmbientPoint, b: AmbientPoint) -> float:
    """``dx0^2 - dx1^2 - dx2^2 - dx3^2`` between two ambient points."""
    d0, d1, d2, d3 = (b.x0 - a.x0, b.x1 - a.x1, b.x2 - a.x2, b.x3 - a.x3)
    return d0 * d0 - d1 * d1 - d2 * d2 - d3 * d3

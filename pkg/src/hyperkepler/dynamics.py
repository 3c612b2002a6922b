"""Hamiltonian dynamics in the pseudo-spherical phase space.

The Hamiltonian is

    H = [p_tau^2 - (p_theta^2 + p_phi^2 / sin^2 theta) / cosh^2 tau] / (2 R^2)
        - (alpha / R) tanh tau

The angular block enters with a minus sign because the induced metric is
indefinite. With p_phi > 0 the azimuth therefore decreases in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularConfiguration
from .geometry import Params, PseudoSphericalPoint


@dataclass(frozen=True)
class PhasePoint:
    """Point ``(tau, theta, phi, p_tau, p_theta, p_phi)`` of phase space.

    ``phi`` is kept as given (not wrapped) so integrated trajectories stay
    continuous; :attr:`q` returns the normalised chart point.
    """

    tau: float
    theta: float
    phi: float
    p_tau: float
    p_theta: float
    p_phi: float

    @property
    def q(self) -> PseudoSphericalPoint:
        return PseudoSphericalPoint(self.tau, self.theta, self.phi)

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.tau, self.theta, self.phi, self.p_tau, self.p_theta, self.p_phi]
        )

    @classmethod
    def from_array(cls, y) -> "PhasePoint":
        return cls(*(float(v) for v in y))


@dataclass(frozen=True)
class OrbitConstants:
    """Separation constants: energy ``E``, squared angular momentum ``L2``
    and azimuthal momentum ``p_phi``.

    ``p_phi`` defaults to the equatorial choice ``sqrt(L2)``.
    """

    E: float
    L2: float
    p_phi: float | None = None

    def __post_init__(self):
        if self.L2 < 0.0:
            raise ValueError(f"L2 must be non-negative, got {self.L2!r}")
        if self.p_phi is None:
            object.__setattr__(self, "p_phi", math.sqrt(self.L2))
        elif self.p_phi * self.p_phi > self.L2 * (1.0 + 1e-12):
            raise ValueError("p_phi^2 must not exceed L2")

    @property
    def L(self) -> float:
        return math.sqrt(self.L2)


def _azimuthal_term(theta: float, p_phi: float) -> float:
    """``p_phi^2 / sin^2 theta`` with the removable 0/0 at the poles set to 0."""
    if p_phi == 0.0:
        return 0.0
    s = math.sin(theta)
    if s == 0.0:
        raise SingularConfiguration("sin(theta) = 0 with p_phi != 0")
    return p_phi * p_phi / (s * s)


def potential(tau: float, params: Params) -> float:
    return -params.alpha / params.R * math.tanh(tau)


def hamiltonian(s: PhasePoint, params: Params) -> float:
    R = params.R
    ang = s.p_theta * s.p_theta + _azimuthal_term(s.theta, s.p_phi)
    return (s.p_tau * s.p_tau - ang / math.cosh(s.tau) ** 2) / (2.0 * R * R) + potential(
        s.tau, params
    )


def kinetic_energy(
    q: PseudoSphericalPoint, qdot: tuple[float, float, float], params: Params
) -> float:
    tdot, thdot, phdot = qdot
    ch2 = math.cosh(q.tau) ** 2
    st2 = math.sin(q.theta) ** 2
    return 0.5 * params.R**2 * (tdot * tdot - ch2 * (thdot * thdot + st2 * phdot * phdot))


def legendre_momenta(
    q: PseudoSphericalPoint, qdot: tuple[float, float, float], params: Params
) -> tuple[float, float, float]:
    tdot, thdot, phdot = qdot
    R2 = params.R**2
    ch2 = math.cosh(q.tau) ** 2
    return (R2 * tdot, -R2 * ch2 * thdot, -R2 * ch2 * math.sin(q.theta) ** 2 * phdot)


def angular_momentum_sq(s: PhasePoint) -> float:
    return s.p_theta * s.p_theta + _azimuthal_term(s.theta, s.p_phi)


def equations_of_motion(s: PhasePoint, params: Params) -> np.ndarray:
    """Hamilton's equations ``(dq/dt, dp/dt) = (dH/dp, -dH/dq)``."""
    alpha, R = params.alpha, params.R
    R2 = R * R
    ch = math.cosh(s.tau)
    sech2 = 1.0 / (ch * ch)
    th = math.tanh(s.tau)
    L2 = s.p_theta * s.p_theta + _azimuthal_term(s.theta, s.p_phi)
    if s.p_phi == 0.0:
        phidot = 0.0
        ptheta_dot = 0.0
    else:
        st = math.sin(s.theta)
        phidot = -s.p_phi * sech2 / (R2 * st * st)
        ptheta_dot = -s.p_phi * s.p_phi * math.cos(s.theta) * sech2 / (R2 * st * st * st)
    return np.array(
        [
            s.p_tau / R2,
            -s.p_theta * sech2 / R2,
            phidot,
            (alpha / R - L2 * th / R2) * sech2,
            ptheta_dot,
            0.0,
        ]
    )


def poisson_bracket(
    f: Callable[[PhasePoint], float],
    g: Callable[[PhasePoint], float],
    s: PhasePoint,
    h: float = 1e-5,
) -> float:
    """Central-difference estimate of the canonical bracket {f, g} at ``s``.

    The step for each coordinate is ``h * max(1, |z_i|)``.
    """
    z = s.as_array()

    def grad(fn):
        out = np.empty(6)
        for i in range(6):
            hi = h * max(1.0, abs(z[i]))
            zp, zm = z.copy(), z.copy()
            zp[i] += hi
            zm[i] -= hi
            out[i] = (fn(PhasePoint.from_array(zp)) - fn(PhasePoint.from_array(zm))) / (2 * hi)
        return out

    df, dg = grad(f), grad(g)
    return float(np.dot(df[:3], dg[3:]) - np.dot(dg[:3], df[3:]))


def state_from_constants(
    c: OrbitConstants,
    params: Params,
    tau: float,
    *,
    theta: float = math.pi / 2,
    phi: float = 0.0,
    outward: bool = True,
    p_theta_sign: float = 1.0,
) -> PhasePoint:
    """Build a phase point with prescribed E, L^2, p_phi at position ``tau``.

    ``p_tau`` follows from the energy; ``outward`` selects its sign.
    ``p_theta`` follows from L^2 at the given ``theta``.
    """
    R = params.R
    ang = c.L2 - _azimuthal_term(theta, c.p_phi)
    if ang < 0.0:
        if ang < -1e-12 * max(1.0, c.L2):
            raise ValueError("p_phi^2 / sin^2(theta) exceeds L2 at this theta")
        ang = 0.0
    rad = 2.0 * R * R * (c.E - potential(tau, params)) + c.L2 / math.cosh(tau) ** 2
    if rad < 0.0:
        if rad < -1e-12 * max(1.0, abs(c.E) * R * R):
            raise ValueError("tau lies outside the classically allowed region")
        rad = 0.0
    p_tau = math.sqrt(rad) if outward else -math.sqrt(rad)
    return PhasePoint(tau, theta, phi, p_tau, math.copysign(math.sqrt(ang), p_theta_sign), c.p_phi)

"""Closed-form Hamilton-Jacobi solution of the Kepler problem on H^3_1.

After separation the quasi-radial motion is one-dimensional in the
effective potential

    V_eff(tau) = -(alpha/R) tanh tau - L^2 / (2 R^2 cosh^2 tau)

and in the variable X = tanh(tau) the radial momentum satisfies
p_tau^2 = L^2 (X1 - X)(X - X2). Everything here is expressed through the
two roots X1 >= X2 of that quadratic.

Discriminants are evaluated as ``2 R^2 (E - E_min) / L^2``, which is
algebraically the same as ``(alpha R / L^2)^2 + 2 R^2 E / L^2 + 1`` but
vanishes exactly when E is the minimum energy returned by
:func:`energy_min`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.integrate import quad

from .dynamics import OrbitConstants, PhasePoint, angular_momentum_sq, hamiltonian
from .errors import (
    DegenerateAngularMomentum,
    DegenerateLatus,
    NoRealMotion,
    NotACircle,
    NotBounded,
    NotUnbound,
    OutOfRange,
)
from .geometry import AmbientPoint, Params

#: arcsin arguments within this distance outside [-1, 1] are treated as roundoff
ARCSIN_SLACK = 1e-12
#: relative tolerance used when deciding E == E_min or E == -alpha/R
CLASSIFY_TOL = 1e-12
#: a bound orbit closes after this many multiples of :func:`period`
#: (one pericentre-apocentre-pericentre cycle, during which phi turns by 2 pi);
#: measured with the integrator, see tests/test_integrator.py
CLOSURE_PERIODS = 2


class OrbitKind(str, enum.Enum):
    CIRCLE = "Circle"
    ELLIPSE = "Ellipse"
    PARABOLA = "Parabola"
    HYPERBOLA = "Hyperbola"
    DOUBLY_UNBOUNDED = "DoublyUnbounded"


@dataclass(frozen=True)
class OrbitClass:
    """Orbit type plus the energy window ``(E_lo, E_hi)`` it belongs to."""

    kind: OrbitKind
    window: tuple[float, float]

    @property
    def bounded(self) -> bool:
        return self.kind in (OrbitKind.CIRCLE, OrbitKind.ELLIPSE)


@dataclass(frozen=True)
class TurningPoints:
    """Roots ``X1 >= X2`` in ``X = tanh(tau)`` of the radial quadratic."""

    X1: float
    X2: float


@dataclass(frozen=True)
class ConicParams:
    p: float
    eps: float


@dataclass(frozen=True)
class EllipseAxes:
    """Semi-major axis ``a`` and focal half-distance ``c`` (tau units)."""

    a: float
    c: float
    tau_min: float
    tau_max: float


@dataclass(frozen=True)
class HJConstants:
    t0: float
    beta: float
    phi0: float | None


def _ratio(L2: float, params: Params) -> float:
    if not L2 > 0.0:
        raise OutOfRange("L2 must be positive")
    return params.alpha * params.R / L2


def _clip_unit(x: float, what: str) -> float:
    if abs(x) <= 1.0:
        return x
    if abs(x) <= 1.0 + ARCSIN_SLACK:
        return math.copysign(1.0, x)
    raise OutOfRange(f"{what}: arcsin argument {x!r} outside [-1, 1]")


def effective_potential(tau: float, L2: float, params: Params) -> float:
    ch = math.cosh(tau)
    return -params.alpha / params.R * math.tanh(tau) - L2 / (2.0 * params.R**2 * ch * ch)


def energy_min(L2: float, params: Params) -> float:
    """``-(L^2 + alpha^2 R^2 / L^2) / (2 R^2)``; the true minimum only if L^2 > alpha R."""
    aR = params.alpha * params.R
    return -(L2 + aR * aR / L2) / (2.0 * params.R**2)


def potential_minimum(L2: float, params: Params) -> tuple[float, float] | None:
    """Location and depth of the well, or None when V_eff is monotone (L^2 <= alpha R)."""
    if not L2 > params.alpha * params.R:
        return None
    return math.atanh(params.alpha * params.R / L2), energy_min(L2, params)


def _disc(c: OrbitConstants, params: Params) -> float:
    return 2.0 * params.R**2 * (c.E - energy_min(c.L2, params)) / c.L2


def turning_points(c: OrbitConstants, params: Params) -> TurningPoints:
    b = _ratio(c.L2, params)
    if c.E == -params.alpha / params.R:
        # the discriminant is the perfect square (1 - b)^2: roots are 1 and 2b - 1
        other = 2.0 * b - 1.0
        return TurningPoints(max(1.0, other), min(1.0, other))
    disc = _disc(c, params)
    if disc < 0.0:
        raise NoRealMotion(f"E={c.E!r} lies below the effective-potential minimum")
    root = math.sqrt(disc)
    return TurningPoints(b + root, b - root)


def _is_close(x: float, y: float, tol: float) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def classify(c: OrbitConstants, params: Params, tol: float = CLASSIFY_TOL) -> OrbitClass:
    """Assign the orbit type from the energy window E falls in.

    Raises :class:`NoRealMotion` when no tau is classically allowed.
    """
    _ratio(c.L2, params)
    E = c.E
    edge = params.alpha / params.R
    if c.L2 > params.alpha * params.R:
        e_min = energy_min(c.L2, params)
        if _is_close(E, e_min, tol):
            return OrbitClass(OrbitKind.CIRCLE, (e_min, e_min))
        if E < e_min:
            raise NoRealMotion(f"E={E!r} below E_min={e_min!r}")
        if _is_close(E, -edge, tol):
            return OrbitClass(OrbitKind.PARABOLA, (-edge, -edge))
        if E < -edge:
            return OrbitClass(OrbitKind.ELLIPSE, (e_min, -edge))
    elif E < -edge or _is_close(E, -edge, tol):
        # V_eff decreases monotonically towards -alpha/R: nothing is reachable
        raise NoRealMotion(f"E={E!r} <= -alpha/R with L2 <= alpha R")
    if E < edge:
        return OrbitClass(OrbitKind.HYPERBOLA, (-edge, edge))
    return OrbitClass(OrbitKind.DOUBLY_UNBOUNDED, (edge, math.inf))


def conic_params(c: OrbitConstants, params: Params) -> ConicParams:
    b = _ratio(c.L2, params)
    if b == 1.0:
        raise DegenerateLatus("L2 = alpha R: orbit parameter p is undefined")
    one_minus = 1.0 - b
    rad = b * _disc(c, params) * c.L2 / (params.alpha * params.R) / (one_minus * one_minus)
    # equals 1 + (2 alpha R / L^2)(1 + R E / alpha) / (1 - alpha R / L^2)^2
    if rad < 0.0:
        if rad < -1e-12:
            raise NoRealMotion("eccentricity radicand is negative")
        rad = 0.0
    return ConicParams(1.0 / one_minus, math.sqrt(rad))


def orbit_tau_of_phi(cp: ConicParams, phi: float) -> float | None:
    """Solve ``1/(1 - tanh tau) = p / (1 + eps cos phi)`` for tau.

    Returns None where the right-hand side is not positive (the path is at
    infinity) or where the implied tanh(tau) falls outside (-1, 1).
    """
    den = 1.0 + cp.eps * math.cos(phi)
    if den == 0.0:
        return None
    r = cp.p / den
    if not r > 0.5:
        return None
    X = 1.0 - 1.0 / r
    if not -1.0 < X < 1.0:
        return None
    return math.atanh(X)


def circle_radius(c: OrbitConstants, params: Params, tol: float = 1e-9) -> float:
    """Quasi-radius of the circular orbit, ``atanh(alpha R / L^2)``.

    Equivalently ``atanh(R|E|/alpha - sqrt(R^2 E^2 / alpha^2 - 1))`` at E = E_min.
    """
    if not c.L2 > params.alpha * params.R:
        raise NotACircle("circular orbits require L2 > alpha R")
    if not _is_close(c.E, energy_min(c.L2, params), tol):
        raise NotACircle(f"E={c.E!r} differs from E_min={energy_min(c.L2, params)!r}")
    return math.atanh(params.alpha * params.R / c.L2)


def ellipse_axes(c: OrbitConstants, params: Params) -> EllipseAxes:
    """Half the sum and half the difference of the apsidal quasi-radii.

    Satisfies ``tanh 2a = alpha / (R|E|)`` and
    ``tanh 2c = eps / (p - (p - 1) coth 2a)``; ``a - c`` is negative when
    the pericentre lies across the centre.
    """
    cls = classify(c, params)
    if not cls.bounded:
        raise NotBounded(f"{cls.kind.value} orbit has no axes")
    if cls.kind is OrbitKind.CIRCLE:
        tau_c = math.atanh(params.alpha * params.R / c.L2)
        return EllipseAxes(tau_c, 0.0, tau_c, tau_c)
    tp = turning_points(c, params)
    tau_min, tau_max = math.atanh(tp.X2), math.atanh(tp.X1)
    return EllipseAxes(0.5 * (tau_max + tau_min), 0.5 * (tau_max - tau_min), tau_min, tau_max)


def period(E: float, params: Params) -> float:
    """Time for one pericentre-to-apocentre traversal of a bound orbit.

    Depends on E only. A full radial oscillation (and one turn in phi)
    takes twice this.
    """
    ratio = params.alpha / (params.R * abs(E))
    if not (E < 0.0 and ratio < 1.0):
        raise OutOfRange(f"period needs E < -alpha/R, got E={E!r}")
    pref = math.pi * params.R / math.sqrt(8.0 * abs(E))
    return pref * (1.0 / math.sqrt(1.0 + ratio) + 1.0 / math.sqrt(1.0 - ratio))


def period_from_axis(a: float, params: Params) -> float:
    """Third-law form ``T^2 = (pi^2 R^3 / alpha) sinh a cosh^3 a``."""
    if not a > 0.0:
        raise OutOfRange("semi-major axis must be positive")
    return math.sqrt(
        math.pi**2 * params.R**3 / params.alpha * math.sinh(a) * math.cosh(a) ** 3
    )


def semi_major_axis(E: float, params: Params) -> float:
    """Invert ``tanh 2a = alpha / (R |E|)``."""
    ratio = params.alpha / (params.R * abs(E))
    if not (E < 0.0 and ratio < 1.0):
        raise OutOfRange(f"no bound orbit at E={E!r}")
    return 0.5 * math.atanh(ratio)


def time_of_flight(
    c: OrbitConstants,
    params: Params,
    X_from: float,
    X_to: float,
    *,
    epsabs: float = 1e-13,
) -> float:
    """Signed flight time between two values of X = tanh(tau).

    Uses X = X2 + (X1 - X2) sin^2 u, which turns the inverse square-root
    endpoint singularities into the smooth integrand 2 / (1 - X(u)^2).
    """
    tp = turning_points(c, params)
    lo, hi = max(tp.X2, -1.0), min(tp.X1, 1.0)
    slack = 1e-12
    for X in (X_from, X_to):
        if not (-1.0 < X < 1.0 and lo - slack <= X <= hi + slack):
            raise OutOfRange(f"X={X!r} outside the allowed region [{lo!r}, {hi!r}]")
    if X_from == X_to:
        return 0.0
    span = tp.X1 - tp.X2
    if span == 0.0:
        raise OutOfRange("circular orbit: X is constant")

    def u_of(X):
        return math.asin(math.sqrt(min(max((X - tp.X2) / span, 0.0), 1.0)))

    def integrand(u):
        X = tp.X2 + span * math.sin(u) ** 2
        return 2.0 / (1.0 - X * X)

    val, _ = quad(integrand, u_of(X_from), u_of(X_to), epsabs=epsabs, epsrel=1e-13, limit=200)
    return params.R**2 / c.L * val


def _radial_angle(X: float, c: OrbitConstants, params: Params, p_tau: float | None) -> float:
    b = _ratio(c.L2, params)
    disc = _disc(c, params)
    if disc < 0.0:
        raise NoRealMotion("no real turning points")
    D = math.sqrt(disc)
    if p_tau is not None:
        return math.atan2(c.L * (X - b), p_tau)
    if D == 0.0:
        if abs(X - b) > ARCSIN_SLACK:
            raise OutOfRange("circular orbit evaluated off its radius")
        return 0.0
    return math.asin(_clip_unit((X - b) / D, "radial term"))


def _polar_angle(theta: float, c: OrbitConstants, p_theta: float | None) -> float:
    K2 = 1.0 - c.p_phi * c.p_phi / c.L2
    K = math.sqrt(max(K2, 0.0))
    if p_theta is not None and K > 0.0:
        return math.atan2(c.L * math.cos(theta), -p_theta * math.sin(theta))
    if K == 0.0:
        if abs(math.cos(theta)) > ARCSIN_SLACK:
            raise OutOfRange("equatorial orbit evaluated off the equator")
        return 0.0
    return math.asin(_clip_unit(math.cos(theta) / K, "polar term"))


def hj_beta(
    tau: float,
    theta: float,
    c: OrbitConstants,
    params: Params,
    *,
    p_tau: float | None = None,
    p_theta: float | None = None,
) -> float:
    """Constant conjugate to L^2.

    Without momenta this is the principal-branch closed form

        (1/2L) [asin((tanh tau - b)/D) + asin(cos theta / sqrt(1 - p_phi^2/L^2))]

    which holds on the branch p_tau >= 0, p_theta <= 0. Passing the momenta
    selects the branch from their signs, giving a value constant along the
    whole trajectory modulo pi/L.
    """
    chi = _radial_angle(math.tanh(tau), c, params, p_tau)
    psi = _polar_angle(theta, c, p_theta)
    return (chi + psi) / (2.0 * c.L)


def hj_phi0(
    theta: float, phi: float, c: OrbitConstants, *, p_theta: float | None = None
) -> float:
    """Node angle phi0 of the orbit plane, ``phi + asin(cot theta / k)``.

    ``k = sqrt(L^2/p_phi^2 - 1)``. With ``p_theta`` the arcsine branch is
    chosen from the direction of motion.
    """
    if c.p_phi == 0.0:
        raise DegenerateAngularMomentum("p_phi = 0: orbit plane contains the polar axis")
    k2 = c.L2 / (c.p_phi * c.p_phi) - 1.0
    if k2 <= 0.0:
        raise OutOfRange("equatorial orbit: phi0 is arbitrary")
    cot = math.cos(theta) / math.sin(theta)
    if p_theta is not None:
        return phi + math.atan2(cot, p_theta / c.p_phi)
    return phi + math.asin(_clip_unit(cot / math.sqrt(k2), "plane relation"))


def orbit_plane(c: OrbitConstants, phi0: float, phi: float) -> float:
    """theta(phi) on the orbit plane: ``cot theta = k sin(phi0 - phi)``."""
    if c.p_phi == 0.0:
        raise DegenerateAngularMomentum("p_phi = 0")
    k = math.sqrt(max(c.L2 / (c.p_phi * c.p_phi) - 1.0, 0.0))
    return math.atan2(1.0, k * math.sin(phi0 - phi))


def orbit_plane_residual(x: AmbientPoint, c: OrbitConstants, phi0: float) -> float:
    """``x3 - k (x1 sin phi0 - x2 cos phi0)``, scaled by the spatial radius."""
    if c.p_phi == 0.0:
        raise DegenerateAngularMomentum("p_phi = 0")
    k = math.sqrt(max(c.L2 / (c.p_phi * c.p_phi) - 1.0, 0.0))
    rho = math.sqrt(x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3)
    return (x.x3 - k * (x.x1 * math.sin(phi0) - x.x2 * math.cos(phi0))) / rho


def asymptote_angle(cp: ConicParams) -> float:
    """Azimuth at which the orbit equation sends tanh(tau) -> 1."""
    if not cp.eps > 1.0:
        raise NotUnbound(f"eps={cp.eps!r} <= 1")
    return math.acos(-1.0 / cp.eps)


def constants_of(s: PhasePoint, params: Params) -> OrbitConstants:
    return OrbitConstants(hamiltonian(s, params), angular_momentum_sq(s), s.p_phi)


def hj_constants(s: PhasePoint, params: Params, t: float = 0.0) -> HJConstants:
    """All three HJ constants (t0, beta, phi0) for the state ``s`` at time ``t``.

    ``t0`` is the time of pericentre passage on the current radial branch;
    ``phi0`` is None for equatorial orbits.
    """
    c = constants_of(s, params)
    tp = turning_points(c, params)
    if tp.X2 <= -1.0:
        raise OutOfRange("no pericentre: tau is unbounded below")
    X = math.tanh(s.tau)
    if tp.X1 == tp.X2:
        since = 0.0
    else:
        since = math.copysign(time_of_flight(c, params, tp.X2, min(max(X, tp.X2), tp.X1)), s.p_tau)
    beta = hj_beta(s.tau, s.theta, c, params, p_tau=s.p_tau, p_theta=s.p_theta)
    try:
        phi0 = hj_phi0(s.theta, s.phi, c, p_theta=s.p_theta)
    except (OutOfRange, DegenerateAngularMomentum):
        phi0 = None
    return HJConstants(float(t) - since, beta, phi0)

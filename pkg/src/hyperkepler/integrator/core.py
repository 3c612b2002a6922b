"""Numerical propagation of Hamilton's equations on H^3_1.

This is the brute-force oracle against which the closed-form orbits are
checked, so nothing in here consults :mod:`hyperkepler.hjorbits`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..dynamics import PhasePoint, hamiltonian
from ..errors import NotBounded, NotPlanar, SingularConfiguration, StepFailure
from ..geometry import Params
from ._backend import get_kernel

_STATUS = {0: "completed", 1: "escaped", 2: "step failure", 3: "singular", 4: "max steps"}
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    max_step: float = math.inf
    tau_escape: float = 15.0
    max_time: float = 1000.0
    closure_tol: float = 1e-6
    max_steps: int = 10_000_000
    backend: str | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.tau_escape > 0:
            raise ValueError("tau_escape must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted steps of an adaptive run plus per-sample diagnostics.

    ``y`` has columns (tau, theta, phi, p_tau, p_theta, p_phi) with phi
    unwrapped. ``dense[i]`` interpolates the step ``[t[i], t[i+1]]``.
    """

    t: np.ndarray
    y: np.ndarray
    dense: np.ndarray
    params: Params
    config: IntegratorConfig
    status: str
    nfev: int
    energy: np.ndarray = field(repr=False)
    L2: np.ndarray = field(repr=False)
    p_phi: np.ndarray = field(repr=False)
    constraint: np.ndarray = field(repr=False)
    escape_time: float | None = None

    def __len__(self) -> int:
        return self.t.size

    def state(self, i: int) -> PhasePoint:
        return PhasePoint.from_array(self.y[i])

    def __call__(self, t) -> np.ndarray:
        """Dense-output evaluation; returns shape (6,) or (len(t), 6)."""
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if self.dense.shape[0] == 0:
            out = np.repeat(self.y[:1], tt.size, axis=0)
        else:
            idx = np.clip(np.searchsorted(self.t, tt, side="right") - 1, 0, self.dense.shape[0] - 1)
            h = self.t[idx + 1] - self.t[idx]
            th = ((tt - self.t[idx]) / h)[:, None]
            r = self.dense[idx]
            out = r[:, 0] + th * (r[:, 1] + (1 - th) * (r[:, 2] + th * (r[:, 3] + (1 - th) * r[:, 4])))
        return out[0] if np.ndim(t) == 0 else out

    def state_at(self, t: float) -> np.ndarray:
        """State at ``t`` from one full-accuracy step off the preceding sample.

        More accurate than the interpolant; used to polish event times.
        """
        i = int(np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, self.t.size - 1))
        h = t - self.t[i]
        if h == 0.0:
            return self.y[i].copy()
        kernel = get_kernel(self.config.backend)
        return np.asarray(kernel.step(self.y[i], h, self.params.alpha, self.params.R))


def diagnostics(y: np.ndarray, params: Params):
    tau, theta, p_tau, p_theta, p_phi = y[:, 0], y[:, 1], y[:, 3], y[:, 4], y[:, 5]
    with np.errstate(divide="ignore", invalid="ignore"):
        az = np.where(p_phi == 0.0, 0.0, p_phi**2 / np.sin(theta) ** 2)
    L2 = p_theta**2 + az
    ch = np.cosh(tau)
    energy = (p_tau**2 - L2 / ch**2) / (2 * params.R**2) - params.alpha / params.R * np.tanh(tau)
    # embed and test -x0^2 + |x|^2 = R^2
    R = params.R
    x0 = R * np.sinh(tau)
    x1 = R * ch * np.sin(theta) * np.cos(y[:, 2])
    x2 = R * ch * np.sin(theta) * np.sin(y[:, 2])
    x3 = R * ch * np.cos(theta)
    # relative to the size of the point: cosh^2 tau rounding grows with |tau|
    cons = ((-x0**2 + x1**2 + x2**2 + x3**2) / R**2 - 1.0) / ((x0**2 + x1**2 + x2**2 + x3**2) / R**2)
    return energy, L2, p_phi.copy(), cons


def integrate(
    s0: PhasePoint,
    params: Params,
    cfg: IntegratorConfig | None = None,
    t_end: float | None = None,
) -> Trajectory:
    cfg = cfg or IntegratorConfig()
    t_end = cfg.max_time if t_end is None else float(t_end)
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    hamiltonian(s0, params)  # raises SingularConfiguration early
    kernel = get_kernel(cfg.backend)
    t, y, dense, status, nfev = kernel.integrate(
        s0.as_array(), 0.0, t_end, cfg.rel_tol, cfg.abs_tol, cfg.max_step, 0.0,
        cfg.tau_escape, params.alpha, params.R, cfg.max_steps,
    )
    label = _STATUS[status]
    if status == 3:
        raise SingularConfiguration(f"trajectory reached sin(theta) = 0 near t={t[-1]:.6g}")
    if status in (2, 4):
        raise StepFailure(f"{label} at t={t[-1]:.6g} after {t.size - 1} steps")
    escape_time = None
    if status == 1 and t.size > 1:
        escape_time = _refine_escape(t, y, dense, params, cfg)
        # redo the last step so the run ends exactly on the escape event
        if escape_time > t[-2]:
            tt, yt, dt, _, nf = kernel.integrate(
                y[-2], t[-2], escape_time, cfg.rel_tol, cfg.abs_tol, cfg.max_step,
                escape_time - t[-2], math.inf, params.alpha, params.R, cfg.max_steps,
            )
            t = np.concatenate([t[:-1], tt[1:]])
            y = np.concatenate([y[:-1], yt[1:]])
            dense = np.concatenate([dense[:-1], dt])
            nfev += nf
        else:
            t, y, dense = t[:-1], y[:-1], dense[:-2]
    energy, L2, p_phi, cons = diagnostics(y, params)
    return Trajectory(t, y, dense, params, cfg, label, nfev, energy, L2, p_phi, cons, escape_time)


def _refine_escape(t, y, dense, params, cfg) -> float:
    kernel = get_kernel(cfg.backend)
    edge = cfg.tau_escape
    a, b = t[-2], t[-1]

    def g(tt):
        return abs(kernel.step(y[-2], tt - a, params.alpha, params.R)[0]) - edge

    if abs(y[-2][0]) >= edge:
        return float(a)
    return brentq(g, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def find_crossings(traj: Trajectory, component: int, level: float = 0.0, direction: int = 0):
    """Times where ``y[component]`` crosses ``level``.

    Brackets come from sign changes between samples; roots are polished
    on :meth:`Trajectory.state_at`. ``direction`` = +1 keeps upward
    crossings, -1 downward, 0 both. Returns a list of ``(t, sign)``.
    """
    g = traj.y[:, component] - level
    out = []
    for i in range(g.size - 1):
        ga, gb = g[i], g[i + 1]
        if ga == 0.0 or not (ga * gb < 0.0 or (gb == 0.0 and i + 1 < g.size - 1)):
            continue
        sign = 1 if gb > ga else -1
        if direction and sign != direction:
            continue
        if gb == 0.0:
            out.append((float(traj.t[i + 1]), sign))
            continue

        def f(t, c=component):
            return traj.state_at(t)[c] - level

        fa, fb = f(traj.t[i]), f(traj.t[i + 1])
        if fa * fb > 0.0:
            # the single-step values disagree in sign with the samples only
            # at roundoff level; fall back to the interpolant
            def f(t, c=component):
                return traj(t)[c] - level

        out.append((brentq(f, traj.t[i], traj.t[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps), sign))
    return out


def radial_turning_points(traj: Trajectory, amplitude_tol: float = 1e-8):
    """Pericentre/apocentre passages as ``(t, "pericenter"|"apocenter")``.

    Returns an empty list when the spread of tau is below ``amplitude_tol``
    (circular orbit: p_tau only carries roundoff).
    """
    if np.ptp(traj.y[:, 0]) < amplitude_tol:
        return []
    names = {1: "pericenter", -1: "apocenter"}
    return [(t, names[s]) for t, s in find_crossings(traj, 3)]


def phase_distance(a, b, p_scale: float = 1.0) -> float:
    """Weighted max-norm with phi wrapped to (-pi, pi]."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    dphi = math.remainder(float(a[2]) - float(b[2]), TWO_PI)
    return float(max(d[0], d[1], abs(dphi), *(d[3:] / p_scale)))


@dataclass(frozen=True)
class PeriodMeasurement:
    """``T_radial``: pericentre-to-pericentre time (None for a circle).
    ``T_closure``: first return of the full phase point (None if not found).
    """

    T_radial: float | None
    T_closure: float | None
    closure_residual: float | None
    trajectory: Trajectory = field(repr=False)


def _closure_candidates(traj: Trajectory, s0: np.ndarray):
    if s0[5] != 0.0:
        phi = traj.y[:, 2]
        lo, hi = phi.min(), phi.max()
        cands = []
        k = 1
        while s0[2] + k * TWO_PI <= hi or s0[2] - k * TWO_PI >= lo:
            for target in (s0[2] + k * TWO_PI, s0[2] - k * TWO_PI):
                cands.extend(t for t, _ in find_crossings(traj, 2, target))
            k += 1
        return sorted(cands)
    return [t for t, name in radial_turning_points(traj) if name == "pericenter"]


def find_closure(traj: Trajectory, tol: float | None = None) -> tuple[float, float] | None:
    """First time the full phase point returns to its initial value.

    Candidates are the times where phi has turned by a multiple of 2 pi
    (pericentre passages when p_phi = 0). Returns ``(t, residual)`` or None.
    """
    tol = traj.config.closure_tol if tol is None else tol
    y0 = traj.y[0]
    p_scale = max(1.0, float(np.max(np.abs(y0[3:]))))
    for tc in _closure_candidates(traj, y0):
        r = phase_distance(traj.state_at(tc), y0, p_scale)
        if r < tol:
            return tc, r
    return None


def measure_period(
    s0: PhasePoint,
    params: Params,
    cfg: IntegratorConfig | None = None,
    horizon: float = 10.0,
) -> PeriodMeasurement:
    """Measure radial and closure periods by integrating until both are seen.

    The horizon starts at ``horizon`` and doubles up to ``cfg.max_time``.
    """
    cfg = cfg or IntegratorConfig()
    while True:
        horizon = min(horizon, cfg.max_time)
        traj = integrate(s0, params, cfg, horizon)
        if traj.status == "escaped":
            raise NotBounded(f"escape at t={traj.escape_time:.6g} before the orbit closed")
        peris = [t for t, name in radial_turning_points(traj) if name == "pericenter"]
        apos = [t for t, name in radial_turning_points(traj) if name == "apocenter"]
        circular = np.ptp(traj.y[:, 0]) < 1e-8
        T_radial = None
        for seq in (peris, apos):
            if len(seq) >= 2:
                T_radial = seq[1] - seq[0]
                break
        T_closure = residual = None
        found = find_closure(traj)
        if found is not None:
            T_closure, residual = found
        if (T_radial is not None or circular) and T_closure is not None:
            break
        if horizon >= cfg.max_time:
            break
        horizon *= 2.0
    return PeriodMeasurement(T_radial, T_closure, residual, traj)


@dataclass(frozen=True)
class Drift:
    dE: float
    dL2: float
    dpphi: float
    dconstraint: float


def _rel_drift(q: np.ndarray, floor: float = 1e-6) -> float:
    q0 = float(q[0])
    d = float(np.max(np.abs(q - q0)))
    return d / abs(q0) if abs(q0) > floor else d


def conserved_drift(traj: Trajectory) -> Drift:
    """Largest deviation from the initial value.

    Drifts are relative unless the initial value is within 1e-6 of zero;
    the constraint entry is the largest relative embedding residual.
    """
    return Drift(
        _rel_drift(traj.energy),
        _rel_drift(traj.L2),
        _rel_drift(traj.p_phi),
        float(np.max(np.abs(traj.constraint))),
    )


def pericenter_time(traj: Trajectory) -> float:
    """Time of the deepest pericentre passage (or of the smallest tau sample)."""
    passages = [t for t, name in radial_turning_points(traj) if name == "pericenter"]
    i = int(np.argmin(traj.y[:, 0]))
    if not passages:
        return float(traj.t[i])
    return min(passages, key=lambda t: traj.state_at(t)[0])


def verify_orbit_equation(
    traj: Trajectory,
    p: float,
    eps: float,
    phi_ref: float | None = None,
    *,
    reciprocal: bool = False,
    planar_tol: float = 1e-8,
) -> float:
    """Max residual of ``1/(1 - tanh tau) = p / (1 + eps cos(phi - phi_ref))``.

    ``phi_ref`` defaults to the azimuth at pericentre. With ``reciprocal``
    both sides are inverted, ``(1 - tanh tau)`` against
    ``(1 + eps cos) / p``; this stays well conditioned on escaping branches
    where the direct form diverges.
    """
    y = traj.y
    p_scale = max(1.0, float(np.max(np.abs(y[0, 3:]))))
    if np.max(np.abs(y[:, 1] - math.pi / 2)) > planar_tol or np.max(np.abs(y[:, 4])) > planar_tol * p_scale:
        raise NotPlanar("trajectory leaves the equatorial plane")
    if phi_ref is None:
        phi_ref = float(traj.state_at(pericenter_time(traj))[2])
    # 1 - tanh(tau) without cancellation
    one_minus_x = 2.0 / (1.0 + np.exp(2.0 * y[:, 0]))
    den = 1.0 + eps * np.cos(y[:, 2] - phi_ref)
    if reciprocal:
        res = np.abs(one_minus_x - den / p)
    else:
        with np.errstate(divide="ignore"):
            res = np.abs(1.0 / one_minus_x - p / den)
    return float(np.max(res))

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperkepler.dynamics import OrbitConstants, PhasePoint
from hyperkepler.errors import (
    DegenerateAngularMomentum,
    DegenerateLatus,
    NoRealMotion,
    NotACircle,
    NotBounded,
    NotUnbound,
    OutOfRange,
)
from hyperkepler.geometry import Params, PseudoSphericalPoint, to_embedding
from hyperkepler.hjorbits import (
    ConicParams,
    OrbitKind,
    asymptote_angle,
    circle_radius,
    classify,
    conic_params,
    effective_potential,
    ellipse_axes,
    energy_min,
    hj_beta,
    hj_constants,
    hj_phi0,
    orbit_plane,
    orbit_plane_residual,
    orbit_tau_of_phi,
    period,
    period_from_axis,
    potential_minimum,
    semi_major_axis,
    time_of_flight,
    turning_points,
)

from .oracles import action_derivative_L2, golden_min, mp_period, veff, veff_roots

U = Params()
T_E2 = 1.7519956496205236  # mpmath quadrature, L^2 = 4, E = -2
T_CIRCLE = 1.6755160819145563


def C(E, L2, p_phi=None):
    return OrbitConstants(E, L2, p_phi)


# effective potential and its minimum

def test_effective_potential_examples():
    assert effective_potential(0.0, 4.0, U) == -2.0
    assert effective_potential(30.0, 4.0, U) == pytest.approx(-1.0, abs=1e-12)
    assert effective_potential(math.atanh(0.25), 4.0, U) == pytest.approx(-2.125, abs=1e-14)


def test_potential_minimum_matches_golden_section():
    tau0, vmin = potential_minimum(4.0, U)
    assert tau0 == pytest.approx(0.2554128118829953, abs=1e-15)
    g_tau, g_v = golden_min(lambda t: veff(t, 4.0), -3, 3)
    assert abs(vmin - g_v) < 1e-12
    # the well is flat: location only resolves to ~sqrt(eps)
    assert abs(tau0 - g_tau) < 1e-7


@pytest.mark.parametrize("L2", [0.5, 1.0, 0.999])
def test_no_minimum_for_small_L2(L2):
    assert potential_minimum(L2, U) is None


def test_monotone_potential_for_small_L2():
    taus = np.linspace(-5, 5, 501)
    v = [effective_potential(t, 0.5, U) for t in taus]
    assert np.all(np.diff(v) < 0)


# turning points

@pytest.mark.parametrize(
    "E, L2, X1, X2",
    [(-2.0, 4.0, 0.5, 0.0), (-2.125, 4.0, 0.25, 0.25), (-1.0, 4.0, 1.0, -0.5)],
)
def test_turning_point_examples(E, L2, X1, X2):
    tp = turning_points(C(E, L2), U)
    assert tp.X1 == pytest.approx(X1, abs=1e-15)
    assert tp.X2 == pytest.approx(X2, abs=1e-15)


def test_turning_points_below_minimum():
    with pytest.raises(NoRealMotion):
        turning_points(C(-2.2, 4.0), U)


@given(st.floats(1.05, 10.0), st.floats(0.0, 1.0), st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_vieta(L2, frac, alpha, R):
    params = Params(alpha, R)
    L2 = L2 * alpha * R
    e_min = energy_min(L2, params)
    E = e_min + frac * (alpha / R - e_min)
    tp = turning_points(C(E, L2), params)
    assert abs(tp.X1 + tp.X2 - 2 * alpha * R / L2) < 1e-12 * max(1, abs(tp.X1))
    assert abs(tp.X1 * tp.X2 + 2 * R * R * E / L2 + 1) < 1e-12 * max(1, tp.X1 * tp.X1)


@pytest.mark.parametrize("E, L2", [(-2.0, 4.0), (-2.1, 4.0), (-1.5, 4.0), (-1.2, 2.0), (-1.6, 3.0)])
def test_turning_points_match_bisection(E, L2):
    tp = turning_points(C(E, L2), U)
    lo, hi = veff_roots(E, L2)
    assert abs(math.atanh(tp.X2) - lo) < 1e-10
    assert abs(math.atanh(tp.X1) - hi) < 1e-10


# classification

@pytest.mark.parametrize(
    "E, L2, kind",
    [
        (-2.125, 4.0, OrbitKind.CIRCLE),
        (-2.0, 4.0, OrbitKind.ELLIPSE),
        (-1.0, 4.0, OrbitKind.PARABOLA),
        (0.0, 2.0, OrbitKind.HYPERBOLA),
        (0.5, 0.5, OrbitKind.HYPERBOLA),
        (1.0, 2.0, OrbitKind.DOUBLY_UNBOUNDED),
        (2.0, 0.5, OrbitKind.DOUBLY_UNBOUNDED),
    ],
)
def test_classify(E, L2, kind):
    assert classify(C(E, L2), U).kind is kind


@pytest.mark.parametrize("E, L2", [(-2.2, 4.0), (-1.0, 0.5), (-3.0, 0.5), (-2.0, 3.5)])
def test_classify_no_real_motion(E, L2):
    with pytest.raises(NoRealMotion):
        classify(C(E, L2), U)


def test_classify_is_total_on_valid_grid():
    for L2 in np.linspace(0.2, 6.0, 30):
        e_lo = energy_min(L2, U) if L2 > 1 else -1.0 + 1e-9
        for E in np.linspace(e_lo, 3.0, 40):
            cls = classify(C(E, L2), U)
            assert cls.window[0] <= E + 1e-9
            assert E <= cls.window[1] + 1e-9


# conic parameters

def test_conic_examples():
    cp = conic_params(C(-2.0, 4.0), U)
    assert cp.p == pytest.approx(4 / 3, rel=1e-15)
    assert cp.eps == pytest.approx(1 / 3, rel=1e-14)
    assert conic_params(C(-2.125, 4.0), U).eps == 0.0
    cp = conic_params(C(0.0, 2.0), U)
    assert cp.p == pytest.approx(2.0, rel=1e-15)
    assert cp.eps == pytest.approx(math.sqrt(5), rel=1e-15)
    # turning point read off the orbit equation agrees with the quadratic
    assert 1 - (1 + cp.eps) / cp.p == pytest.approx(turning_points(C(0.0, 2.0), U).X2, abs=1e-14)


def test_conic_degenerate_latus():
    with pytest.raises(DegenerateLatus):
        conic_params(C(0.0, 1.0), U)


@pytest.mark.parametrize("L2", [1.5, 2.0, 4.0, 7.3])
def test_parabolic_eccentricity_is_one(L2):
    assert abs(conic_params(C(-1.0, L2), U).eps - 1.0) < 1e-12


@pytest.mark.parametrize("L2", [1.5, 2.0, 4.0, 7.3])
def test_circular_eccentricity_is_zero(L2):
    assert conic_params(C(energy_min(L2, U), L2), U).eps < 1e-10


def test_eccentricity_formula_matches_printed_form():
    for L2 in (1.7, 4.0, 9.0):
        for E in np.linspace(energy_min(L2, U) + 0.01, 2.0, 15):
            b = 1 / L2
            direct = math.sqrt(1 + 2 * b * (1 + E) / (1 - b) ** 2)
            assert conic_params(C(E, L2), U).eps == pytest.approx(direct, rel=1e-12)


# orbit equation

def test_orbit_tau_examples():
    cp = conic_params(C(-2.0, 4.0), U)
    assert orbit_tau_of_phi(cp, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert orbit_tau_of_phi(cp, math.pi) == pytest.approx(math.atanh(0.5), abs=1e-15)
    circ = conic_params(C(-2.125, 4.0), U)
    for phi in np.linspace(0, 2 * math.pi, 7):
        assert orbit_tau_of_phi(circ, phi) == pytest.approx(math.atanh(1 - 1 / circ.p), abs=1e-15)


@pytest.mark.parametrize("E, L2", [(-2.0, 4.0), (-2.1, 4.0), (-1.3, 2.5), (-1.05, 6.0)])
def test_conic_matches_turning_points(E, L2):
    cp = conic_params(C(E, L2), U)
    tp = turning_points(C(E, L2), U)
    assert abs(orbit_tau_of_phi(cp, 0.0) - math.atanh(tp.X2)) < 1e-10
    assert abs(orbit_tau_of_phi(cp, math.pi) - math.atanh(tp.X1)) < 1e-10


@given(st.floats(0.1, 5.0), st.floats(0.0, 3.0), st.floats(-10, 10))
def test_orbit_symmetry(p, eps, phi):
    cp = ConicParams(p, eps)
    assert orbit_tau_of_phi(cp, phi) == orbit_tau_of_phi(cp, -phi)


def test_orbit_absent_beyond_asymptote():
    cp = conic_params(C(0.0, 2.0), U)
    assert orbit_tau_of_phi(cp, math.pi) is None
    assert orbit_tau_of_phi(cp, 0.0) is not None


# circles and axes

def test_circle_radius():
    assert circle_radius(C(-2.125, 4.0), U) == pytest.approx(math.atanh(0.25), abs=1e-15)
    E = 2.125
    assert (E + math.sqrt(E * E - 1)) * (E - math.sqrt(E * E - 1)) == pytest.approx(1.0, abs=1e-14)
    assert math.tanh(circle_radius(C(-2.125, 4.0), U)) == pytest.approx(E - math.sqrt(E * E - 1))
    with pytest.raises(NotACircle):
        circle_radius(C(-2.0, 4.0), U)
    with pytest.raises(NotACircle):
        circle_radius(C(-1.0, 0.9), U)


def test_circle_radius_diverges_near_threshold():
    r = [circle_radius(C(energy_min(1 + d, U), 1 + d), U) for d in (1e-1, 1e-3, 1e-6)]
    assert r[0] < r[1] < r[2]
    assert r[2] > 7


def test_ellipse_axes_examples():
    ax = ellipse_axes(C(-2.0, 4.0), U)
    assert ax.a == pytest.approx(0.27465307216702745, abs=1e-15)
    assert ax.c == pytest.approx(ax.a, abs=1e-15)
    assert ax.tau_min == pytest.approx(0.0, abs=1e-16)
    ax = ellipse_axes(C(-2.1, 4.0), U)
    assert ax.tau_min == pytest.approx(0.13908659544039736, abs=1e-14)
    assert ax.tau_max == pytest.approx(0.37895937040299077, abs=1e-14)
    assert math.tanh(ax.tau_min + ax.tau_max) == pytest.approx(1 / 2.1, abs=1e-14)
    ax = ellipse_axes(C(-2.125, 4.0), U)
    assert ax.c == 0.0 and ax.a == pytest.approx(math.atanh(0.25))
    with pytest.raises(NotBounded):
        ellipse_axes(C(0.0, 2.0), U)


def test_ellipse_axes_identities():
    for L2 in (1.5, 3.0, 4.0, 8.0):
        for E in np.linspace(energy_min(L2, U) + 1e-3, -1.0 - 1e-3, 12):
            ax = ellipse_axes(C(E, L2), U)
            cp = conic_params(C(E, L2), U)
            assert ax.c >= 0
            # a - c is the pericentre distance, negative when it lies across the centre
            assert ax.a - ax.c == pytest.approx(ax.tau_min, abs=1e-15)
            assert abs(math.tanh(2 * ax.a) - 1 / abs(E)) < 1e-12
            coth = 1 / math.tanh(2 * ax.a)
            # tanh 2c = (X1 - X2) / (1 - X1 X2) = eps / (p - (p - 1) coth 2a)
            assert abs(math.tanh(2 * ax.c) - cp.eps / (cp.p - (cp.p - 1) * coth)) < 1e-12


def test_focal_identity_without_latus_factor_fails():
    # eps / (p - coth 2a) is not the focal half-distance
    c = C(-1.75, 4.0)
    ax, cp = ellipse_axes(c, U), conic_params(c, U)
    wrong = cp.eps / (cp.p - 1 / math.tanh(2 * ax.a))
    assert abs(abs(math.tanh(2 * ax.c)) - abs(wrong)) > 0.1


# period and third law

def test_period_values():
    assert period(-2.0, U) == pytest.approx(T_E2, abs=1e-14)
    assert period(-2.125, U) == pytest.approx(T_CIRCLE, abs=1e-14)
    with pytest.raises(OutOfRange):
        period(-1.0, U)
    with pytest.raises(OutOfRange):
        period(0.5, U)


@pytest.mark.parametrize("E, L2", [(-2.0, 4.0), (-2.1, 4.0), (-2.0, 4.2), (-2.0, 8.0), (-1.5, 4.0)])
def test_period_matches_mpmath(E, L2):
    assert abs(period(E, U) - mp_period(E, L2)) < 1e-12


def test_period_from_axis():
    assert period_from_axis(semi_major_axis(-2.0, U), U) == pytest.approx(T_E2, rel=1e-14)
    for a in (1e-4, 1e-6):
        assert period_from_axis(a, U) / (math.pi * math.sqrt(a)) == pytest.approx(1.0, rel=3 * a)
    with pytest.raises(OutOfRange):
        period_from_axis(0.0, U)


@pytest.mark.parametrize("alpha, R", [(1.0, 1.0), (0.5, 2.0), (3.0, 0.7)])
def test_third_law_grid(alpha, R):
    params = Params(alpha, R)
    L2 = 4 * alpha * R
    lo, hi = energy_min(L2, params), -alpha / R
    for E in np.linspace(lo, hi, 52)[1:-1]:
        T1 = period(E, params)
        T2 = period_from_axis(semi_major_axis(E, params), params)
        assert abs(T1**2 - T2**2) / T1**2 < 1e-12


def test_semi_major_axis_matches_turning_points():
    for E in np.linspace(-2.1, -1.1, 9):
        assert semi_major_axis(E, U) == pytest.approx(ellipse_axes(C(E, 4.0), U).a, abs=1e-13)


# time of flight

@pytest.mark.parametrize("E, L2", [(-2.0, 4.0), (-2.1, 4.0), (-2.0, 8.0), (-1.2, 2.0), (-1.9, 4.2)])
def test_time_of_flight_full_span(E, L2):
    tp = turning_points(C(E, L2), U)
    assert abs(time_of_flight(C(E, L2), U, tp.X2, tp.X1) - period(E, U)) < 1e-9


def test_time_of_flight_additivity_and_sign():
    c = C(-2.0, 4.0)
    assert time_of_flight(c, U, 0.3, 0.3) == 0.0
    whole = time_of_flight(c, U, 0.0, 0.5)
    parts = time_of_flight(c, U, 0.0, 0.25) + time_of_flight(c, U, 0.25, 0.5)
    assert abs(whole - parts) < 1e-12
    assert time_of_flight(c, U, 0.5, 0.0) == pytest.approx(-whole, abs=1e-14)


def test_time_of_flight_out_of_range():
    with pytest.raises(OutOfRange):
        time_of_flight(C(-2.0, 4.0), U, 0.0, 0.6)
    with pytest.raises(OutOfRange):
        time_of_flight(C(-2.125, 4.0), U, 0.25, 0.25 + 1e-3)


# Hamilton-Jacobi constants

def test_hj_beta_at_pericentre():
    L2 = 4.0
    c = C(-2.0, L2, math.sqrt(L2 * (1 - 1e-9)))
    assert hj_beta(0.0, math.pi / 2, c, U) == pytest.approx(-math.pi / (4 * 2.0), abs=1e-12)


def test_hj_beta_out_of_range():
    with pytest.raises(OutOfRange):
        hj_beta(1.0, math.pi / 2, C(-2.0, 4.0), U)
    with pytest.raises(OutOfRange):
        hj_beta(0.2, 0.1, C(-1.1, 2.0, 1.0), U)


def test_hj_beta_matches_action_derivative():
    E, L2, p_phi = -1.1, 2.0, 1.0
    c = C(E, L2, p_phi)
    tp = turning_points(c, U)
    K = math.sqrt(1 - p_phi**2 / L2)
    rng = np.random.default_rng(21)
    for _ in range(20):
        X = tp.X2 + (tp.X1 - tp.X2) * rng.uniform(0.05, 0.95)
        theta = math.acos(K * rng.uniform(-0.9, 0.9))
        closed = hj_beta(math.atanh(X), theta, c, U)
        oracle = action_derivative_L2(X, theta, E, L2, p_phi) - math.pi / (4 * c.L)
        assert abs(closed - oracle) < 1e-6


def test_hj_beta_branch_selection_agrees_with_principal_branch():
    c = C(-1.1, 2.0, 1.0)
    tp = turning_points(c, U)
    for X, theta in [(0.2, 1.3), (0.6, 1.8), (tp.X2 + 1e-3, 1.0)]:
        p_tau = c.L * math.sqrt((tp.X1 - X) * (X - tp.X2))
        p_theta = -math.sqrt(c.L2 - c.p_phi**2 / math.sin(theta) ** 2)
        principal = hj_beta(math.atanh(X), theta, c, U)
        branch = hj_beta(math.atanh(X), theta, c, U, p_tau=p_tau, p_theta=p_theta)
        assert branch == pytest.approx(principal, abs=1e-12)


def test_hj_phi0_and_plane():
    c = C(-1.1, 2.0, 1.0)
    assert orbit_plane(c, math.pi / 2, 0.0) == pytest.approx(math.pi / 4, abs=1e-15)
    th = orbit_plane(c, math.pi / 2, 0.0)
    x = to_embedding(PseudoSphericalPoint(0.4, th, 0.0), U)
    assert abs(orbit_plane_residual(x, c, math.pi / 2)) < 1e-12
    assert hj_phi0(th, 0.0, c) == pytest.approx(math.pi / 2, abs=1e-12)
    eq = C(-1.1, 2.0)
    for phi in np.linspace(0, 6, 5):
        assert orbit_plane(eq, 0.3, phi) == pytest.approx(math.pi / 2, abs=1e-15)
    with pytest.raises(DegenerateAngularMomentum):
        orbit_plane(C(-1.1, 2.0, 0.0), 0.0, 0.0)


def test_hj_constants_of_state():
    s = PhasePoint(0.0, math.pi / 2, 0.0, 0.0, 0.0, 2.0)
    hj = hj_constants(s, U, t=3.0)
    assert hj.t0 == pytest.approx(3.0, abs=1e-14)
    assert hj.phi0 is None


# asymptotes

def test_asymptote_angle():
    assert asymptote_angle(conic_params(C(0.0, 2.0), U)) == pytest.approx(2.0344439357957027, abs=1e-14)
    assert asymptote_angle(ConicParams(1.0, 1e9)) == pytest.approx(math.pi / 2, abs=1e-8)
    assert asymptote_angle(ConicParams(1.0, 1 + 1e-12)) == pytest.approx(math.pi, abs=1e-5)
    with pytest.raises(NotUnbound):
        asymptote_angle(ConicParams(1.0, 1.0))


def test_asymptote_is_limit_of_orbit_equation():
    cp = conic_params(C(0.0, 2.0), U)
    phi_inf = asymptote_angle(cp)
    taus = [orbit_tau_of_phi(cp, phi_inf - d) for d in (1e-2, 1e-4, 1e-6)]
    assert taus[0] < taus[1] < taus[2]
    assert orbit_tau_of_phi(cp, phi_inf + 1e-6) is None

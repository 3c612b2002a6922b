"""Command-line front end.

Subcommands: veff, classify, orbit, simulate, period, sweep. Tables are
written as CSV (header row, comma separated) or JSON (an object holding
``metadata`` and a ``rows`` array); reports are flat objects or a single
CSV row. Floats always carry 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import hjorbits as hj
from .dynamics import OrbitConstants, PhasePoint, state_from_constants
from .errors import HyperKeplerError, NoRealMotion
from .geometry import Params
from .integrator import (
    BACKEND,
    IntegratorConfig,
    conserved_drift,
    diagnostics,
    find_closure,
    integrate,
    radial_turning_points,
)

ORBIT_PRESETS = {
    "fig2": [{"eps": 0.8, "p": p} for p in (1.5, 2.0, 2.5)],
    "fig3": [{"eps": 0.0, "p": p} for p in (1.5, 2.0, 2.5)],
    "fig4": [{"eps": 1.0, "p": p} for p in (1.5, 2.0, 2.5)],
    "fig5": [{"L2": 0.5, "E": E} for E in (-0.5, 0.0, 0.5)],
    "fig6": [{"L2": 2.0, "E": E} for E in (-0.5, 0.0, 0.5)],
    # captions of fig7/fig8 repeat fig5/fig6; energies here are from case D (E >= alpha/R)
    "fig7": [{"L2": 2.0, "E": E} for E in (1.0, 1.5, 2.0)],
    "fig8": [{"L2": 0.5, "E": E} for E in (1.0, 1.5, 2.0)],
}
VEFF_PRESETS = {"fig1": [4.0, 0.5]}


# --- serialization ---------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json(x) for x in v) + "]"
    if isinstance(v, (float, np.floating)):
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, (bool, int, np.integer)):
        return fmt(v)
    return json.dumps(str(v))


def render_json(payload: dict) -> str:
    lines = ["{"]
    items = list(payload.items())
    for i, (k, v) in enumerate(items):
        sep = "," if i < len(items) - 1 else ""
        if k == "rows":
            body = ",\n".join("    " + _json(r) for r in v)
            lines.append(f'  "rows": [\n{body}\n  ]{sep}' if v else f'  "rows": []{sep}')
        else:
            lines.append(f"  {json.dumps(k)}: {_json(v)}{sep}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_csv(columns: list[str], rows: list[dict], comments: list[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r.get(c) is None else fmt(r[c]) for c in columns])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _metadata(args, **extra) -> dict:
    md = {
        "artifact": "hyperkepler",
        "version": __version__,
        "command": args.command,
        "alpha": args.alpha,
        "R": args.radius,
    }
    md.update(extra)
    return md


def _write_table(args, columns, rows, metadata, extra=None, comments=()):
    if args.format == "json":
        payload = {"metadata": metadata}
        if extra:
            payload.update(extra)
        payload["rows"] = rows
        _emit(args, render_json(payload))
    else:
        _emit(args, render_csv(columns, rows, comments))


def _write_report(args, report: dict):
    if args.format == "json":
        _emit(args, render_json(report))
    else:
        _emit(args, render_csv(list(report), [report]))


# --- commands --------------------------------------------------------------

def cmd_veff(args, params: Params) -> None:
    L2s = VEFF_PRESETS[args.preset] if args.preset else (args.L2 or [])
    if not L2s:
        args.parser.error("veff needs --L2 or --preset fig1")
    taus = np.linspace(args.tau_min, args.tau_max, args.samples)
    rows, minima = [], []
    for L2 in L2s:
        for tau in taus:
            rows.append({"kind": "sample", "L2": L2, "tau": float(tau),
                         "V_eff": hj.effective_potential(float(tau), L2, params)})
        m = hj.potential_minimum(L2, params)
        minima.append({"L2": L2, "tau0": None if m is None else m[0], "Vmin": None if m is None else m[1]})
        if m is not None:
            rows.append({"kind": "minimum", "L2": L2, "tau": m[0], "V_eff": m[1]})
    md = _metadata(args, tau_min=args.tau_min, tau_max=args.tau_max, samples=args.samples)
    _write_table(args, ["kind", "L2", "tau", "V_eff"], rows, md, {"minima": minima})


def classify_report(c: OrbitConstants, params: Params) -> dict:
    rep = {"E": c.E, "L2": c.L2, "p_phi": c.p_phi}
    try:
        cls = hj.classify(c, params)
    except NoRealMotion as exc:
        rep.update({"class": "NoRealMotion", "E_min": hj.energy_min(c.L2, params)
                    if c.L2 > params.alpha * params.R else -params.alpha / params.R,
                    "detail": str(exc)})
        return rep
    tp = hj.turning_points(c, params)
    rep.update({"class": cls.kind.value, "E_lo": cls.window[0], "E_hi": cls.window[1],
                "X1": tp.X1, "X2": tp.X2})
    try:
        cp = hj.conic_params(c, params)
        rep.update({"p": cp.p, "eps": cp.eps})
    except HyperKeplerError:
        rep.update({"p": None, "eps": None})
    if cls.bounded:
        ax = hj.ellipse_axes(c, params)
        rep.update({"a": ax.a, "c": ax.c, "tau_min": ax.tau_min, "tau_max": ax.tau_max,
                    "T": hj.period(c.E, params)})
        if cls.kind is hj.OrbitKind.CIRCLE:
            rep["tau_circle"] = hj.circle_radius(c, params)
    elif rep["eps"] is not None and rep["eps"] > 1.0:
        rep["phi_asymptote"] = hj.asymptote_angle(hj.ConicParams(rep["p"], rep["eps"]))
    return rep


def cmd_classify(args, params: Params) -> None:
    if args.energy is None or not args.L2:
        args.parser.error("classify needs --energy and --L2")
    _write_report(args, classify_report(_constants(args, args.L2[0]), params))


def _phi_grid(cp: hj.ConicParams, n: int) -> np.ndarray:
    if cp.eps < 1.0:
        return np.linspace(0.0, 2 * math.pi, n)
    phi_inf = hj.asymptote_angle(cp) if cp.eps > 1.0 else math.pi
    if cp.p > 0:
        lo, hi = -phi_inf, phi_inf
    else:
        lo, hi = phi_inf, 2 * math.pi - phi_inf
    return np.linspace(lo, hi, n + 2)[1:-1]


def orbit_rows(cp: hj.ConicParams, params: Params, n: int, curve: int = 0) -> list[dict]:
    R = params.R
    rows = []
    for phi in _phi_grid(cp, n):
        phi = float(phi)
        tau = hj.orbit_tau_of_phi(cp, phi)
        if tau is None:
            continue
        rc = R * math.cosh(tau)
        rows.append({"curve": curve, "p": cp.p, "eps": cp.eps, "phi": phi, "tau": tau,
                     "x0": R * math.sinh(tau), "x1": rc * math.cos(phi),
                     "x2": rc * math.sin(phi), "x3": 0.0})
    return rows


def cmd_orbit(args, params: Params) -> None:
    if args.preset:
        if args.preset not in ORBIT_PRESETS:
            args.parser.error(f"orbit presets: {', '.join(ORBIT_PRESETS)}")
        specs = ORBIT_PRESETS[args.preset]
    elif args.p is not None and args.eps is not None:
        specs = [{"p": args.p, "eps": args.eps}]
    elif args.energy is not None and args.L2:
        specs = [{"L2": args.L2[0], "E": args.energy}]
    else:
        args.parser.error("orbit needs --p/--eps, --energy/--L2 or --preset")
    rows, curves = [], []
    for i, s in enumerate(specs):
        if "p" in s:
            cp = hj.ConicParams(s["p"], s["eps"])
        else:
            cp = hj.conic_params(OrbitConstants(s["E"], s["L2"]), params)
        curves.append({"curve": i, **s, "p": cp.p, "eps": cp.eps})
        rows.extend(orbit_rows(cp, params, args.samples, i))
    cols = ["curve", "p", "eps", "phi", "tau", "x0", "x1", "x2", "x3"]
    _write_table(args, cols, rows, _metadata(args, preset=args.preset, samples=args.samples),
                 {"curves": curves})


def _initial_state(args, params: Params) -> PhasePoint:
    if args.p_tau is not None:
        return PhasePoint(args.tau or 0.0, args.theta, args.phi, args.p_tau,
                          args.p_theta, args.p_phi if args.p_phi is not None else 0.0)
    if args.energy is None or not args.L2:
        args.parser.error("simulate needs either --p-tau (explicit state) or --energy and --L2")
    c = _constants(args, args.L2[0])
    tau = args.tau
    if tau is None:
        tp = hj.turning_points(c, params)
        if tp.X2 <= -1.0:
            args.parser.error("no pericentre for this energy; give --tau")
        tau = math.atanh(tp.X2)
    return state_from_constants(c, params, tau, theta=args.theta, phi=args.phi,
                                outward=not args.inward)


def cmd_simulate(args, params: Params) -> None:
    s0 = _initial_state(args, params)
    cfg = IntegratorConfig(rel_tol=args.tol, abs_tol=args.tol, tau_escape=args.tau_escape,
                           closure_tol=args.closure_tol, backend=args.backend)
    traj = integrate(s0, params, cfg, args.t_end)
    if args.samples:
        ts = np.linspace(traj.t[0], traj.t[-1], args.samples)
        ys = traj(ts)
    else:
        ts, ys = traj.t, traj.y
    names = ["tau", "theta", "phi", "p_tau", "p_theta", "p_phi"]
    rows = []
    for t, y in zip(ts, ys):
        row = {"t": float(t), **{k: float(v) for k, v in zip(names, y)}}
        e, L2, _, cons = _sample_diag(y, params)
        row.update({"E": e, "L2": L2, "constraint": cons})
        rows.append(row)
    drift = conserved_drift(traj)
    closure = find_closure(traj)
    summary = {
        "status": traj.status,
        "steps": len(traj) - 1,
        "nfev": traj.nfev,
        "max_dE": drift.dE,
        "max_dL2": drift.dL2,
        "max_dp_phi": drift.dpphi,
        "max_constraint": drift.dconstraint,
        "turning_points": [{"t": t, "kind": k} for t, k in radial_turning_points(traj)],
        "closure_time": None if closure is None else closure[0],
        "closure_residual": None if closure is None else closure[1],
        "escape_time": traj.escape_time,
    }
    md = _metadata(args, initial_state=dict(zip(names, map(float, s0.as_array()))),
                   rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, tau_escape=cfg.tau_escape,
                   t_end=args.t_end, backend=args.backend or BACKEND)
    cols = ["t", *names, "E", "L2", "constraint"]
    _write_table(args, cols, rows, md, {"summary": summary},
                 comments=[_json(md),
                           "summary " + _json(summary)])
    if args.out:
        sys.stdout.write(_json(summary) + "\n")


def _sample_diag(y, params):
    e, L2, pphi, cons = diagnostics(np.asarray(y, dtype=float)[None, :], params)
    return float(e[0]), float(L2[0]), float(pphi[0]), float(cons[0])


def period_report(E: float, params: Params, L2: float | None = None) -> dict:
    rep = {"E": E}
    try:
        T = hj.period(E, params)
    except HyperKeplerError as exc:
        rep.update({"T_closed_form": None, "detail": str(exc)})
        return rep
    a = hj.semi_major_axis(E, params)
    T3 = hj.period_from_axis(a, params)
    rep.update({"T_closed_form": T, "a": a, "T_third_law": T3,
                "identity_residual": abs(T * T - T3 * T3) / (T * T), "T_full_revolution": hj.CLOSURE_PERIODS * T})
    if L2 is not None:
        c = OrbitConstants(E, L2)
        try:
            tp = hj.turning_points(c, params)
            Tq = hj.time_of_flight(c, params, tp.X2, tp.X1)
            rep.update({"L2": L2, "T_quadrature": Tq, "quadrature_residual": abs(Tq - T)})
        except HyperKeplerError as exc:
            rep.update({"L2": L2, "T_quadrature": None, "detail": str(exc)})
    return rep


def cmd_period(args, params: Params) -> None:
    if args.energy is None:
        args.parser.error("period needs --energy")
    _write_report(args, period_report(args.energy, params, args.L2[0] if args.L2 else None))


def sweep_row(E: float, L2: float, params: Params) -> dict:
    row = {"E": E, "L2": L2, "class": None, "eps": None, "T_closed_form": None,
           "T_third_law": None, "identity_residual": None}
    c = OrbitConstants(E, L2)
    try:
        cls = hj.classify(c, params)
    except NoRealMotion:
        row["class"] = "NoRealMotion"
        return row
    row["class"] = cls.kind.value
    try:
        row["eps"] = hj.conic_params(c, params).eps
    except HyperKeplerError:
        pass
    if cls.bounded:
        T = hj.period(E, params)
        T3 = hj.period_from_axis(hj.semi_major_axis(E, params), params)
        row.update({"T_closed_form": T, "T_third_law": T3,
                    "identity_residual": abs(T * T - T3 * T3) / (T * T)})
    return row


def cmd_sweep(args, params: Params) -> None:
    if args.count < 0:
        args.parser.error("--count must be >= 0")
    grid = np.linspace(args.start, args.stop, args.count) if args.count else []
    if args.vary == "E":
        if not args.L2:
            args.parser.error("sweep over E needs --L2")
        pairs = [(float(E), args.L2[0]) for E in grid]
    else:
        if args.energy is None:
            args.parser.error("sweep over L2 needs --energy")
        pairs = [(args.energy, float(L2)) for L2 in grid]
    rows = [sweep_row(E, L2, params) for E, L2 in pairs]
    cols = ["E", "L2", "class", "eps", "T_closed_form", "T_third_law", "identity_residual"]
    md = _metadata(args, vary=args.vary, start=args.start, stop=args.stop, count=args.count)
    _write_table(args, cols, rows, md)


def _constants(args, L2: float) -> OrbitConstants:
    return OrbitConstants(args.energy, L2, args.p_phi)


# --- parser ----------------------------------------------------------------

def _samples(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("sample count must be >= 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=1.0, help="coupling constant")
    common.add_argument("--radius", type=float, default=1.0, help="curvature radius R")
    common.add_argument("--L2", type=float, action="append", help="squared angular momentum")
    common.add_argument("--energy", type=float)
    common.add_argument("--p-phi", type=float, dest="p_phi")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH")

    parser = argparse.ArgumentParser(prog="hyperkepler", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("veff", parents=[common], help="sample the effective potential")
    p.add_argument("--tau-min", type=float, default=-3.0)
    p.add_argument("--tau-max", type=float, default=3.0)
    p.add_argument("--samples", type=_samples, default=601)
    p.add_argument("--preset", choices=sorted(VEFF_PRESETS))

    sub.add_parser("classify", parents=[common], help="orbit type and closed-form data")

    p = sub.add_parser("orbit", parents=[common], help="sample the analytic path")
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--samples", type=_samples, default=360)
    p.add_argument("--preset", choices=sorted(ORBIT_PRESETS))

    p = sub.add_parser("simulate", parents=[common], help="integrate Hamilton's equations")
    p.add_argument("--tau", type=float)
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--p-tau", type=float, dest="p_tau")
    p.add_argument("--p-theta", type=float, dest="p_theta", default=0.0)
    p.add_argument("--inward", action="store_true", help="start with p_tau < 0")
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--samples", type=_samples, help="resample output on a uniform time grid")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--tau-escape", type=float, default=15.0)
    p.add_argument("--closure-tol", type=float, default=1e-6)
    p.add_argument("--backend", choices=("cython", "python"))

    sub.add_parser("period", parents=[common], help="period, third law and quadrature check")

    p = sub.add_parser("sweep", parents=[common], help="classification and period over a grid")
    p.add_argument("--vary", choices=("E", "L2"), default="E")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, default=50)
    return parser


COMMANDS = {
    "veff": cmd_veff,
    "classify": cmd_classify,
    "orbit": cmd_orbit,
    "simulate": cmd_simulate,
    "period": cmd_period,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.parser = parser
    try:
        params = Params(args.alpha, args.radius)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        COMMANDS[args.command](args, params)
    except (HyperKeplerError, ValueError) as exc:
        print(f"hyperkepler {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

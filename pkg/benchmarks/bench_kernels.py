"""Compare the compiled and pure-Python integration kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N] [--periods K]``.
"""

import argparse
import math
import time

import numpy as np

from hyperkepler.dynamics import OrbitConstants, state_from_constants
from hyperkepler.geometry import Params
from hyperkepler.hjorbits import CLOSURE_PERIODS, period, turning_points
from hyperkepler.integrator import KERNELS, IntegratorConfig, integrate


def best_time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--periods", type=float, default=10.0, help="closed orbits to integrate")
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args(argv)

    params = Params()
    c = OrbitConstants(-2.0, 4.0)
    s0 = state_from_constants(c, params, math.atanh(turning_points(c, params).X2))
    t_end = args.periods * CLOSURE_PERIODS * period(c.E, params)

    results = {}
    for name in sorted(KERNELS):
        cfg = IntegratorConfig(rel_tol=args.tol, abs_tol=args.tol, backend=name)
        results[name] = best_time(lambda cfg=cfg: integrate(s0, params, cfg, t_end), args.repeat)

    print(f"ellipse L2=4 E=-2, t_end={t_end:.4f}, tol={args.tol:g}, best of {args.repeat}")
    for name, (secs, traj) in results.items():
        print(f"  {name:7s} {secs * 1e3:9.3f} ms  steps={len(traj):6d}  nfev={traj.nfev}")
    if {"python", "cython"} <= results.keys():
        py, cy = results["python"], results["cython"]
        same = np.array_equal(py[1].y, cy[1].y)
        print(f"  speedup {py[0] / cy[0]:.1f}x, trajectories bit-identical: {same}")


if __name__ == "__main__":
    main()

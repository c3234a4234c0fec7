#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy/Python fallback.

Runs the same workloads twice in subprocesses, once with numba enabled and
once with PENDROTOR_NO_NUMBA=1, and prints a timing table.

    python3 benchmarks/bench_modes.py [--grid-n 120] [--arcs 20]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, math, time
import numpy as np
import pendrotor as pr
from pendrotor import _kernels as K
from pendrotor._ode import integrate_inner

grid_n = {grid_n}
arcs = {arcs}
p = pr.SystemParams(a1=0.75, a2=1.0, eps=0.01)
tol = pr.DEFAULT_TOL

# warm-up triggers compilation so it is not billed to the workload
K.lstar_kernel(0.4, 2.0, 1.0, p.a1, p.a2, K.CRIT_BRANCH, 1, 64,
               tol.tol_cls, tol.tie_tol)
integrate_inner(0.3, 0.1, 0.0, 0.0, 0.0, 1.0, p.eps, p.a1, p.a2, p.r,
                1e-10, 1e-10)

out = {{"numba": pr.NUMBA_ENABLED}}

Is = np.linspace(-2.0, 2.0, grid_n)
ths = np.linspace(0.0, 2.0 * math.pi, grid_n, endpoint=False)
shape = (grid_n, grid_n)
status = np.empty(shape, dtype=np.int64)
tau = np.empty(shape); band = np.empty(shape, dtype=np.int64)
margin = np.empty(shape); lstar = np.empty(shape)
dth = np.empty(shape); dI = np.empty(shape)
t0 = time.perf_counter()
K.sweep_kernel(Is, ths, p.r, p.a1, p.a2, K.CRIT_MINABS, 0, 64, tol.tol_cls,
               tol.tie_tol, status, tau, band, margin, lstar, dth, dI)
out["tau_grid_s"] = time.perf_counter() - t0
out["tau_grid_points"] = grid_n * grid_n

t0 = time.perf_counter()
y = (0.31, 0.8, 0.0)
for k in range(arcs):
    y = integrate_inner(y[0], y[1], y[2], 0.0, 0.0, 200.0, p.eps, p.a1,
                        p.a2, p.r, 1e-12, 1e-12)[:3]
out["inner_arcs_s"] = time.perf_counter() - t0
out["inner_arcs_n"] = arcs

print(json.dumps(out))
"""


def run_mode(no_numba: bool, grid_n: int, arcs: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["PENDROTOR_NO_NUMBA"] = "1"
    else:
        env.pop("PENDROTOR_NO_NUMBA", None)
    code = WORKER.format(grid_n=grid_n, arcs=arcs)
    res = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid-n", type=int, default=120)
    ap.add_argument("--arcs", type=int, default=20)
    args = ap.parse_args()

    fast = run_mode(False, args.grid_n, args.arcs)
    slow = run_mode(True, args.grid_n, args.arcs)

    print(f"{'workload':34s} {'numba':>12s} {'fallback':>12s} {'speedup':>9s}")
    rows = [
        (f"tau* grid sweep ({fast['tau_grid_points']} pts)",
         fast["tau_grid_s"], slow["tau_grid_s"]),
        (f"inner flow arcs ({fast['inner_arcs_n']} x t=200)",
         fast["inner_arcs_s"], slow["inner_arcs_s"]),
    ]
    for name, tf, ts in rows:
        print(f"{name:34s} {tf:10.3f} s {ts:10.3f} s {ts / tf:8.1f}x")
    if not fast["numba"] or slow["numba"]:
        print("warning: mode selection failed "
              f"(fast numba={fast['numba']}, slow numba={slow['numba']})")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

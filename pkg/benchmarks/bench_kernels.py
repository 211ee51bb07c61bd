#!/usr/bin/env python3
"""Benchmark the compiled kernel against the numpy fallback.

Times the raw right-hand-side evaluation and a full adaptive trajectory at
several window sizes.  Selecting the backend happens at import time, so each
measurement runs in a subprocess with DGLATTICE_PURE_PYTHON set accordingly.
"""

import json
import os
import subprocess
import sys

WORKER = r"""
import json
import time

import numpy as np

from dglattice.backend import BACKEND, kernels
from dglattice import Forcing, ModelParams, integrate_adaptive, unit_site

half_width = {half_width}
reps = {reps}

rng = np.random.default_rng(0)
width = 2 * half_width + 1
u = rng.standard_normal(width) + 1j * rng.standard_normal(width)
g = rng.standard_normal(width) + 1j * rng.standard_normal(width)

kernels.rhs(u, g, 0.5, 0.5, 2.0, 0.5, 0.5)  # warm up
t0 = time.perf_counter()
for _ in range(reps):
    kernels.rhs(u, g, 0.5, 0.5, 2.0, 0.5, 0.5)
rhs_us = (time.perf_counter() - t0) / reps * 1e6

params = ModelParams(0.5, 0.5, 2.0, 0.5, 0.5)
forcing = Forcing.single_site(0.01, 0, -half_width, half_width)
initial = 0.3 * unit_site(0, -half_width, half_width)
t0 = time.perf_counter()
traj = integrate_adaptive(initial, params, forcing, 20.0, sample_stride=0.5)
run_s = time.perf_counter() - t0

print(json.dumps({{"backend": BACKEND, "rhs_us": rhs_us, "trajectory_s": run_s,
                   "final_chi": float(traj.chi[-1])}}))
"""


def measure(half_width: int, pure_python: bool, reps: int) -> dict:
    env = dict(os.environ)
    env["DGLATTICE_PURE_PYTHON"] = "1" if pure_python else "0"
    code = WORKER.format(half_width=half_width, reps=reps)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout)


def main():
    print(f"{'window':>8} {'backend':>9} {'rhs [us]':>10} {'20-unit run [s]':>16} {'speedup':>8}")
    for half_width, reps in ((64, 20000), (256, 8000), (1024, 2000)):
        rows = [measure(half_width, pp, reps) for pp in (False, True)]
        if rows[0]["backend"] == rows[1]["backend"]:
            print("compiled backend unavailable; both rows use the fallback")
        assert abs(rows[0]["final_chi"] - rows[1]["final_chi"]) <= 1e-12, "backends disagree"
        speed = rows[1]["trajectory_s"] / rows[0]["trajectory_s"]
        for row in rows:
            print(
                f"{2 * half_width + 1:>8} {row['backend']:>9} {row['rhs_us']:>10.2f} "
                f"{row['trajectory_s']:>16.4f}"
                + (f" {speed:>7.1f}x" if row is rows[0] else "")
            )


if __name__ == "__main__":
    main()

"""Numba vs pure-numpy timings for the two hot kernels, plus a full certificate run.

    python benchmarks/bench_kernels.py [--repeat 5]

The end-to-end row runs the certificate in a subprocess per backend, since the
backend is fixed at import time by QZERMELO_DISABLE_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from qzermelo import _accel, _kernels, oracle, propagator, solver
from qzermelo.instances import random_problem


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def angle_case(rng, dim=4, n_times=200_000):
    p = random_problem(rng, dim)
    w, _, a, b = p.spectrum
    return a, b, w, np.linspace(0.0, 4 * np.pi, n_times)


def first_hit_case(rng, dim=3, n_samples=2000, dt=1e-3):
    p = random_problem(rng, dim)
    sol = solver.solve(p)
    n_steps, step = propagator.uniform_grid(1.1 * sol.t_star, dt)
    controls = oracle._batch_horizontal(np.repeat(p.psi_i[None], n_samples, axis=0), rng)
    w, _, a, b = p.spectrum
    mats = oracle._step_matrices(p, controls, step)
    phases = np.exp(-1j * np.outer((np.arange(n_steps) + 0.5) * step, w))
    phi0 = np.repeat(a[None], n_samples, axis=0)
    return phi0, mats, phases, b, oracle.DEFAULT_FID_THRESHOLD


CERT_SNIPPET = """
import time
from qzermelo import oracle
from qzermelo.instances import headwind_problem
p = headwind_problem(1.0)
oracle.optimality_certificate(p, n_samples=50)  # warm-up / JIT
t0 = time.perf_counter()
oracle.optimality_certificate(p, n_samples=2000, dt=1e-3, seed=0)
print(time.perf_counter() - t0)
"""


def certificate_time(disable_numba):
    env = dict(os.environ, QZERMELO_DISABLE_NUMBA="1" if disable_numba else "0")
    out = subprocess.run([sys.executable, "-c", CERT_SNIPPET], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.NUMBA_AVAILABLE:
        sys.exit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    cases = {
        "moving_frame_angles": (0, angle_case(rng)),
        "evolve_first_hit": (1, first_hit_case(rng)),
    }
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, (idx, inputs) in cases.items():
        np_fn = _kernels.IMPLEMENTATIONS["numpy"][idx]
        nb_fn = _kernels.IMPLEMENTATIONS["numba"][idx]
        nb_fn(*inputs)  # compile outside the timing
        t_np = best_of(lambda: np_fn(*inputs), args.repeat)
        t_nb = best_of(lambda: nb_fn(*inputs), args.repeat)
        print(f"{name:<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")

    t_np, t_nb = certificate_time(True), certificate_time(False)
    print(f"{'certificate (2000x2)':<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()

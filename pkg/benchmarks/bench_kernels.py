#!/usr/bin/env python3
"""Benchmark the compiled sweep kernel against the pure-numpy fallback.

Runs the same ensemble sweep workload through both backends, reports
node-steps/s and the speedup, and cross-checks that the outputs agree.

    python benchmarks/bench_kernels.py [--n-t 1024] [--nodes 16]
                                       [--sweeps 10] [--threads 0]
"""

import argparse
import time

import numpy as np

from mbx4.core import make_seed_state


def smooth_fields(n_t, seed=42):
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 6.0, n_t)
    omega = np.zeros((4, n_t), dtype=np.complex128)
    for ch in range(4):
        omega[ch] = sum(rng.normal() * np.sin((h + 1) * x + rng.uniform(0, 3))
                        for h in range(3))
    return 0.5 * omega / np.abs(omega).max()


def bench(fn, omega, nodes, weights, rho0, dt, sweeps, threads):
    fn(omega, nodes, weights, rho0, dt, threads)  # warmup
    start = time.perf_counter()
    for _ in range(sweeps):
        out = fn(omega, nodes, weights, rho0, dt, threads)
    elapsed = (time.perf_counter() - start) / sweeps
    return elapsed, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-t", type=int, default=1024)
    parser.add_argument("--nodes", type=int, default=16)
    parser.add_argument("--sweeps", type=int, default=10)
    parser.add_argument("--threads", type=int, default=0)
    args = parser.parse_args()

    try:
        from mbx4.kernels import _csweep
    except ImportError:
        _csweep = None
    from mbx4.kernels import _pysweep

    omega = smooth_fields(args.n_t)
    x, w = np.polynomial.hermite.hermgauss(args.nodes)
    nodes = np.sqrt(2.0) * x / 5.0
    weights = w / w.sum()
    rho0 = make_seed_state(0.75, 0.25)
    dt = 0.02
    node_steps = args.nodes * args.n_t

    t_py, (coh_py, fin_py) = bench(_pysweep.sweep_coherences, omega, nodes,
                                   weights, rho0, dt, args.sweeps, args.threads)
    print(f"python : {t_py * 1e3:9.2f} ms/sweep  "
          f"{node_steps / t_py / 1e6:8.2f} M node-steps/s")

    if _csweep is None:
        print("cython : extension not built (pip install -e . rebuilds it)")
        return

    t_cy, (coh_cy, fin_cy) = bench(_csweep.sweep_coherences, omega, nodes,
                                   weights, rho0, dt, args.sweeps, args.threads)
    print(f"cython : {t_cy * 1e3:9.2f} ms/sweep  "
          f"{node_steps / t_cy / 1e6:8.2f} M node-steps/s")
    print(f"speedup: {t_py / t_cy:.1f}x")
    print(f"max |coherence diff| = {np.abs(coh_py - coh_cy).max():.3e}, "
          f"max |state diff| = {np.abs(fin_py - fin_cy).max():.3e}")


if __name__ == "__main__":
    main()

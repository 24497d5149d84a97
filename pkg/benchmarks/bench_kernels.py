#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot loops (chain steps, simplex pivoting, rank tallies) and
one end-to-end Monte Carlo run per backend.

    python benchmarks/bench_kernels.py [--steps N] [--quick]
"""
import argparse
import time

import numpy as np

from smaa_choquet._kernels import compiled_backend, fallback_backend
from smaa_choquet.linprog import LpProblem, solve
from smaa_choquet.preference import compile_system
from smaa_choquet.problem import load_problem_file
from smaa_choquet.sampling import chebyshev_center, frozen_polytope, null_space_basis


def bench_chain(kern, steps, system):
    eps = 1e-5
    E, f, A, b = frozen_polytope(system, eps)
    nb = np.ascontiguousarray(null_space_basis(E))
    start, _ = chebyshev_center(system, eps)
    x = np.ascontiguousarray(start)
    rng = np.random.default_rng(0)
    out = np.empty((steps, x.shape[0]))
    t0 = time.perf_counter()
    written, fails = 0, 0
    while written < steps:
        normals = rng.standard_normal((65536, nb.shape[0]))
        uniforms = rng.random(65536)
        written, _c, fails, status = kern.chain_steps(
            x, nb, np.ascontiguousarray(A), np.ascontiguousarray(b),
            normals, uniforms, out, written, fails, 1e-12, 100)
        assert status in (kern.CHAIN_OK, kern.CHAIN_EXHAUSTED)
    return steps / (time.perf_counter() - t0)


def bench_tally(kern, blocks):
    rng = np.random.default_rng(1)
    B, l, d = 2048, 18, 10
    values = np.ascontiguousarray(rng.random((B, l)))
    mobius = np.ascontiguousarray(rng.random((B, d)))
    rc = np.zeros((l, l), dtype=np.int64)
    sc = np.zeros((l, l), dtype=np.int64)
    ic = np.zeros((l, l), dtype=np.int64)
    fs = np.zeros((l, d))
    fc = np.zeros(l, dtype=np.int64)
    bs = np.zeros(d)
    t0 = time.perf_counter()
    for _ in range(blocks):
        kern.tally_block(values, mobius, rc, sc, ic, fs, fc, bs)
    return blocks * B / (time.perf_counter() - t0)


def bench_simplex(kern, solves, system):
    import smaa_choquet.linprog as lp_mod

    original = lp_mod.active_backend
    lp_mod.active_backend = lambda: kern
    dim = system.dim
    c = np.zeros(dim)
    c[-1] = 1.0
    problem = LpProblem(
        c=c, A=system.matrix, relations=list(system.relations), b=system.rhs,
        bounds=[(None, None)] * (dim - 1) + [(0.0, 1.0)],
    )
    try:
        t0 = time.perf_counter()
        for _ in range(solves):
            sol = solve(problem)
        assert sol.status == "optimal"
        return solves / (time.perf_counter() - t0)
    finally:
        lp_mod.active_backend = original


def bench_end_to_end(backend_name_str, iterations):
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from smaa_choquet.problem import load_problem_file\n"
        "from smaa_choquet.smaa import RunConfig, run\n"
        "pf = load_problem_file('problems/scores18.json')\n"
        f"cfg = RunConfig(iterations={iterations}, seed=1, burn_in=500, workers=1, confidence_iterations=100)\n"
        "t0 = time.perf_counter()\n"
        "run(pf.problem, pf.statements, cfg)\n"
        "print(time.perf_counter() - t0)\n"
    )
    env = dict(os.environ, SMAA_CHOQUET_KERNEL=backend_name_str)
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000, help="chain steps to time")
    parser.add_argument("--quick", action="store_true", help="scale everything down 10x")
    args = parser.parse_args()
    steps = args.steps // (10 if args.quick else 1)
    blocks = 40 // (10 if args.quick else 1) or 1
    solves = 2000 // (10 if args.quick else 1)
    e2e_iters = 100_000 // (10 if args.quick else 1)

    pf = load_problem_file("problems/scores18.json")
    system = compile_system(pf.statements, 4, evals=pf.problem.point_matrix(),
                            labels=pf.problem.criterion_labels)

    backends = [("fallback", fallback_backend)]
    if compiled_backend is not None:
        backends.append(("cython", compiled_backend))

    rows = []
    for name, kern in backends:
        chain = bench_chain(kern, steps, system)
        tally = bench_tally(kern, blocks)
        simplex = bench_simplex(kern, solves, system)
        e2e = bench_end_to_end(name, e2e_iters)
        rows.append((name, chain, tally, simplex, e2e))

    print(f"{'backend':<10} {'chain steps/s':>14} {'tally iters/s':>14} "
          f"{'LP solves/s':>12} {'end-to-end':>12}")
    for name, chain, tally, simplex, e2e in rows:
        print(f"{name:<10} {chain:>14,.0f} {tally:>14,.0f} {simplex:>12,.0f} "
              f"{e2e:>10.2f}s")
    if len(rows) == 2:
        f, c = rows
        print(f"\nspeedup (cython/fallback): chain x{c[1] / f[1]:.1f}, "
              f"tally x{c[2] / f[2]:.1f}, simplex x{c[3] / f[3]:.1f}, "
              f"end-to-end x{f[4] / c[4]:.1f}")


if __name__ == "__main__":
    main()

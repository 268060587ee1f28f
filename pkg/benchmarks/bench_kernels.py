"""Time the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 20] [--skip-end-to-end]

The first section times each kernel in-process on the same inputs (numba
compile time excluded by a warm-up call).  The second runs a small
``run_table`` experiment in a fresh interpreter per backend, selected with
``FRACDRIFT_BACKEND``, so that import and JIT-cache costs show up too.
"""
import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from fracdrift._kernels import numba_kernels, numpy_kernels

SNIPPET = """
import time
from fracdrift.montecarlo import ExperimentConfig, run_table
t0 = time.perf_counter()
r = run_table(ExperimentConfig(scheme={scheme!r}, n={n}, m={m}, seed=1), workers=1)
print(time.perf_counter() - t0, repr(r.mean))
"""


def _best(fn, repeat):
    fn()  # warm-up / JIT
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in (300, 800, 2000):
        t = np.cumsum(rng.exponential(1 / n, n))
        y = rng.standard_normal(n)
        cases = {
            "covariance_fill": lambda k: (lambda: k.covariance_fill(t, 1.5, 1.0)),
            "accurate_dot": lambda k: (lambda: k.accurate_dot(t, y)),
            "renewal_terms": lambda k: (lambda: k.renewal_terms(t)),
        }
        for name, make in cases.items():
            a = _best(make(numba_kernels), repeat)
            b = _best(make(numpy_kernels), repeat)
            rows.append((name, n, a, b))
    print(f"{'kernel':<16}{'n':>6}{'numba ms':>12}{'numpy ms':>12}{'speed-up':>10}")
    for name, n, a, b in rows:
        print(f"{name:<16}{n:>6}{a * 1e3:>12.4f}{b * 1e3:>12.4f}{b / a:>10.1f}")


def end_to_end(n, m):
    print(f"\nrun_table n={n} m={m}, one worker, fresh interpreter per backend")
    for scheme in ("jittered", "renewal"):
        for backend in ("numba", "numpy"):
            env = dict(os.environ, FRACDRIFT_BACKEND=backend)
            t0 = time.perf_counter()
            out = subprocess.run([sys.executable, "-c", SNIPPET.format(scheme=scheme, n=n, m=m)],
                                 env=env, capture_output=True, text=True, check=True).stdout
            wall = time.perf_counter() - t0
            inner, mean = out.split()
            print(f"  {scheme:<9} {backend:<6} run {float(inner):7.3f} s  "
                  f"process {wall:7.3f} s  mean {mean}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--m", type=int, default=300)
    p.add_argument("--skip-end-to-end", action="store_true")
    a = p.parse_args()
    if numba_kernels is None:
        sys.exit("numba is not importable; nothing to compare")
    kernel_table(a.repeat)
    if not a.skip_end_to_end:
        end_to_end(a.n, a.m)


if __name__ == "__main__":
    main()

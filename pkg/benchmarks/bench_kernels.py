"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py            # kernel timings
    python benchmarks/bench_kernels.py --e2e      # plus a pairing matrix per backend

Each kernel is timed on identical inputs with ``timeit`` (best of
``--repeat``) and the largest relative difference between the two results is
printed next to the speedup.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from qkzlab import _kernels_py as pure

try:
    from qkzlab import _kernels as compiled
except ImportError:
    compiled = None

W1, W2 = 7.3, 9.4


def cases(size, rng):
    h = 0.05
    P, C = pure.strip_weights(W1, W2, h, 300)
    x = rng.uniform(4, 12, size) + 1j * rng.uniform(-3.5, 3.5, size)
    k = np.arange(1, 30, dtype=float)
    c1 = 1 / np.expm1(2j * np.pi * k * W2 / W1) / k
    c2 = 1 / np.expm1(2j * np.pi * k * W1 / W2) / k
    y = rng.uniform(-5, 5, size) + 1j * rng.uniform(4, 8, size)
    z = rng.uniform(-3, 3, size) + 1j * rng.uniform(-1, 1, size)
    return {
        "strip_weights": lambda m: m.strip_weights(W1, W2, h, 300),
        "strip_integral": lambda m: m.strip_integral(x, W1 + W2, h, P, C),
        "q_series": lambda m: m.q_series(y, W1, W2, c1, c2),
        "log_2sin": lambda m: m.log_2sin(z),
    }


def max_rel(a, b):
    a = np.atleast_1d(np.asarray(a[0] if isinstance(a, tuple) else a))
    b = np.atleast_1d(np.asarray(b[0] if isinstance(b, tuple) else b))
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))


E2E = ("import time; from qkzlab import BACKEND, default_params, pairing_matrix, QuadratureConfig;"
       "from qkzlab.combinatorics import NuVector; p = default_params(3, 2);"
       "t = time.perf_counter(); pairing_matrix(p, NuVector.from_lambdas((1, 1, 0)),"
       " QuadratureConfig(rel_tol=1e-8)); print(BACKEND, time.perf_counter() - t)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=2000, help="points per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--e2e", action="store_true", help="also time a 2x2 pairing matrix")
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':16s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, call in cases(args.size, rng).items():
        tp = min(timeit.repeat(lambda: call(pure), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: call(compiled), number=1, repeat=args.repeat))
        diff = max_rel(call(pure), call(compiled))
        print(f"{name:16s} {1e3 * tp:12.3f} {1e3 * tc:12.3f} {tp / tc:8.1f} {diff:13.2e}")
    if args.e2e:
        for flag in ("1", "0"):
            env = {**os.environ, "QKZLAB_PURE": flag}
            out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True,
                                 text=True, check=True)
            backend, secs = out.stdout.split()
            print(f"pairing matrix n=3 N=2 lambdas=(1,1,0), {backend:6s}: {float(secs):.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Both kernel modules are imported directly, so the backend flag is irrelevant
here.  Timings are best-of-``repeat`` after one warm-up call (which also
triggers JIT compilation).  Outputs are checked against each other.
"""
import argparse
import time

import numpy as np

from spectral_corners import kernels_numpy, ntheory
from spectral_corners._accel import HAVE_NUMBA


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(quick):
    rng = np.random.default_rng(0)
    N = 100_000 if quick else 1_000_000
    y = rng.standard_normal(N)
    n = np.arange(1, N + 1, dtype=float)
    alpha, beta = n**-1.0, n**0.0
    jt = ntheory.jordan_table(N, 1.0)[1:]
    J = 64 if quick else 256
    A = rng.standard_normal((J, J))
    A = A + A.T
    yield f"toeplitz N={N}", "toeplitz_exp_apply", (np.exp(-1e-6 * n), y, 0.7)
    yield f"semiseparable N={N}", "semiseparable_apply", (alpha, beta, y)
    yield f"gcd gram N={N}", "gcd_gram_apply", (y, jt)
    yield f"jacobi N={J}", "jacobi_eigh", (A, 1e-12, 30)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args()
    if HAVE_NUMBA:
        from spectral_corners import kernels_numba
    else:
        kernels_numba = None
        print("numba unavailable: timing the numpy kernels only")
    print(f"{'kernel':<28}{'numpy s':>12}{'numba s':>12}{'speedup':>10}{'rel diff':>12}")
    for label, name, inputs in cases(args.quick):
        def call(mod):
            # jacobi mutates its input
            return getattr(mod, name)(*[x.copy() if isinstance(x, np.ndarray) and x.ndim == 2
                                        else x for x in inputs])
        t_np, out_np = best_of(lambda: call(kernels_numpy), args.repeat)
        if kernels_numba is None:
            print(f"{label:<28}{t_np:>12.4f}")
            continue
        t_nb, out_nb = best_of(lambda: call(kernels_numba), args.repeat)
        if name == "jacobi_eigh":
            diff = np.max(np.abs(np.sort(out_np[0]) - np.sort(out_nb[0])))
        else:
            diff = np.max(np.abs(out_np - out_nb)) / np.max(np.abs(out_np))
        print(f"{label:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()

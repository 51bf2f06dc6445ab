"""Compare the numba event loop with the vectorized numpy fallback.

    python benchmarks/bench_des.py --arrivals 1000000 --repeat 3
"""

import argparse
import time

import numpy as np

from hapvec._kernels import HAVE_NUMBA, run_mdc

CASES = [(0.3, 1), (0.9, 1), (0.6, 5), (0.9, 15)]


def _arrivals(rho, c, n, seed):
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.exponential(1.0 / (rho * c), n))


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--arrivals", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if HAVE_NUMBA:
        run_mdc(_arrivals(0.5, 1, 100, 0), 1.0, 1, backend="numba")  # compile outside timing

    print(f"{'rho':>5} {'c':>3} " + " ".join(f"{b:>10}" for b in backends) + "   max|dW|")
    for rho, c in CASES:
        arr = _arrivals(rho, c, args.arrivals, seed=1)
        times, waits = [], []
        for b in backends:
            t, out = best_of(lambda: run_mdc(arr, 1.0, c, backend=b), args.repeat)
            times.append(t)
            waits.append(out[0])
        diff = max(np.abs(w - waits[0]).max() for w in waits)
        print(f"{rho:5.2f} {c:3d} " + " ".join(f"{t:9.3f}s" for t in times) + f"   {diff:.1e}")


if __name__ == "__main__":
    main()

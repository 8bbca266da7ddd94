"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--states 20] [--repeat 3]

Compilation happens in a warm-up call and is reported separately.
"""
import argparse
import time
from timeit import repeat

import numpy as np

from decaybell import _kernels, bell
from decaybell.states import correlation_tensor, random_state


def _best(fn, number, rep):
    return min(repeat(fn, number=number, repeat=rep)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; install the 'fast' extra")

    rng = np.random.default_rng(1)
    Ts = [correlation_tensor(random_state(rng)) for _ in range(args.states)]
    t = Ts[0].block.copy()
    grid = (np.arange(24) + 0.5) * np.pi / 24
    phis = np.arange(24) * 2 * np.pi / 24
    ax = rng.standard_normal((6, 3))
    ax /= np.linalg.norm(ax, axis=1, keepdims=True)

    t0 = time.perf_counter()
    for T in Ts[:1]:
        bell.optimize_mermin(T), bell.optimize_b442(T)
    print(f"warm-up (numba compile or cache load): {time.perf_counter() - t0:.2f} s\n")

    cases = {
        "b442 objective": lambda k: k.b442_objective(t, 0.7, 1.1, 2.3),
        "b442 24^3 grid": lambda k: k.b442_grid(t, grid, phis, phis),
        "trilinear value": lambda k: k.trilinear_value(t, bell.MERMIN_W, ax),
    }
    solvers = {
        "optimize_mermin": bell.optimize_mermin,
        "optimize_svetlichny": bell.optimize_svetlichny,
        "optimize_b442": bell.optimize_b442,
    }
    print(f"{'case':<22}{'numba':>12}{'numpy':>12}{'speed-up':>10}")
    for name, fn in cases.items():
        per = {}
        number = 3 if "grid" in name else 2000
        for b in _kernels.BACKENDS:
            with _kernels.use_backend(b) as k:
                per[b] = _best(lambda: fn(k), number, args.repeat)
        print(f"{name:<22}{per['numba'] * 1e6:>10.1f}us{per['numpy'] * 1e6:>10.1f}us"
              f"{per['numpy'] / per['numba']:>9.1f}x")
    for name, fn in solvers.items():
        per = {}
        for b in _kernels.BACKENDS:
            with _kernels.use_backend(b):
                # numpy optimisers are slow; one pass over the states is enough
                per[b] = _best(lambda: [fn(T) for T in Ts], 1, 1 if b == "numpy" else args.repeat) / len(Ts)
        print(f"{name:<22}{per['numba'] * 1e3:>10.2f}ms{per['numpy'] * 1e3:>10.2f}ms"
              f"{per['numpy'] / per['numba']:>9.1f}x")


if __name__ == "__main__":
    main()

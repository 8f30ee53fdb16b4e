"""Compare the compiled grid-search kernels against the NumPy fallback.

Run after installing the package:

    python benchmarks/bench_kernels.py [--sizes 90x2000,180x5000] [--repeats 5]

Both backends are loaded side by side (the fallback import is forced
directly, not via the environment switch) and checked for agreement
before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lpflats import _kernels_py
from lpflats._kernels import BACKEND as ACTIVE_BACKEND

try:
    from lpflats import _gridkern
except ImportError:
    _gridkern = None


def _time(fn, *args, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(m: int, n: int, repeats: int) -> None:
    rng = np.random.default_rng(0)
    dp = rng.random((m, n))
    da = rng.random((m, n))
    db = rng.random((m, n))

    rows = []
    for name, args, py_fn, cy_fn in [
        ("pairwise_min_sum", (dp,), _kernels_py.pairwise_min_sum,
         _gridkern.pairwise_min_sum if _gridkern else None),
        ("cross_min_sum", (da, db), _kernels_py.cross_min_sum,
         _gridkern.cross_min_sum if _gridkern else None),
    ]:
        t_py = _time(py_fn, *args, repeats=repeats)
        if cy_fn is not None:
            ref = py_fn(*args)
            got = cy_fn(*args)
            # Summation order differs between backends, so agreement is up
            # to accumulated rounding, not bit-exact.
            if not np.allclose(ref, got, rtol=1e-9, atol=0):
                raise AssertionError(f"{name}: backends disagree")
            t_cy = _time(cy_fn, *args, repeats=repeats)
            rows.append((name, t_py, t_cy, t_py / t_cy))
        else:
            rows.append((name, t_py, None, None))

    print(f"\nm={m} candidates, n={n} points (best of {repeats})")
    print(f"{'kernel':20s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, t_py, t_cy, speedup in rows:
        cy = f"{t_cy * 1e3:9.2f}ms" if t_cy is not None else "   absent"
        sp = f"{speedup:7.1f}x" if speedup is not None else "       -"
        print(f"{name:20s} {t_py * 1e3:9.2f}ms {cy} {sp}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sizes",
        default="90x1000,180x2000,360x5000",
        help="comma list of MxN (candidates x points)",
    )
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {ACTIVE_BACKEND}")
    if _gridkern is None:
        print("compiled extension not built; timing the fallback only")
    for spec in args.sizes.split(","):
        m, n = spec.lower().split("x")
        bench(int(m), int(n), args.repeats)


if __name__ == "__main__":
    main()

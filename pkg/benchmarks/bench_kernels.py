"""Time the numba and numpy SU(2) kernels on workloads shaped like the MC runs.

Usage: python3 benchmarks/bench_kernels.py [--steps K] [--trials M] [--repeat R]
"""

import argparse
import time

import numpy as np

from udesign import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()

    rng = np.random.default_rng(0)
    h = rng.normal(size=(a.steps, 3))
    dt = np.full(a.steps, 0.01)
    noise = rng.normal(scale=0.05, size=(a.trials, 3))
    pairs = _kernels.IMPLEMENTATIONS["numpy"]["propagate_batch"](h[:100], dt[:100], noise)

    work = {
        "propagate_batch": lambda impl: impl["propagate_batch"](h, dt, noise),
        "propagate_prefix": lambda impl: impl["propagate_prefix"](h, dt),
        "powers_trace": lambda impl: impl["powers_trace"](pairs, a.reps),
    }
    print(f"steps={a.steps} trials={a.trials} reps={a.reps} threads={_kernels.configure_threads()}")
    print(f"{'kernel':<18}{'backend':<8}{'seconds':>10}{'speedup':>10}")
    for name, fn in work.items():
        base = None
        results = {}
        for backend in ("numpy", "numba"):
            if backend not in _kernels.IMPLEMENTATIONS:
                continue
            impl = _kernels.IMPLEMENTATIONS[backend]
            fn(impl)  # warm-up, includes JIT compile
            t, results[backend] = best_of(lambda: fn(impl), a.repeat)
            base = base or t
            print(f"{name:<18}{backend:<8}{t:>10.4f}{base / t:>9.1f}x")
        if len(results) == 2:
            diff = np.max(np.abs(results["numpy"] - results["numba"]))
            print(f"{'':<18}max |numpy - numba| = {diff:.1e}")


if __name__ == "__main__":
    main()

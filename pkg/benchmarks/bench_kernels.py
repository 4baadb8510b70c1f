"""Timing comparison of the compiled kernels against the numpy fallback.

Run directly:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from netopinion import _backend_pure as pure

try:
    from netopinion import _core as compiled
except ImportError:
    compiled = None

rng = np.random.default_rng(1)


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, args_fn):
    args = args_fn()
    t_pure = timeit(getattr(pure, name), *args)
    row = f"{name:24s} pure {t_pure * 1e3:9.3f} ms"
    if compiled is not None:
        t_comp = timeit(getattr(compiled, name), *args)
        row += f"   compiled {t_comp * 1e3:9.3f} ms   speedup {t_pure / t_comp:6.1f}x"
        same = all(
            np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b
            for a, b in zip(np.atleast_1d(getattr(pure, name)(*args)),
                            np.atleast_1d(getattr(compiled, name)(*args)))
        ) if name.startswith("mc_collision") else np.array_equal(
            getattr(pure, name)(*args), getattr(compiled, name)(*args))
        row += "   bit-identical" if same else "   MISMATCH"
    print(row)


def args_thomas_shared():
    m, r = 251, 81
    return (rng.uniform(-0.4, 0, m - 1), 1 + rng.uniform(0.8, 1.2, m),
            rng.uniform(-0.4, 0, m - 1), rng.random((r, m)))


def args_thomas_rows():
    r, m = 81, 251
    return (rng.uniform(-0.4, 0, (r, m - 1)), 1 + rng.uniform(0.8, 1.2, (r, m)),
            rng.uniform(-0.4, 0, (r, m - 1)), rng.random((r, m)))


def args_cc():
    return (rng.random((81, 251)), rng.normal(0, 5, (80, 251)),
            rng.uniform(0.05, 0.95, (80, 251)), 0.01 * rng.random((80, 251)),
            1e-3, 0.025)


def args_mc_network():
    n = 1_000_000
    return (rng.integers(0, 251, n), rng.random(n), rng.random(n),
            0.05, 1.0, 1.0, 0.1, 0.0, 30.0, 250)


def args_mc_collision():
    n = 500_000
    w1 = rng.uniform(-1, 1, n)
    w2 = rng.uniform(-1, 1, n)
    return (w1, w2, rng.random(n), rng.random(n), 1 - w1**2, 1 - w2**2,
            rng.normal(0, 0.02, n), rng.normal(0, 0.02, n),
            (rng.random(n) < 0.7).view(np.uint8), 0.05)


if __name__ == "__main__":
    if compiled is None:
        print("compiled extension not available; timing the fallback only")
    bench("thomas_shared", args_thomas_shared)
    bench("thomas_rows", args_thomas_rows)
    bench("cc_explicit_update", args_cc)
    bench("mc_network_update", args_mc_network)
    bench("mc_collision_update", args_mc_collision)

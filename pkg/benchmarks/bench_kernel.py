"""Benchmark the compiled RK4 kernel against the pure-Python fallback.

Run:  python benchmarks/bench_kernel.py
"""

import time

import numpy as np

from twomode.kernel import available_backends

CASES = [
    ("coexistence-line trajectory", (0.2, 0.0, 1.0, 0.75, 0.81, 0.1, 0.03, 0.95 - 1.06j, 1.41 + 0j, 0.01, 80_000, 5, 1e6)),
    ("stability probe", (0.2, 0.0, 1.0, 1.0, 0.9, 0.1, 0.03, 1.10 + 0.01j, 1.19 - 0.01j, 0.01, 20_000, 50, 1e6)),
    ("linear coupling", (0.0, 0.0, 1.0, 0.0, 0.0, 0.1, 0.0, 1.0 + 0j, 0.0 + 0j, 0.01, 50_000, 10, 1e6)),
]


def timeit(fn, args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the python backend is available")
    print(f"{'case':<32}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, args in CASES:
        t_py = timeit(backends["python"].rk4_propagate, args)
        row = f"{name:<32}{t_py * 1e3:>10.1f}ms"
        if "compiled" in backends:
            t_c = timeit(backends["compiled"].rk4_propagate, args)
            row += f"{t_c * 1e3:>10.2f}ms{t_py / t_c:>9.0f}x"
            rc, rx, n, _ = backends["compiled"].rk4_propagate(*args)
            pc, px, m, _ = backends["python"].rk4_propagate(*args)
            assert n == m and np.array_equal(rc[:n], pc[:m]) and np.array_equal(rx[:n], px[:m]), \
                f"backend mismatch in case {name!r}"
        print(row)
    if "compiled" in backends:
        print("outputs verified bitwise-identical across backends")


if __name__ == "__main__":
    main()

"""Benchmark the compiled stepping kernels against the pure-numpy fallback.

Runs the two hot kernels (fixed-step RK4 master-equation stepper and the
trapezoidal memory-kernel integrator) with identical inputs through both
implementations, reports wall times and the speedup, and verifies that the
outputs agree to near machine precision.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from zenocav import _kernels_py

try:
    from zenocav import _kernels_cy
except ImportError:
    _kernels_cy = None

ISQ2 = 1.0 / math.sqrt(2.0)


def _bench(fn, args, repeats):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def lindblad_case():
    rng = np.random.default_rng(1)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = 0.5 * (h + h.conj().T)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[1, 1] = 0.5
    rho[0, 1] = rho[1, 0] = 0.5
    return (h, 1.0, rho, 1e-4, 20000)


def volterra_case():
    c0 = np.array([ISQ2, ISQ2], dtype=complex)
    return (c0, 2.0, -2.0, 1.0, 0.5, ISQ2, ISQ2, 0.002, 3000)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats; best-of is reported")
    args = parser.parse_args()

    if _kernels_cy is None:
        print("compiled extension not built; timing the fallback only")

    cases = [
        ("lindblad_rk4 (4x4, 20k steps)", "lindblad_rk4", lindblad_case()),
        ("volterra_run (3k steps)", "volterra_run", volterra_case()),
    ]
    for label, name, case_args in cases:
        t_py, out_py = _bench(
            getattr(_kernels_py, name), case_args, args.repeats
        )
        line = f"{label}: python {t_py * 1e3:8.2f} ms"
        if _kernels_cy is not None:
            t_cy, out_cy = _bench(
                getattr(_kernels_cy, name), case_args, args.repeats
            )
            err = float(np.max(np.abs(np.asarray(out_cy) - np.asarray(out_py))))
            line += (f", cython {t_cy * 1e3:8.2f} ms, "
                     f"speedup {t_py / t_cy:5.1f}x, max |diff| {err:.1e}")
            if err > 1e-10:
                raise SystemExit(f"backend outputs disagree on {name}: {err}")
        print(line)


if __name__ == "__main__":
    main()

"""Benchmark the compiled fixed-point kernel against the NumPy fallback.

Both backends are imported directly, bypassing the environment-based
selection, and run on the same spectral-law workload: the measure comes
from a banded covariance spectrum and the z grid mirrors what
spectral_law_cdf evaluates.

Usage:
    python3 benchmarks/fixed_point_backends.py [--atoms 500] [--points 2001]
                                            [--repeats 3]
"""

import argparse
import importlib
import time

import numpy as np

from graphdep.models import make_m_dependent, population_covariance
from graphdep.spectra import symmetric_eigenvalues


def workload(atoms: int, points: int):
    model = make_m_dependent(atoms, 5, (1.0,) * 6)
    sigma = population_covariance(model).matrix
    lam = symmetric_eigenvalues(sigma)
    lam = np.maximum(lam, 0.0)
    w = np.full(lam.size, 1.0 / lam.size)
    upper = float(lam.max()) * (1.0 + np.sqrt(0.5)) ** 2 * 1.05 + 1.0
    z = np.linspace(0.0, upper, points) + 1e-3j
    return lam, w, z


def run(impl, lam, w, z, repeats: int) -> tuple[float, np.ndarray, np.ndarray]:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        s, _, _, converged = impl.solve_grid(
            lam, w, 0.5, z, 1e-12, 100_000, 0.5, 6
        )
        best = min(best, time.perf_counter() - start)
    return best, s, converged


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--atoms", type=int, default=500,
                        help="number of spectrum atoms (default 500)")
    parser.add_argument("--points", type=int, default=2001,
                        help="z grid size (default 2001)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats, best of (default 3)")
    args = parser.parse_args()

    backends = {}
    for name, module in [
        ("cython", "graphdep._kernels._fixed_point"),
        ("python", "graphdep._kernels._fixed_point_py"),
    ]:
        try:
            backends[name] = importlib.import_module(module)
        except ImportError:
            print(f"{name}: not available, skipping")

    lam, w, z = workload(args.atoms, args.points)
    results = {}
    for name, impl in backends.items():
        elapsed, s, converged = run(impl, lam, w, z, args.repeats)
        results[name] = (elapsed, s, converged)
        rate = args.points / elapsed
        print(f"{name:>6}: {elapsed * 1e3:8.1f} ms  "
              f"({rate:,.0f} grid points/s, "
              f"{int(converged.sum())}/{args.points} converged)")

    if len(results) == 2:
        t_cy, s_cy, conv_cy = results["cython"]
        t_py, s_py, conv_py = results["python"]
        both = conv_cy & conv_py
        gap = float(np.max(np.abs(s_cy[both] - s_py[both]))) if both.any() else 0.0
        print(f"speedup: {t_py / t_cy:.1f}x, max |s_cy - s_py| on converged "
              f"points: {gap:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Sample covariance matrices, spectra, and distribution distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

SYMMETRY_RTOL = 1e-10
NEGATIVE_EIG_RTOL = 1e-10


@dataclass(frozen=True)
class SampleCovariance:
    """(1/n) X X^T for a p-by-n sample matrix; the mean is not subtracted."""

    matrix: np.ndarray
    p: int
    n: int
    ratio: float


@dataclass(frozen=True)
class SpectralDistribution:
    """Empirical spectral distribution: equal mass 1/p at each eigenvalue."""

    eigenvalues: np.ndarray

    @property
    def p(self) -> int:
        return self.eigenvalues.size

    def cdf(self, x) -> np.ndarray:
        """Right-continuous step CDF evaluated at x (scalar or array)."""
        pos = np.searchsorted(self.eigenvalues, np.asarray(x, dtype=float), side="right")
        return pos / self.p


def sample_covariance(samples: np.ndarray) -> SampleCovariance:
    """Form (1/n) sum_k x_k x_k^T from columns x_k."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"samples must be a p-by-n matrix, got shape {x.shape}")
    p, n = x.shape
    if n < 1 or p < 1:
        raise ValueError(f"samples must be nonempty, got shape {x.shape}")
    s = x @ x.T / n
    s = (s + s.T) / 2.0
    return SampleCovariance(matrix=s, p=p, n=n, ratio=p / n)


def symmetric_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """All eigenvalues of a symmetric real matrix, ascending."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale > 0 and float(np.max(np.abs(a - a.T))) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    return np.linalg.eigvalsh((a + a.T) / 2.0)


def esd(matrix) -> SpectralDistribution:
    """Empirical spectral distribution of a symmetric matrix.

    Covariance inputs (SampleCovariance, or covariance=True) get the
    clamping policy: eigenvalues in [-1e-10*max, 0) are set to 0, anything
    more negative is an error because it signals a broken sampler or solver.
    """
    covariance = isinstance(matrix, SampleCovariance)
    a = matrix.matrix if covariance else matrix
    values = symmetric_eigenvalues(a)
    if covariance:
        values = clamp_covariance_eigenvalues(values)
    return SpectralDistribution(eigenvalues=values)


def clamp_covariance_eigenvalues(values: np.ndarray) -> np.ndarray:
    """Apply the covariance clamping policy to a sorted eigenvalue vector."""
    values = np.asarray(values, dtype=float)
    tol = NEGATIVE_EIG_RTOL * max(float(np.max(np.abs(values))), 0.0) if values.size else 0.0
    if values.size and float(values[0]) < -tol:
        raise ValueError(
            f"covariance eigenvalue {values[0]} below -{tol}: input is not PSD"
        )
    return np.where(values < 0.0, 0.0, values)


def kolmogorov_distance(dist: SpectralDistribution, cdf: Callable) -> float:
    """sup_x |F_emp(x) - F(x)|, evaluated exactly at the jump points."""
    lam = dist.eigenvalues
    p = lam.size
    try:
        f = np.asarray(cdf(lam), dtype=float)
        if f.shape != lam.shape:
            raise TypeError
    except TypeError:
        f = np.array([float(cdf(x)) for x in lam])
    upper = np.arange(1, p + 1) / p
    lower = np.arange(0, p) / p
    return float(np.max(np.maximum(np.abs(f - upper), np.abs(f - lower))))


def format_eigenvalue_csv(values: Iterable[float]) -> str:
    """One eigenvalue per line, ascending, 17 significant digits."""
    vals = np.sort(np.asarray(list(values), dtype=float))
    return "\n".join(f"{v:.17g}" for v in vals) + "\n"

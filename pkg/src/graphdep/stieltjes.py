"""Limiting spectral laws.

Two routes to the limit law of sample covariance spectra: the closed-form
Marchenko-Pastur family (identity population covariance), and the general
fixed-point equation

    s(z) = integral of mu(d lambda) / (lambda (1 - rho - rho z s(z)) - z)

for an arbitrary discrete population spectral measure mu.  The density is
recovered from Im s(x + i eta) / pi, and atoms at 0 from eta * Im s(i eta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .spectra import clamp_covariance_eigenvalues

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
DEFAULT_ALPHA = 0.5
MAX_HALVINGS = 6


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed; carries the last iterate and residual."""

    def __init__(self, solution: "StieltjesSolution"):
        super().__init__(
            f"fixed point did not converge at z={solution.z}: "
            f"residual {solution.residual:.3e} after {solution.iterations} iterations"
        )
        self.solution = solution


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finitely many atoms on [0, inf)."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 1 or atoms.shape != weights.shape or atoms.size == 0:
            raise ValueError("atoms and weights must be matching nonempty vectors")
        if np.any(atoms < 0):
            raise ValueError("atoms must be nonnegative")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        order = np.argsort(atoms, kind="stable")
        object.__setattr__(self, "atoms", np.ascontiguousarray(atoms[order]))
        object.__setattr__(self, "weights", np.ascontiguousarray(weights[order]))

    @classmethod
    def from_eigenvalues(cls, values) -> "DiscreteMeasure":
        """Uniform-weight measure on a covariance spectrum (tiny negatives clamped)."""
        vals = clamp_covariance_eigenvalues(np.sort(np.asarray(values, dtype=float)))
        return cls(vals, np.full(vals.size, 1.0 / vals.size))

    @classmethod
    def point_mass(cls, lam: float) -> "DiscreteMeasure":
        return cls(np.array([float(lam)]), np.array([1.0]))

    @property
    def lambda_max(self) -> float:
        return float(self.atoms[-1])

    def mass_at_zero(self) -> float:
        return float(self.weights[self.atoms == 0.0].sum())


@dataclass(frozen=True)
class StieltjesSolution:
    z: complex
    s: complex
    residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class DensityGrid:
    """Recovered density on a grid, with per-point solver diagnostics."""

    x: np.ndarray
    density: np.ndarray
    converged: np.ndarray
    residual: np.ndarray
    eta: float


def mp_support(rho: float) -> tuple[float, float]:
    """Support endpoints ((1-sqrt(rho))^2, (1+sqrt(rho))^2) of the MP law."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    r = math.sqrt(rho)
    return ((1.0 - r) ** 2, (1.0 + r) ** 2)


def mp_atom(rho: float) -> float:
    """Mass of the MP law at 0: max(1 - 1/rho, 0)."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    return max(1.0 - 1.0 / rho, 0.0)


def mp_density(x: float, rho: float) -> float:
    """Continuous part of the MP density: sqrt((b-x)(x-a)) / (2 pi x rho)."""
    a, b = mp_support(rho)
    x = float(x)
    if x <= 0 or x <= a or x >= b:
        return 0.0
    return math.sqrt((b - x) * (x - a)) / (2.0 * math.pi * x * rho)


def _mp_theta_integrand(a: float, b: float, rho: float):
    span = b - a

    def integrand(t: float) -> float:
        st2 = math.sin(t) ** 2
        x = a + span * st2
        if x <= 0.0:
            return b / math.pi
        return span * span * st2 * (1.0 - st2) / (math.pi * rho * x)

    return integrand


def mp_cdf(x: float, rho: float) -> float:
    """MP distribution function: atom at 0 plus quadrature of the density.

    The square-root endpoint singularities are removed by the substitution
    x = a + (b - a) sin^2(theta) before adaptive quadrature.
    """
    a, b = mp_support(rho)
    atom = mp_atom(rho)
    x = float(x)
    if x < 0:
        return 0.0
    if x <= a:
        return atom
    if x >= b:
        theta = math.pi / 2.0
    else:
        theta = math.asin(min(1.0, math.sqrt((x - a) / (b - a))))
    integral, _ = quad(
        _mp_theta_integrand(a, b, rho), 0.0, theta, epsabs=1e-10, epsrel=1e-12,
        limit=200,
    )
    return min(atom + integral, 1.0)


def _validate_solver_options(rho, tol, max_iter, alpha):
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if not (isinstance(max_iter, int) and max_iter >= 1):
        raise ValueError(f"max_iter must be a positive integer, got {max_iter!r}")
    if not 0 < alpha <= 1:
        raise ValueError(f"damping alpha must lie in (0, 1], got {alpha}")


def _solve_grid(mu: DiscreteMeasure, rho: float, z_points: np.ndarray,
                tol: float, max_iter: int, alpha: float):
    return _kernels.solve_grid(
        np.ascontiguousarray(mu.atoms), np.ascontiguousarray(mu.weights),
        float(rho), np.ascontiguousarray(z_points, dtype=np.complex128),
        float(tol), int(max_iter), float(alpha), MAX_HALVINGS,
    )


def solve_stieltjes(
    mu: DiscreteMeasure,
    rho: float,
    z: complex,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    alpha: float = DEFAULT_ALPHA,
) -> StieltjesSolution:
    """Solve the fixed point at one z in the upper half plane.

    Damped iteration s <- (1 - alpha) s + alpha F(s) from s0 = -1/z; if an
    iterate leaves the upper half plane the damping is halved and the
    iteration restarts from s0, giving up after 6 halvings.
    """
    _validate_solver_options(rho, tol, max_iter, alpha)
    z = complex(z)
    if not z.imag > 0:
        raise ValueError(f"z must have positive imaginary part, got {z}")
    s, res, its, conv = _solve_grid(mu, rho, np.array([z]), tol, max_iter, alpha)
    solution = StieltjesSolution(
        z=z, s=complex(s[0]), residual=float(res[0]),
        iterations=int(its[0]), converged=bool(conv[0]),
    )
    if not solution.converged:
        raise ConvergenceError(solution)
    return solution


def evaluate_fixed_point_map(mu: DiscreteMeasure, rho: float, z: complex, s: complex) -> complex:
    """One application of F; exposed so convergence can be re-checked literally."""
    coef = 1.0 - rho - rho * z * s
    return complex(np.sum(mu.weights / (mu.atoms * coef - z)))


def default_eta(mu: DiscreteMeasure) -> float:
    """Default spectral smoothing: 1e-3 * (largest atom + 1)."""
    return 1e-3 * (mu.lambda_max + 1.0)


def density_from_stieltjes(
    mu: DiscreteMeasure,
    rho: float,
    x_grid,
    eta: float | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    alpha: float = DEFAULT_ALPHA,
) -> DensityGrid:
    """Approximate density Im s(x + i eta) / pi on a sorted grid.

    Divergence at a grid point marks that point unconverged rather than
    failing the whole grid.  Values within O(sqrt(eta)) of the support
    endpoints are smeared by construction.
    """
    _validate_solver_options(rho, tol, max_iter, alpha)
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("x_grid must be a nonempty 1-d vector")
    if np.any(np.diff(x) < 0):
        raise ValueError("x_grid must be sorted ascending")
    if eta is None:
        eta = default_eta(mu)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    z = x + 1j * float(eta)
    s, res, _, conv = _solve_grid(mu, rho, z, tol, max_iter, alpha)
    return DensityGrid(
        x=x, density=np.imag(s) / math.pi, converged=conv.astype(bool),
        residual=res, eta=float(eta),
    )


def atom_from_stieltjes(mu: DiscreteMeasure, rho: float, eta: float = 0.05,
                        **options) -> float:
    """Estimate the limit law's mass at 0 as eta * Im s(i eta); bias is O(eta)."""
    sol = solve_stieltjes(mu, rho, 1j * float(eta), **options)
    return float(eta) * sol.s.imag


def zero_atom(mu: DiscreteMeasure, rho: float) -> float:
    """Exact mass of the limit law at 0: max(1 - 1/rho, mu({0}))."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    return max(1.0 - 1.0 / rho, mu.mass_at_zero())


@dataclass(frozen=True)
class SpectralLawCDF:
    """Interpolated distribution function of the limit law on [0, x_max]."""

    x: np.ndarray
    values: np.ndarray
    atom: float
    eta: float
    all_converged: bool
    total_mass: float
    grid: DensityGrid

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.interp(x, self.x, self.values)
        return np.where(x < 0.0, 0.0, vals)


def spectral_law_cdf(
    mu: DiscreteMeasure,
    rho: float,
    eta: float | None = None,
    grid_points: int = 2001,
    x_max: float | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    alpha: float = DEFAULT_ALPHA,
) -> SpectralLawCDF:
    """Distribution function of the limit law via density recovery.

    The continuous part is integrated by trapezoid from the recovered
    density; the atom at 0 is added in closed form, with its smeared
    Lorentzian leakage subtracted from the density before integrating.
    """
    if eta is None:
        eta = default_eta(mu)
    if x_max is None:
        edge = mu.lambda_max * (1.0 + math.sqrt(rho)) ** 2
        x_max = edge * 1.05 + 1.0
    x = np.linspace(0.0, float(x_max), int(grid_points))
    grid = density_from_stieltjes(mu, rho, x, eta=eta, tol=tol,
                                  max_iter=max_iter, alpha=alpha)
    atom = zero_atom(mu, rho)
    density = grid.density.copy()
    if atom > 0:
        leak = atom * (eta / math.pi) / (x * x + eta * eta)
        density = np.maximum(density - leak, 0.0)
    increments = np.diff(x) * (density[1:] + density[:-1]) / 2.0
    values = atom + np.concatenate(([0.0], np.cumsum(increments)))
    values = np.minimum(values, 1.0)
    return SpectralLawCDF(
        x=x, values=values, atom=atom, eta=float(grid.eta),
        all_converged=bool(np.all(grid.converged)),
        total_mass=float(values[-1]), grid=grid,
    )


def format_density_csv(grid: DensityGrid) -> str:
    """CSV with columns x, density, converged(0/1), residual."""
    lines = ["x,density,converged,residual"]
    for xi, di, ci, ri in zip(grid.x, grid.density, grid.converged, grid.residual):
        lines.append(f"{xi:.17g},{di:.17g},{int(ci)},{ri:.17g}")
    return "\n".join(lines) + "\n"

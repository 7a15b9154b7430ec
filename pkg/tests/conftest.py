"""Shared helpers for the test suite."""

import numpy as np
import pytest

from graphdep.graph import DependencyGraph


def random_graph(p: int, edge_prob: float, seed: int) -> DependencyGraph:
    """Erdos-Renyi style graph, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    edges = [
        (u, v)
        for u in range(1, p + 1)
        for v in range(u + 1, p + 1)
        if rng.random() < edge_prob
    ]
    return DependencyGraph(p, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def mp_stieltjes_closed_form(z: complex, rho: float) -> complex:
    """Marchenko-Pastur Stieltjes transform via the quadratic's explicit root.

    s solves rho*z*s^2 + (z + rho - 1)*s + 1 = 0; the Herglotz root (positive
    imaginary part for z in the upper half plane) is selected explicitly.
    """
    a = rho * z
    b = z + rho - 1
    disc = np.sqrt(b * b - 4 * a + 0j)
    for sign in (1, -1):
        s = (-b + sign * disc) / (2 * a)
        if s.imag > 0:
            return s
    raise AssertionError(f"no Herglotz root at z={z}, rho={rho}")

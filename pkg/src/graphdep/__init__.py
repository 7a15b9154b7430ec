"""Spectra of sample covariance matrices under graph dependence.

Simulate random vectors whose coordinate dependencies follow a graph,
form their sample covariance matrices, compare empirical spectral
distributions against the limiting laws (closed-form Marchenko-Pastur or
the general fixed-point law for a spiked/banded population covariance),
and verify the supporting variance bounds and combinatorial
constructions.
"""

from ._kernels import backend_name
from .bounds import (
    InclusionExclusionTerm,
    MaskedMatrix,
    Theorem3Report,
    VarianceEstimate,
    c_constant,
    inclusion_exclusion_value,
    monte_carlo_variance,
    operator_norm,
    qualifies_for_local_bound,
    ring_mask,
    variance_bound_general,
    variance_bound_local,
    verify_theorem3,
)
from .graph import (
    DependencyGraph,
    DominatingSetCertificate,
    EdgeListError,
    NotDominatingError,
    auxiliary_graph,
    ball_intersection_subsets,
    block_graph,
    format_edge_list,
    greedy_coloring,
    greedy_dominating_set,
    m_dependent_graph,
    parse_edge_list,
    sets_adjacent,
    verify_dominating,
)
from .models import (
    LindebergEstimate,
    ModelSpec,
    PopulationCovariance,
    UnsupportedMomentError,
    declared_graph,
    fourth_moments,
    lindeberg_statistic,
    make_block_independent,
    make_graph_ma,
    make_m_dependent,
    model_from_json,
    population_covariance,
    sample,
    with_scale,
)
from .spectra import (
    SampleCovariance,
    SpectralDistribution,
    esd,
    format_eigenvalue_csv,
    kolmogorov_distance,
    sample_covariance,
    symmetric_eigenvalues,
)
from .stieltjes import (
    ConvergenceError,
    DensityGrid,
    DiscreteMeasure,
    SpectralLawCDF,
    StieltjesSolution,
    atom_from_stieltjes,
    density_from_stieltjes,
    format_density_csv,
    mp_atom,
    mp_cdf,
    mp_density,
    mp_support,
    solve_stieltjes,
    spectral_law_cdf,
    zero_atom,
)

__version__ = "0.1.0"

__all__ = [
    "DependencyGraph",
    "DominatingSetCertificate",
    "EdgeListError",
    "NotDominatingError",
    "auxiliary_graph",
    "ball_intersection_subsets",
    "block_graph",
    "format_edge_list",
    "greedy_coloring",
    "greedy_dominating_set",
    "m_dependent_graph",
    "parse_edge_list",
    "sets_adjacent",
    "verify_dominating",
    "LindebergEstimate",
    "ModelSpec",
    "PopulationCovariance",
    "UnsupportedMomentError",
    "declared_graph",
    "fourth_moments",
    "lindeberg_statistic",
    "make_block_independent",
    "make_graph_ma",
    "make_m_dependent",
    "model_from_json",
    "population_covariance",
    "sample",
    "with_scale",
    "SampleCovariance",
    "SpectralDistribution",
    "esd",
    "format_eigenvalue_csv",
    "kolmogorov_distance",
    "sample_covariance",
    "symmetric_eigenvalues",
    "ConvergenceError",
    "DensityGrid",
    "DiscreteMeasure",
    "SpectralLawCDF",
    "StieltjesSolution",
    "atom_from_stieltjes",
    "density_from_stieltjes",
    "format_density_csv",
    "mp_atom",
    "mp_cdf",
    "mp_density",
    "mp_support",
    "solve_stieltjes",
    "spectral_law_cdf",
    "zero_atom",
    "InclusionExclusionTerm",
    "MaskedMatrix",
    "Theorem3Report",
    "VarianceEstimate",
    "c_constant",
    "inclusion_exclusion_value",
    "monte_carlo_variance",
    "operator_norm",
    "qualifies_for_local_bound",
    "ring_mask",
    "variance_bound_general",
    "variance_bound_local",
    "verify_theorem3",
    "backend_name",
    "__version__",
]

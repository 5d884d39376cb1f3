"""Harmonic analysis on metrized graphs.

Effective resistance, j-functions, Arakelov-Green's functions, the
canonical measure and tau constant, and eigenvalue problems for the
Laplacian with respect to a reference measure.
"""

from .graph_core import (
    BUILTIN_NAMES,
    Edge,
    MetrizedGraph,
    PointOnGraph,
    ValidationError,
    build_graph,
    builtin_graph,
    ensure_vertex,
    format_point,
    graph_from_json,
    graph_to_json,
    load_graph,
    parse_point,
    path_distance,
    scale_graph,
    subdivide_at,
    total_length,
    valence,
)
from .numerics import (
    NumericError,
    PiecewisePoly,
    QuadratureRule,
    nullspace_basis,
    scan_and_refine_roots,
    solve_grounded,
)
from .circuit import (
    ResistanceKernel,
    ResistanceProfile,
    effective_resistance,
    j_function,
    laplacian_matrix,
    removed_edge_resistance,
    resistance_kernel,
    resistance_profile,
)
from .measure import (
    CPAFunction,
    Measure,
    canonical_measure,
    dirac,
    integrate_against,
    lebesgue_measure,
    load_measure,
    measure_from_json,
    measure_to_json,
    resolve_measure,
)
from .green import (
    DiscriminantReport,
    GreenEvaluator,
    build_green,
    discriminant_sum,
    energy_pairing,
    tau_constant,
    trace_comparison,
    trace_of_phi,
    weak_laplacian_residual,
)
from .spectral import (
    CharacteristicMatrix,
    EdgeBasisSolution,
    Eigenpair,
    ResidualReport,
    SpectralProblem,
    assemble_characteristic_matrix,
    characteristic_det,
    dirichlet_inner,
    eigen_residuals,
    eigenfunctions_at,
    find_eigenvalues,
    l2_inner,
    particular_solution,
    trig_poly_moments,
    mercer_partial_sum,
    rayleigh_quotient,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES",
    "CPAFunction",
    "CharacteristicMatrix",
    "DiscriminantReport",
    "Edge",
    "EdgeBasisSolution",
    "Eigenpair",
    "GreenEvaluator",
    "Measure",
    "MetrizedGraph",
    "NumericError",
    "PiecewisePoly",
    "PointOnGraph",
    "QuadratureRule",
    "ResidualReport",
    "ResistanceKernel",
    "ResistanceProfile",
    "SpectralProblem",
    "ValidationError",
    "assemble_characteristic_matrix",
    "build_graph",
    "build_green",
    "builtin_graph",
    "canonical_measure",
    "characteristic_det",
    "dirac",
    "dirichlet_inner",
    "discriminant_sum",
    "effective_resistance",
    "eigen_residuals",
    "eigenfunctions_at",
    "energy_pairing",
    "ensure_vertex",
    "find_eigenvalues",
    "format_point",
    "graph_from_json",
    "graph_to_json",
    "integrate_against",
    "j_function",
    "l2_inner",
    "laplacian_matrix",
    "lebesgue_measure",
    "load_graph",
    "load_measure",
    "measure_from_json",
    "measure_to_json",
    "mercer_partial_sum",
    "nullspace_basis",
    "parse_point",
    "particular_solution",
    "path_distance",
    "rayleigh_quotient",
    "removed_edge_resistance",
    "resistance_kernel",
    "resistance_profile",
    "resolve_measure",
    "scale_graph",
    "scan_and_refine_roots",
    "solve_grounded",
    "subdivide_at",
    "tau_constant",
    "total_length",
    "trace_comparison",
    "trace_of_phi",
    "trig_poly_moments",
    "valence",
    "weak_laplacian_residual",
]

"""Polynomial-filtered distributed average consensus."""
from .engine import (SCHEDULES, ConsensusTrace, ConvergenceStats, DynamicNetwork, RunConfig,
                     convergence_stats, run_filtered, run_sea, run_standard)
from .filters import (PolynomialFilter, apply_to_spectrum, eval_filter, filtered_factor,
                      identity_filter, matrix_apply, matrix_polynomial, newton_filter)
from .graph import (DisconnectedGraphError, Graph, IidFailure, MarkovSwitch, complete_graph,
                    cycle_graph, default_radius, degrees, generate_rgg, is_connected, path_graph,
                    sample_topology, topology_sequence)
from .optimize import (MinimaxSolution, OptimizationError, lp_minimax, optimal_filter_dynamic,
                       optimal_filter_static)
from .spectral import (ConvergenceReport, SpectralDecomposition, check_convergence,
                       deflated_eigenvalues, deflated_radius, eig_sym, jacobi_eigh)
from .weights import (SCHEMES, WeightScheme, check_weight_matrix, expected_weight_matrix,
                      laplacian_weights, max_degree_weights, metropolis_weights)

__version__ = "0.1.0"

__all__ = [
    "SCHEDULES", "ConsensusTrace", "ConvergenceStats", "DynamicNetwork", "RunConfig",
    "convergence_stats", "run_filtered", "run_sea", "run_standard",
    "PolynomialFilter", "apply_to_spectrum", "eval_filter", "filtered_factor",
    "identity_filter", "matrix_apply", "matrix_polynomial", "newton_filter",
    "DisconnectedGraphError", "Graph", "IidFailure", "MarkovSwitch", "complete_graph",
    "cycle_graph", "default_radius", "degrees", "generate_rgg", "is_connected", "path_graph",
    "sample_topology", "topology_sequence",
    "MinimaxSolution", "OptimizationError", "lp_minimax", "optimal_filter_dynamic",
    "optimal_filter_static",
    "ConvergenceReport", "SpectralDecomposition", "check_convergence", "deflated_eigenvalues",
    "deflated_radius", "eig_sym", "jacobi_eigh",
    "SCHEMES", "WeightScheme", "check_weight_matrix", "expected_weight_matrix",
    "laplacian_weights", "max_degree_weights", "metropolis_weights",
]

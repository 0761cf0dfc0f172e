"""Counting likelihood critical points and fiber points by homotopy continuation."""

from .polys import CompiledSystem, PolySystem
from .systems import (CriticalRun, FiberSystem, MLDegreeCount, MonotonicityResult,
                      SeedDisagreement, count_ml_degree, critical_points, draw_sample_covariance,
                      fiber_bruteforce, fiber_matrix_to_vector, fiber_system,
                      fiber_vector_to_matrix, full_minor_residual, monotonicity_check,
                      score_system, sigma_from_vector, vanishing_minor_family)
from .tracker import (CONVERGED, DIVERGED, SINGULAR, STEP_FAILURE, PathResult, TrackerConfig,
                      dedup_points, solve_total_degree, status_counts)

__all__ = [
    "CompiledSystem", "PolySystem", "CriticalRun", "FiberSystem", "MLDegreeCount",
    "MonotonicityResult", "SeedDisagreement", "count_ml_degree", "critical_points",
    "draw_sample_covariance", "fiber_bruteforce", "fiber_matrix_to_vector", "fiber_system",
    "fiber_vector_to_matrix", "full_minor_residual", "monotonicity_check", "score_system",
    "sigma_from_vector", "vanishing_minor_family", "CONVERGED", "DIVERGED", "SINGULAR",
    "STEP_FAILURE", "PathResult", "TrackerConfig", "dedup_points", "solve_total_degree",
    "status_counts",
]

"""Sampled-data control delay toolkit.

Measure how control delay varies with the sampling period, correct irregular
measurements, fit a quadratic delay model, and locate the delay-minimizing
sampling period. The heavy lifting lives in the compiled `_delayopt` core.
"""

from ._delayopt import (
    OptimalPoint,
    OptimizationResult,
    ProfileRow,
    ProfileTable,
    QuadraticModel,
    ScalarDiscretization,
    ScalarLoopGains,
    ToolkitError,
    build_profile,
    correct_piecewise,
    delay_from_ratio,
    detect_irregular,
    discretize_scalar,
    evaluate_model,
    exact_domain_ratio,
    fit_quadratic,
    load_profile_csv,
    max_admissible_ratio,
    measured_profile,
    neighbor_interpolation,
    optimize_sampling,
    ratio_from_delay,
    save_profile_csv,
    simulate_benchmark,
    simulate_loop,
    step,
    vertex,
)

__version__ = "0.1.0"

__all__ = [
    "OptimalPoint",
    "OptimizationResult",
    "ProfileRow",
    "ProfileTable",
    "QuadraticModel",
    "ScalarDiscretization",
    "ScalarLoopGains",
    "ToolkitError",
    "build_profile",
    "correct_piecewise",
    "delay_from_ratio",
    "detect_irregular",
    "discretize_scalar",
    "evaluate_model",
    "exact_domain_ratio",
    "fit_quadratic",
    "load_profile_csv",
    "max_admissible_ratio",
    "measured_profile",
    "neighbor_interpolation",
    "optimize_sampling",
    "ratio_from_delay",
    "save_profile_csv",
    "simulate_benchmark",
    "simulate_loop",
    "step",
    "vertex",
]

"""Downlink coverage and distance statistics for Poisson cellular networks.

Two user models are supported end to end: the cell-centric view with one
user uniform in the serving station's own cell (type1) and the classical
user-centric view with a stationary independent user (type2).  Every
analytic formula is paired with a full-geometry Monte Carlo oracle.
"""

__version__ = "0.1.0"

from .analytic import (
    ModelParams,
    beta_tilde,
    cdf_r1_2d,
    cdf_r1_given_ro_2d,
    cdf_ro_2d,
    cdf_ro_given_r1r2_1d,
    coverage_type1_1d,
    coverage_type1_2d,
    coverage_type1_app1_2d,
    coverage_type2,
    joint_pdf_r1r2,
    lt_interference_1d,
    pcf_app2_overlay,
)
from .montecarlo import (
    CoverageCurve,
    EmpiricalDistribution,
    ExperimentConfig,
    InsufficientSamplesError,
    PcfEstimate,
    SimulationError,
    collect_area_samples,
    collect_distance_samples,
    collect_power_samples,
    estimate_pcf,
    run_sir_experiment,
    run_surrogate_experiment,
)
from .pointprocess import (
    CellNotClosedError,
    CellPolygon,
    Interval,
    NetworkRealization,
    SimWindow,
    crofton_cell,
    default_window,
    sample_ppp,
    sample_type1_realization,
    sample_type2_realization,
    sample_user_in_cell,
    typical_cell,
)
from .quadrature import (
    QuadratureError,
    QuadratureSpec,
    integrate,
    integrate_semi_infinite,
)

__all__ = [
    "__version__",
    "ModelParams", "beta_tilde", "cdf_r1_2d", "cdf_r1_given_ro_2d",
    "cdf_ro_2d", "cdf_ro_given_r1r2_1d", "coverage_type1_1d",
    "coverage_type1_2d", "coverage_type1_app1_2d", "coverage_type2",
    "joint_pdf_r1r2", "lt_interference_1d", "pcf_app2_overlay",
    "CoverageCurve", "EmpiricalDistribution", "ExperimentConfig",
    "InsufficientSamplesError", "PcfEstimate", "SimulationError",
    "collect_area_samples", "collect_distance_samples",
    "collect_power_samples", "estimate_pcf", "run_sir_experiment",
    "run_surrogate_experiment",
    "CellNotClosedError", "CellPolygon", "Interval", "NetworkRealization",
    "SimWindow", "crofton_cell", "default_window", "sample_ppp",
    "sample_type1_realization", "sample_type2_realization",
    "sample_user_in_cell", "typical_cell",
    "QuadratureError", "QuadratureSpec", "integrate",
    "integrate_semi_infinite",
]

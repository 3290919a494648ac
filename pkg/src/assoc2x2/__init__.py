"""Asymptotic independence tests for 2x2 tables and a power-study harness."""

from .errors import (
    Assoc2x2Error,
    DegenerateMarginError,
    InvalidDistributionError,
    InvalidTableError,
    ZeroCellError,
)
from .measures import (
    ContingencyTable,
    ExtendedReal,
    JointDistribution,
    MeasurePair,
    Pillars,
    b_matrix,
    canonical_singular_values,
    log_odds_ratio,
    measures,
    odds_ratio,
    phi,
    phi_hat,
    pillars,
    rho_signed,
    rho_squared,
)
from .montecarlo import (
    DistributionResult,
    PowerEstimate,
    ReplicateStreams,
    StudyConfig,
    StudyResult,
    estimate_power,
    run_null_calibration,
    run_study,
    sample_multinomial,
    sample_product_null,
    sample_uniform_dirichlet,
)
from .variances import (
    PhiGradient,
    VarianceBasis,
    VarianceEstimate,
    delta_var_phi,
    delta_var_phi_plugin,
    phi_gradient,
    population_var_log_or,
    score_var_log_or,
    wald_var_log_or,
)
from .ztests import (
    Degeneracy,
    TestKind,
    TestOutcome,
    ZeroCellPolicy,
    critical_value,
    run_all_tests,
    z1_wald_log_or,
    z2_score_log_or,
    z3_wald_phi,
    z4_score_phi,
)

__version__ = "0.1.0"

__all__ = [
    "Assoc2x2Error",
    "DegenerateMarginError",
    "InvalidDistributionError",
    "InvalidTableError",
    "ZeroCellError",
    "ContingencyTable",
    "ExtendedReal",
    "JointDistribution",
    "MeasurePair",
    "Pillars",
    "b_matrix",
    "canonical_singular_values",
    "log_odds_ratio",
    "measures",
    "odds_ratio",
    "phi",
    "phi_hat",
    "pillars",
    "rho_signed",
    "rho_squared",
    "PhiGradient",
    "VarianceBasis",
    "VarianceEstimate",
    "delta_var_phi",
    "delta_var_phi_plugin",
    "phi_gradient",
    "population_var_log_or",
    "score_var_log_or",
    "wald_var_log_or",
    "Degeneracy",
    "TestKind",
    "TestOutcome",
    "ZeroCellPolicy",
    "critical_value",
    "run_all_tests",
    "z1_wald_log_or",
    "z2_score_log_or",
    "z3_wald_phi",
    "z4_score_phi",
    "DistributionResult",
    "PowerEstimate",
    "ReplicateStreams",
    "StudyConfig",
    "StudyResult",
    "estimate_power",
    "run_null_calibration",
    "run_study",
    "sample_multinomial",
    "sample_product_null",
    "sample_uniform_dirichlet",
    "__version__",
]

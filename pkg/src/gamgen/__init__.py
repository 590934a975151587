"""Gamma-type distributions indexed by a generator function.

A positive random variable Y belongs to the family when T(Y^p) is gamma
distributed with shape mu and rate mu*sigma, for a monotone generator T.
The package provides the catalog of classical special cases, densities and
samplers, closed-form and ML estimators of (mu, sigma, p), bootstrap bias
reduction, and a reproducible Monte Carlo experiment harness.
"""

from .bootstrap import BootstrapResult, bootstrap_bias_reduce, relative_bias, rmse
from .distribution import (
    FamilyParams,
    MomentExistence,
    Sample,
    cdf,
    log_pdf,
    moment_exists,
    moment_power_law,
    population_mu_limit,
    quantile,
    sample,
)
from .errors import (
    BootstrapDegenerateError,
    ConvergenceError,
    DataError,
    DegenerateLimitError,
    DegenerateSampleError,
    DomainError,
    GamgenError,
    InvalidSampleError,
    MomentDoesNotExistError,
    NonpositiveObservationError,
    NoRootInBracketError,
    OverflowInValue,
)
from .estimators import (
    EstimateReport,
    FullMlFit,
    ScoreVector,
    SolverDiagnostics,
    estimate_mu_closed,
    estimate_mu_ml,
    estimate_sigma,
    estimating_equation_bias,
    fit_family,
    fit_full_ml,
    fit_new_log_generalized_gamma,
    log_likelihood,
    ml_equation_rhs,
    profile_mu,
    profile_sigma,
    score_vector,
)
from .experiment import (
    CSV_HEADER,
    ExperimentConfig,
    MetricsRow,
    native_estimator,
    paper_figure1_config,
    parse_config_file,
    read_csv_rows,
    run_experiment,
    smoke_config,
    write_csv,
)
from .generators import (
    Generator,
    LogPower,
    NativeParamMap,
    PowerLaw,
    UnknownGeneratorError,
    catalog_names,
    inverse_of,
    make_generator,
    parse_generator_spec,
)
from .svgplot import write_figure_svgs
from .special import (
    RngStream,
    digamma,
    inv_reg_lower_gamma,
    log_gamma,
    reg_lower_gamma,
    sample_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapDegenerateError",
    "BootstrapResult",
    "CSV_HEADER",
    "ConvergenceError",
    "DataError",
    "DegenerateLimitError",
    "DegenerateSampleError",
    "DomainError",
    "EstimateReport",
    "ExperimentConfig",
    "FamilyParams",
    "FullMlFit",
    "GamgenError",
    "Generator",
    "InvalidSampleError",
    "LogPower",
    "MetricsRow",
    "MomentDoesNotExistError",
    "MomentExistence",
    "NativeParamMap",
    "NoRootInBracketError",
    "NonpositiveObservationError",
    "OverflowInValue",
    "PowerLaw",
    "RngStream",
    "Sample",
    "ScoreVector",
    "SolverDiagnostics",
    "UnknownGeneratorError",
    "__version__",
    "bootstrap_bias_reduce",
    "catalog_names",
    "cdf",
    "digamma",
    "estimate_mu_closed",
    "estimate_mu_ml",
    "estimate_sigma",
    "estimating_equation_bias",
    "fit_family",
    "fit_full_ml",
    "fit_new_log_generalized_gamma",
    "inv_reg_lower_gamma",
    "inverse_of",
    "log_gamma",
    "log_likelihood",
    "log_pdf",
    "make_generator",
    "ml_equation_rhs",
    "moment_exists",
    "moment_power_law",
    "native_estimator",
    "paper_figure1_config",
    "parse_config_file",
    "parse_generator_spec",
    "population_mu_limit",
    "profile_mu",
    "profile_sigma",
    "quantile",
    "read_csv_rows",
    "reg_lower_gamma",
    "relative_bias",
    "rmse",
    "run_experiment",
    "sample",
    "sample_gamma",
    "score_vector",
    "smoke_config",
    "write_csv",
    "write_figure_svgs",
]

"""Kernel methods under convergence-in-probability metrics.

Bounded kernels and their Gram machinery, Ky Fan / integrated-psi metrics
over paired samples, representer-form RKHS functions, regularized ERM
solvers, and an empirical denseness lab showing smooth kernel models
approximating discontinuous targets in probability while the uniform gap
stays large.
"""

__version__ = "0.1.0"

from .denseness import (
    ConvergenceReport,
    IntervalIndicator,
    PiecewiseConstant,
    RiskCheckResult,
    SignStep,
    SineWave,
    StudyCell,
    StudyConfig,
    fit_approximant,
    make_target,
    risk_convergence_check,
    run_study,
    sup_gap_estimate,
    truncated_gaussian_sampler,
    uniform_sampler,
)
from .erm import (
    AbsoluteLoss,
    ClippedFunction,
    Dataset,
    FitConfig,
    FitInfo,
    PinballLoss,
    RankingSquaredLoss,
    SquaredLoss,
    clip,
    empirical_risk,
    fit_erm,
    fit_kernel_ridge,
    fit_pairwise,
)
from .kernels import (
    EmpiricalMeasure,
    GaussianRBF,
    MeasureGaussian,
    WendlandC2,
    eval_kernel,
    eval_measure_kernel,
    gram_matrix,
    measure_gram_matrix,
    mmd_clamp_count,
    mmd_squared,
    reset_mmd_clamp_count,
    sup_kernel_norm,
)
from .metrics import (
    CappedPsi,
    PairedSample,
    PsiValidationReport,
    RatioPsi,
    TabulatedPsi,
    apply_psi,
    ky_fan_metric,
    paired_sample,
    psi_metric,
    validate_psi,
)
from .rkhs import (
    QuadratureSpec,
    RkhsFunction,
    apply_integral_operator,
    eval_rkhs,
    injectivity_probe,
    kernel_lp_norm,
    lp_norm,
    rkhs_norm,
)
from .util import ConfigError, NumericalError, derive_rng

__all__ = [
    "__version__",
    "ConfigError",
    "NumericalError",
    "derive_rng",
    "GaussianRBF",
    "WendlandC2",
    "MeasureGaussian",
    "EmpiricalMeasure",
    "eval_kernel",
    "gram_matrix",
    "sup_kernel_norm",
    "mmd_squared",
    "eval_measure_kernel",
    "measure_gram_matrix",
    "mmd_clamp_count",
    "reset_mmd_clamp_count",
    "RatioPsi",
    "CappedPsi",
    "TabulatedPsi",
    "PairedSample",
    "PsiValidationReport",
    "apply_psi",
    "validate_psi",
    "psi_metric",
    "ky_fan_metric",
    "paired_sample",
    "RkhsFunction",
    "QuadratureSpec",
    "eval_rkhs",
    "rkhs_norm",
    "lp_norm",
    "kernel_lp_norm",
    "apply_integral_operator",
    "injectivity_probe",
    "Dataset",
    "SquaredLoss",
    "AbsoluteLoss",
    "PinballLoss",
    "RankingSquaredLoss",
    "FitConfig",
    "FitInfo",
    "fit_kernel_ridge",
    "fit_erm",
    "fit_pairwise",
    "clip",
    "ClippedFunction",
    "empirical_risk",
    "IntervalIndicator",
    "PiecewiseConstant",
    "SignStep",
    "SineWave",
    "make_target",
    "uniform_sampler",
    "truncated_gaussian_sampler",
    "StudyConfig",
    "StudyCell",
    "ConvergenceReport",
    "RiskCheckResult",
    "fit_approximant",
    "sup_gap_estimate",
    "run_study",
    "risk_convergence_check",
]

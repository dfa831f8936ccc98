"""Adaptive-LASSO expectile regression: sparse selection for possibly
asymmetric or heavy-tailed errors, in both the p < n and p >= n regimes.

Main entry points:

* :func:`expectsel.solvers.fit_unpenalized` / :func:`expectsel.solvers.fit_penalized`
  -- the raw expectile solvers.
* :func:`expectsel.adaptive.fit_adaptive` -- the two-stage adaptive procedure.
* :func:`expectsel.inference.confidence_intervals` -- post-selection Wald CIs.
* :func:`expectsel.simulate.run_cell` -- Monte Carlo experiment harness.
"""

from .core import (
    Dataset,
    ExpectileParams,
    FitResult,
    TrueModel,
    DiagnosticsReport,
    ErrorLaw,
    StdNormal,
    ShiftedExp,
    NormalPlusChiSq,
    EmpiricalSample,
    rho,
    g,
    h,
    solve_tau_for_law,
    estimate_tau_empirical,
    check_assumptions,
    ExpectileError,
    NonIntegrable,
    DegenerateResponse,
    DimensionMismatch,
    SingularDesign,
    InvalidWeight,
    RegimeMismatch,
    EmptyActiveSet,
    TooFewResiduals,
    SingularU,
)
from .solvers import (
    SolverConfig,
    PenalizedObjective,
    objective_value,
    fit_unpenalized,
    fit_penalized,
    fit_lasso_path,
    lambda_max,
)
from .adaptive import (
    AdaptiveConfig,
    AdaptiveFit,
    Regime,
    default_lambda,
    default_pilot_lambda,
    build_weights,
    fit_adaptive,
    check_tuning_conditions,
)
from .inference import (
    InferenceReport,
    compute_u_matrix,
    plugin_moments,
    confidence_intervals,
)
from .simulate import (
    SimSpec,
    SimSummary,
    generate_dataset,
    run_cell,
    run_gamma_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "ExpectileParams", "FitResult", "TrueModel", "DiagnosticsReport",
    "ErrorLaw", "StdNormal", "ShiftedExp", "NormalPlusChiSq", "EmpiricalSample",
    "rho", "g", "h", "solve_tau_for_law", "estimate_tau_empirical",
    "check_assumptions",
    "ExpectileError", "NonIntegrable", "DegenerateResponse", "DimensionMismatch",
    "SingularDesign", "InvalidWeight", "RegimeMismatch", "EmptyActiveSet",
    "TooFewResiduals", "SingularU",
    "SolverConfig", "PenalizedObjective", "objective_value",
    "fit_unpenalized", "fit_penalized", "fit_lasso_path", "lambda_max",
    "AdaptiveConfig", "AdaptiveFit", "Regime", "default_lambda",
    "default_pilot_lambda", "build_weights", "fit_adaptive", "check_tuning_conditions",
    "InferenceReport", "compute_u_matrix", "plugin_moments",
    "confidence_intervals",
    "SimSpec", "SimSummary", "generate_dataset", "run_cell", "run_gamma_sweep",
]

"""Post-selection asymptotic inference for the selected coefficients.

The normal limit of the active block has variance Var[g_tau(eps)] /
E^2[h_tau(eps)] in the metric of the active-column Gram matrix.  Both
moments are estimated by plugging in residuals from an unpenalized refit
restricted to the selected columns, so that penalization bias does not
contaminate the variance estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .adaptive import AdaptiveFit
from .core import (
    Dataset,
    EmptyActiveSet,
    SingularDesign,
    TooFewResiduals,
    g,
    h,
)
from .solvers import SolverConfig, fit_unpenalized


@dataclass(frozen=True)
class InferenceReport:
    active_set: np.ndarray
    u_matrix: np.ndarray
    var_g: float
    mean_h: float
    std_errors: np.ndarray
    intervals: np.ndarray          # shape (|active|, 2)
    alpha: float
    degenerate: bool
    notes: tuple[str, ...] = ()


def compute_u_matrix(data: Dataset, active) -> np.ndarray:
    """Gram matrix of the active columns, scaled by 1/n."""
    active = np.asarray(active, dtype=np.int64).ravel()
    if active.size == 0:
        raise EmptyActiveSet("active set is empty")
    if np.any(active < 0) or np.any(active >= data.p):
        raise IndexError("active index out of range")
    xa = data.x[:, active]
    return xa.T @ xa / data.n


def plugin_moments(residuals, tau: float) -> tuple[float, float]:
    """Sample variance of g_tau(r) and sample mean of h_tau(r)."""
    r = np.asarray(residuals, dtype=float).ravel()
    if r.size < 2:
        raise TooFewResiduals("need at least two residuals")
    var_g = float(np.var(g(tau, r)))
    mean_h = float(np.mean(h(tau, r)))
    return var_g, mean_h


def confidence_intervals(fit: AdaptiveFit, data: Dataset, alpha: float = 0.05,
                         solver_cfg: SolverConfig = SolverConfig()) -> InferenceReport:
    """Wald intervals for the selected coefficients of an adaptive fit.

    For each selected j:  se_j = n**-0.5 * sqrt((U^-1)_jj) * sqrt(var_g) / mean_h
    and the interval is beta_j +/- z_{1-alpha/2} * se_j.  Degenerate inputs
    (zero variance, singular Gram block) yield a flagged report rather than
    an error.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    active = fit.final.active_set
    if active.size == 0:
        raise EmptyActiveSet("no selected coefficients")
    u = compute_u_matrix(data, active)
    notes = []
    degenerate = False

    # bias-removing refit on the selected columns; collinear selections
    # fall back to the penalized residuals and flag the report
    sub = Dataset(x=data.x[:, active], y=data.y)
    try:
        refit = fit_unpenalized(sub, fit.tau_used, solver_cfg)
        residuals = sub.y - sub.x @ refit.beta
    except SingularDesign:
        degenerate = True
        notes.append("selected columns are collinear: refit skipped")
        residuals = data.y - data.x @ fit.final.beta
    var_g, mean_h = plugin_moments(residuals, fit.tau_used)
    # an exact interpolating refit leaves only rounding noise in the
    # residuals; treat that as zero variance
    tiny = (100.0 * np.finfo(float).eps
            * max(1.0, float(np.std(data.y)))) ** 2
    if var_g <= tiny:
        var_g = 0.0
        degenerate = True
        notes.append("var_g is zero: intervals degenerate to points")

    try:
        u_inv = np.linalg.inv(u)
    except np.linalg.LinAlgError:
        degenerate = True
        notes.append("active-column Gram matrix is singular")
        u_inv = np.linalg.pinv(u)
    diag = np.clip(np.diag(u_inv), 0.0, None)
    z = float(ndtri(1.0 - alpha / 2.0))
    se = np.sqrt(diag) * np.sqrt(var_g) / mean_h / np.sqrt(data.n)
    point = fit.final.beta[active]
    intervals = np.column_stack([point - z * se, point + z * se])
    return InferenceReport(active_set=active, u_matrix=u, var_g=var_g,
                           mean_h=mean_h, std_errors=se, intervals=intervals,
                           alpha=alpha, degenerate=degenerate,
                           notes=tuple(notes))

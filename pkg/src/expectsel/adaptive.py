"""Two-stage adaptive-LASSO expectile procedure.

Stage 1 builds a pilot estimate: the unpenalized expectile fit when p < n,
or a plain LASSO-expectile fit at the universal rate sqrt(log(p)/n) when
p >= n (an information-criterion pick over a user grid is also supported).
Stage 2 turns the pilot into per-coefficient penalty weights
|pilot_j|**(-gamma) (capped at sqrt(n) in the high-dimensional regime) and
solves the weighted problem at the requested penalty level, defaulting to
n**(-2/5).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, ExpectileParams, FitResult, RegimeMismatch, rho
from .solvers import (
    SolverConfig,
    fit_lasso_path,
    fit_penalized,
    fit_unpenalized,
)


class Regime(enum.Enum):
    AUTO = "auto"
    LOW_DIM = "lowdim"
    HIGH_DIM = "highdim"


@dataclass(frozen=True)
class AdaptiveConfig:
    gamma: float = 1.0
    lam: float | None = None
    regime: Regime = Regime.AUTO
    pilot_lambda_grid: np.ndarray | None = None

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.lam is not None and self.lam <= 0.0:
            raise ValueError("lambda must be positive when given")
        if self.pilot_lambda_grid is not None:
            grid = np.asarray(self.pilot_lambda_grid, dtype=float).ravel()
            if np.any(np.diff(grid) >= 0.0):
                raise ValueError("pilot grid must be strictly descending")
            object.__setattr__(self, "pilot_lambda_grid", grid)


@dataclass(frozen=True)
class AdaptiveFit:
    pilot_beta: np.ndarray
    weights: np.ndarray
    final: FitResult
    regime_used: Regime
    lambda_used: float
    tau_used: float
    pilot_lambda: float | None = None


def default_lambda(n: int) -> float:
    """Default penalty level n**(-2/5)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(n) ** (-0.4)


def default_pilot_lambda(n: int, p: int) -> float:
    """Default pilot penalty sqrt(log(p)/n), the universal LASSO rate."""
    if n < 1 or p < 2:
        raise ValueError("need n >= 1 and p >= 2")
    return math.sqrt(math.log(p) / n)


def build_weights(pilot, gamma: float, regime: Regime, n: int) -> np.ndarray:
    """Adaptive penalty weights from a pilot estimate.

    Low-dimensional: |pilot_j|**(-gamma), with an exact pilot zero mapping
    to +inf (the coefficient is pinned).  High-dimensional: the same value
    capped at sqrt(n), with pilot zeros mapping to the cap.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    pilot = np.asarray(pilot, dtype=float).ravel()
    with np.errstate(divide="ignore", over="ignore"):
        w = np.abs(pilot) ** (-gamma)
    if regime is Regime.HIGH_DIM:
        cap = np.sqrt(n)
        w = np.minimum(w, cap)
        w[pilot == 0.0] = cap
    return w


def fit_adaptive(data: Dataset, tau: float, cfg: AdaptiveConfig = AdaptiveConfig(),
                 solver_cfg: SolverConfig = SolverConfig()) -> AdaptiveFit:
    """Run the full two-stage adaptive procedure."""
    regime = cfg.regime
    if regime is Regime.AUTO:
        regime = Regime.LOW_DIM if data.p < data.n else Regime.HIGH_DIM
    elif regime is Regime.LOW_DIM and data.p >= data.n:
        raise RegimeMismatch(f"low-dim regime forced with p={data.p} >= n={data.n}")

    pilot_lam = None
    if regime is Regime.LOW_DIM:
        pilot = fit_unpenalized(data, tau, solver_cfg).beta
    else:
        pilot, pilot_lam = _highdim_pilot(data, tau, cfg, solver_cfg)

    weights = build_weights(pilot, cfg.gamma, regime, data.n)
    lam = cfg.lam if cfg.lam is not None else default_lambda(data.n)
    params = ExpectileParams(tau=tau, lam=lam, gamma=cfg.gamma, weights=weights)
    final = fit_penalized(data, params, solver_cfg)
    return AdaptiveFit(pilot_beta=pilot, weights=weights, final=final,
                       regime_used=regime, lambda_used=lam, tau_used=tau,
                       pilot_lambda=pilot_lam)


def _highdim_pilot(data, tau, cfg, solver_cfg):
    """LASSO-expectile pilot.

    Default: a single fit at the universal rate sqrt(log(p)/n).  When a
    grid is supplied, the penalty is picked by a high-dimensional BIC over
    its entries; near-interpolating fits (active size >= n/2) are skipped
    there because the log-likelihood term degenerates past them.
    """
    if cfg.pilot_lambda_grid is None:
        lam = default_pilot_lambda(data.n, data.p)
        res = fit_lasso_path(data, tau, np.array([lam]), solver_cfg)[0]
        return res.beta, lam
    grid = cfg.pilot_lambda_grid
    path = fit_lasso_path(data, tau, grid, solver_cfg)
    n, p = data.n, data.p
    complexity = np.log(n) * np.log(np.log(p)) if p > np.e else np.log(n)
    best, best_lam, best_score = path[0], float(grid[0]), np.inf
    for lam, res in zip(grid, path):
        if res.active_set.size >= n // 2:
            continue
        r = data.y - data.x @ res.beta
        avg_loss = max(float(np.mean(rho(tau, r))), 1e-300)
        score = n * np.log(avg_loss) + res.active_set.size * complexity
        if score < best_score:
            best, best_lam, best_score = res, float(lam), score
    return best.beta, best_lam


@dataclass(frozen=True)
class ConditionReport:
    c: float
    shrink_surrogate: float      # lam * sqrt(p0) * n**((1-c)/2); should be small
    grow_surrogate: float        # lam * n**((1-c)(1+gamma)/2); should be large
    gamma_condition_ok: bool     # gamma > c / (1 - c), meaningful when c < 1
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.warnings


def check_tuning_conditions(n: int, p: int, p0_estimate: int, gamma: float,
                            lam: float) -> ConditionReport:
    """Finite-sample surrogates of the asymptotic tuning requirements.

    Uses c = log(p)/log(n) as the growth-exponent proxy.  Advisory only.
    """
    warnings = []
    c = np.log(p) / np.log(n) if n > 1 else np.inf
    if lam <= 0.0:
        warnings.append("lambda is zero: penalty vanishes, sparsity untestable")
        return ConditionReport(c=float(c), shrink_surrogate=0.0,
                               grow_surrogate=0.0, gamma_condition_ok=False,
                               warnings=tuple(warnings))
    shrink = lam * np.sqrt(max(p0_estimate, 1)) * n ** ((1.0 - c) / 2.0)
    grow = lam * n ** ((1.0 - c) * (1.0 + gamma) / 2.0)
    gamma_ok = c < 1.0 and gamma > c / (1.0 - c)
    if shrink > 10.0:
        warnings.append(
            f"shrink surrogate {shrink:.3g} > 10: lambda may be too large")
    if grow < 1.0:
        warnings.append(
            f"growth surrogate {grow:.3g} < 1: lambda or gamma may be too small")
    if c < 1.0 and not gamma_ok:
        warnings.append(
            f"gamma={gamma} does not exceed c/(1-c)={c / (1.0 - c):.3g}")
    return ConditionReport(c=float(c), shrink_surrogate=float(shrink),
                           grow_surrogate=float(grow),
                           gamma_condition_ok=bool(gamma_ok),
                           warnings=tuple(warnings))

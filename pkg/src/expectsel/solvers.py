"""Numerical minimizers for the expectile objective, unpenalized and with a
weighted L1 penalty.

The internal objective is normalized per observation:

    F(beta) = (1/n) sum_i rho_tau(y_i - x_i' beta) + lam * sum_j w_j |beta_j|

The unpenalized problem is solved by iteratively reweighted least squares
(IRLS); the penalized one by cyclic coordinate descent with a per-coordinate
quadratic majorization of the smooth part (curvature bound
2*max(tau, 1-tau)/n * sum_i x_ij**2, valid since h_tau never exceeds
2*max(tau, 1-tau)).  Both solvers are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    Dataset,
    DimensionMismatch,
    ExpectileParams,
    FitResult,
    InvalidWeight,
    SingularDesign,
    g,
    rho,
)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 100_000
    kkt_tolerance: float = 1e-7
    objective_tolerance: float = 1e-10
    initial_beta: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.kkt_tolerance <= 0.0 or self.objective_tolerance <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class PenalizedObjective:
    dataset: Dataset
    params: ExpectileParams

    def __post_init__(self):
        if self.params.weights.shape[0] != self.dataset.p:
            raise DimensionMismatch("weights length must equal p")


def objective_value(obj: PenalizedObjective, beta) -> float:
    """Per-observation penalized objective at ``beta``."""
    beta = np.asarray(beta, dtype=float).ravel()
    data, params = obj.dataset, obj.params
    if beta.shape[0] != data.p:
        raise DimensionMismatch(f"beta has length {beta.shape[0]}, expected {data.p}")
    r = data.y - data.x @ beta
    loss = float(np.mean(rho(params.tau, r)))
    if params.lam == 0.0:
        return loss
    # 0 * inf: a pinned coefficient at exactly zero contributes nothing
    with np.errstate(invalid="ignore"):
        pen = params.weights * np.abs(beta)
    pen = np.where(np.abs(beta) == 0.0, 0.0, pen)
    return loss + params.lam * float(np.sum(pen))


# ---------------------------------------------------------------------------
# unpenalized: IRLS

def fit_unpenalized(data: Dataset, tau: float, cfg: SolverConfig = SolverConfig()) -> FitResult:
    """Minimize the smooth expectile objective by IRLS.

    Each step solves the weighted normal equations with observation weight
    tau on nonnegative residuals and 1 - tau on negative ones; the fixed
    point of the weight pattern is the exact minimizer.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    x, y, n = data.x, data.y, data.n
    if cfg.initial_beta is not None:
        beta = np.asarray(cfg.initial_beta, dtype=float).ravel().copy()
        if beta.shape[0] != data.p:
            raise DimensionMismatch("initial_beta length must equal p")
    else:
        beta = _weighted_ls(x, y, np.full(n, 0.5))
    prev_obj = float(np.mean(rho(tau, y - x @ beta)))
    it = 0
    converged = False
    prev_w = None
    for it in range(1, cfg.max_iterations + 1):
        r = y - x @ beta
        w = np.where(r >= 0.0, tau, 1.0 - tau)
        if prev_w is not None and np.array_equal(w, prev_w):
            converged = True
            break
        beta = _weighted_ls(x, y, w)
        obj = float(np.mean(rho(tau, y - x @ beta)))
        if prev_obj - obj < cfg.objective_tolerance:
            converged = True
            break
        prev_obj = obj
        prev_w = w
    r = y - x @ beta
    grad = x.T @ g(tau, r) / n
    kkt = float(np.max(np.abs(grad)))
    obj = float(np.mean(rho(tau, r)))
    if kkt > cfg.kkt_tolerance:
        converged = False
    return FitResult(beta=beta, active_set=None, objective=obj,
                     kkt_residual=kkt, iterations=it, converged=converged)


def _weighted_ls(x, y, w):
    xw = x * w[:, None]
    a = x.T @ xw
    b = xw.T @ y
    try:
        beta = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularDesign("weighted normal matrix is singular") from exc
    if not np.all(np.isfinite(beta)):
        raise SingularDesign("weighted normal matrix is numerically singular")
    return beta


# ---------------------------------------------------------------------------
# penalized: majorized cyclic coordinate descent

@njit(cache=True)
def _cd_engine(x, y, tau, lam, w, beta, max_sweeps, kkt_tol):  # pragma: no cover
    n, p = x.shape
    tmax = max(tau, 1.0 - tau)
    col_sq = np.empty(p)
    for j in range(p):
        s = 0.0
        for i in range(n):
            s += x[i, j] * x[i, j]
        col_sq[j] = s
    maj = 2.0 * tmax * col_sq / n

    r = y.copy()
    for j in range(p):
        if beta[j] != 0.0:
            for i in range(n):
                r[i] -= x[i, j] * beta[j]

    # pinned coordinates: infinite weight or a null column
    for j in range(p):
        if (not np.isfinite(w[j]) or maj[j] == 0.0) and beta[j] != 0.0:
            for i in range(n):
                r[i] += x[i, j] * beta[j]
            beta[j] = 0.0

    kkt = np.inf
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        for j in range(p):
            if not np.isfinite(w[j]) or maj[j] == 0.0:
                continue
            grad = 0.0
            for i in range(n):
                ri = r[i]
                gi = 2.0 * tau * ri if ri >= 0.0 else 2.0 * (1.0 - tau) * ri
                grad += gi * x[i, j]
            grad /= n
            z = beta[j] + grad / maj[j]
            thr = lam * w[j] / maj[j]
            if z > thr:
                new = z - thr
            elif z < -thr:
                new = z + thr
            else:
                new = 0.0
            if new != beta[j]:
                delta = new - beta[j]
                for i in range(n):
                    r[i] -= x[i, j] * delta
                beta[j] = new

        # KKT certificate over all coordinates
        kkt = 0.0
        for j in range(p):
            grad = 0.0
            for i in range(n):
                ri = r[i]
                gi = 2.0 * tau * ri if ri >= 0.0 else 2.0 * (1.0 - tau) * ri
                grad += gi * x[i, j]
            grad /= n
            if beta[j] != 0.0:
                sgn = 1.0 if beta[j] > 0.0 else -1.0
                v = abs(grad - lam * w[j] * sgn)
            else:
                if not np.isfinite(w[j]):
                    v = 0.0
                elif maj[j] == 0.0:
                    v = 0.0
                else:
                    v = abs(grad) - lam * w[j]
                    if v < 0.0:
                        v = 0.0
            if v > kkt:
                kkt = v
        if kkt <= kkt_tol:
            return beta, sweeps, kkt, True
    return beta, sweeps, kkt, False


def fit_penalized(data: Dataset, params: ExpectileParams,
                  cfg: SolverConfig = SolverConfig()) -> FitResult:
    """Minimize the weighted-L1-penalized expectile objective.

    Coordinates with infinite weight are pinned to zero exactly.  On
    convergence the KKT residual (max subgradient-condition violation)
    is at most ``cfg.kkt_tolerance``.
    """
    if params.weights.shape[0] != data.p:
        raise DimensionMismatch("weights length must equal p")
    if cfg.initial_beta is not None:
        beta0 = np.asarray(cfg.initial_beta, dtype=float).ravel().copy()
        if beta0.shape[0] != data.p:
            raise DimensionMismatch("initial_beta length must equal p")
    else:
        beta0 = np.zeros(data.p)
    beta, sweeps, kkt, converged = _cd_engine(
        np.ascontiguousarray(data.x), np.ascontiguousarray(data.y),
        params.tau, params.lam, params.weights, beta0,
        cfg.max_iterations, cfg.kkt_tolerance)
    obj = objective_value(PenalizedObjective(data, params), beta)
    return FitResult(beta=beta, active_set=None, objective=obj,
                     kkt_residual=float(kkt), iterations=int(sweeps),
                     converged=bool(converged))


def kkt_residual(data: Dataset, params: ExpectileParams, beta) -> float:
    """Recompute the solver's KKT certificate independently."""
    beta = np.asarray(beta, dtype=float).ravel()
    grad = data.x.T @ g(params.tau, data.y - data.x @ beta) / data.n
    w = params.weights
    res = 0.0
    col_sq = np.sum(data.x ** 2, axis=0)
    for j in range(data.p):
        if not np.isfinite(w[j]) or col_sq[j] == 0.0:
            continue
        if beta[j] != 0.0:
            v = abs(grad[j] - params.lam * w[j] * np.sign(beta[j]))
        else:
            v = max(0.0, abs(grad[j]) - params.lam * w[j])
        res = max(res, v)
    return float(res)


def lambda_max(data: Dataset, tau: float, weights=None) -> float:
    """Smallest penalty level at which the all-zero vector is optimal."""
    grad = np.abs(data.x.T @ g(tau, data.y)) / data.n
    if weights is None:
        return float(np.max(grad))
    w = np.asarray(weights, dtype=float).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(w > 0.0, grad / w, np.inf)
        ratio = np.where(np.isfinite(w), ratio, 0.0)
    finite = ratio[np.isfinite(ratio)]
    if finite.size == 0:
        raise InvalidWeight("no coordinate with a positive finite weight")
    return float(np.max(finite))


def fit_lasso_path(data: Dataset, tau: float, lambdas,
                   cfg: SolverConfig = SolverConfig()) -> list[FitResult]:
    """Warm-started plain-LASSO (unit weight) path over a descending grid."""
    lambdas = np.asarray(lambdas, dtype=float).ravel()
    if lambdas.size == 0 or np.any(np.diff(lambdas) >= 0.0) or np.any(lambdas <= 0.0):
        raise ValueError("lambdas must be strictly descending and positive")
    ones = np.ones(data.p)
    results = []
    beta = np.zeros(data.p)
    for lam in lambdas:
        params = ExpectileParams(tau=tau, lam=float(lam), gamma=1.0, weights=ones)
        res = fit_penalized(data, params, SolverConfig(
            max_iterations=cfg.max_iterations,
            kkt_tolerance=cfg.kkt_tolerance,
            objective_tolerance=cfg.objective_tolerance,
            initial_beta=beta))
        beta = res.beta.copy()
        results.append(res)
    return results

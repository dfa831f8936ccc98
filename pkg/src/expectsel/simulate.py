"""Monte Carlo harness: data-generating processes, replication engine and
sparsity/accuracy metric aggregation.

Replication randomness is counter-based: each replication draws from a
Philox generator keyed by (seed, replication_index), so results do not
depend on execution order and parallel runs are bit-reproducible.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adaptive import AdaptiveConfig, AdaptiveFit, Regime, fit_adaptive
from .core import (
    Dataset,
    ErrorLaw,
    ExpectileError,
    NonIntegrable,
    TrueModel,
    estimate_tau_empirical,
    solve_tau_for_law,
)
from .solvers import SolverConfig


class AllReplicationsFailed(ExpectileError):
    pass


@dataclass(frozen=True)
class SimSpec:
    """One Monte Carlo experiment cell.

    ``tau`` is the index the fits are run at.  When None (the default) each
    replication estimates it empirically from its own response, mirroring
    the practical workflow; a fixed value (e.g. the law's zero-expectile
    index) can be forced instead.
    """

    n: int
    p: int
    true_model: TrueModel
    error_law: ErrorLaw
    gamma: float = 1.0
    lam: float | None = None
    tau: float | None = None
    replications: int = 100
    seed: int = 0
    regime: Regime = Regime.AUTO

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.true_model.beta0.shape[0] != self.p:
            raise ValueError("true_model dimension must equal p")

    # ------ canonical experiment designs ------

    @staticmethod
    def fixed_support(n: int, p: int, error_law: ErrorLaw, gamma: float = 1.0,
                      replications: int = 100, seed: int = 0,
                      lam: float | None = None) -> "SimSpec":
        """p0 = 6 with coefficients (1, 4, -3, 5, 6, -1)."""
        beta0 = np.zeros(p)
        beta0[:6] = [1.0, 4.0, -3.0, 5.0, 6.0, -1.0]
        return SimSpec(n=n, p=p, true_model=TrueModel(beta0),
                       error_law=error_law, gamma=gamma, lam=lam,
                       replications=replications, seed=seed)

    @staticmethod
    def growing_sqrt(n: int, error_law: ErrorLaw, gamma: float = 1.0,
                     replications: int = 100, seed: int = 0) -> "SimSpec":
        """p = 4n, p0 = 2*floor(sqrt(n)), active coefficients (1, ..., p0)."""
        p = 4 * n
        p0 = 2 * int(math.isqrt(n))
        beta0 = np.zeros(p)
        beta0[:p0] = np.arange(1, p0 + 1, dtype=float)
        return SimSpec(n=n, p=p, true_model=TrueModel(beta0),
                       error_law=error_law, gamma=gamma,
                       replications=replications, seed=seed)

    @staticmethod
    def growing_quartic(n: int, error_law: ErrorLaw, gamma: float = 1.0,
                        all_ones: bool = False, replications: int = 100,
                        seed: int = 0) -> "SimSpec":
        """p = floor(n log n), p0 = 2*floor(n**(1/4))."""
        p = int(n * math.log(n))
        p0 = 2 * int(n ** 0.25)
        beta0 = np.zeros(p)
        beta0[:p0] = 1.0 if all_ones else np.arange(1, p0 + 1, dtype=float)
        return SimSpec(n=n, p=p, true_model=TrueModel(beta0),
                       error_law=error_law, gamma=gamma,
                       replications=replications, seed=seed)


@dataclass(frozen=True)
class SimSummary:
    mean_true_nonzero: float
    mean_false_nonzero: float
    pct_true_nonzero: float
    pct_false_nonzero: float
    mae_all: float
    mae_active: float
    replications_done: int
    failures: int
    per_replication: tuple = field(default=(), repr=False)

    CSV_FIELDS = ("mean_true_nonzero", "mean_false_nonzero",
                  "pct_true_nonzero", "pct_false_nonzero",
                  "mae_all", "mae_active", "replications_done", "failures")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def generate_dataset(spec: SimSpec, replication_index: int):
    """Draw one replication's (Dataset, TrueModel, tau_star).

    X entries are iid standard normal; errors come from the spec's law; the
    expectile index is the one at which the law's expectile is zero (None
    when the law has no mass on one side of zero).
    """
    rng = np.random.Generator(
        np.random.Philox(key=[spec.seed & 0xFFFFFFFFFFFFFFFF,
                              replication_index & 0xFFFFFFFFFFFFFFFF]))
    x = rng.standard_normal((spec.n, spec.p))
    eps = spec.error_law.sample(rng, spec.n)
    y = x @ spec.true_model.beta0 + eps
    try:
        tau_star = solve_tau_for_law(spec.error_law)
    except NonIntegrable:
        tau_star = None  # degenerate law: no zero-crossing index
    return Dataset(x=x, y=y), spec.true_model, tau_star


@dataclass(frozen=True)
class ReplicationRecord:
    index: int
    n_true_nonzero: int
    n_false_nonzero: int
    abs_err_sum_all: float
    abs_err_sum_active: float


def _run_one(spec: SimSpec, index: int, solver_cfg: SolverConfig) -> ReplicationRecord:
    raw, truth, _ = generate_dataset(spec, index)
    # The harness centers the response and the design columns: the model
    # carries no intercept, so mean removal plays that role.  Without it,
    # error laws with nonzero mean and the finite-sample column means of
    # the design both leak a constant offset into the slope estimates.
    data = Dataset(x=raw.x - raw.x.mean(axis=0), y=raw.y - float(np.mean(raw.y)))
    tau = spec.tau if spec.tau is not None else estimate_tau_empirical(data.y)
    cfg = AdaptiveConfig(gamma=spec.gamma, lam=spec.lam, regime=spec.regime)
    fit = fit_adaptive(data, tau, cfg, solver_cfg)
    return score_fit(fit, truth, index)


def score_fit(fit: AdaptiveFit, truth: TrueModel, index: int = 0) -> ReplicationRecord:
    selected = set(fit.final.active_set.tolist())
    support = set(truth.support.tolist())
    err = np.abs(fit.final.beta - truth.beta0)
    return ReplicationRecord(
        index=index,
        n_true_nonzero=len(selected & support),
        n_false_nonzero=len(selected - support),
        abs_err_sum_all=float(err.sum()),
        abs_err_sum_active=float(err[truth.support].sum()))


def run_cell(spec: SimSpec, solver_cfg: SolverConfig = SolverConfig(),
             keep_records: bool = False) -> SimSummary:
    """Run all replications of one experiment cell and aggregate metrics.

    Per-replication solver failures are counted and excluded from the
    averages.  Set EXPECTILE_THREADS > 1 to run replications in threads;
    aggregation order is fixed by replication index either way.
    """
    threads = int(os.environ.get("EXPECTILE_THREADS", "1") or "1")
    indices = range(spec.replications)
    records: list[ReplicationRecord | None] = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_try_one, spec, i, solver_cfg) for i in indices]
            records = [f.result() for f in futures]
    else:
        records = [_try_one(spec, i, solver_cfg) for i in indices]
    done = [r for r in records if r is not None]
    failures = len(records) - len(done)
    if not done:
        raise AllReplicationsFailed(
            f"all {spec.replications} replications failed")
    m = len(done)
    p0 = spec.true_model.p0
    mean_true = sum(r.n_true_nonzero for r in done) / m
    mean_false = sum(r.n_false_nonzero for r in done) / m
    mae_all = sum(r.abs_err_sum_all for r in done) / (m * spec.p)
    mae_active = (sum(r.abs_err_sum_active for r in done) / (m * p0)
                  if p0 else 0.0)
    return SimSummary(
        mean_true_nonzero=mean_true,
        mean_false_nonzero=mean_false,
        pct_true_nonzero=100.0 * mean_true / p0 if p0 else 0.0,
        pct_false_nonzero=100.0 * mean_false / (spec.n - p0),
        mae_all=mae_all,
        mae_active=mae_active,
        replications_done=m,
        failures=failures,
        per_replication=tuple(done) if keep_records else ())


def _try_one(spec, index, solver_cfg):
    try:
        return _run_one(spec, index, solver_cfg)
    except ExpectileError:
        return None


def run_gamma_sweep(base: SimSpec, gammas,
                    solver_cfg: SolverConfig = SolverConfig()) -> list[tuple[float, SimSummary]]:
    """One run_cell per gamma, sharing the base spec's seed."""
    gammas = list(gammas)
    if not gammas:
        raise ValueError("gammas must be nonempty")
    out = []
    for gamma in gammas:
        spec = SimSpec(n=base.n, p=base.p, true_model=base.true_model,
                       error_law=base.error_law, gamma=float(gamma),
                       lam=base.lam, tau=base.tau,
                       replications=base.replications,
                       seed=base.seed, regime=base.regime)
        out.append((float(gamma), run_cell(spec, solver_cfg)))
    return out


# ---------------------------------------------------------------------------
# serialization

def summary_rows_to_csv(path, rows: list[dict]):
    """Write summary dict rows with a stable header; atomic replace."""
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0].keys())
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
    os.replace(tmp, path)


def summary_rows_to_json(path, rows: list[dict]):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)          # 17 significant digits, round-trips exactly
    return v

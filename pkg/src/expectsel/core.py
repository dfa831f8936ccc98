"""Expectile loss family, error laws, expectile-index estimation and
design diagnostics.

The asymmetric square loss with index ``tau`` is

    rho_tau(x) = tau * x**2        if x >= 0
               = (1 - tau) * x**2  if x < 0

with first derivative ``g`` and (a.e.) second derivative ``h``.  The tie
``x == 0`` takes the nonnegative branch throughout.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, stats


# ---------------------------------------------------------------------------
# errors

class ExpectileError(Exception):
    """Base class for all errors raised by this package."""


class NonIntegrable(ExpectileError):
    """Partial means of an error law failed to converge numerically."""


class DegenerateResponse(ExpectileError):
    """Response vector has zero empirical standard deviation."""


class DimensionMismatch(ExpectileError):
    """Vector or matrix shapes do not agree."""


class SingularDesign(ExpectileError):
    """A (weighted) normal-equation matrix is numerically singular."""


class InvalidWeight(ExpectileError):
    """Negative adaptive penalty weight."""


class RegimeMismatch(ExpectileError):
    """Low-dimensional regime forced while p >= n."""


class EmptyActiveSet(ExpectileError):
    """No selected coefficients to do inference on."""


class TooFewResiduals(ExpectileError):
    """Need at least two residuals for plug-in moments."""


class SingularU(ExpectileError):
    """Active-set Gram matrix is not invertible."""


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class Dataset:
    """Design matrix (n x p) and response vector (length n)."""

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if x.ndim != 2:
            raise DimensionMismatch("design matrix must be 2-dimensional")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionMismatch("need n >= 1 and p >= 1")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("non-finite entries in dataset")
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != x.shape[1]:
                raise DimensionMismatch("feature_names length must equal p")
            object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class ExpectileParams:
    """Loss index, penalty level and adaptive weights for a penalized fit.

    A weight of ``+inf`` pins the corresponding coefficient to zero.
    """

    tau: float
    lam: float
    gamma: float
    weights: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.lam < 0.0:
            raise ValueError("lambda must be nonnegative")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        w = np.asarray(self.weights, dtype=float).ravel()
        if np.any(w < 0.0) or np.any(np.isnan(w)):
            raise InvalidWeight("weights must be nonnegative")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class FitResult:
    beta: np.ndarray
    active_set: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).ravel()
        object.__setattr__(self, "beta", beta)
        object.__setattr__(
            self, "active_set", np.flatnonzero(beta).astype(np.int64))


@dataclass(frozen=True)
class TrueModel:
    """Ground-truth coefficient vector and its support."""

    beta0: np.ndarray
    support: np.ndarray = field(init=False)
    p0: int = field(init=False)

    def __post_init__(self):
        beta0 = np.asarray(self.beta0, dtype=float).ravel()
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "support", np.flatnonzero(beta0))
        object.__setattr__(self, "p0", int(np.count_nonzero(beta0)))


@dataclass(frozen=True)
class DiagnosticsReport:
    """Advisory design diagnostics; violations warn, never abort."""

    n: int
    p: int
    mu_min: float | None
    mu_max: float | None
    max_row_inf_norm: float
    near_singular: bool
    notes: tuple[str, ...]


# ---------------------------------------------------------------------------
# loss family

def rho(tau, x):
    """Asymmetric square loss; vectorized in ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0.0, tau, 1.0 - tau) * x * x
    return out if out.ndim else float(out)


def g(tau, x):
    """First derivative of :func:`rho` with respect to ``x``."""
    x = np.asarray(x, dtype=float)
    out = 2.0 * np.where(x >= 0.0, tau, 1.0 - tau) * x
    return out if out.ndim else float(out)


def h(tau, x):
    """Second derivative of :func:`rho`; piecewise constant in ``x``."""
    x = np.asarray(x, dtype=float)
    out = 2.0 * np.where(x >= 0.0, tau, 1.0 - tau)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# error laws

class ErrorLaw:
    """A centered-or-not error distribution with finite first moment.

    Subclasses provide sampling and the partial means E[eps 1{eps<0}] and
    E[eps] needed to pin the expectile index.
    """

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def partial_negative_mean(self) -> float:
        """E[eps * 1{eps < 0}], by quadrature unless closed-form."""
        raise NotImplementedError


@dataclass(frozen=True)
class StdNormal(ErrorLaw):
    def sample(self, rng, size):
        return rng.standard_normal(size)

    def mean(self):
        return 0.0

    def partial_negative_mean(self):
        # E[Z 1{Z<0}] = -phi(0)
        return -1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class ShiftedExp(ErrorLaw):
    """eps = E + shift with E ~ Exp(1); density exp(-(x - shift)) on x > shift."""

    shift: float = -2.5

    def sample(self, rng, size):
        # inverse CDF so the draw consumes exactly one uniform per variate
        u = rng.random(size)
        return -np.log1p(-u) + self.shift

    def mean(self):
        return 1.0 + self.shift

    def partial_negative_mean(self):
        if self.shift >= 0.0:
            return 0.0
        val, err = integrate.quad(
            lambda x: x * np.exp(-(x - self.shift)), self.shift, 0.0)
        _check_quad(val, err)
        return val


@dataclass(frozen=True)
class NormalPlusChiSq(ErrorLaw):
    """Sum of independent N(0, sigma2) and chi-square(df) variables."""

    sigma2: float = 4e-2
    df: int = 1

    def sample(self, rng, size):
        z = np.sqrt(self.sigma2) * rng.standard_normal(size)
        # chi-square(df) as a sum of squared standard normals
        w = np.sum(rng.standard_normal((self.df, size)) ** 2, axis=0)
        return z + w

    def mean(self):
        return float(self.df)

    def partial_negative_mean(self):
        sig = np.sqrt(self.sigma2)

        def inner(w):
            # E[(Z + w) 1{Z + w < 0}] for Z ~ N(0, sig^2), closed form
            return -sig * stats.norm.pdf(w / sig) + w * stats.norm.cdf(-w / sig)

        val, err = integrate.quad(
            lambda w: stats.chi2.pdf(w, self.df) * inner(w),
            0.0, np.inf, limit=200)
        _check_quad(val, err)
        return val


@dataclass(frozen=True)
class EmpiricalSample(ErrorLaw):
    """Law given by an observed sample; resampled with replacement."""

    values: tuple[float, ...]

    def sample(self, rng, size):
        arr = np.asarray(self.values, dtype=float)
        return arr[rng.integers(0, arr.size, size)]

    def mean(self):
        return float(np.mean(self.values))

    def partial_negative_mean(self):
        arr = np.asarray(self.values, dtype=float)
        return float(np.mean(arr * (arr < 0.0)))


def _check_quad(val, err):
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)) + 1e-8:
        raise NonIntegrable(
            f"partial-mean quadrature did not converge (err={err:.2e})")


@lru_cache(maxsize=None)
def solve_tau_for_law(law: ErrorLaw) -> float:
    """Index tau at which the law's tau-expectile is zero.

    Solves E[eps(tau 1{eps>0} + (1-tau) 1{eps<0})] = 0, i.e.
    tau = E[eps 1{eps<0}] / (E[eps 1{eps<0}] - E[eps 1{eps>0}]).
    """
    m_neg = law.partial_negative_mean()
    m_pos = law.mean() - m_neg
    denom = m_neg - m_pos
    if denom == 0.0:
        raise NonIntegrable("law has no mass on either side of zero")
    tau = m_neg / denom
    if not 0.0 < tau < 1.0:
        raise NonIntegrable(f"solved tau={tau} outside (0, 1)")
    return float(tau)


def estimate_tau_empirical(y) -> float:
    """Empirical expectile index of a response sample.

    The sample is standardized (mean 0, sd 1) first, so the result is
    invariant under increasing affine maps of ``y``.
    """
    y = np.asarray(y, dtype=float).ravel()
    sd = float(np.std(y))
    if sd == 0.0 or y.size < 2:
        raise DegenerateResponse("response has zero empirical variance")
    z = (y - np.mean(y)) / sd
    s_neg = np.mean(z * (z < 0.0))
    s_pos = np.mean(z * (z > 0.0))
    return float(s_neg / (s_neg - s_pos))


# ---------------------------------------------------------------------------
# assumption diagnostics

NEAR_SINGULAR_TOL = 1e-8


def check_assumptions(data: Dataset) -> DiagnosticsReport:
    """Eigenvalue range of the scaled Gram matrix and max design sup-norm.

    Advisory only: flags near-singularity but never raises.
    """
    notes = []
    mu_min = mu_max = None
    near_singular = False
    if data.p <= data.n:
        gram = data.x.T @ data.x / data.n
        eigs = np.linalg.eigvalsh(gram)
        mu_min, mu_max = float(eigs[0]), float(eigs[-1])
        if mu_min < NEAR_SINGULAR_TOL:
            near_singular = True
            notes.append(
                f"smallest Gram eigenvalue {mu_min:.3e} is near zero")
    else:
        notes.append("p > n: Gram eigenvalue check skipped")
    max_inf = float(np.max(np.abs(data.x)))
    return DiagnosticsReport(
        n=data.n, p=data.p, mu_min=mu_min, mu_max=mu_max,
        max_row_inf_norm=max_inf, near_singular=near_singular,
        notes=tuple(notes))

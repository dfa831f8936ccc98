"""Loss family, error laws, index estimation and design diagnostics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expectsel import (
    Dataset,
    DegenerateResponse,
    DimensionMismatch,
    EmpiricalSample,
    ExpectileParams,
    FitResult,
    InvalidWeight,
    NonIntegrable,
    NormalPlusChiSq,
    ShiftedExp,
    StdNormal,
    TrueModel,
    check_assumptions,
    estimate_tau_empirical,
    g,
    h,
    rho,
    solve_tau_for_law,
)

# Zero-expectile indices of the two asymmetric laws, frozen from an
# independent quadrature of the partial means (cross-checked below by
# Monte Carlo).
TAU_SHIFTED_EXP = 0.9506751120620786
TAU_NORMAL_CHISQ = 0.019132092801796088

taus = st.floats(min_value=1e-3, max_value=1.0 - 1e-3)
points = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


# ---------------------------------------------------------------------------
# loss family

def test_rho_pinned_values():
    assert rho(0.5, 3.0) == pytest.approx(4.5)
    assert rho(0.7, -2.0) == pytest.approx(1.2)
    for tau in (0.1, 0.5, 0.9):
        assert rho(tau, 0.0) == 0.0


def test_g_pinned_values():
    assert g(0.7, -2.0) == pytest.approx(-1.2)
    assert g(0.5, 4.0) == pytest.approx(4.0)


def test_h_pinned_values():
    assert h(0.5, 123.0) == 1.0
    assert h(0.5, -123.0) == 1.0
    assert h(0.7, -1.0) == pytest.approx(0.6)
    # the tie x == 0 takes the nonnegative branch
    assert h(0.7, 0.0) == pytest.approx(1.4)


def test_g_matches_central_differences():
    rng = np.random.default_rng(0)
    tau = rng.uniform(0.05, 0.95, 100)
    x = rng.uniform(-50.0, 50.0, 100)
    x = np.where(np.abs(x) < 1e-3, 1.0, x)  # keep clear of the kink
    step = 1e-5
    fd = (rho(tau, x + step) - rho(tau, x - step)) / (2.0 * step)
    np.testing.assert_allclose(fd, g(tau, x), rtol=1e-6, atol=1e-8)


@given(taus, points, points, st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_rho_convex(tau, x1, x2, t):
    mid = rho(tau, t * x1 + (1.0 - t) * x2)
    chord = t * rho(tau, x1) + (1.0 - t) * rho(tau, x2)
    assert mid <= chord + 1e-9 * max(1.0, abs(chord))


@given(taus, st.lists(points, min_size=1, max_size=50))
@settings(max_examples=200, deadline=None)
def test_h_bounds_hold_exactly(tau, xs):
    vals = h(tau, np.asarray(xs))
    assert np.all(vals >= 2.0 * min(tau, 1.0 - tau))
    assert np.all(vals <= 2.0 * max(tau, 1.0 - tau))


@given(taus, points)
@settings(max_examples=200, deadline=None)
def test_loss_family_consistency(tau, x):
    # g is the derivative scale of rho and h the slope of g, piecewise
    assert rho(tau, x) >= 0.0
    assert g(tau, x) == pytest.approx(h(tau, x) * x)


# ---------------------------------------------------------------------------
# error laws and the index equation

def test_tau_of_symmetric_law_is_half():
    assert solve_tau_for_law(StdNormal()) == pytest.approx(0.5, abs=1e-12)


def test_tau_fixture_shifted_exp():
    assert solve_tau_for_law(ShiftedExp(shift=-2.5)) == pytest.approx(
        TAU_SHIFTED_EXP, abs=1e-9)


def test_tau_fixture_normal_plus_chisq():
    assert solve_tau_for_law(NormalPlusChiSq(sigma2=4e-2, df=1)) == pytest.approx(
        TAU_NORMAL_CHISQ, abs=1e-9)


@pytest.mark.parametrize("law", [ShiftedExp(shift=-2.5),
                                 NormalPlusChiSq(sigma2=4e-2, df=1)])
def test_tau_solution_zeroes_the_expectile_identity(law):
    # Monte Carlo check of E[g_tau(eps)] = 0 at the solved index
    tau = solve_tau_for_law(law)
    eps = law.sample(np.random.default_rng(1), 10**6)
    mean_g = float(np.mean(g(tau, eps)))
    scale = float(np.std(g(tau, eps))) / 1000.0
    assert abs(mean_g) < 4.0 * scale


def test_shifted_exp_support_and_mean():
    law = ShiftedExp(shift=-2.5)
    eps = law.sample(np.random.default_rng(2), 10**5)
    assert np.all(eps > -2.5)
    assert float(np.mean(eps)) == pytest.approx(-1.5, abs=0.02)
    assert law.mean() == pytest.approx(-1.5)


def test_std_normal_moments():
    eps = StdNormal().sample(np.random.default_rng(3), 10**5)
    assert float(np.mean(eps)) == pytest.approx(0.0, abs=0.01)
    assert float(np.var(eps)) == pytest.approx(1.0, abs=0.02)


def test_normal_plus_chisq_mean():
    law = NormalPlusChiSq(sigma2=4e-2, df=1)
    eps = law.sample(np.random.default_rng(4), 10**5)
    assert law.mean() == pytest.approx(1.0)
    assert float(np.mean(eps)) == pytest.approx(1.0, abs=0.02)


def test_empirical_law_partial_mean_is_exact():
    law = EmpiricalSample(values=(-2.0, -1.0, 3.0, 4.0))
    assert law.mean() == pytest.approx(1.0)
    assert law.partial_negative_mean() == pytest.approx(-0.75)
    assert solve_tau_for_law(law) == pytest.approx(0.75 / (0.75 + 1.75))


def test_one_sided_law_rejected():
    with pytest.raises(NonIntegrable):
        solve_tau_for_law(EmpiricalSample(values=(1.0, 2.0)))


# ---------------------------------------------------------------------------
# empirical index

def test_tau_empirical_symmetric_sample():
    y = np.array([-1.0, 1.0] * 20)
    assert estimate_tau_empirical(y) == pytest.approx(0.5, abs=1e-12)


def test_tau_empirical_large_normal_sample():
    y = np.random.default_rng(5).standard_normal(10**6)
    assert estimate_tau_empirical(y) == pytest.approx(0.5, abs=0.002)


def test_tau_empirical_constant_response_rejected():
    with pytest.raises(DegenerateResponse):
        estimate_tau_empirical(np.full(10, 3.0))


@given(st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=3,
                max_size=40),
       st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=-50.0, max_value=50.0))
@settings(max_examples=100, deadline=None)
def test_tau_empirical_affine_invariant(ys, a, b):
    y = np.asarray(ys)
    if float(np.std(y)) < 1e-6:
        return
    t1 = estimate_tau_empirical(y)
    t2 = estimate_tau_empirical(a * y + b)
    assert t1 == pytest.approx(t2, abs=1e-9)
    assert 0.0 < t1 < 1.0


# ---------------------------------------------------------------------------
# domain types

def test_dataset_shape_validation():
    with pytest.raises(DimensionMismatch):
        Dataset(x=np.ones((3, 2)), y=np.ones(4))
    with pytest.raises(DimensionMismatch):
        Dataset(x=np.ones(3), y=np.ones(3))
    with pytest.raises(ValueError):
        Dataset(x=np.array([[np.nan, 1.0]]), y=np.ones(1))
    with pytest.raises(DimensionMismatch):
        Dataset(x=np.ones((2, 2)), y=np.ones(2), feature_names=("a",))


def test_params_validation():
    w = np.ones(3)
    with pytest.raises(ValueError):
        ExpectileParams(tau=0.0, lam=0.1, gamma=1.0, weights=w)
    with pytest.raises(ValueError):
        ExpectileParams(tau=0.5, lam=-0.1, gamma=1.0, weights=w)
    with pytest.raises(ValueError):
        ExpectileParams(tau=0.5, lam=0.1, gamma=0.0, weights=w)
    with pytest.raises(InvalidWeight):
        ExpectileParams(tau=0.5, lam=0.1, gamma=1.0, weights=np.array([-1.0]))
    # +inf is a legal (pinning) weight
    ExpectileParams(tau=0.5, lam=0.1, gamma=1.0,
                    weights=np.array([np.inf, 1.0]))


def test_fit_result_derives_active_set():
    res = FitResult(beta=np.array([0.0, 2.0, 0.0, -1.0]), active_set=None,
                    objective=0.0, kkt_residual=0.0, iterations=1,
                    converged=True)
    np.testing.assert_array_equal(res.active_set, [1, 3])


def test_true_model_support():
    tm = TrueModel(np.array([0.0, 3.0, 0.0, -1.0]))
    np.testing.assert_array_equal(tm.support, [1, 3])
    assert tm.p0 == 2


# ---------------------------------------------------------------------------
# diagnostics

def test_diagnostics_identity_design():
    n = 6
    rep = check_assumptions(Dataset(x=np.eye(n), y=np.ones(n)))
    assert rep.mu_min == pytest.approx(1.0 / n)
    assert rep.mu_max == pytest.approx(1.0 / n)
    assert not rep.near_singular


def test_diagnostics_zero_column_flagged():
    x = np.column_stack([np.ones(5), np.zeros(5)])
    rep = check_assumptions(Dataset(x=x, y=np.ones(5)))
    assert rep.mu_min == pytest.approx(0.0, abs=1e-12)
    assert rep.near_singular


def test_diagnostics_gaussian_design_well_conditioned():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((200, 10))
    rep = check_assumptions(Dataset(x=x, y=np.ones(200)))
    assert rep.mu_min > 0.5
    assert rep.mu_max < 2.0
    assert rep.max_row_inf_norm == pytest.approx(float(np.max(np.abs(x))))


def test_diagnostics_wide_design_skips_eigencheck():
    rep = check_assumptions(Dataset(x=np.ones((3, 10)), y=np.ones(3)))
    assert rep.mu_min is None
    assert any("skipped" in note for note in rep.notes)

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from imexldg.errors import DomainError, TheoryInapplicableError
from imexldg.stability import (
    Region,
    auto_mu,
    classify_region,
    dt_stab_combined,
    dt_stab_optimal,
    dt_uniform,
    mu_step_bounds,
    mu_thresholds,
    special_roots,
    stability_params,
    tau_bounds,
)
from imexldg.velocity import make_velocity_space

TEL = make_velocity_space("telegraph")
SLAB = make_velocity_space("slab", 8)


def tel(k, omega=1.0, sigma_m=1.0):
    return stability_params(k, omega, TEL, sigma_m)


def test_alpha_constants():
    p = tel(1)
    assert (p.alpha1, p.alpha2, p.alpha3) == (24.0, 16.0, 8.0)
    q = stability_params(0, 1.0, SLAB)
    assert (q.alpha2, q.alpha3) == (3.0, 2.0)


@pytest.mark.parametrize("eps,h,sigma", [(1.0, 1.0, 1.0), (0.01, 0.2, 2.0), (0.0, 0.5, 1.0)])
def test_uniform_bound_k0(eps, h, sigma):
    assert dt_uniform(tel(0, sigma_m=sigma), eps, h) == pytest.approx((2 * eps * h + sigma * h * h) / 4)
    slab = stability_params(0, 1.0, SLAB, sigma)
    assert dt_uniform(slab, eps, h) == pytest.approx((2 * eps * h + sigma * h * h) / 3)


def test_uniform_bound_k1_saturated():
    # alpha1 = 24, alpha2 = 2 * (1 + 1) * 4 = 16, alpha3 = 8; min(eps, alpha2 h / alpha1) saturates
    h = 0.1
    expected = h / (24 + 16 * 8) * (h + (16 * h / 24) * 8)
    assert dt_uniform(tel(1), 10.0, h) == pytest.approx(expected, rel=1e-14)


def test_uniform_bound_ignores_omega():
    assert dt_uniform(tel(2, 0.0), 0.3, 0.1) == dt_uniform(tel(2, 5.0), 0.3, 0.1)
    with pytest.raises(DomainError):
        dt_uniform(tel(1), -1.0, 0.1)


def test_table_constants_k1():
    p = tel(1)
    assert p.lambda_star == pytest.approx(1 / 35, abs=1e-15)
    assert p.mu_star == pytest.approx(19 / 35, abs=1e-15)
    assert p.lambda_hat_star == pytest.approx(1 / 3, abs=1e-15)
    assert p.mu_S(1 / 3) == pytest.approx(1.0)


def test_k0_fields():
    p = tel(0)
    assert p.lambda_star == 0.25 and p.mu_star == 0.5 and p.lambda_hat_star is None
    with pytest.raises(DomainError):
        p.mu_S(0.1)


def test_low_omega_has_no_theory():
    p = tel(1, omega=0.5)
    assert p.lambda_star is None and not p.theory_applies
    with pytest.raises(TheoryInapplicableError):
        mu_thresholds(p, 0.9)
    with pytest.raises(TheoryInapplicableError):
        dt_stab_optimal(p, 1.0, 1.0)
    assert auto_mu(p, 1.0, 1.0) == 1.0


def test_thresholds_examples():
    assert mu_thresholds(tel(0), 0.5).lambda0 == 0.25
    th = mu_thresholds(tel(1), 19 / 35)
    assert th.lambda1 == pytest.approx(1 / 35, abs=1e-15)
    assert th.lambda2 == pytest.approx(1 / 35, abs=1e-15)
    assert tuple(mu_thresholds(tel(2), 1.0)) == (0.0, 0.0)


@pytest.mark.parametrize("k,mu", [(0, 0.49), (0, 1.01), (1, 0.5), (1, 0.4), (2, 1.2)])
def test_mu_domain(k, mu):
    with pytest.raises(DomainError):
        mu_thresholds(tel(k), mu)


def test_k0_accepts_closed_endpoint():
    assert mu_thresholds(tel(0), 0.5).lambda0 == 0.25


def test_step_bound_examples():
    assert math.isinf(mu_step_bounds(tel(0), 0.5, 0.2, 1.0))
    assert mu_step_bounds(tel(0), 0.5, 1.0, 1.0) == pytest.approx(4 / 3)


def test_optimal_examples():
    p = tel(0)
    assert math.isinf(dt_stab_optimal(p, 0.25, 1.0))
    eps, h = 0.7, 0.9
    assert dt_stab_optimal(p, eps, h) == pytest.approx(4 * eps**2 * h / (4 * eps - h))
    assert dt_stab_optimal(tel(1), 10.0, 1.0) == pytest.approx(1 / 24, rel=1e-14)


def test_combined_examples():
    p0 = tel(0, omega=0.0)
    assert dt_stab_combined(p0, 0.01, 0.1) == pytest.approx((2 * 0.01 * 0.1 + 0.01) / 4)
    assert math.isinf(dt_stab_combined(tel(0), 0.025, 0.1))
    r = 0.8
    pe = tel(0, omega=math.exp(-r))
    assert dt_stab_combined(pe, r * 0.1, 0.1) == pytest.approx((2 * r * 0.01 + 0.01) / 4)


def test_classification_examples():
    assert classify_region(tel(0), 0.1, 1.0, 1e9) is Region.UNCONDITIONAL
    assert classify_region(tel(0), 1.0, 1.0, 1.0) is Region.CONDITIONAL_OK
    assert classify_region(tel(0), 1.0, 1.0, 2.0) is Region.OUTSIDE_PROVEN


def test_auto_mu():
    assert auto_mu(tel(0), 1.0, 1.0) == 0.5
    assert auto_mu(tel(1), 0.01, 1.0) == pytest.approx(19 / 35)
    assert auto_mu(tel(1), 0.2, 1.0) == pytest.approx(0.5 + 0.5 * 0.2 * 12 / 4)
    assert auto_mu(tel(1), 5.0, 1.0) == 1.0


def test_special_roots():
    r = special_roots()
    assert abs(r.r_star - math.log(2)) < 1e-14
    assert abs(r.r_dagger - 0.19589899) < 1e-7
    assert abs(r.r_circle - 0.38161849) < 1e-7
    assert r.r_dagger == pytest.approx((2 - math.exp(r.r_dagger)) / 4, abs=1e-13)


admissible = st.tuples(
    st.integers(min_value=1, max_value=9),
    st.floats(min_value=0.55, max_value=50.0),
    st.sampled_from([TEL, SLAB]),
)


@settings(max_examples=60, deadline=None)
@given(admissible)
def test_switching_line_passes_through_optimum(args):
    k, omega, vs = args
    p = stability_params(k, omega, vs)
    assert p.mu_S(p.lambda_star) == pytest.approx(p.mu_star, abs=1e-13)
    assert p.lambda_S(p.mu_star) == pytest.approx(p.lambda_star, abs=1e-13)
    th = mu_thresholds(p, p.mu_star)
    assert th.lambda1 == pytest.approx(p.lambda_star, abs=1e-12)
    assert th.lambda2 == pytest.approx(p.lambda_star, abs=1e-12)
    assert p.mu_min < p.mu_star < 1.0


@settings(max_examples=60, deadline=None)
@given(admissible, st.floats(min_value=1e-6, max_value=1.0))
def test_threshold_ordering(args, frac):
    k, omega, vs = args
    p = stability_params(k, omega, vs)
    mu = p.mu_min + frac * (1.0 - p.mu_min)
    assume(mu > p.mu_min)
    lam1, lam2 = mu_thresholds(p, mu)
    if mu < p.mu_star * (1 - 1e-9):
        assert lam1 < lam2
    elif p.mu_star * (1 + 1e-9) < mu < 1.0:
        assert lam1 > lam2
    elif mu == 1.0:
        assert lam1 == lam2 == 0.0
    assert p.lambda_hat_star > lam1 and p.lambda_hat_star > lam2


@settings(max_examples=60, deadline=None)
@given(admissible, st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=0.05, max_value=2.0))
def test_optimal_dominates_every_mu(args, t, h):
    k, omega, vs = args
    p = stability_params(k, omega, vs)
    # ratios spread across all three branches
    lam = p.lambda_star * (1 + 4 * t) if t < 0.5 else p.lambda_hat_star * (0.5 + 4 * t)
    eps = lam * h
    best = dt_stab_optimal(p, eps, h)
    for mu in np.linspace(p.mu_min, 1.0, 41)[1:]:
        assert best >= mu_step_bounds(p, mu, eps, h) * (1 - 1e-12)
    mu_opt = auto_mu(p, eps, h)
    assert mu_step_bounds(p, mu_opt, eps, h) == pytest.approx(best, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(admissible, st.floats(min_value=0.05, max_value=2.0))
def test_branches_join_continuously(args, h):
    k, omega, vs = args
    p = stability_params(k, omega, vs)
    at = p.lambda_hat_star * h
    lower = dt_stab_optimal(p, at, h)
    upper = (1 - p.mu_min) * h * h / (p.inv.c_inv_hat * p.v2_inf)
    assert lower == pytest.approx(upper, rel=1e-12)
    assert math.isinf(dt_stab_optimal(p, p.lambda_star, 1.0))
    near = dt_stab_optimal(p, p.lambda_star * h * (1 + 1e-9), h)
    assert near > 1e6 * dt_stab_optimal(p, p.lambda_star * h * 2, h)


@settings(max_examples=40, deadline=None)
@given(admissible, st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.05, max_value=2.0))
def test_tau_monotonicity(args, t, h):
    k, omega, vs = args
    p = stability_params(k, omega, vs)
    lam = p.lambda_star + t * (p.lambda_hat_star - p.lambda_star)
    eps = lam * h
    mu_s = p.mu_S(lam)
    t1, t2 = tau_bounds(p, mu_s, eps, h)
    assert t1 == pytest.approx(t2, rel=1e-12)
    grid = np.linspace(p.mu_min, min(mu_s, 1.0), 60)[1:]
    tau1 = [tau_bounds(p, mu, eps, h)[0] for mu in grid if lam > mu_thresholds(p, mu).lambda1]
    assert all(b >= a * (1 - 1e-12) for a, b in zip(tau1, tau1[1:]))
    tau2 = [tau_bounds(p, mu, eps, h)[1] for mu in np.linspace(p.mu_min, 1.0, 60)[1:]]
    finite = [x for x in tau2 if math.isfinite(x)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(finite, finite[1:]))


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-4, max_value=10.0), st.floats(min_value=1e-3, max_value=2.0), st.floats(min_value=0.5, max_value=3.0))
def test_k0_constant_weight_combined(eps, h, sigma):
    p = tel(0, sigma_m=sigma)
    bound = dt_stab_combined(p, eps, h)
    if eps / (sigma * h) <= 0.25:
        assert math.isinf(bound)
    else:
        second = 4 * eps**2 * h / (4 * eps - sigma * h)
        assert bound == pytest.approx(max((2 * eps * h + sigma * h * h) / 4, second), rel=1e-12)
        assert second >= (2 * eps * h + sigma * h * h) / 4 * (1 - 1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize, stats

from jade import model, statdim


def quad_tail(M, tau):
    # E[(u - tau)_+^2] for u ~ chi_{2M}, by direct integration of the density
    f = lambda u: (u - tau) ** 2 * stats.chi.pdf(u, 2 * M)
    val, _ = integrate.quad(f, tau, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def quad_ratio(M, tau):
    f = lambda u: (u / tau - 1.0) * stats.chi.pdf(u, 2 * M)
    val, _ = integrate.quad(f, tau, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def oracle_statdim(rho, M, N, c=1.0):
    """Independent evaluation: brentq on the quadrature ratio, quadrature for the tail."""
    rhs = rho * c / (1 - rho)
    tau = optimize.brentq(lambda t: quad_ratio(M, t) - rhs, 1e-8, 50.0, xtol=1e-14)
    return N * (rho * (2 * M + tau**2 * c) + (1 - rho) * quad_tail(M, tau)), tau


@pytest.mark.parametrize("M", range(1, 17))
def test_chi_tail_term_matches_quadrature(M):
    for tau in np.linspace(0.0, 20.0, 21):
        assert statdim.chi_tail_term(M, tau) == pytest.approx(quad_tail(M, tau), abs=1e-8)


def test_chi_tail_endpoints():
    for M in (1, 3, 10):
        assert statdim.chi_tail_term(M, 0.0) == pytest.approx(2 * M, rel=1e-14)
        assert statdim.chi_tail_term(M, 60.0) == 0.0
    assert statdim.chi_tail_ratio(2, 0.0) == math.inf
    with pytest.raises(ValueError):
        statdim.chi_tail_term(0, 1.0)
    with pytest.raises(ValueError):
        statdim.chi_tail_term(2, -0.1)


@settings(max_examples=60, deadline=None)
@given(M=st.integers(1, 12), a=st.floats(0, 15), b=st.floats(0, 15))
def test_chi_tail_term_decreasing(M, a, b):
    lo, hi = sorted((a, b))
    assert statdim.chi_tail_term(M, hi) <= statdim.chi_tail_term(M, lo) + 1e-12


@pytest.mark.parametrize("rho,M", [(0.05, 1), (0.1, 2), (0.14, 3), (0.2, 4), (0.5, 8)])
def test_plain_bound_matches_independent_oracle(rho, M):
    res = statdim.statdim_plain(rho, M, 100)
    ref, tau = oracle_statdim(rho, M, 100)
    assert res.tau_star == pytest.approx(tau, rel=1e-8)
    assert res.delta == pytest.approx(ref, rel=1e-8)
    assert res.delta_seq == pytest.approx(res.delta / (2 * M))


def test_tau_star_solves_its_condition():
    for rho, M in [(0.01, 1), (0.14, 3), (0.9, 5)]:
        tau = statdim.tau_star_plain(rho, M)
        assert statdim.chi_tail_ratio(M, tau) == pytest.approx(rho / (1 - rho), rel=1e-10)
    a, b = statdim.gaussian_moments(2, statdim.DEFAULT_SIGMA_REAL)
    tau = statdim.tau_star_smoothed(0.1, 2, 0.5, a, b)
    c = statdim.smoothing_factor(0.5, a, b)
    assert statdim.chi_tail_ratio(2, tau) == pytest.approx(0.1 * c / 0.9, rel=1e-10)


def test_tau_star_minimises_the_bound():
    rho, M = 0.1, 2
    res = statdim.statdim_plain(rho, M, 1)
    f = lambda t: rho * (2 * M + t * t) + (1 - rho) * statdim.chi_tail_term(M, t)
    grid = np.linspace(0.01, 6, 2000)
    assert res.delta <= min(f(t) for t in grid) + 1e-12


def test_smoothed_bound_matches_oracle():
    a, b = statdim.gaussian_moments(3, statdim.DEFAULT_SIGMA_REAL)
    for mu in (0.01, 0.3, 2.0):
        c = statdim.smoothing_factor(mu, a, b)
        ref, _ = oracle_statdim(0.1, 3, 50, c)
        assert statdim.statdim_smoothed(0.1, 3, 50, mu, a, b).delta == pytest.approx(ref, rel=1e-8)


def test_bound_edge_cases():
    assert statdim.statdim_plain(0.0, 3, 10).delta == 0.0
    full = statdim.statdim_plain(1.0, 3, 10)
    assert full.delta == 60.0 and full.delta_seq == 10.0
    with pytest.raises(ValueError):
        statdim.statdim_plain(1.2, 2, 10)
    with pytest.raises(ValueError):
        statdim.tau_star_plain(0.0, 2)


def test_bound_monotone_in_rho_and_mu():
    d = [statdim.statdim_plain(r, 2, 100).delta for r in np.linspace(0.01, 0.99, 50)]
    assert np.all(np.diff(d) > 0)
    assert max(d) <= 400
    a, b = statdim.gaussian_moments(2, statdim.DEFAULT_SIGMA_REAL)
    ds = [statdim.statdim_smoothed(0.1, 2, 100, mu, a, b).delta
          for mu in (0, 1e-3, 1e-2, 1e-1, 1, 10)]
    assert np.all(np.diff(ds) > 0)


def test_bound_scales_linearly_in_N():
    a = statdim.statdim_plain(0.14, 3, 150).delta_seq
    b = statdim.statdim_plain(0.14, 3, 300).delta_seq
    assert b == pytest.approx(2 * a, rel=1e-12)


def test_gaussian_moments_by_sampling():
    rng = np.random.default_rng(0)
    for M in (1, 4):
        g = rng.normal(scale=0.7, size=(400_000, 2 * M))
        nrm = np.linalg.norm(g, axis=1)
        a, b = statdim.gaussian_moments(M, 0.7)
        assert a == pytest.approx(nrm.mean(), rel=3e-3)
        assert b == pytest.approx(np.mean(nrm**2), rel=3e-3)


def _truth(N, M, S, seed):
    truth, _ = model.generate_system(model.SystemConfig(N=N, M=M, L=1, S=S), seed)
    return truth


def test_monte_carlo_matches_formula_plain():
    truth = _truth(100, 2, 10, 1)
    mc = statdim.statdim_monte_carlo(truth, samples=4000, seed=2)
    ref = statdim.statdim_plain(0.1, 2, 100).delta
    assert abs(mc.delta - ref) < 0.02 * ref
    assert mc.stderr < 0.01 * ref


def test_monte_carlo_independent_of_batch_size():
    truth = _truth(40, 2, 4, 3)
    a = statdim.statdim_monte_carlo(truth, samples=2000, seed=5, batch=2000)
    b = statdim.statdim_monte_carlo(truth, samples=2000, seed=5, batch=300)
    assert a.delta == pytest.approx(b.delta, rel=1e-12)
    assert a.tau == b.tau
    with pytest.raises(ValueError):
        statdim.statdim_monte_carlo(truth, samples=10)


def test_predict_transition_bracket():
    pred = statdim.predict_transition(100, 2, 10, 0.05)
    assert pred.L_fail <= pred.delta_seq <= pred.L_success
    assert pred.a_eta == pytest.approx(math.sqrt(8 * math.log(80)))
    wide = statdim.predict_transition(100, 2, 10, 0.01)
    assert wide.width >= pred.width
    degen = statdim.predict_transition(100, 2, 10, 4.0, allow_degenerate=True)
    assert degen.L_fail == degen.L_success == math.ceil(degen.delta_seq)
    with pytest.raises(ValueError):
        statdim.predict_transition(100, 2, 10, 4.0)


def test_predict_noisy_error():
    p = statdim.predict_noisy_error(50, 25.0)
    assert p.worst_case_ratio == 0.5 and p.empirical_limit_ratio == 0.5
    assert statdim.predict_noisy_error(20, 25.0).worst_case_ratio == 1.0
    assert statdim.predict_noisy_error(25, 25.0).at_boundary


def test_epsilon_rule():
    assert statdim.epsilon_rule(0.04, 10, 2, 36.0) == pytest.approx(0.2 * 2.0)
    with pytest.raises(statdim.InfeasibleEpsilonError):
        statdim.epsilon_rule(0.04, 10, 2, 40.0)


def test_plan_sequence_length():
    a, b = statdim.gaussian_moments(2, statdim.DEFAULT_SIGMA_REAL)
    L1 = statdim.plan_sequence_length(0.0, 0.5, 0.1, 2, 100, a, b)
    L2 = statdim.plan_sequence_length(0.0, 0.25, 0.1, 2, 100, a, b)
    L3 = statdim.plan_sequence_length(0.5, 0.5, 0.1, 2, 100, a, b)
    assert L1 == math.ceil(statdim.statdim_plain(0.1, 2, 100).delta_seq / 0.5)
    assert L2 > L1 and L3 > L1
    with pytest.raises(ValueError):
        statdim.plan_sequence_length(0.0, 0.0, 0.1, 2, 100, a, b)


def test_statdim_table_rows():
    rows = statdim.statdim_table([0.1, 0.2], [1, 2], [0.0, 0.1])
    assert len(rows) == 8
    assert set(rows[0]) == {"rho", "M", "mu", "tau_star", "delta", "delta_seq"}

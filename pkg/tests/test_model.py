import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jade import model


def test_generate_system_shapes_and_support():
    cfg = model.SystemConfig(N=30, M=3, L=12, S=5, sigma2=0.1)
    truth, obs = model.generate_system(cfg, 7)
    assert truth.theta0.shape == (30, 3)
    assert obs.Q.shape == (12, 30)
    assert obs.Y.shape == (12, 3)
    assert truth.S == 5
    assert np.all(np.diff(truth.support) > 0)
    assert np.array_equal(np.flatnonzero(truth.activity), truth.support)
    inactive = np.setdiff1d(np.arange(30), truth.support)
    assert not truth.theta0[inactive].any()
    np.testing.assert_allclose(obs.Y, obs.Q @ truth.theta0 + obs.noise)


def test_generate_system_is_deterministic():
    cfg = model.SystemConfig(N=20, M=2, L=8, S=3, sigma2=0.5, master_seed=11)
    a = model.generate_system(cfg, 99)
    b = model.generate_system(cfg, 99)
    c = model.generate_system(cfg, 100)
    np.testing.assert_array_equal(a[1].Y, b[1].Y)
    assert not np.allclose(a[1].Q, c[1].Q)


def test_noiseless_instance_has_zero_noise():
    cfg = model.SystemConfig(N=10, M=2, L=5, S=2)
    truth, obs = model.generate_system(cfg, 0)
    assert not obs.noise.any()
    np.testing.assert_allclose(obs.Y, obs.Q @ truth.theta0)


def test_noise_changes_nothing_but_the_noise():
    base = dict(N=15, M=2, L=6, S=4, master_seed=3)
    t0, o0 = model.generate_system(model.SystemConfig(**base), 5)
    t1, o1 = model.generate_system(model.SystemConfig(**base, sigma2=0.2), 5)
    np.testing.assert_array_equal(t0.theta0, t1.theta0)
    np.testing.assert_array_equal(o0.Q, o1.Q)


def test_complex_normal_moments():
    rng = np.random.default_rng(0)
    z = model.complex_normal(rng, 200_000, variance=3.0)
    assert abs(np.mean(np.abs(z) ** 2) - 3.0) < 0.05
    assert abs(np.var(z.real) - 1.5) < 0.03
    assert abs(np.mean(z.real * z.imag)) < 0.02


@pytest.mark.parametrize("kw", [dict(N=0, M=1, L=1, S=0), dict(N=5, M=1, L=1, S=6),
                                dict(N=5, M=1, L=1, S=1, sigma2=-1.0),
                                dict(N=5, M=1, L=0, S=1), dict(N=5, M=1, L=1, S=1, mu=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        model.SystemConfig(**kw)


def test_trial_seed_distinct_and_stable():
    seeds = {model.trial_seed(1, t, p) for t in range(50) for p in range(20)}
    assert len(seeds) == 1000
    assert model.trial_seed(1, 2, 3) == model.trial_seed(1, 2, 3)
    assert model.trial_seed(1, 2, 3) != model.trial_seed(2, 2, 3)


@settings(max_examples=50, deadline=None)
@given(L=st.integers(1, 6), N=st.integers(1, 8), M=st.integers(1, 4), seed=st.integers(0, 2**32))
def test_embedding_commutes_with_products(L, N, M, seed):
    rng = np.random.default_rng(seed)
    Q = model.complex_normal(rng, (L, N))
    X = model.complex_normal(rng, (N, M))
    lhs = model.complex_to_real_operator(Q) @ model.complex_to_real_stack(X)
    np.testing.assert_allclose(lhs, model.complex_to_real_stack(Q @ X), atol=1e-12)
    np.testing.assert_allclose(model.real_to_complex_stack(model.complex_to_real_stack(X)), X)
    assert np.isclose(np.linalg.norm(model.complex_to_real_stack(X)), np.linalg.norm(X))


def test_embedded_operator_keeps_singular_values():
    rng = np.random.default_rng(1)
    Q = model.complex_normal(rng, (4, 6))
    s = np.linalg.svd(Q, compute_uv=False)
    s_real = np.linalg.svd(model.complex_to_real_operator(Q), compute_uv=False)
    # every singular value appears twice
    np.testing.assert_allclose(np.sort(s_real)[::-1], np.repeat(s, 2), atol=1e-12)


def test_vector_stack_is_a_column():
    x = np.array([1 + 2j, 3 - 1j])
    np.testing.assert_array_equal(model.complex_to_real_stack(x), [[1], [3], [2], [-1]])
    with pytest.raises(ValueError):
        model.real_to_complex_stack(np.ones((3, 1)))


def test_gaussian_real_sensing_variance():
    Q = model.gaussian_real_sensing(50, 100, 0.5, seed=3)
    assert Q.shape == (100, 200)
    assert abs(Q.var() - 0.5) < 0.02


def test_row_orthonormalize_keeps_row_space():
    Q = model.gaussian_real_sensing(5, 10, 0.5, seed=2)
    P = model.row_orthonormalize(Q)
    np.testing.assert_allclose(P @ P.T, np.eye(10), atol=1e-12)
    # Q = C P for some C: projecting rows of Q onto span(P) is exact
    np.testing.assert_allclose(Q @ P.T @ P, Q, atol=1e-10)
    np.testing.assert_array_equal(P, model.row_orthonormalize(Q))


def test_row_orthonormalize_rejects_rank_deficiency():
    Q = model.gaussian_real_sensing(3, 10, 0.5, seed=2)
    Q[2] = Q[0] + Q[1]
    with pytest.raises(model.RankDeficientError):
        model.row_orthonormalize(Q)
    with pytest.raises(model.RankDeficientError):
        model.row_orthonormalize(np.ones((5, 3)))

import numpy as np
import pytest

from jade import detect, model


def test_detect_activity_counts():
    theta = np.zeros((6, 2), dtype=complex)
    theta[1] = [1, 1j]
    theta[3] = [1e-4, 0]
    theta[4] = [0.5, 0]
    res = detect.detect_activity(theta, 1e-3, activity=[0, 1, 0, 1, 0, 0])
    np.testing.assert_array_equal(res.activity_hat, [0, 1, 0, 0, 1, 0])
    np.testing.assert_array_equal(res.detected, [1, 4])
    np.testing.assert_array_equal(res.H_hat, theta[[1, 4]])
    assert res.missed == 1 and res.false_alarm == 1


def test_detect_without_truth():
    res = detect.detect_activity(np.eye(3), 0.5)
    assert res.missed is None and res.false_alarm is None
    assert res.detected.tolist() == [0, 1, 2]


def test_recovery_success():
    a = np.ones((4, 2))
    assert detect.recovery_success(a + 1e-7, a)
    assert not detect.recovery_success(a + 1e-3, a)
    assert detect.recovery_success(a + 1e-3, a, tol=1e-3, relative=True)


def test_errors_agree_between_complex_and_real_forms():
    cfg = model.SystemConfig(N=10, M=3, L=6, S=2, sigma2=0.1)
    truth, obs = model.generate_system(cfg, 4)
    est = truth.theta0 + 0.1 * model.complex_normal(np.random.default_rng(0), (10, 3))
    Qt = model.complex_to_real_operator(obs.Q)
    r_c = detect.prediction_error(obs.Q, est, truth.theta0, 6, 3)
    r_r = detect.prediction_error(Qt, model.complex_to_real_stack(est),
                                  model.complex_to_real_stack(truth.theta0), 6, 3)
    assert r_c == pytest.approx(r_r, rel=1e-12)
    e_c = detect.empirical_error(obs.Q, est, obs.Y, 6, 3)
    d = obs.Q @ est - obs.Y
    assert e_c == pytest.approx(np.sum(np.abs(d) ** 2) / 36)

"""Activity detection, channel extraction and error metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DetectionResult",
    "detect_activity",
    "recovery_success",
    "prediction_error",
    "empirical_error",
]


@dataclass(frozen=True)
class DetectionResult:
    activity_hat: np.ndarray  # 0/1, length N
    detected: np.ndarray  # indices with activity_hat == 1
    H_hat: np.ndarray  # rows of theta_hat for the detected devices
    missed: int | None = None
    false_alarm: int | None = None


def detect_activity(theta_hat: np.ndarray, gamma_act: float,
                    activity: np.ndarray | None = None) -> DetectionResult:
    """Declare device ``i`` active when ``||theta_hat[i]||_2 >= gamma_act``.

    ``theta_hat`` is the ``N x M`` (complex) estimate. When the true
    ``activity`` vector is given, missed detections and false alarms are
    counted as well.
    """
    theta_hat = np.asarray(theta_hat)
    row_norms = np.linalg.norm(theta_hat, axis=1)
    a_hat = (row_norms >= gamma_act).astype(np.int8)
    detected = np.flatnonzero(a_hat)
    missed = false_alarm = None
    if activity is not None:
        activity = np.asarray(activity).astype(bool)
        missed = int(np.sum(activity & (a_hat == 0)))
        false_alarm = int(np.sum(~activity & (a_hat == 1)))
    return DetectionResult(a_hat, detected, theta_hat[detected].copy(), missed, false_alarm)


def recovery_success(theta_hat: np.ndarray, theta0: np.ndarray, tol: float = 1e-5,
                     relative: bool = False) -> bool:
    """``||theta_hat - theta0||_F <= tol`` (times ``||theta0||_F`` if ``relative``)."""
    err = float(np.linalg.norm(np.asarray(theta_hat) - np.asarray(theta0)))
    if relative:
        return err <= tol * float(np.linalg.norm(theta0))
    return err <= tol


def prediction_error(Qb: np.ndarray, theta_hat: np.ndarray, theta0: np.ndarray,
                     L: int, M: int) -> float:
    """Average squared prediction error ``||Qb (theta_hat - theta0)||_F^2 / (2LM)``.

    Works on the real embedding or directly on complex ``Q`` and ``Theta``;
    both give the same value.
    """
    d = np.asarray(Qb) @ (np.asarray(theta_hat) - np.asarray(theta0))
    return float(np.vdot(d, d).real) / (2.0 * L * M)


def empirical_error(Qb: np.ndarray, theta_hat: np.ndarray, Yt: np.ndarray,
                    L: int, M: int) -> float:
    """Empirical error ``||Qb theta_hat - Yt||_F^2 / (2LM)``."""
    d = np.asarray(Qb) @ np.asarray(theta_hat) - np.asarray(Yt)
    return float(np.vdot(d, d).real) / (2.0 * L * M)

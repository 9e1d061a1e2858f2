"""Statistical-dimension bounds for the group regularizer and its smoothed form.

All bounds are in ambient units of the real ``2N x M`` embedding, so a full
cone has dimension ``2NM``. Dividing by ``2M`` converts a bound into a
signature length ``L``.

Norms of inactive ``2 x M`` groups of a standard Gaussian matrix are chi
distributed with ``2M`` degrees of freedom. Their truncated moments reduce
to regularised upper incomplete gamma functions::

    E[u^k ; u > tau] = 2^(k/2) * Gamma(M + k/2, tau^2/2) / Gamma(M)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaincc, gammaln

from .model import GroundTruth, complex_to_real_stack

__all__ = [
    "StatDimResult",
    "TransitionPrediction",
    "NoisyPrediction",
    "MonteCarloResult",
    "InfeasibleEpsilonError",
    "chi_tail_term",
    "chi_tail_ratio",
    "tau_star_plain",
    "tau_star_smoothed",
    "statdim_plain",
    "statdim_smoothed",
    "gaussian_moments",
    "smoothing_factor",
    "statdim_monte_carlo",
    "predict_transition",
    "predict_noisy_error",
    "epsilon_rule",
    "plan_sequence_length",
    "statdim_table",
    "DEFAULT_SIGMA_REAL",
]

# per-real-component std of H ~ CN(0, I)
DEFAULT_SIGMA_REAL = 1.0 / math.sqrt(2.0)


class InfeasibleEpsilonError(ValueError):
    """Raised when ``2LM`` does not exceed the statistical dimension."""


@dataclass(frozen=True)
class StatDimResult:
    delta: float
    tau_star: float
    delta_seq: float


@dataclass(frozen=True)
class TransitionPrediction:
    L_success: int
    L_fail: int
    eta: float
    a_eta: float
    delta_seq: float

    @property
    def width(self) -> int:
        return self.L_success - self.L_fail

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.L_success + self.L_fail)


@dataclass(frozen=True)
class NoisyPrediction:
    worst_case_ratio: float
    empirical_limit_ratio: float
    at_boundary: bool = False


@dataclass(frozen=True)
class MonteCarloResult:
    delta: float
    stderr: float
    tau: float


def _chi_moments(M: int, tau: float) -> tuple[float, float, float]:
    """Return ``E[u^k ; u > tau]`` for ``k = 0, 1, 2`` and ``u ~ chi_{2M}``."""
    x = 0.5 * tau * tau
    p0 = gammaincc(M, x)
    p1 = math.sqrt(2.0) * math.exp(gammaln(M + 0.5) - gammaln(M)) * gammaincc(M + 0.5, x)
    p2 = 2.0 * M * gammaincc(M + 1, x)
    return p0, p1, p2


def chi_tail_term(M: int, tau: float) -> float:
    """``E[max(u - tau, 0)^2]`` for ``u ~ chi_{2M}``.

    Equals ``2M`` at ``tau = 0`` and decays to zero as ``tau`` grows.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if tau < 0:
        raise ValueError("tau must be non-negative")
    p0, p1, p2 = _chi_moments(M, tau)
    return max(p2 - 2.0 * tau * p1 + tau * tau * p0, 0.0)


def chi_tail_ratio(M: int, tau: float) -> float:
    """``E[max(u/tau - 1, 0)]``: the left side of the optimality condition for tau."""
    if tau <= 0:
        return math.inf
    p0, p1, _ = _chi_moments(M, tau)
    return max(p1 - tau * p0, 0.0) / tau


def _solve_tau(M: int, rhs: float, steps: int = 200) -> float:
    # chi_tail_ratio falls strictly from +inf to 0, so a bracket always exists
    lo, hi = 1e-6, 1.0
    while chi_tail_ratio(M, hi) > rhs:
        hi *= 2.0
    while chi_tail_ratio(M, lo) < rhs:
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if chi_tail_ratio(M, mid) > rhs:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def smoothing_factor(mu: float, a_bar: float, b_bar: float) -> float:
    """``1 + 2 mu a + mu^2 b``: squared norm inflation of an active subgradient."""
    return 1.0 + 2.0 * mu * a_bar + mu * mu * b_bar


def _check_rho(rho: float, open_interval: bool) -> None:
    if open_interval and not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")


def tau_star_plain(rho: float, M: int) -> float:
    _check_rho(rho, open_interval=True)
    return _solve_tau(M, rho / (1.0 - rho))


def tau_star_smoothed(rho: float, M: int, mu: float, a_bar: float, b_bar: float) -> float:
    _check_rho(rho, open_interval=True)
    return _solve_tau(M, rho * smoothing_factor(mu, a_bar, b_bar) / (1.0 - rho))


def statdim_smoothed(rho: float, M: int, N: int, mu: float = 0.0,
                     a_bar: float = 0.0, b_bar: float = 0.0) -> StatDimResult:
    """Upper bound on the statistical dimension of the smoothed descent cone.

    Parameters
    ----------
    rho : float
        Fraction of active devices ``S/N``.
    M : int
        Number of antennas; each group has ``2M`` real entries.
    N : int
        Number of devices.
    mu : float
        Smoothing weight. ``mu = 0`` gives the plain regularizer.
    a_bar, b_bar : float
        Mean norm and mean squared norm of the active groups of the real
        ground truth, see :func:`gaussian_moments`.
    """
    _check_rho(rho, open_interval=False)
    if rho == 0.0:
        return StatDimResult(0.0, math.inf, 0.0)
    if rho == 1.0:
        delta = 2.0 * N * M
        return StatDimResult(delta, 0.0, delta / (2 * M))
    c = smoothing_factor(mu, a_bar, b_bar)
    tau = _solve_tau(M, rho * c / (1.0 - rho))
    per_device = rho * (2 * M + tau * tau * c) + (1.0 - rho) * chi_tail_term(M, tau)
    delta = min(N * per_device, 2.0 * N * M)
    return StatDimResult(delta, tau, delta / (2 * M))


def statdim_plain(rho: float, M: int, N: int) -> StatDimResult:
    return statdim_smoothed(rho, M, N, 0.0, 0.0, 0.0)


def gaussian_moments(M: int, sigma_real: float) -> tuple[float, float]:
    """Mean and mean square of a group norm when entries are ``N(0, sigma_real^2)``."""
    if M < 1 or sigma_real < 0:
        raise ValueError("need M >= 1 and sigma_real >= 0")
    a_bar = math.sqrt(2.0) * math.exp(gammaln(M + 0.5) - gammaln(M)) * sigma_real
    b_bar = 2.0 * M * sigma_real**2
    return a_bar, b_bar


def statdim_monte_carlo(truth: GroundTruth, tau_grid: Sequence[float] | None = None,
                        samples: int = 10_000, seed: int = 0, mu: float = 0.0,
                        batch: int = 1000) -> MonteCarloResult:
    """Sample ``E dist^2(G, tau * subdifferential)`` at a concrete ground truth.

    The distance splits over groups: an active group contributes
    ``||G_V - tau (U_V + mu Theta_V)||^2`` with ``U_V`` the unit direction of
    the group, an inactive one ``max(||G_V|| - tau, 0)^2``. The minimum over
    ``tau_grid`` of the sample means is returned together with its standard
    error. Samples come from one sequential stream, so ``batch`` only
    changes memory use and summation order.
    """
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    theta = complex_to_real_stack(truth.theta0)
    N = theta.shape[0] // 2
    M = theta.shape[1]
    groups = theta.reshape(2, N, M).transpose(1, 0, 2).reshape(N, 2 * M)
    norms = np.linalg.norm(groups, axis=1)
    active = norms > 0
    targets = groups[active] / norms[active, None] + mu * groups[active]
    t_sq = float(np.sum(targets**2))

    if tau_grid is None:
        tau_grid = np.linspace(0.0, math.sqrt(2 * M) + 6.0, 401)
    taus = np.asarray(tau_grid, dtype=float)

    sums = np.zeros(taus.size)
    sq_sums = np.zeros(taus.size)
    rng = np.random.default_rng(seed)
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        g = rng.standard_normal((n, N, 2 * M))
        g_act = g[:, active]
        g_in = g[:, ~active]
        g_sq = np.sum(g_act**2, axis=(1, 2))
        g_dot = np.einsum("sij,ij->s", g_act, targets)
        in_norms = np.linalg.norm(g_in, axis=2)
        for k, tau in enumerate(taus):
            vals = g_sq - 2.0 * tau * g_dot + tau * tau * t_sq
            vals = vals + np.sum(np.maximum(in_norms - tau, 0.0) ** 2, axis=1)
            sums[k] += vals.sum()
            sq_sums[k] += np.dot(vals, vals)
        done += n
    means = sums / samples
    k = int(np.argmin(means))
    var = max(sq_sums[k] / samples - means[k] ** 2, 0.0)
    return MonteCarloResult(float(means[k]), math.sqrt(var / samples), float(taus[k]))


def predict_transition(N: int, M: int, S: int, eta: float = 0.05,
                       allow_degenerate: bool = False) -> TransitionPrediction:
    """Signature lengths bracketing the noiseless phase transition.

    Above ``L_success`` exact recovery holds with probability at least
    ``1 - eta``; at or below ``L_fail`` it holds with probability at most
    ``eta``. ``eta >= 4`` collapses the bracket and is only accepted with
    ``allow_degenerate``.
    """
    if not 0 < eta < 1 and not (allow_degenerate and eta > 0):
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    a_eta = math.sqrt(8.0 * math.log(4.0 / eta)) if eta < 4 else 0.0
    res = statdim_plain(S / N, M, N)
    spread = a_eta * math.sqrt(2.0 * N * M) / M
    if a_eta == 0.0:
        L = math.ceil(res.delta_seq)
        return TransitionPrediction(L, L, eta, a_eta, res.delta_seq)
    L_success = math.ceil((res.delta / M + spread) / 2.0)
    L_fail = max(math.floor((res.delta / M - spread) / 2.0), 0)
    return TransitionPrediction(L_success, L_fail, eta, a_eta, res.delta_seq)


def predict_noisy_error(L: float, delta_seq: float) -> NoisyPrediction:
    """Normalised worst-case prediction error and small-noise empirical error."""
    if L < delta_seq:
        return NoisyPrediction(1.0, 0.0)
    ratio = delta_seq / L
    return NoisyPrediction(ratio, 1.0 - ratio, at_boundary=(L == delta_seq))


def epsilon_rule(sigma2: float, L: int, M: int, delta_smoothed: float) -> float:
    """Constraint radius ``sigma * sqrt(2LM - delta)``.

    ``sigma2`` is the noise variance of one real component (half the
    complex per-entry variance).
    """
    slack = 2.0 * L * M - delta_smoothed
    if slack <= 0:
        raise InfeasibleEpsilonError(
            f"2LM = {2 * L * M} does not exceed the statistical dimension {delta_smoothed:.4g}")
    return math.sqrt(sigma2) * math.sqrt(slack)


def plan_sequence_length(mu: float, gamma1: float, rho: float, M: int, N: int,
                         a_bar: float, b_bar: float) -> int:
    """Shortest signature keeping the worst-case normalised error at ``gamma1``."""
    if gamma1 <= 0:
        raise ValueError("gamma1 must be positive")
    res = statdim_smoothed(rho, M, N, mu, a_bar, b_bar)
    return math.ceil(res.delta / (2 * M * gamma1))


def statdim_table(rhos: Sequence[float], Ms: Sequence[int], mus: Sequence[float] = (0.0,),
                  N: int = 1, sigma_real: float = DEFAULT_SIGMA_REAL) -> list[dict]:
    """Rows ``(rho, M, mu, tau_star, delta, delta_seq)`` over a parameter grid."""
    rows = []
    for M in Ms:
        a_bar, b_bar = gaussian_moments(M, sigma_real)
        for rho in rhos:
            for mu in mus:
                res = statdim_smoothed(rho, M, N, mu, a_bar, b_bar)
                rows.append(dict(rho=rho, M=M, mu=mu, tau_star=res.tau_star,
                                 delta=res.delta, delta_seq=res.delta_seq))
    return rows

"""Synthetic JADE instances and the complex/real embedding.

The received block is ``Y = Q @ Theta0 + N`` with ``Theta0 = diag(a) @ H``.
Complex Gaussians follow the circular convention: ``CN(0, v)`` has real
and imaginary parts each ``N(0, v/2)``.

Real quantities use the stacked layout ``[Re X; Im X]`` so that row ``i``
and row ``i + N`` of a ``2N x M`` array belong to device ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "GroundTruth",
    "Observation",
    "RankDeficientError",
    "trial_seed",
    "complex_normal",
    "generate_system",
    "complex_to_real_operator",
    "complex_to_real_stack",
    "real_to_complex_stack",
    "gaussian_real_sensing",
    "row_orthonormalize",
]


class RankDeficientError(ValueError):
    """Raised when a sensing matrix does not have full row rank."""


@dataclass(frozen=True)
class SystemConfig:
    """Scalar parameters of one JADE scenario.

    ``sigma2`` is the complex noise variance per entry. ``gamma_stop`` is the
    solver tolerance and ``gamma_act`` the activity threshold; they are kept
    apart on purpose.
    """

    N: int
    M: int
    L: int
    S: int
    sigma2: float = 0.0
    mu: float = 0.0
    master_seed: int = 0
    gamma_stop: float = 1e-3
    gamma_act: float = 1e-3

    def __post_init__(self):
        for name in ("N", "M", "L"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.S <= self.N:
            raise ValueError(f"need 0 <= S <= N, got S={self.S}, N={self.N}")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be non-negative")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    @property
    def rho(self) -> float:
        return self.S / self.N


@dataclass(frozen=True)
class GroundTruth:
    theta0: np.ndarray  # complex N x M
    support: np.ndarray  # sorted active indices
    activity: np.ndarray  # 0/1 vector of length N

    @property
    def S(self) -> int:
        return int(self.support.size)


@dataclass(frozen=True)
class Observation:
    Y: np.ndarray  # complex L x M
    Q: np.ndarray  # complex L x N
    noise_sigma2: float
    noise: np.ndarray  # complex L x M, the realised N in Y = Q Theta0 + N


def trial_seed(master_seed: int, trial_index: int, point_index: int = 0) -> int:
    """Derive a 64-bit trial seed from the sweep coordinates.

    The result only depends on its arguments, so trials can run in any
    order or in parallel.
    """
    ss = np.random.SeedSequence([int(master_seed), int(point_index), int(trial_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(master_seed: int, seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([int(master_seed), int(seed), int(stream)])
    )


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Draw i.i.d. ``CN(0, variance)`` entries."""
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)


def generate_system(config: SystemConfig, trial_seed: int) -> tuple[GroundTruth, Observation]:
    """Draw one instance ``(Theta0, Y)`` of the uplink model.

    Signatures and active channels are ``CN(0, 1)``, the support is uniform
    without replacement and the noise is ``CN(0, sigma2)``. The draw is a
    pure function of ``(config.master_seed, trial_seed)``.
    """
    N, M, L, S = config.N, config.M, config.L, config.S
    if S > N:
        raise ValueError(f"S={S} exceeds N={N}")
    rng = _rng(config.master_seed, trial_seed)

    support = np.sort(rng.choice(N, size=S, replace=False))
    activity = np.zeros(N, dtype=np.int8)
    activity[support] = 1
    theta0 = np.zeros((N, M), dtype=complex)
    theta0[support] = complex_normal(rng, (S, M))

    Q = complex_normal(rng, (L, N))
    if config.sigma2 > 0:
        noise = complex_normal(rng, (L, M), config.sigma2)
    else:
        noise = np.zeros((L, M), dtype=complex)
    Y = Q @ theta0 + noise
    return (
        GroundTruth(theta0=theta0, support=support, activity=activity),
        Observation(Y=Y, Q=Q, noise_sigma2=float(config.sigma2), noise=noise),
    )


def complex_to_real_operator(Q: np.ndarray) -> np.ndarray:
    """Real ``2L x 2N`` representation ``[[Re Q, -Im Q], [Im Q, Re Q]]``."""
    Q = np.asarray(Q)
    re, im = Q.real, Q.imag
    return np.block([[re, -im], [im, re]]).astype(float)


def complex_to_real_stack(X: np.ndarray) -> np.ndarray:
    """Stack ``[Re X; Im X]``; a vector is treated as one column."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    return np.vstack([X.real, X.imag]).astype(float)


def real_to_complex_stack(Xt: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complex_to_real_stack`."""
    Xt = np.asarray(Xt, dtype=float)
    if Xt.ndim == 1:
        Xt = Xt[:, None]
    if Xt.shape[0] % 2:
        raise ValueError(f"need an even number of rows, got {Xt.shape[0]}")
    n = Xt.shape[0] // 2
    return Xt[:n] + 1j * Xt[n:]


def gaussian_real_sensing(L: int, N: int, variance_per_entry: float = 0.5,
                          seed: int = 0) -> np.ndarray:
    """I.i.d. real Gaussian ``2L x 2N`` sensing matrix."""
    if variance_per_entry < 0:
        raise ValueError("variance must be non-negative")
    rng = np.random.default_rng(seed)
    return np.sqrt(variance_per_entry) * rng.standard_normal((2 * L, 2 * N))


def row_orthonormalize(Qb: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Orthonormalise the rows of ``Qb`` while keeping its row space.

    Uses a QR factorisation of ``Qb.T``; rows whose pivot falls below
    ``rtol`` times the leading pivot raise :class:`RankDeficientError`.
    """
    Qb = np.asarray(Qb, dtype=float)
    m, n = Qb.shape
    if m > n:
        raise RankDeficientError(f"{m} rows cannot be orthonormal in dimension {n}")
    q, r = np.linalg.qr(Qb.T, mode="reduced")
    piv = np.abs(np.diag(r))
    if piv.size and (piv.max() == 0 or piv.min() < rtol * piv.max()):
        raise RankDeficientError("sensing matrix is rank deficient")
    # fix signs so that the map is deterministic
    signs = np.sign(np.diag(r))
    return (q * signs).T

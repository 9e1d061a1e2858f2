"""Seeded Monte Carlo sweeps that regenerate each experiment as CSV tables.

Every trial draws its instance from
``trial_seed(master_seed, trial, point_index(S, L))``, so results do not
depend on grid layout, execution order or worker count. Smoothing values do
not enter the seed: the same instances are reused across ``mu`` (common
random numbers).

Each runner returns an :class:`ExperimentResult` with a per-point
``summary`` table, a per-trial ``trials`` table and, for the convergence
study, a ``trace`` table. :func:`write_result` stores them as
``<output>``, ``<stem>.trials.csv`` and ``<stem>.trace.csv``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
from scipy.optimize import isotonic_regression

from . import detect, model, solvers, statdim

__all__ = [
    "ConfigError",
    "SweepSpec",
    "TrialRecord",
    "ExperimentResult",
    "EXPERIMENTS",
    "PRESETS",
    "point_index",
    "transition_point",
    "run_phase_map",
    "run_noisy_error",
    "run_smoothing_map",
    "run_convergence",
    "run_error_vs_mu",
    "run_embedding_compare",
    "run_statdim_table",
    "run_experiment",
    "load_spec",
    "write_result",
]

THREADS_ENV = "JADE_NUM_THREADS"
WALL_TIME_COLUMNS = ("wall_time_s", "elapsed_ns")


class ConfigError(ValueError):
    """Invalid or unreadable sweep configuration."""


@dataclass(frozen=True)
class SweepSpec:
    """One experiment and its parameter grids.

    ``sigma2`` is the complex per-entry noise variance. ``solver`` picks the
    projected-gradient reference (``"reference"``) or the smoothed dual
    method (``"smoothed"``) for phase maps; ``phase_mu`` is the smoothing
    used by the latter.
    """

    experiment: str
    N: int = 100
    M: int = 2
    S_values: tuple = (10,)
    L_values: tuple = tuple(range(10, 61))
    mu_values: tuple = (0.0,)
    trials: int = 50
    master_seed: int = 0
    output: str | None = None
    sigma2: float = 0.0
    solver: str = "reference"
    ensemble: str = "structured"
    success_tol: float = 1e-5
    eta: float = 0.05
    gamma_stop: float = 1e-3
    max_iter: int = 100_000
    pg_tol: float = 1e-10
    pg_max_iter: int = 5000
    phase_mu: float = 1e-3
    z_step_variant: str = "lipschitz_scaled"
    sigma_real: float = statdim.DEFAULT_SIGMA_REAL
    rho_values: tuple = (0.05, 0.1, 0.14, 0.2)
    M_values: tuple = (1, 2, 3, 4)
    include_oracle: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        for name in ("S_values", "L_values", "mu_values", "rho_values", "M_values"):
            val = getattr(self, name)
            if isinstance(val, (int, float)):
                val = (val,)
            object.__setattr__(self, name, tuple(val))
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.N < 1 or self.M < 1:
            raise ConfigError("N and M must be positive")
        if self.experiment != "statdim_table" and any(s > self.N or s < 0
                                                      for s in self.S_values):
            raise ConfigError("every S must lie in [0, N]")
        if any(L < 1 for L in self.L_values):
            raise ConfigError("every L must be >= 1")
        if any(mu < 0 for mu in self.mu_values):
            raise ConfigError("mu values must be non-negative")
        if self.solver not in ("reference", "smoothed"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.ensemble not in ("structured", "gaussian"):
            raise ConfigError(f"unknown ensemble {self.ensemble!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' key")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in dataclasses.asdict(self).items()}

    def config_hash(self) -> str:
        payload = {k: v for k, v in self.to_dict().items() if k != "output"}
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class TrialRecord:
    experiment: str
    coords: dict
    trial: int
    seed: int
    success: bool | None = None
    R: float = math.nan
    R_hat: float = math.nan
    sq_error: float = math.nan
    iterations: int = 0
    converged: bool = True
    wall_time_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        row = {"experiment": self.experiment, **self.coords, "trial": self.trial,
               "seed": self.seed,
               "success": "" if self.success is None else int(self.success),
               "R": self.R, "R_hat": self.R_hat, "sq_error": self.sq_error,
               "iterations": self.iterations, "converged": int(self.converged)}
        row.update(self.extra)
        row["wall_time_s"] = self.wall_time_s
        return row


@dataclass
class ExperimentResult:
    spec: SweepSpec
    summary: list
    trials: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    def column(self, name: str, **where) -> np.ndarray:
        rows = [r for r in self.summary if all(r[k] == v for k, v in where.items())]
        return np.array([r[name] for r in rows], dtype=float)


# ---------------------------------------------------------------- utilities

def point_index(S: int, L: int) -> int:
    """Grid-independent index of a sweep point."""
    return int(S) * (1 << 20) + int(L)


def _n_workers() -> int:
    try:
        return max(int(os.environ.get(THREADS_ENV, "1")), 1)
    except ValueError:
        return 1


def _map(fn: Callable, tasks: Sequence) -> list:
    workers = _n_workers()
    if workers == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(len(tasks) // (4 * workers), 1)))


def transition_point(L_values: Sequence[float], probs: Sequence[float],
                     level: float = 0.5) -> float:
    """Signature length where the success curve first reaches ``level``.

    The empirical curve is first made monotone by isotonic regression, then
    linearly interpolated. Returns NaN when the level is never reached.
    """
    L = np.asarray(L_values, dtype=float)
    order = np.argsort(L)
    L = L[order]
    p = isotonic_regression(np.asarray(probs, dtype=float)[order]).x
    idx = np.flatnonzero(p >= level)
    if idx.size == 0:
        return math.nan
    i = int(idx[0])
    if i == 0:
        return float(L[0])
    return float(L[i - 1] + (level - p[i - 1]) / (p[i] - p[i - 1]) * (L[i] - L[i - 1]))


def _config(spec: SweepSpec, S: int, L: int, sigma2: float | None = None) -> model.SystemConfig:
    return model.SystemConfig(N=spec.N, M=spec.M, L=L, S=S,
                              sigma2=spec.sigma2 if sigma2 is None else sigma2,
                              master_seed=spec.master_seed, gamma_stop=spec.gamma_stop)


def _moments(spec: SweepSpec) -> tuple[float, float]:
    return statdim.gaussian_moments(spec.M, spec.sigma_real)


def _epsilon(spec: SweepSpec, S: int, L: int, mu: float) -> tuple[float, str]:
    """Constraint radius from the smoothed bound, or the plain bound when infeasible."""
    a_bar, b_bar = _moments(spec)
    rho = S / spec.N
    sigma2_real = spec.sigma2 / 2.0
    delta = statdim.statdim_smoothed(rho, spec.M, spec.N, mu, a_bar, b_bar).delta
    try:
        return statdim.epsilon_rule(sigma2_real, L, spec.M, delta), "smoothed"
    except statdim.InfeasibleEpsilonError:
        delta = statdim.statdim_plain(rho, spec.M, spec.N).delta
        return statdim.epsilon_rule(sigma2_real, L, spec.M, delta), "plain"


def _sensing(spec: SweepSpec, obs: model.Observation, seed: int, L: int,
             ensemble: str, orthonormal: bool = False) -> np.ndarray:
    if ensemble == "structured":
        Q = model.complex_to_real_operator(obs.Q)
    else:
        sub = int(np.random.SeedSequence([spec.master_seed, seed, 1]).generate_state(1)[0])
        Q = model.gaussian_real_sensing(L, spec.N, 0.5, sub)
    if orthonormal:
        Q = model.row_orthonormalize(Q)
    return Q


# ------------------------------------------------------------ trial workers

def _recovery_trial(args) -> TrialRecord:
    spec, S, L, mu, trial, ensemble, solver = args
    seed = model.trial_seed(spec.master_seed, trial, point_index(S, L))
    t0 = time.perf_counter()
    truth, obs = model.generate_system(_config(spec, S, L, sigma2=0.0), seed)
    Q = _sensing(spec, obs, seed, L, ensemble)
    theta0 = model.complex_to_real_stack(truth.theta0)
    Y = Q @ theta0
    if solver == "reference":
        r = solvers.group_l21(theta0) + 0.5 * mu * float(np.sum(theta0**2))
        est = solvers.solve_pb_projected_gradient(Q, Y, r, tol=spec.pg_tol,
                                                  max_iter=spec.pg_max_iter, mu=mu,
                                                  accelerated=True)
    else:
        opts = solvers.SolverOptions(mu=mu if mu > 0 else spec.phase_mu,
                                     epsilon=1e-6 * float(np.linalg.norm(Y)),
                                     gamma_stop=spec.gamma_stop, max_iter=spec.max_iter,
                                     z_step_variant=spec.z_step_variant)
        est = solvers.solve_smoothed_dual(Q, Y, opts)
    err = float(np.linalg.norm(est.theta_hat - theta0))
    return TrialRecord(
        experiment=spec.experiment,
        coords={"ensemble": ensemble, "mu": mu, "S": S, "L": L},
        trial=trial, seed=seed,
        success=detect.recovery_success(est.theta_hat, theta0, spec.success_tol),
        R=detect.prediction_error(Q, est.theta_hat, theta0, L, spec.M),
        R_hat=detect.empirical_error(Q, est.theta_hat, Y, L, spec.M),
        sq_error=err**2, iterations=est.iterations, converged=est.converged,
        wall_time_s=time.perf_counter() - t0)


def _noisy_trial(args) -> TrialRecord:
    spec, S, L, trial = args
    seed = model.trial_seed(spec.master_seed, trial, point_index(S, L))
    t0 = time.perf_counter()
    truth, obs = model.generate_system(_config(spec, S, L), seed)
    Q = _sensing(spec, obs, seed, L, "gaussian", orthonormal=True)
    theta0 = model.complex_to_real_stack(truth.theta0)
    Y = Q @ theta0 + model.complex_to_real_stack(obs.noise)
    est = solvers.solve_pb_projected_gradient(Q, Y, solvers.group_l21(theta0), tol=spec.pg_tol,
                                              max_iter=spec.pg_max_iter, q_norm=1.0,
                                              accelerated=True)
    return TrialRecord(
        experiment=spec.experiment, coords={"S": S, "L": L}, trial=trial, seed=seed,
        R=detect.prediction_error(Q, est.theta_hat, theta0, L, spec.M),
        R_hat=detect.empirical_error(Q, est.theta_hat, Y, L, spec.M),
        sq_error=float(np.sum((est.theta_hat - theta0) ** 2)),
        iterations=est.iterations, converged=est.converged,
        wall_time_s=time.perf_counter() - t0)


def _smoothed_trial(args) -> tuple[TrialRecord, list]:
    spec, S, L, mu, trial, keep_trace = args
    seed = model.trial_seed(spec.master_seed, trial, point_index(S, L))
    t0 = time.perf_counter()
    truth, obs = model.generate_system(_config(spec, S, L), seed)
    Q = model.complex_to_real_operator(obs.Q)
    Y = model.complex_to_real_stack(obs.Y)
    theta0 = model.complex_to_real_stack(truth.theta0)
    eps, source = _epsilon(spec, S, L, mu)
    opts = solvers.SolverOptions(mu=mu, epsilon=eps, gamma_stop=spec.gamma_stop,
                                 max_iter=spec.max_iter, z_step_variant=spec.z_step_variant,
                                 record_trace=keep_trace)
    est = solvers.solve_smoothed_dual(Q, Y, opts)
    extra = {"epsilon": eps, "epsilon_source": source, "final_gap": est.final_gap}
    if spec.include_oracle:
        ref = solvers.solve_pb_projected_gradient(Q, Y, solvers.group_l21(theta0),
                                                  tol=spec.pg_tol, max_iter=spec.pg_max_iter,
                                                  accelerated=True)
        extra["oracle_sq_error"] = float(np.sum((ref.theta_hat - theta0) ** 2))
    rec = TrialRecord(
        experiment=spec.experiment, coords={"mu": mu, "S": S, "L": L}, trial=trial, seed=seed,
        R=detect.prediction_error(Q, est.theta_hat, theta0, L, spec.M),
        R_hat=detect.empirical_error(Q, est.theta_hat, Y, L, spec.M),
        sq_error=float(np.sum((est.theta_hat - theta0) ** 2)),
        iterations=est.iterations, converged=est.converged,
        wall_time_s=time.perf_counter() - t0, extra=extra)
    trace = []
    if keep_trace:
        trace = [{"mu": mu, "trial": trial, "iter": it, "gap": gap, "dual_objective": dual,
                  "elapsed_ns": ns} for it, gap, dual, ns in est.trace]
    return rec, trace


# ------------------------------------------------------------------ runners

def _phase_summary(spec: SweepSpec, records: list, mu: float, ensemble: str,
                   a_bar: float, b_bar: float) -> list:
    rows = []
    for S in spec.S_values:
        pred = statdim.predict_transition(spec.N, spec.M, S, spec.eta) if 0 < S < spec.N else None
        if 0 < S < spec.N:
            smooth = statdim.statdim_smoothed(S / spec.N, spec.M, spec.N, mu, a_bar, b_bar)
        else:
            smooth = statdim.statdim_plain(S / spec.N, spec.M, spec.N)
        for L in spec.L_values:
            recs = [r for r in records if r.coords["S"] == S and r.coords["L"] == L
                    and r.coords["mu"] == mu and r.coords["ensemble"] == ensemble]
            succ = sum(bool(r.success) for r in recs)
            rows.append({
                "ensemble": ensemble, "mu": mu, "S": S, "L": L, "trials": len(recs),
                "successes": succ, "success_prob": succ / len(recs),
                "nonconverged": sum(not r.converged for r in recs),
                "delta_seq": smooth.delta_seq,
                "L_fail_pred": pred.L_fail if pred else "",
                "L_success_pred": pred.L_success if pred else "",
            })
    return rows


def _recovery_records(spec: SweepSpec, mus: Sequence[float], ensemble: str,
                      solver: str) -> list:
    tasks = [(spec, S, L, mu, t, ensemble, solver)
             for mu in mus for S in spec.S_values for L in spec.L_values
             for t in range(spec.trials)]
    return _map(_recovery_trial, tasks)


def run_phase_map(spec: SweepSpec) -> ExperimentResult:
    """Noiseless success probability over the ``(S, L)`` grid."""
    mu = 0.0 if spec.solver == "reference" else spec.phase_mu
    records = _recovery_records(spec, [mu], spec.ensemble, spec.solver)
    a_bar, b_bar = _moments(spec)
    summary = _phase_summary(spec, records, mu, spec.ensemble, a_bar, b_bar)
    return ExperimentResult(spec, summary, records)


def run_smoothing_map(spec: SweepSpec) -> ExperimentResult:
    """Phase maps of the smoothed estimator, one per ``mu``.

    The reference solver projects onto the sublevel set of the smoothed
    regularizer at the ground truth, which has the same exact-recovery
    condition as the smoothed equality-constrained problem.
    """
    records = _recovery_records(spec, spec.mu_values, spec.ensemble, spec.solver)
    a_bar, b_bar = _moments(spec)
    summary = []
    for mu in spec.mu_values:
        summary += _phase_summary(spec, records, mu, spec.ensemble, a_bar, b_bar)
    return ExperimentResult(spec, summary, records)


def run_embedding_compare(spec: SweepSpec) -> ExperimentResult:
    """Phase maps for the complex-structured and the i.i.d. Gaussian ensemble."""
    records = []
    a_bar, b_bar = _moments(spec)
    per = {}
    for ensemble in ("structured", "gaussian"):
        recs = _recovery_records(spec, [0.0], ensemble, "reference")
        records += recs
        per[ensemble] = _phase_summary(spec, recs, 0.0, ensemble, a_bar, b_bar)
    summary = []
    for s_row, g_row in zip(per["structured"], per["gaussian"]):
        summary.append({"S": s_row["S"], "L": s_row["L"], "trials": s_row["trials"],
                        "success_prob_structured": s_row["success_prob"],
                        "success_prob_gaussian": g_row["success_prob"],
                        "delta_seq": s_row["delta_seq"]})
    return ExperimentResult(spec, summary, records)


def run_noisy_error(spec: SweepSpec) -> ExperimentResult:
    """Normalised prediction error of the constrained estimator versus ``L``.

    Ratios are reported against the real per-component noise variance
    (``sigma2 / 2``) and against the complex per-entry variance.
    """
    tasks = [(spec, S, L, t) for S in spec.S_values for L in spec.L_values
             for t in range(spec.trials)]
    records = _map(_noisy_trial, tasks)
    # ratios are undefined without noise; mean_R is still reported
    s2_real = spec.sigma2 / 2.0 if spec.sigma2 > 0 else math.nan
    s2_complex = spec.sigma2 if spec.sigma2 > 0 else math.nan
    summary = []
    for S in spec.S_values:
        delta_seq = statdim.statdim_plain(S / spec.N, spec.M, spec.N).delta_seq
        for L in spec.L_values:
            recs = [r for r in records if r.coords["S"] == S and r.coords["L"] == L]
            R = np.array([r.R for r in recs])
            Rh = np.array([r.R_hat for r in recs])
            pred = statdim.predict_noisy_error(L, delta_seq)
            summary.append({
                "S": S, "L": L, "trials": len(recs),
                "mean_R": R.mean(),
                "R_over_sigma2_real": R.mean() / s2_real,
                "R_over_sigma2_real_se": R.std(ddof=1) / math.sqrt(len(R)) / s2_real
                if len(R) > 1 else math.nan,
                "R_over_sigma2_complex": R.mean() / s2_complex,
                "Rhat_over_sigma2_real": Rh.mean() / s2_real,
                "pred_worst_case_ratio": pred.worst_case_ratio,
                "pred_empirical_limit_ratio": pred.empirical_limit_ratio,
                "delta_seq": delta_seq,
                "nonconverged": sum(not r.converged for r in recs),
            })
    return ExperimentResult(spec, summary, records)


def _smoothed_runs(spec: SweepSpec, keep_trace: bool):
    S = spec.S_values[0]
    L = spec.L_values[0]
    tasks = [(spec, S, L, mu, t, keep_trace) for mu in spec.mu_values
             for t in range(spec.trials)]
    out = _map(_smoothed_trial, tasks)
    records = [rec for rec, _ in out]
    trace = [row for _, rows in out for row in rows]
    return S, L, records, trace


def run_convergence(spec: SweepSpec) -> ExperimentResult:
    """Feasibility-gap traces of the dual method for each ``mu``."""
    S, L, records, trace = _smoothed_runs(spec, keep_trace=True)
    summary = []
    for mu in spec.mu_values:
        recs = [r for r in records if r.coords["mu"] == mu]
        summary.append({
            "mu": mu, "S": S, "L": L, "trials": len(recs),
            "mean_iterations": float(np.mean([r.iterations for r in recs])),
            "max_iterations": max(r.iterations for r in recs),
            "converged": sum(r.converged for r in recs),
            "epsilon": recs[0].extra["epsilon"],
            "epsilon_source": recs[0].extra["epsilon_source"],
        })
    return ExperimentResult(spec, summary, records, trace)


def run_error_vs_mu(spec: SweepSpec) -> ExperimentResult:
    """Mean squared estimation error of the smoothed estimator per ``mu``."""
    S, L, records, _ = _smoothed_runs(spec, keep_trace=False)
    a_bar, b_bar = _moments(spec)
    summary = []
    for mu in spec.mu_values:
        recs = [r for r in records if r.coords["mu"] == mu]
        err = np.array([r.sq_error for r in recs])
        row = {
            "mu": mu, "S": S, "L": L, "trials": len(recs),
            "mean_sq_error": err.mean(),
            "sq_error_se": err.std(ddof=1) / math.sqrt(len(err)) if len(err) > 1 else math.nan,
            "mean_R": float(np.mean([r.R for r in recs])),
            "mean_iterations": float(np.mean([r.iterations for r in recs])),
            "converged": sum(r.converged for r in recs),
            "epsilon": recs[0].extra["epsilon"],
            "epsilon_source": recs[0].extra["epsilon_source"],
            "delta_seq_smoothed": statdim.statdim_smoothed(
                S / spec.N, spec.M, spec.N, mu, a_bar, b_bar).delta_seq,
        }
        if spec.include_oracle:
            row["oracle_mean_sq_error"] = float(np.mean([r.extra["oracle_sq_error"]
                                                         for r in recs]))
        summary.append(row)
    return ExperimentResult(spec, summary, records)


def run_statdim_table(spec: SweepSpec) -> ExperimentResult:
    """Closed-form bounds over ``rho_values x M_values x mu_values`` (per device)."""
    rows = statdim.statdim_table(spec.rho_values, spec.M_values, spec.mu_values,
                                 N=spec.N, sigma_real=spec.sigma_real)
    return ExperimentResult(spec, rows)


EXPERIMENTS: dict[str, Callable[[SweepSpec], ExperimentResult]] = {
    "phase_map": run_phase_map,
    "noisy_error": run_noisy_error,
    "smoothing_map": run_smoothing_map,
    "convergence": run_convergence,
    "error_vs_mu": run_error_vs_mu,
    "embedding_compare": run_embedding_compare,
    "statdim_table": run_statdim_table,
}


def run_experiment(spec: SweepSpec) -> ExperimentResult:
    return EXPERIMENTS[spec.experiment](spec)


# ------------------------------------------------------------------ presets

_FIG2 = dict(N=100, M=2, S_values=(10,), L_values=tuple(range(10, 61)), trials=50)

PRESETS: dict[str, dict[str, Any]] = {
    "fig2": dict(experiment="phase_map", **_FIG2),
    "fig2_map": dict(experiment="phase_map", N=100, M=2, S_values=tuple(range(2, 31, 2)),
                     L_values=tuple(range(4, 81, 2)), trials=50),
    "fig4b": dict(experiment="noisy_error", N=300, M=3, S_values=(42,),
                  L_values=tuple(range(40, 201, 10)), sigma2=1e-3, trials=100),
    "fig4b_scaled": dict(experiment="noisy_error", N=150, M=3, S_values=(21,),
                         L_values=tuple(range(20, 101, 5)), sigma2=1e-3, trials=50),
    "fig5": dict(experiment="smoothing_map", N=100, M=2, S_values=(10,),
                 L_values=tuple(range(10, 71, 2)), mu_values=(0.0, 1e-3, 1e-2, 1e-1, 1.0),
                 trials=50),
    "fig6": dict(experiment="convergence", N=2000, M=10, S_values=(100,), L_values=(500,),
                 sigma2=0.01, mu_values=(0.01, 0.1, 1.0), trials=1),
    "fig6_scaled": dict(experiment="convergence", N=500, M=5, S_values=(25,), L_values=(125,),
                        sigma2=0.01, mu_values=(0.01, 0.1, 1.0), trials=1),
    "fig7": dict(experiment="error_vs_mu", N=2000, M=10, S_values=(100,), L_values=(500,),
                 sigma2=0.01, mu_values=(0.01, 0.03, 0.1, 0.3, 1.0), trials=300),
    "fig7_scaled": dict(experiment="error_vs_mu", N=500, M=5, S_values=(25,), L_values=(125,),
                        sigma2=0.01, mu_values=(0.01, 0.03, 0.1, 0.3, 1.0), trials=50),
    "embedding": dict(experiment="embedding_compare", **_FIG2),
    "statdim": dict(experiment="statdim_table", N=1, rho_values=(0.05, 0.1, 0.14, 0.2),
                    M_values=(1, 2, 3, 4, 8), mu_values=(0.0, 0.01, 0.1, 1.0)),
}


def load_spec(path: str | os.PathLike | None = None, preset: str | None = None,
              **overrides) -> SweepSpec:
    """Build a spec from a preset and/or a JSON file, then apply overrides."""
    data: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        data.update(PRESETS[preset])
    if path is not None:
        try:
            with open(path) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        data.update(loaded)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return SweepSpec.from_dict(data)


# --------------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _write_table(path: Path, rows: list, spec: SweepSpec, table: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    columns: list = []
    for row in rows:
        columns += [k for k in row if k not in columns]
    with open(path, "w", newline="") as fh:
        fh.write(f"# experiment={spec.experiment} table={table} "
                 f"config_sha256={spec.config_hash()} master_seed={spec.master_seed}\n")
        writer = csv.DictWriter(fh, fieldnames=columns, restval="", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})


def write_result(result: ExperimentResult, output: str | os.PathLike | None = None) -> list[Path]:
    """Write the summary (and trial/trace tables) as CSV; return the paths."""
    output = output or result.spec.output or f"{result.spec.experiment}.csv"
    out = Path(output)
    stem = out.with_suffix("")
    written = [out]
    _write_table(out, result.summary, result.spec, "summary")
    if result.trials:
        p = Path(f"{stem}.trials.csv")
        _write_table(p, [r.to_row() for r in result.trials], result.spec, "trials")
        written.append(p)
    if result.trace:
        p = Path(f"{stem}.trace.csv")
        _write_table(p, result.trace, result.spec, "trace")
        written.append(p)
    return written

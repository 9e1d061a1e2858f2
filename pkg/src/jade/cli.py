"""Command-line front end: ``jade {statdim, predict, solve, make-instance, experiment}``.

Exit codes: 0 on success, 1 on a configuration or input error, 2 when
``solve`` stops without reaching the feasibility tolerance.

Instance files for ``solve`` are plain text. ``#`` starts a comment. The
first data line holds three integers ``rows q_cols y_cols``; then follow
``rows * q_cols`` values of the real sensing matrix and ``rows * y_cols``
values of the real observation, both row-major and whitespace separated.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import harness, model, solvers, statdim

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2


class InputError(ValueError):
    pass


def read_instance(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse an instance file into ``(Qt, Yt)``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read instance {path}: {exc.strerror}") from exc
    tokens = []
    for line in text.splitlines():
        tokens += line.split("#", 1)[0].split()
    if len(tokens) < 3:
        raise InputError("instance header needs 'rows q_cols y_cols'")
    try:
        rows, qc, yc = (int(t) for t in tokens[:3])
        vals = np.array([float(t) for t in tokens[3:]])
    except ValueError as exc:
        raise InputError(f"malformed instance: {exc}") from exc
    if min(rows, qc, yc) < 1:
        raise InputError("dimensions must be positive")
    if vals.size != rows * (qc + yc):
        raise InputError(f"expected {rows * (qc + yc)} values, found {vals.size}")
    if qc % 2:
        raise InputError("q_cols must be even (real embedding of a complex operator)")
    Qt = vals[:rows * qc].reshape(rows, qc)
    Yt = vals[rows * qc:].reshape(rows, yc)
    return Qt, Yt


def write_instance(path: str | Path, Qt: np.ndarray, Yt: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(f"{Qt.shape[0]} {Qt.shape[1]} {Yt.shape[1]}\n")
        np.savetxt(fh, Qt, fmt="%.17g")
        np.savetxt(fh, Yt, fmt="%.17g")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# --------------------------------------------------------------- subcommands

def _cmd_statdim(args) -> int:
    if args.table:
        rows = statdim.statdim_table(args.rho, args.M, args.mu, N=args.N,
                                     sigma_real=args.sigma_real)
        cols = ["rho", "M", "mu", "tau_star", "delta", "delta_seq"]
        out = open(args.output, "w", newline="") if args.output else sys.stdout
        try:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(cols)
            w.writerows([[repr(float(r[c])) if c not in ("M",) else r[c] for c in cols]
                         for r in rows])
        finally:
            if args.output:
                out.close()
        return EXIT_OK
    for M in args.M:
        a_bar, b_bar = statdim.gaussian_moments(M, args.sigma_real)
        for rho in args.rho:
            for mu in args.mu:
                res = statdim.statdim_smoothed(rho, M, args.N, mu, a_bar, b_bar)
                print(f"rho={rho:g} M={M} N={args.N} mu={mu:g} tau_star={res.tau_star:.6f} "
                      f"delta={res.delta:.6f} delta_seq={res.delta_seq:.6f}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    pred = statdim.predict_transition(args.N, args.M, args.S, args.eta)
    print(f"delta_seq={pred.delta_seq:.6f} L_fail={pred.L_fail} L_success={pred.L_success} "
          f"eta={pred.eta:g}")
    if args.L is not None:
        noisy = statdim.predict_noisy_error(args.L, pred.delta_seq)
        print(f"L={args.L} worst_case_ratio={noisy.worst_case_ratio:.6f} "
              f"empirical_limit_ratio={noisy.empirical_limit_ratio:.6f}")
    if args.gamma1 is not None:
        a_bar, b_bar = statdim.gaussian_moments(args.M, args.sigma_real)
        L = statdim.plan_sequence_length(args.mu, args.gamma1, args.S / args.N, args.M,
                                         args.N, a_bar, b_bar)
        print(f"planned_L={L} mu={args.mu:g} gamma1={args.gamma1:g}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    Qt, Yt = read_instance(args.instance)
    opts = solvers.SolverOptions(mu=args.mu, epsilon=args.epsilon, gamma_stop=args.gamma_stop,
                                 max_iter=args.max_iter, z_step_variant=args.variant,
                                 record_trace=True)
    est = solvers.solve_smoothed_dual(Qt, Yt, opts)
    prefix = Path(args.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    theta_path = prefix.with_name(prefix.name + ".theta.csv")
    trace_path = prefix.with_name(prefix.name + ".trace.csv")
    _write_csv(theta_path, [f"col{j}" for j in range(est.theta_hat.shape[1])],
               [[repr(float(v)) for v in row] for row in est.theta_hat])
    _write_csv(trace_path, ["iter", "gap", "dual_objective", "elapsed_ns"],
               [[int(it), repr(gap), repr(dual), int(ns)] for it, gap, dual, ns in est.trace])
    status = "converged" if est.converged else "not converged"
    print(f"{status}: iterations={est.iterations} final_gap={est.final_gap:.3e}")
    print(f"wrote {theta_path} and {trace_path}")
    return EXIT_OK if est.converged else EXIT_NONCONVERGED


def _cmd_make_instance(args) -> int:
    cfg = model.SystemConfig(N=args.N, M=args.M, L=args.L, S=args.S, sigma2=args.sigma2,
                             master_seed=args.seed)
    truth, obs = model.generate_system(cfg, model.trial_seed(args.seed, 0))
    write_instance(args.output, model.complex_to_real_operator(obs.Q),
                   model.complex_to_real_stack(obs.Y))
    print(f"wrote {args.output} (active devices: {' '.join(map(str, truth.support))})")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    if args.config is None and args.preset is None:
        raise harness.ConfigError("give --config FILE or --preset NAME")
    spec = harness.load_spec(args.config, args.preset, master_seed=args.seed,
                             trials=args.trials, output=args.output)
    if spec.experiment != args.name:
        raise harness.ConfigError(
            f"config describes experiment {spec.experiment!r}, not {args.name!r}")
    result = harness.run_experiment(spec)
    for path in harness.write_result(result):
        print(f"wrote {path}")
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jade", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("statdim", help="statistical-dimension bounds")
    s.add_argument("--rho", type=float, nargs="+", required=True)
    s.add_argument("--M", type=int, nargs="+", required=True)
    s.add_argument("--N", type=int, default=1)
    s.add_argument("--mu", type=float, nargs="+", default=[0.0])
    s.add_argument("--sigma-real", type=float, default=statdim.DEFAULT_SIGMA_REAL)
    s.add_argument("--table", action="store_true", help="emit CSV instead of text")
    s.add_argument("--output", help="CSV path for --table (default stdout)")
    s.set_defaults(func=_cmd_statdim)

    s = sub.add_parser("predict", help="phase-transition and noisy-error predictions")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--S", type=int, required=True)
    s.add_argument("--eta", type=float, default=0.05)
    s.add_argument("--L", type=int)
    s.add_argument("--gamma1", type=float, help="target normalised error for planning L")
    s.add_argument("--mu", type=float, default=0.0)
    s.add_argument("--sigma-real", type=float, default=statdim.DEFAULT_SIGMA_REAL)
    s.set_defaults(func=_cmd_predict)

    s = sub.add_parser("solve", help="run the smoothed dual solver on an instance file")
    s.add_argument("instance")
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--gamma-stop", type=float, default=1e-3)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--variant", choices=("lipschitz_scaled", "momentum_scaled"),
                   default="lipschitz_scaled")
    s.add_argument("--output", default="solution", help="output prefix")
    s.set_defaults(func=_cmd_solve)

    s = sub.add_parser("make-instance", help="write a random instance file")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--S", type=int, required=True)
    s.add_argument("--sigma2", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    s.set_defaults(func=_cmd_make_instance)

    s = sub.add_parser("experiment", help="run a seeded sweep and write CSV")
    s.add_argument("name", choices=sorted(harness.EXPERIMENTS))
    s.add_argument("--config", help="JSON sweep config")
    s.add_argument("--preset", choices=sorted(harness.PRESETS))
    s.add_argument("--seed", type=int, help="override master_seed")
    s.add_argument("--trials", type=int, help="override trials per point")
    s.add_argument("--output", help="override output CSV path")
    s.set_defaults(func=_cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (harness.ConfigError, InputError, statdim.InfeasibleEpsilonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

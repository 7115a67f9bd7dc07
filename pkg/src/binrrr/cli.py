"""Command-line interface: ``binrrr {simulate,fit,predict,cv,bound}``.

Exit codes: 0 success, 2 usage or input error, 3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .bounds import BOUNDS, BoundInputs, optimize_varsigma
from .datagen import SETTINGS, SimSetting, gen_instance
from .estimator import cross_validate, fit
from .exceptions import DivergenceError, InvalidInputError, NumericalError
from .experiment import METHODS, ExperimentResult, resolve_lambda, run_replicated_experiment, run_split_experiment
from .model import predict
from .samplers import SamplerConfig

RESULT_COLUMNS = [
    "setting",
    "method",
    "mean_error_pct",
    "std_error_pct",
    "reps",
    "std_defined",
    "mean_acceptance",
    "mean_step_size",
]
_BOOL_KEYS = {"no_adapt", "optimize_varsigma"}


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _methods(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    for name in names:
        if name not in METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return names


def _add_sampler_args(p: argparse.ArgumentParser, lam_default: str = "m") -> None:
    g = p.add_argument_group("sampler")
    g.add_argument("--lambda", dest="lam", default=lam_default,
                   help="temperature: a number, or m | full | missing | slow (default: %(default)s)")
    g.add_argument("--tau", type=float, default=1.0)
    g.add_argument("--step-size", type=float, default=0.01, help="initial step size h")
    g.add_argument("--iterations", type=int, default=10000)
    g.add_argument("--burn-in", type=int, default=3000)
    g.add_argument("--thinning", type=int, default=1)
    g.add_argument("--loss", choices=["hinge", "logistic"], default="hinge")
    g.add_argument("--algorithm", choices=["lmc", "mala"], default="mala")
    g.add_argument("--no-adapt", action="store_true", help="keep the step size fixed during burn-in")
    g.add_argument("--target-acceptance", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=1, help="worker processes for repetitions / folds")


def _add_response_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--design", required=True, help="covariate CSV (n x p)")
    p.add_argument("--responses", required=True, help="response CSV (n x q)")
    p.add_argument("--coding", choices=["native", "zero-one", "threshold"], default="native")
    p.add_argument("--threshold", type=float, default=0.0, help="cut-off for --coding threshold")
    p.add_argument("--missing-token", default="NA")


def _sampler_config(args) -> SamplerConfig:
    return SamplerConfig(
        lam=1.0,
        tau=args.tau,
        step_size=args.step_size,
        iterations=args.iterations,
        burn_in=args.burn_in,
        thinning=args.thinning,
        seed=args.seed,
        loss=args.loss,
        algorithm=args.algorithm,
        adapt_step=not args.no_adapt,
        target_acceptance=args.target_acceptance,
    )


def _load_data(args):
    X = io.read_design_csv(args.design)
    Y = io.read_response_csv(args.responses, args.coding, args.threshold, args.missing_token)
    if X.shape[0] != Y.shape[0]:
        raise InvalidInputError(f"design has {X.shape[0]} rows but responses have {Y.shape[0]}")
    return X, Y


def _write_experiment(out: Path, results: list[ExperimentResult]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rows = [row for res in results for row in res.rows()]
    io.write_records_csv(out / "results.csv", rows, RESULT_COLUMNS)
    raw = [
        {"setting": res.label, "rep": r, "method": method, "error": outcome.errors[method]}
        for res in results
        for r, outcome in enumerate(res.raw)
        for method in res.methods
    ]
    io.write_records_csv(out / "raw_errors.csv", raw, ["setting", "rep", "method", "error"])
    for res in results:
        for method in res.methods:
            tag = f"{res.label}_{method}".replace("/", "_").replace("=", "")
            with open(out / f"plot_{tag}.dat", "w", encoding="utf-8", newline="") as fh:
                fh.write(f"# rep error_pct ({res.label}, {method})\n")
                for r, e in enumerate(res.errors(method)):
                    fh.write(f"{r} {io.format_float(100.0 * e)}\n")
    lines = [f"{'setting':<18}{'method':<12}{'error %':>10}{'(std)':>10}{'reps':>6}"]
    for row in rows:
        std = f"({row['std_error_pct']:.2f})" if row["std_defined"] else "(n/a)"
        lines.append(f"{row['setting']:<18}{row['method']:<12}{row['mean_error_pct']:>10.2f}{std:>10}{row['reps']:>6}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))


def cmd_simulate(args) -> int:
    setting = SimSetting(
        id=args.setting, truth=args.truth, n=args.n, p=args.p, q=args.q,
        missing_fraction=args.missing, noise_sd=args.noise_sd,
    )
    res = run_replicated_experiment(
        setting, args.methods, args.reps, _sampler_config(args), seed=args.seed, lam=args.lam, n_jobs=args.jobs
    )
    _write_experiment(Path(args.out), [res])
    return 0


def cmd_fit(args) -> int:
    X, Y = _load_data(args)
    out = Path(args.out)
    cfg = _sampler_config(args)
    if args.train_rows is not None or args.mask_fraction is not None:
        res = run_split_experiment(
            X, Y, args.methods, args.reps, cfg, seed=args.seed, lam=args.lam,
            train_rows=args.train_rows, test_rows=args.test_rows,
            missing_fraction=args.mask_fraction, label=Path(args.responses).stem, n_jobs=args.jobs,
        )
        _write_experiment(out, [res])
        return 0
    n, p = X.shape
    cfg = cfg.with_(lam=resolve_lambda(args.lam, n, p, Y.shape[1], Y.m))
    result = fit(X, Y, cfg)
    out.mkdir(parents=True, exist_ok=True)
    io.write_coefficients(out / "coefficients.csv", result.coefficients)
    io.write_records_csv(
        out / "risk_trace.csv",
        [{"iteration": t, "risk": r} for t, r in result.chain.risk_trace],
        ["iteration", "risk"],
    )
    diag = dict(result.diagnostics, lam=cfg.lam, tau=cfg.tau, loss=cfg.loss, algorithm=cfg.algorithm,
                seed=cfg.seed, step_size_at_burn_in=result.chain.step_size_at_burn_in)
    (out / "diagnostics.json").write_text(json.dumps(diag, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"acceptance rate {result.chain.acceptance_rate:.3f}, final step size {result.chain.final_step_size:.4g}")
    return 0


def cmd_predict(args) -> int:
    coef_path = Path(args.coef)
    if not coef_path.exists():
        raise InvalidInputError(f"{coef_path}: coefficient file not found")
    M = io.read_coefficients(coef_path)
    X = io.read_design_csv(args.design)
    io.write_matrix_csv(args.out, predict(M, X))
    return 0


def cmd_cv(args) -> int:
    X, Y = _load_data(args)
    report = cross_validate(
        X, Y, _sampler_config(args), args.lambda_grid, args.tau_grid, K=args.folds, seed=args.seed, n_jobs=args.jobs
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    folds = [
        {"lambda": lam, "tau": tau, "fold": k, "error": float(report.fold_errors[i, k])}
        for i, (lam, tau) in enumerate(report.grid)
        for k in range(report.fold_errors.shape[1])
    ]
    io.write_records_csv(out / "cv_folds.csv", folds, ["lambda", "tau", "fold", "error"])
    summary = [
        {"lambda": lam, "tau": tau, "mean_error": float(report.mean_errors[i]), "best": (lam, tau) == report.best}
        for i, (lam, tau) in enumerate(report.grid)
    ]
    io.write_records_csv(out / "cv_report.csv", summary, ["lambda", "tau", "mean_error", "best"])
    print(f"best lambda={io.format_float(report.best[0])} tau={io.format_float(report.best[1])}")
    return 0


def _bound_inputs(args) -> BoundInputs:
    fields = dict(n=args.n, p=args.p, q=args.q, r_star=args.rstar, normX=args.normx, normMB=args.normmb)
    if args.from_setting:
        inst = gen_instance(SimSetting(id=args.from_setting, n=args.n, p=args.p, q=args.q),
                           np.random.default_rng(args.seed))
        fields.update(
            r_star=int(np.linalg.matrix_rank(inst.M_star)),
            normX=float(np.linalg.norm(inst.X)),
            normMB=float(np.linalg.norm(inst.M_star)),
        )
    missing = [k for k in ("r_star", "normX", "normMB") if fields[k] is None]
    if missing:
        raise InvalidInputError(f"bound needs --rstar, --normx, --normmb (or --from-setting); missing {missing}")
    return BoundInputs(C=args.C, R_bar=args.rbar, epsilon=args.epsilon, varsigma=args.varsigma, m=args.m, **fields)


def cmd_bound(args) -> int:
    b = _bound_inputs(args)
    results = {}
    for name, fn in BOUNDS.items():
        if args.optimize_varsigma:
            s, value = optimize_varsigma(fn, b)
        else:
            s, value = b.varsigma, fn(b)
        results[name] = {"value": value, "varsigma": s}
        print(f"{name:<13} {io.format_float(value)}  (varsigma={s:.6g})")
    if args.out:
        Path(args.out).write_text(json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binrrr", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of 'key = value' lines; command-line flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="replicated simulation study")
    p.add_argument("--setting", choices=SETTINGS, required=True)
    p.add_argument("--truth", choices=["exact", "approx"], default="exact")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=12)
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--missing", type=float, default=0.0, help="fraction of responses held out")
    p.add_argument("--noise-sd", type=float, default=None,
                   help="sd of the approximate-rank perturbation (default sqrt(0.1))")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--methods", type=_methods, default=list(METHODS))
    p.add_argument("--out", default="sim_out")
    _add_sampler_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit on CSV data, or run repeated split evaluation")
    _add_response_args(p)
    p.add_argument("--out", default="fit_out")
    split = p.add_argument_group("repeated evaluation")
    split.add_argument("--train-rows", type=int, default=None)
    split.add_argument("--test-rows", type=int, default=None)
    split.add_argument("--mask-fraction", type=float, default=None,
                       help="hold out this fraction of observed entries per repetition")
    split.add_argument("--reps", type=int, default=100)
    split.add_argument("--methods", type=_methods, default=["MALA-H"])
    _add_sampler_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="sign predictions from a coefficient CSV")
    p.add_argument("--coef", required=True)
    p.add_argument("--design", required=True)
    p.add_argument("--out", default="predictions.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("cv", help="cross-validate lambda and tau over observed entries")
    _add_response_args(p)
    p.add_argument("--lambda-grid", type=_csv_floats, required=True)
    p.add_argument("--tau-grid", type=_csv_floats, default=[1.0])
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--out", default="cv_out")
    _add_sampler_args(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("bound", help="evaluate the risk bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="observed entries (default n*q)")
    p.add_argument("--rstar", type=int, default=None)
    p.add_argument("--normx", type=float, default=None, help="Frobenius norm of X")
    p.add_argument("--normmb", type=float, default=None, help="Frobenius norm of the Bayes classifier")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--rbar", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--varsigma", type=float, default=0.5)
    p.add_argument("--optimize-varsigma", action="store_true")
    p.add_argument("--from-setting", choices=SETTINGS, default=None,
                   help="fill rank and norms from a simulated instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="also write JSON here")
    p.set_defaults(func=cmd_bound)
    return parser


def _apply_config(parser, argv):
    """Re-parse with config-file values as defaults so explicit flags win."""
    pre, _ = parser.parse_known_args(argv)
    if not pre.config:
        return parser.parse_args(argv)
    values = io.read_config_file(pre.config)
    sub = parser._subparsers._group_actions[0].choices[pre.command]
    # keys are flag names without dashes ("burn-in" or "burn_in"; "lambda" for --lambda)
    known = {opt.lstrip("-").replace("-", "_"): a.dest for a in sub._actions for opt in a.option_strings}
    defaults = {}
    for key, value in values.items():
        if key not in known or key == "h":
            parser.error(f"config key {key!r} is not an option of '{pre.command}'")
        dest = known[key]
        if dest in _BOOL_KEYS:
            defaults[dest] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    try:
        return args.func(args)
    except DivergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (InvalidInputError, NumericalError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

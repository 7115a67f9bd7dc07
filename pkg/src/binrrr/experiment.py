"""Replicated simulation and real-data split experiments."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .datagen import SimSetting, gen_instance, gen_responses
from .estimator import fit, misclassification
from .exceptions import InvalidInputError
from .model import Responses
from .samplers import SamplerConfig, chain_seed, default_lambda

# method label -> (algorithm, loss)
METHODS = {
    "LMC-logit": ("lmc", "logistic"),
    "LMC-H": ("lmc", "hinge"),
    "MALA-logit": ("mala", "logistic"),
    "MALA-H": ("mala", "hinge"),
}
LAMBDA_RULES = ("m", "full", "missing", "slow")


def resolve_lambda(lam, n: int, p: int, q: int, m: int) -> float:
    """Turn a numeric temperature or a named rule into a number.

    ``"m"`` gives ``lam = m`` (each observed loss enters with weight one);
    ``"full"``, ``"missing"`` and ``"slow"`` are the bound-optimal choices
    with margin constant ``C = 1``.
    """
    if isinstance(lam, str):
        if lam == "m":
            return float(m)
        if lam in ("full", "missing", "slow"):
            return default_lambda(n, q, m=m, C=1.0, regime=lam, p=p)
        try:
            lam = float(lam)
        except ValueError:
            raise InvalidInputError(f"lambda must be a number or one of {LAMBDA_RULES}, got {lam!r}") from None
    return float(lam)


def method_config(cfg: SamplerConfig, method: str) -> SamplerConfig:
    if method not in METHODS:
        raise InvalidInputError(f"unknown method {method!r}; expected one of {tuple(METHODS)}")
    algorithm, loss = METHODS[method]
    return cfg.with_(algorithm=algorithm, loss=loss)


@dataclass
class RepOutcome:
    errors: dict[str, float]
    acceptance: dict[str, float]
    step_size: dict[str, float]


@dataclass
class ExperimentResult:
    label: str
    methods: list[str]
    raw: list[RepOutcome] = field(default_factory=list)

    def errors(self, method: str) -> np.ndarray:
        return np.array([r.errors[method] for r in self.raw])

    def rows(self) -> list[dict]:
        """One summary row per method; errors in percent, ``std`` with ``ddof=1``."""
        reps = len(self.raw)
        out = []
        for method in self.methods:
            err = 100.0 * self.errors(method)
            out.append(
                {
                    "setting": self.label,
                    "method": method,
                    "mean_error_pct": float(err.mean()),
                    "std_error_pct": float(err.std(ddof=1)) if reps > 1 else 0.0,
                    "reps": reps,
                    "std_defined": reps > 1,
                    "mean_acceptance": float(np.mean([r.acceptance[method] for r in self.raw])),
                    "mean_step_size": float(np.mean([r.step_size[method] for r in self.raw])),
                }
            )
        return out


def _run_methods(X, Y_train: Responses, Y_eval, eval_mask, methods, cfg, lam, seed, rep, X_eval=None):
    n, p = X.shape
    X_eval = X if X_eval is None else X_eval
    q = Y_train.shape[1]
    lam_value = resolve_lambda(lam, n, p, q, Y_train.m)
    outcome = RepOutcome({}, {}, {})
    for j, method in enumerate(methods):
        mcfg = method_config(cfg, method).with_(lam=lam_value, seed=chain_seed(seed, rep, j + 1))
        result = fit(X, Y_train, mcfg)
        outcome.errors[method] = misclassification(result.coefficients, X_eval, Y_eval, eval_mask)
        outcome.acceptance[method] = result.chain.acceptance_rate
        outcome.step_size[method] = result.chain.final_step_size
    return outcome


def _sim_rep(args):
    setting, methods, cfg, lam, seed, rep = args
    rng = np.random.default_rng(chain_seed(seed, rep, 0))
    inst = gen_instance(setting, rng)
    if setting.missing_fraction > 0:
        Y_eval, eval_mask = inst.Y_full, inst.heldout_mask
    else:
        # fully observed: score against an independent redraw from the same law
        Y_eval = gen_responses(inst.X, inst.M_star, setting.id, rng).values
        eval_mask = None
    return _run_methods(inst.X, inst.Y, Y_eval, eval_mask, methods, cfg, lam, seed, rep)


def _map(fn, jobs, n_jobs):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(min(n_jobs, len(jobs))) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def run_replicated_experiment(
    setting: SimSetting,
    methods,
    reps: int,
    sampler_cfg: SamplerConfig,
    seed: int = 0,
    lam="m",
    n_jobs: int = 1,
) -> ExperimentResult:
    """Repeat data generation, fitting and scoring ``reps`` times.

    Repetition ``r`` draws its data from ``chain_seed(seed, r, 0)`` and
    fits method ``j`` with ``chain_seed(seed, r, j + 1)``.
    """
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    methods = list(methods)
    for method in methods:
        method_config(sampler_cfg, method)
    jobs = [(setting, methods, sampler_cfg, lam, seed, r) for r in range(reps)]
    label = setting.id if setting.missing_fraction == 0 else f"{setting.id}/missing={setting.missing_fraction:g}"
    return ExperimentResult(label=label, methods=methods, raw=_map(_sim_rep, jobs, n_jobs))


def _split_rep(args):
    X, Y, methods, cfg, lam, seed, rep, train_rows, test_rows, missing_fraction = args
    rng = np.random.default_rng(chain_seed(seed, rep, 0))
    if train_rows is not None:
        order = rng.permutation(X.shape[0])
        tr, te = np.sort(order[:train_rows]), np.sort(order[train_rows:train_rows + test_rows])
        Y_train = Responses(Y.values[tr], Y.mask[tr])
        return _run_methods(X[tr], Y_train, Y.values[te], Y.mask[te], methods, cfg, lam, seed, rep, X_eval=X[te])
    pairs = np.argwhere(Y.mask)
    n_removed = int(round(missing_fraction * len(pairs)))
    removed = pairs[rng.choice(len(pairs), size=n_removed, replace=False)]
    heldout = np.zeros_like(Y.mask)
    heldout[removed[:, 0], removed[:, 1]] = True
    Y_train = Y.with_mask(Y.mask & ~heldout)
    return _run_methods(X, Y_train, Y.values, heldout, methods, cfg, lam, seed, rep)


def run_split_experiment(
    X,
    Y: Responses,
    methods,
    reps: int,
    sampler_cfg: SamplerConfig,
    seed: int = 0,
    lam="m",
    train_rows: int | None = None,
    test_rows: int | None = None,
    missing_fraction: float | None = None,
    label: str = "data",
    n_jobs: int = 1,
) -> ExperimentResult:
    """Repeated evaluation on a fixed dataset.

    Either random row splits (``train_rows``/``test_rows``) or random removal
    of a fraction of the observed entries, scored on the removed ones.
    """
    if (train_rows is None) == (missing_fraction is None):
        raise InvalidInputError("give exactly one of train_rows/test_rows or missing_fraction")
    if train_rows is not None:
        if test_rows is None:
            test_rows = X.shape[0] - train_rows
        if train_rows < 1 or test_rows < 1 or train_rows + test_rows > X.shape[0]:
            raise InvalidInputError(f"cannot split {X.shape[0]} rows into {train_rows} train / {test_rows} test")
    elif not 0 < missing_fraction < 1 or math.isnan(missing_fraction):
        raise InvalidInputError(f"missing fraction must lie in (0, 1), got {missing_fraction}")
    methods = list(methods)
    jobs = [
        (X, Y, methods, sampler_cfg, lam, seed, r, train_rows, test_rows, missing_fraction)
        for r in range(reps)
    ]
    return ExperimentResult(label=label, methods=methods, raw=_map(_split_rep, jobs, n_jobs))

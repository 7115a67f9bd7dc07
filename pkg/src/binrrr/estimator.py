"""Point estimates from chains, misclassification scoring and
cross-validation of the temperature and prior scale."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .model import Responses, as_responses, check_design, predict
from .samplers import ChainResult, SamplerConfig, chain_seed, run_chain


@dataclass
class FitResult:
    coefficients: np.ndarray
    chain: ChainResult
    config_used: SamplerConfig

    @property
    def diagnostics(self) -> dict:
        return self.chain.summary()


def fit(X, Y, cfg: SamplerConfig, M0=None) -> FitResult:
    """Posterior mean of the Gibbs posterior, estimated by one chain."""
    X = check_design(X)
    Y = as_responses(Y)
    if Y.m < 1:
        raise InvalidInputError("no observed responses to fit")
    chain = run_chain(X, Y, cfg, M0=M0)
    return FitResult(coefficients=chain.posterior_mean, chain=chain, config_used=cfg)


def misclassification(M, X, Y_eval, eval_mask=None) -> float:
    """Fraction of entries in ``eval_mask`` where ``sign(XM)`` differs from ``Y_eval``."""
    Y_eval = np.asarray(Y_eval)
    pred = predict(M, X)
    if pred.shape != Y_eval.shape:
        raise InvalidInputError(f"prediction shape {pred.shape} != label shape {Y_eval.shape}")
    mask = np.ones(Y_eval.shape, dtype=bool) if eval_mask is None else np.asarray(eval_mask, dtype=bool)
    n_eval = int(mask.sum())
    if n_eval == 0:
        raise InvalidInputError("evaluation mask is empty")
    return float(np.count_nonzero((pred != Y_eval) & mask)) / n_eval


@dataclass
class CvReport:
    grid: list[tuple[float, float]]
    fold_errors: np.ndarray  # (len(grid), K)
    best: tuple[float, float]
    folds: list[np.ndarray] = field(default_factory=list)

    @property
    def mean_errors(self) -> np.ndarray:
        return self.fold_errors.mean(axis=1)


def entry_folds(mask, K: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Split the observed entries into ``K`` disjoint folds of ``(row, col)`` pairs."""
    pairs = np.argwhere(mask)
    if K < 2:
        raise InvalidInputError(f"need at least 2 folds, got {K}")
    if len(pairs) < K:
        raise InvalidInputError(f"{len(pairs)} observed entries cannot fill {K} folds")
    order = rng.permutation(len(pairs))
    return [pairs[np.sort(idx)] for idx in np.array_split(order, K)]


def _cv_job(args):
    X, Y, cfg, fold = args
    train_mask = Y.mask.copy()
    train_mask[fold[:, 0], fold[:, 1]] = False
    val_mask = np.zeros_like(train_mask)
    val_mask[fold[:, 0], fold[:, 1]] = True
    result = fit(X, Y.with_mask(train_mask), cfg)
    return misclassification(result.coefficients, X, Y.values, val_mask)


def cross_validate(
    X,
    Y,
    cfg_base: SamplerConfig,
    lambda_grid,
    tau_grid,
    K: int = 5,
    seed: int = 0,
    n_jobs: int = 1,
) -> CvReport:
    """K-fold cross-validation over observed entries for every ``(lam, tau)`` pair.

    Chain seeds depend on the fold only, so duplicated grid points give
    identical errors. Ties go to the smaller ``lam``, then the smaller ``tau``.
    """
    X = check_design(X)
    Y = as_responses(Y)
    grid = [(float(lam), float(tau)) for lam in lambda_grid for tau in tau_grid]
    if not grid:
        raise InvalidInputError("empty parameter grid")
    folds = entry_folds(Y.mask, K, np.random.default_rng(seed))
    if Y.m - max(len(f) for f in folds) < 1:
        raise InvalidInputError("a fold leaves no training entries")
    jobs = [
        (X, Y, cfg_base.with_(lam=lam, tau=tau, seed=chain_seed(seed, k)), fold)
        for lam, tau in grid
        for k, fold in enumerate(folds)
    ]
    if n_jobs > 1:
        with ProcessPoolExecutor(n_jobs) as pool:
            errors = list(pool.map(_cv_job, jobs))
    else:
        errors = [_cv_job(job) for job in jobs]
    fold_errors = np.array(errors).reshape(len(grid), K)
    means = fold_errors.mean(axis=1)
    best_idx = min(range(len(grid)), key=lambda i: (means[i], grid[i][0], grid[i][1]))
    return CvReport(grid=grid, fold_errors=fold_errors, best=grid[best_idx], folds=folds)

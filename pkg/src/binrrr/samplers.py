"""Langevin samplers for the hinge-loss (or logistic-loss) Gibbs posterior.

The target density over ``p x q`` coefficient matrices is

    log rho(M) = -lam * risk(M) + log pi(M)

with ``risk`` the mean loss over observed entries and ``pi`` the spectral
scaled-Student prior. Both samplers move along the gradient of the
log-density (ascent), ``M + h grad + sqrt(2h) N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import expit

from .exceptions import DivergenceError, InvalidInputError, NumericalError
from .model import _prepare, as_responses, check_design
from .prior import log_prior_and_gradient

LOSSES = ("hinge", "logistic")
ALGORITHMS = ("lmc", "mala")

#: step-size adaptation gain during burn-in
ADAPT_RATE = 0.01
#: LMC runs at this fraction of the MALA-adapted step size
LMC_STEP_FRACTION = 0.1
DIVERGENCE_NORM = 1e8


@dataclass(frozen=True)
class SamplerConfig:
    """Settings for one Langevin chain.

    ``lam`` multiplies the mean-per-entry empirical risk, so ``lam = m``
    corresponds to an unscaled sum of losses.
    """

    lam: float = 1.0
    tau: float = 1.0
    step_size: float = 0.01
    iterations: int = 10000
    burn_in: int = 3000
    thinning: int = 1
    seed: int = 0
    loss: str = "hinge"
    algorithm: str = "mala"
    adapt_step: bool = True
    target_acceptance: float = 0.5
    trace_every: int = 10

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise InvalidInputError(f"lam must be finite and >= 0, got {self.lam}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise InvalidInputError(f"tau must be positive, got {self.tau}")
        if not (self.step_size > 0 and math.isfinite(self.step_size)):
            raise InvalidInputError(f"step_size must be positive, got {self.step_size}")
        if self.iterations < 1 or not 0 <= self.burn_in < self.iterations:
            raise InvalidInputError(
                f"need 0 <= burn_in < iterations, got burn_in={self.burn_in}, iterations={self.iterations}"
            )
        if self.thinning < 1 or self.trace_every < 1:
            raise InvalidInputError("thinning and trace_every must be >= 1")
        if self.loss not in LOSSES:
            raise InvalidInputError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        if self.algorithm not in ALGORITHMS:
            raise InvalidInputError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not 0 < self.target_acceptance < 1:
            raise InvalidInputError("target_acceptance must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")

    def with_(self, **changes) -> "SamplerConfig":
        return replace(self, **changes)


@dataclass
class ChainResult:
    posterior_mean: np.ndarray
    acceptance_rate: float
    final_step_size: float
    step_size_at_burn_in: float
    risk_trace: list[tuple[int, float]] = field(default_factory=list)
    n_kept: int = 0
    n_nonfinite: int = 0
    draws: np.ndarray | None = None

    def summary(self) -> dict:
        return {
            "acceptance_rate": self.acceptance_rate,
            "final_step_size": self.final_step_size,
            "n_kept": self.n_kept,
            "n_nonfinite": self.n_nonfinite,
        }


class GibbsTarget:
    """Log-density and gradient of the Gibbs posterior for fixed data.

    The signed labels (zero at unobserved entries) are cached so each
    evaluation costs one ``X @ M``, one ``X.T @ W`` and a ``min(p, q)``
    sized Cholesky factorization.
    """

    def __init__(self, X, Y, lam: float, tau: float, loss: str = "hinge"):
        X = check_design(X)
        Y = as_responses(Y)
        _, X, Y, m = _prepare(np.zeros((X.shape[1], Y.shape[1])), X, Y)
        if loss not in LOSSES:
            raise InvalidInputError(f"unknown loss {loss!r}")
        self.X = X
        self.Y = Y
        self.ys = Y.signed()
        self.mask = Y.mask
        self.m = m
        self.lam = float(lam)
        self.tau = float(tau)
        self.loss = loss
        self.shape = (X.shape[1], Y.shape[1])

    def risk(self, M) -> float:
        margins = self.ys * (self.X @ M)
        return self._risk_from_margins(margins)

    def _risk_from_margins(self, margins) -> float:
        if self.loss == "hinge":
            terms = np.maximum(1.0 - margins, 0.0)
        else:
            terms = np.logaddexp(0.0, -margins)
        return float(np.sum(terms, where=self.mask)) / self.m

    def evaluate(self, M) -> tuple[float, np.ndarray, float]:
        """Return ``(log density, gradient, risk)`` at ``M``."""
        margins = self.ys * (self.X @ M)
        risk = self._risk_from_margins(margins)
        if self.loss == "hinge":
            weights = self.ys * (margins < 1.0)
        else:
            weights = self.ys * expit(-margins)
        lp, lp_grad = log_prior_and_gradient(M, self.tau)
        # d(-lam * risk)/dM = lam / m * X^T W
        grad = lp_grad + (self.lam / self.m) * (self.X.T @ weights)
        return lp - self.lam * risk, grad, risk

    def log_density(self, M) -> float:
        return self.evaluate(M)[0]

    def gradient(self, M) -> np.ndarray:
        return self.evaluate(M)[1]


def log_target(M, X, Y, cfg: SamplerConfig) -> float:
    return GibbsTarget(X, Y, cfg.lam, cfg.tau, cfg.loss).log_density(np.asarray(M, dtype=np.float64))


def log_target_gradient(M, X, Y, cfg: SamplerConfig) -> np.ndarray:
    return GibbsTarget(X, Y, cfg.lam, cfg.tau, cfg.loss).gradient(np.asarray(M, dtype=np.float64))


def lmc_step(M, grad_fn: Callable, h: float, rng: np.random.Generator) -> np.ndarray:
    """One unadjusted Langevin step ``M + h grad(M) + sqrt(2h) N``."""
    if not h > 0:
        raise InvalidInputError(f"step size must be positive, got {h}")
    M = np.asarray(M, dtype=np.float64)
    return M + h * grad_fn(M) + math.sqrt(2.0 * h) * rng.standard_normal(M.shape)


def _log_q(x_to, x_from, grad_from, h):
    diff = x_to - x_from - h * grad_from
    return -float(np.vdot(diff, diff)) / (4.0 * h)


def _safe_eval(evaluate, M):
    try:
        lp, grad, risk = evaluate(M)
    except (InvalidInputError, NumericalError, FloatingPointError):
        return -math.inf, None, math.nan
    if not math.isfinite(lp) or not np.all(np.isfinite(grad)):
        return -math.inf, None, math.nan
    return lp, grad, risk


def _mala_transition(M, lp, grad, evaluate, h, rng):
    """MALA move from a state with cached log-density and gradient.

    Returns ``(state, lp, grad, risk_or_None, accepted, log_alpha, finite)``;
    ``risk`` is only returned for an accepted proposal.
    """
    noise = rng.standard_normal(M.shape)
    log_u = math.log(rng.random())
    proposal = M + h * grad + math.sqrt(2.0 * h) * noise
    lp_new, grad_new, risk_new = _safe_eval(evaluate, proposal)
    if grad_new is None:
        return M, lp, grad, None, False, -math.inf, False
    log_alpha = (lp_new - lp) + _log_q(M, proposal, grad_new, h) - _log_q(proposal, M, grad, h)
    if log_u < log_alpha:
        return proposal, lp_new, grad_new, risk_new, True, log_alpha, True
    return M, lp, grad, None, False, log_alpha, True


def mala_step(M, log_target_fn: Callable, grad_fn: Callable, h: float, rng: np.random.Generator):
    """One Metropolis-adjusted Langevin step.

    Returns ``(new_state, accepted, log_alpha)``. A proposal with a
    non-finite log-density is rejected with ``log_alpha = -inf``.
    """
    if not h > 0:
        raise InvalidInputError(f"step size must be positive, got {h}")
    M = np.asarray(M, dtype=np.float64)

    def evaluate(x):
        return log_target_fn(x), grad_fn(x), math.nan

    lp, grad, _ = evaluate(M)
    state, _, _, _, accepted, log_alpha, _ = _mala_transition(M, lp, grad, evaluate, h, rng)
    return state, accepted, log_alpha


def chain_seed(master_seed: int, *index: int) -> int:
    """Seed for the job at ``index`` derived from a master seed.

    Uses ``SeedSequence(master_seed, spawn_key=index)`` so the result
    depends only on the seed and the index path, never on scheduling order.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=index)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_chain(
    X,
    Y,
    cfg: SamplerConfig,
    M0=None,
    target: GibbsTarget | None = None,
    keep_draws: bool = False,
) -> ChainResult:
    """Run one chain and return the running mean of kept draws.

    During burn-in with ``adapt_step`` the step size follows
    ``h <- h * exp(ADAPT_RATE * (accepted - target_acceptance))`` and is
    frozen afterwards. For ``algorithm="lmc"`` with ``adapt_step`` the
    burn-in is spent on adaptive MALA moves and the post-burn-in LMC
    chain then uses ``LMC_STEP_FRACTION`` times the adapted step.
    ``keep_draws`` stores every kept state in ``ChainResult.draws``.
    """
    if target is None:
        target = GibbsTarget(X, Y, cfg.lam, cfg.tau, cfg.loss)
    p, q = target.shape
    M = np.zeros((p, q)) if M0 is None else np.array(M0, dtype=np.float64)
    if M.shape != (p, q):
        raise InvalidInputError(f"initial state has shape {M.shape}, expected {(p, q)}")
    rng = np.random.default_rng(cfg.seed)
    evaluate = target.evaluate
    lp, grad, risk = evaluate(M)

    h = cfg.step_size
    h_burn = h
    total = np.zeros((p, q))
    n_kept = 0
    n_accepted = 0
    n_post = 0
    n_nonfinite = 0
    trace = []
    draws = [] if keep_draws else None
    sqrt_two = math.sqrt(2.0)
    lmc = cfg.algorithm == "lmc"
    for t in range(cfg.iterations):
        burning = t < cfg.burn_in
        if lmc and not (burning and cfg.adapt_step):
            M = M + h * grad + sqrt_two * math.sqrt(h) * rng.standard_normal(M.shape)
            lp, grad, risk = _safe_eval(evaluate, M)
            if grad is None:
                raise DivergenceError(t, h, float(np.linalg.norm(M)))
            accepted = True
        else:
            M, lp, grad, new_risk, accepted, _, finite = _mala_transition(M, lp, grad, evaluate, h, rng)
            if new_risk is not None:
                risk = new_risk
            if not finite:
                n_nonfinite += 1
            if burning and cfg.adapt_step:
                h *= math.exp(ADAPT_RATE * (float(accepted) - cfg.target_acceptance))
        norm_sq = float(np.vdot(M, M))
        if norm_sq > DIVERGENCE_NORM**2:
            raise DivergenceError(t, h, math.sqrt(norm_sq))
        if t + 1 == cfg.burn_in:
            if lmc and cfg.adapt_step:
                h *= LMC_STEP_FRACTION
            h_burn = h
        if not burning:
            n_post += 1
            n_accepted += accepted
            if (t - cfg.burn_in) % cfg.thinning == 0:
                total += M
                n_kept += 1
                if keep_draws:
                    draws.append(M)
        if t % cfg.trace_every == 0 or t == cfg.iterations - 1:
            trace.append((t, risk))
    if cfg.burn_in == 0:
        h_burn = cfg.step_size
    return ChainResult(
        posterior_mean=total / n_kept,
        acceptance_rate=1.0 if lmc else n_accepted / n_post,
        final_step_size=h,
        step_size_at_burn_in=h_burn,
        risk_trace=trace,
        n_kept=n_kept,
        n_nonfinite=n_nonfinite,
        draws=np.array(draws) if keep_draws else None,
    )


def default_lambda(n: int, q: int, m: int | None = None, C: float = 1.0, regime: str = "full", p: int | None = None) -> float:
    """Temperature choices that optimize the risk bounds.

    ``full``: 2nq / (3C + 2); ``missing``: 2m / (3C + 2);
    ``slow``: 2 sqrt(nq / (p + q + 2)) (needs ``p``, ignores ``C``).
    """
    if min(n, q) < 1:
        raise InvalidInputError("n and q must be >= 1")
    if C < 1:
        raise InvalidInputError(f"margin constant C must be >= 1, got {C}")
    if regime == "full":
        return 2.0 * n * q / (3.0 * C + 2.0)
    if regime == "missing":
        if m is None or m < 1:
            raise InvalidInputError("missing regime needs m >= 1")
        return 2.0 * m / (3.0 * C + 2.0)
    if regime == "slow":
        if p is None or p < 1:
            raise InvalidInputError("slow-rate regime needs p >= 1")
        return 2.0 * math.sqrt(n * q / (p + q + 2.0))
    raise InvalidInputError(f"unknown regime {regime!r}")

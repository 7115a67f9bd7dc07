"""Spectral scaled-Student prior on ``p x q`` coefficient matrices.

The unnormalized log-density is

    log pi(M) = -(p + q + 2) / 2 * logdet(tau^2 I_p + M M^T)

which depends on ``M`` only through its singular values. When ``q < p`` the
``q x q`` Gram matrix ``tau^2 I_q + M^T M`` is factorized instead, using

    logdet(tau^2 I_p + M M^T) = 2 (p - q) log(tau) + logdet(tau^2 I_q + M^T M).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import InvalidInputError, NumericalError


def _check(M, tau):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise InvalidInputError(f"M must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("M has non-finite entries")
    if not (tau > 0 and math.isfinite(tau)):
        raise InvalidInputError(f"tau must be positive and finite, got {tau}")
    return M


def _resolve(method, p, q):
    if method == "auto":
        return "dual" if q < p else "primal"
    if method not in ("primal", "dual"):
        raise InvalidInputError(f"unknown method {method!r}")
    return method


def _cholesky(S, tau):
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError as err:
        eig = np.linalg.eigvalsh(S)
        raise NumericalError(
            f"Cholesky failed for tau={tau:.3g}: eigenvalue range [{eig.min():.3g}, {eig.max():.3g}]"
        ) from err


def _factor(M, tau, method):
    p, q = M.shape
    if method == "dual":
        S = M.T @ M
        S[np.diag_indices(q)] += tau * tau
        L = _cholesky(S, tau)
        logdet = 2.0 * np.log(np.diag(L)).sum() + 2.0 * (p - q) * math.log(tau)
    else:
        S = M @ M.T
        S[np.diag_indices(p)] += tau * tau
        L = _cholesky(S, tau)
        logdet = 2.0 * np.log(np.diag(L)).sum()
    return L, logdet


def log_prior_and_gradient(M, tau: float, method: str = "auto") -> tuple[float, np.ndarray]:
    """Log-density and its gradient from one Cholesky factorization.

    The gradient is ``-(p+q+2) (tau^2 I_p + M M^T)^{-1} M``, equivalently
    ``-(p+q+2) M (tau^2 I_q + M^T M)^{-1}``.
    """
    M = _check(M, tau)
    p, q = M.shape
    method = _resolve(method, p, q)
    L, logdet = _factor(M, tau, method)
    k = p + q + 2
    if method == "dual":
        grad = -k * cho_solve((L, True), M.T, check_finite=False).T
    else:
        grad = -k * cho_solve((L, True), M, check_finite=False)
    return -0.5 * k * logdet, grad


def log_prior(M, tau: float, method: str = "auto") -> float:
    """Unnormalized log prior density (normalizing constant dropped)."""
    M = _check(M, tau)
    p, q = M.shape
    _, logdet = _factor(M, tau, _resolve(method, p, q))
    return -0.5 * (p + q + 2) * logdet


def log_prior_gradient(M, tau: float, method: str = "auto") -> np.ndarray:
    return log_prior_and_gradient(M, tau, method)[1]


def default_tau(n: int, p: int, q: int, m: int | None, normX_sq: float, regime: str = "full") -> float:
    """Prior scale used by the risk bounds.

    ``regime="full"``: tau^2 = (p+q) / (2 q^2 p n ||X||_F^2).
    ``regime="missing"``: tau^2 = (p+q) / (2 q p m ||X||_F^2).
    """
    if min(n, p, q) < 1:
        raise InvalidInputError("n, p, q must be >= 1")
    if not normX_sq > 0:
        raise InvalidInputError(f"||X||_F^2 must be positive, got {normX_sq}")
    if regime == "full":
        tau_sq = (p + q) / (2.0 * q * q * p * n * normX_sq)
    elif regime == "missing":
        if m is None or m < 1:
            raise InvalidInputError("missing regime needs m >= 1")
        tau_sq = (p + q) / (2.0 * q * p * m * normX_sq)
    else:
        raise InvalidInputError(f"unknown regime {regime!r}")
    return math.sqrt(tau_sq)

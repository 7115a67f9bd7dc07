"""Explicit finite-sample risk bounds for the Gibbs-posterior estimator.

Every bound is an upper bound on the posterior-averaged misclassification
risk, holding with probability at least ``1 - 2 * epsilon``, at the
temperature and prior scale that each bound prescribes. The inputs that
involve the Bayes classifier (its rank, Frobenius norm and risk) are
oracle quantities supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .exceptions import InvalidInputError
from .prior import default_tau


@dataclass(frozen=True)
class BoundInputs:
    n: int
    p: int
    q: int
    r_star: int
    normX: float
    normMB: float
    C: float = 1.0
    R_bar: float = 0.0
    epsilon: float = 0.05
    varsigma: float = 0.5
    m: int | None = None  # observed entries; None means n * q

    def __post_init__(self):
        if min(self.n, self.p, self.q) < 1:
            raise InvalidInputError("n, p, q must be >= 1")
        if not 0 <= self.r_star <= min(self.p, self.q):
            raise InvalidInputError(f"r_star must lie in [0, min(p, q)], got {self.r_star}")
        if self.normX < 0 or self.normMB < 0:
            raise InvalidInputError("norms must be nonnegative")
        if self.C < 1:
            raise InvalidInputError(f"C must be >= 1, got {self.C}")
        if not 0 <= self.R_bar <= 1:
            raise InvalidInputError(f"R_bar must lie in [0, 1], got {self.R_bar}")
        if not 0 < self.epsilon < 1:
            raise InvalidInputError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.varsigma < 1:
            raise InvalidInputError(f"varsigma must lie in (0, 1), got {self.varsigma}")
        if self.m is not None and not 1 <= self.m <= self.n * self.q:
            raise InvalidInputError(f"m must lie in [1, nq], got {self.m}")

    @property
    def n_obs(self) -> int:
        return self.n * self.q if self.m is None else self.m

    def with_(self, **changes) -> "BoundInputs":
        return replace(self, **changes)


def _rank_log_term(r_star: int, normMB: float, tau: float) -> float:
    """``r* log(1 + ||M^B||_F / (tau sqrt(2 r*)))`` with ``0 log(1 + 0/0) = 0``."""
    if r_star == 0:
        return 0.0
    return r_star * math.log1p(normMB / (tau * math.sqrt(2.0 * r_star)))


def theorem1_bound(b: BoundInputs) -> float:
    """Fast-rate bound under the margin condition, fully observed responses.

    Holds at ``lam = 2nq / (3C + 2)`` and ``tau^2 = (p+q) / (2 q^2 p n ||X||_F^2)``.
    """
    n, p, q, C, s = b.n, b.p, b.q, b.C, b.varsigma
    nq = n * q
    tau = default_tau(n, p, q, None, b.normX**2, "full") if b.normX > 0 else math.inf
    rank_term = 3.0 * (3.0 * C + 2.0) * (q + p + 2) * _rank_log_term(b.r_star, b.normMB, tau) / (2.0 * nq)
    return (
        2.5 * b.R_bar
        + 1.5 * (p + q) / (2.0 * nq)
        + rank_term
        + (6.0 + 9.0 * C * s + 6.0 * s) / (4.0 * nq * s) * math.log(1.0 / b.epsilon)
    )


def corollary1_bound(b: BoundInputs) -> float:
    """Noiseless case ``Y = sign(X M^B)``: margin constant 1, zero Bayes risk."""
    return theorem1_bound(b.with_(C=1.0, R_bar=0.0))


def proposition1_bound(b: BoundInputs) -> float:
    """Slow-rate bound without the margin condition.

    Holds at ``lam = 2 sqrt(nq / (p+q+2))`` with the same prior scale as
    :func:`theorem1_bound`.
    """
    n, p, q, s = b.n, b.p, b.q, b.varsigma
    nq = n * q
    k = p + q + 2
    tau = default_tau(n, p, q, None, b.normX**2, "full") if b.normX > 0 else math.inf
    return (
        2.0 * b.R_bar
        + (p + q) / (2.0 * nq)
        + math.sqrt(k / nq) * _rank_log_term(b.r_star, b.normMB, tau)
        + 1.0 / (4.0 * math.sqrt(nq * k))
        + (2.0 + s * math.sqrt(nq * k)) / (2.0 * nq * s) * math.log(1.0 / b.epsilon)
    )


def theorem2_bound(b: BoundInputs) -> float:
    """Fast-rate bound with ``m`` observed responses.

    Holds at ``lam = 2m / (3C + 2)`` and ``tau^2 = (p+q) / (2 q p m ||X||_F^2)``;
    the log argument is ``q ||X||_F ||M^B||_F sqrt(mp) / sqrt((p+q) r*)``.
    """
    p, q, C, s = b.p, b.q, b.C, b.varsigma
    m = b.n_obs
    if b.r_star == 0:
        log_term = 0.0
    else:
        arg = q * b.normX * b.normMB * math.sqrt(m * p) / math.sqrt((p + q) * b.r_star)
        log_term = b.r_star * math.log1p(arg)
    return (
        2.5 * b.R_bar
        + 1.5 * (p + q) / (2.0 * m)
        + 3.0 * (3.0 * C + 2.0) * (q + p + 2) * log_term / (2.0 * m)
        + (6.0 + 9.0 * C * s + 6.0 * s) / (4.0 * m * s) * math.log(1.0 / b.epsilon)
    )


BOUNDS = {
    "theorem1": theorem1_bound,
    "corollary1": corollary1_bound,
    "proposition1": proposition1_bound,
    "theorem2": theorem2_bound,
}

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Minimizer of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_varsigma(bound_fn, b: BoundInputs, lo: float = 0.01, hi: float = 0.99) -> tuple[float, float]:
    """Minimize ``bound_fn`` over the free parameter; returns ``(varsigma, value)``."""
    best = golden_section_min(lambda s: bound_fn(b.with_(varsigma=s)), lo, hi)
    return best, bound_fn(b.with_(varsigma=best))

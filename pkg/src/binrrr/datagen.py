"""Simulation designs: Gaussian covariates, (approximate) rank-2 truths,
the six response-noise settings and uniform missingness masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import InvalidInputError
from .model import Responses

SETTINGS = ("I.1", "I.2", "I.3", "I.4", "II.1", "II.2")
TRUTHS = ("exact", "approx")

# (additive Gaussian noise E, multiplicative label flips B) per setting
_NOISE = {
    "I.1": (False, False),
    "I.2": (True, False),
    "I.3": (False, True),
    "I.4": (True, True),
    "II.1": (False, False),
    "II.2": (True, False),
}
FLIP_PROB = 0.1


@dataclass(frozen=True)
class SimSetting:
    id: str = "I.1"
    truth: str = "exact"
    n: int = 100
    p: int = 12
    q: int = 8
    missing_fraction: float = 0.0
    noise_sd: float | None = None

    def __post_init__(self):
        if self.id not in SETTINGS:
            raise InvalidInputError(f"unknown setting {self.id!r}; expected one of {SETTINGS}")
        if self.truth not in TRUTHS:
            raise InvalidInputError(f"unknown truth {self.truth!r}; expected one of {TRUTHS}")
        if min(self.n, self.p, self.q) < 1 or min(self.p, self.q) < 2:
            raise InvalidInputError("need n >= 1 and p, q >= 2")
        if not 0 <= self.missing_fraction < 1:
            raise InvalidInputError(f"missing fraction must lie in [0, 1), got {self.missing_fraction}")


@dataclass
class SimInstance:
    X: np.ndarray
    M_star: np.ndarray
    Y: Responses
    Y_full: np.ndarray
    heldout_mask: np.ndarray


def gen_design(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1 or p < 1:
        raise InvalidInputError("n and p must be >= 1")
    return rng.standard_normal((n, p))


def gen_truth(p: int, q: int, kind: str, rng: np.random.Generator, noise_sd: float | None = None) -> np.ndarray:
    """Rank-2 product ``A B^T`` or ``2 A B^T + N`` with Gaussian ``N``.

    The perturbation defaults to variance 0.1 (sd ``sqrt(0.1)``); pass
    ``noise_sd=0.1`` for the standard-deviation reading.
    """
    if p < 2 or q < 2:
        raise InvalidInputError(f"rank-2 truth needs p, q >= 2, got p={p}, q={q}")
    A = rng.standard_normal((p, 2))
    B = rng.standard_normal((q, 2))
    low_rank = A @ B.T
    if kind == "exact":
        return low_rank
    if kind == "approx":
        sd = np.sqrt(0.1) if noise_sd is None else noise_sd
        return 2.0 * low_rank + sd * rng.standard_normal((p, q))
    raise InvalidInputError(f"unknown truth kind {kind!r}")


def _sign(a):
    return np.where(a >= 0, 1, -1).astype(np.int8)


def gen_responses(X, M_star, setting_id: str, rng: np.random.Generator) -> Responses:
    """Draw a fully observed -1/+1 response matrix under one noise setting."""
    if setting_id not in _NOISE:
        raise InvalidInputError(f"unknown setting {setting_id!r}; expected one of {SETTINGS}")
    additive, flips = _NOISE[setting_id]
    u = X @ M_star
    if additive:
        u = u + rng.standard_normal(u.shape)
    if setting_id.startswith("II"):
        Y = np.where(rng.random(u.shape) < expit(u), 1, -1).astype(np.int8)
    else:
        Y = _sign(u)
        if flips:
            Y = np.where(rng.random(u.shape) < FLIP_PROB, -Y, Y).astype(np.int8)
    return Responses.full(Y)


def gen_mask(n: int, q: int, missing_fraction: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean observation mask with exactly ``round(fraction * n * q)`` entries removed."""
    if not 0 <= missing_fraction < 1:
        raise InvalidInputError(f"missing fraction must lie in [0, 1), got {missing_fraction}")
    total = n * q
    n_removed = int(round(missing_fraction * total))
    mask = np.ones(total, dtype=bool)
    if n_removed:
        mask[rng.choice(total, size=n_removed, replace=False)] = False
    return mask.reshape(n, q)


def gen_instance(setting: SimSetting, rng: np.random.Generator) -> SimInstance:
    X = gen_design(setting.n, setting.p, rng)
    M_star = gen_truth(setting.p, setting.q, setting.truth, rng, setting.noise_sd)
    Y_full = gen_responses(X, M_star, setting.id, rng).values
    mask = gen_mask(setting.n, setting.q, setting.missing_fraction, rng)
    return SimInstance(
        X=X,
        M_star=M_star,
        Y=Responses(Y_full, mask),
        Y_full=Y_full,
        heldout_mask=~mask,
    )

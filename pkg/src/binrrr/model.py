"""Data model and empirical risks for multi-response binary classification.

The covariates are an ``(n, p)`` array ``X``, the coefficients an ``(p, q)``
array ``M`` and the labels an ``(n, q)`` array of -1/+1 values together with
a boolean observation mask. Every risk is a mean over the ``m`` observed
entries, so the fully observed and the missing-response regimes share a
single code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import DimensionError, InvalidInputError


@dataclass(frozen=True)
class Responses:
    """Binary response matrix with an observation mask.

    ``values`` holds -1/+1 labels as ``int8``; entries at unobserved
    positions are ignored and stored as 0. ``mask[i, k]`` is True when
    label ``(i, k)`` is observed.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        mask = np.asarray(self.mask, dtype=bool)
        if values.ndim != 2:
            raise DimensionError(f"responses must be 2-D, got shape {values.shape}")
        if mask.shape != values.shape:
            raise DimensionError(f"mask shape {mask.shape} != response shape {values.shape}")
        observed = values[mask]
        if not np.all((observed == 1) | (observed == -1)):
            bad = np.argwhere(mask & (values != 1) & (values != -1))[0]
            raise InvalidInputError(
                f"observed response at (row {bad[0] + 1}, column {bad[1] + 1}) is not -1 or +1"
            )
        clean = np.where(mask, values, 0).astype(np.int8)
        clean.setflags(write=False)
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "values", clean)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def full(cls, values) -> "Responses":
        values = np.asarray(values)
        return cls(values, np.ones(values.shape, dtype=bool))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def m(self) -> int:
        """Number of observed entries."""
        return int(self.mask.sum())

    @property
    def is_full(self) -> bool:
        return bool(self.mask.all())

    def signed(self) -> np.ndarray:
        """Float labels with zeros at unobserved positions."""
        return self.values.astype(np.float64)

    def observed_pairs(self) -> np.ndarray:
        """``(m, 2)`` array of 0-based ``(row, column)`` indices of observed entries."""
        return np.argwhere(self.mask)

    def with_mask(self, mask) -> "Responses":
        """Restrict to ``mask`` (must be a subset of the current observed set)."""
        mask = np.asarray(mask, dtype=bool)
        if np.any(mask & ~self.mask):
            raise InvalidInputError("new mask observes entries that are missing")
        return Responses(self.values, mask)


def as_responses(Y) -> Responses:
    """Accept either a :class:`Responses` or a plain -1/+1 array (fully observed)."""
    if isinstance(Y, Responses):
        return Y
    return Responses.full(Y)


def check_design(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionError(f"design matrix must be 2-D and nonempty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("design matrix has non-finite entries")
    return X


def _prepare(M, X, Y):
    M = np.asarray(M, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    Y = as_responses(Y)
    if M.ndim != 2 or X.ndim != 2:
        raise DimensionError("M and X must be 2-D arrays")
    n, p = X.shape
    if M.shape[0] != p:
        raise DimensionError(f"X has {p} columns but M has {M.shape[0]} rows")
    if Y.shape != (n, M.shape[1]):
        raise DimensionError(f"responses have shape {Y.shape}, expected {(n, M.shape[1])}")
    m = Y.m
    if m == 0:
        raise InvalidInputError("observation mask is empty")
    return M, X, Y, m


def zero_one_risk(M, X, Y) -> float:
    """Fraction of observed entries with ``Y * (XM) < 0``.

    A zero score is not counted as an error.
    """
    M, X, Y, m = _prepare(M, X, Y)
    margins = Y.signed() * (X @ M)
    return float(np.count_nonzero((margins < 0) & Y.mask)) / m


def hinge_risk(M, X, Y) -> float:
    """Mean of ``max(1 - Y * (XM), 0)`` over observed entries."""
    M, X, Y, m = _prepare(M, X, Y)
    margins = Y.signed() * (X @ M)
    return float(np.sum(np.maximum(1.0 - margins, 0.0), where=Y.mask)) / m


def hinge_subgradient(M, X, Y) -> np.ndarray:
    """Subgradient of :func:`hinge_risk`; entries exactly at the kink contribute 0."""
    M, X, Y, m = _prepare(M, X, Y)
    ys = Y.signed()
    active = (ys * (X @ M)) < 1.0
    return -(X.T @ (ys * active)) / m


def logistic_risk(M, X, Y) -> float:
    """Mean of ``log(1 + exp(-Y * (XM)))`` over observed entries."""
    M, X, Y, m = _prepare(M, X, Y)
    margins = Y.signed() * (X @ M)
    return float(np.sum(np.logaddexp(0.0, -margins), where=Y.mask)) / m


def logistic_gradient(M, X, Y) -> np.ndarray:
    M, X, Y, m = _prepare(M, X, Y)
    ys = Y.signed()
    # ys is 0 off the mask, which zeroes those terms
    return -(X.T @ (ys * expit(-ys * (X @ M)))) / m


def predict(M, X) -> np.ndarray:
    """Entrywise sign of ``XM`` as int8, with ``sign(0) = +1``."""
    M = np.asarray(M, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if M.ndim != 2 or X.ndim != 2 or X.shape[1] != M.shape[0]:
        raise DimensionError(f"cannot multiply X {X.shape} by M {M.shape}")
    return np.where(X @ M >= 0, 1, -1).astype(np.int8)


RISKS = {"hinge": hinge_risk, "logistic": logistic_risk}
GRADIENTS = {"hinge": hinge_subgradient, "logistic": logistic_gradient}

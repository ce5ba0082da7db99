"""Probability-simplex geometry.

Negative entropy, KL/Bregman divergence, temperature log-sum-exp and
softmax, plus truncation to the floored simplex {x : x_i >= eps}. All
functions are pure and accept either a :class:`SimplexVec` or a plain
array-like of probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp as _scipy_logsumexp
from scipy.special import softmax as _scipy_softmax

from .errors import InvalidEpsilon, NonPositiveTemperature, SupportMismatch

SUM_TOL = 1e-12


@dataclass(frozen=True)
class SimplexVec:
    """Probability vector, optionally floored at ``epsilon_floor``.

    Invariants are checked at construction: entries sum to 1 within
    1e-12 and every coordinate is >= max(0, epsilon_floor). A floor of
    0 means the untruncated simplex.
    """

    probs: np.ndarray
    epsilon_floor: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty 1-D vector")
        k = p.size
        if self.epsilon_floor < 0.0 or self.epsilon_floor > 1.0 / k + SUM_TOL:
            raise InvalidEpsilon(
                f"epsilon_floor {self.epsilon_floor} outside [0, 1/{k}]"
            )
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        floor = max(0.0, self.epsilon_floor)
        if (p < floor - SUM_TOL).any():
            raise ValueError(f"coordinate below floor {floor}: {p.min()!r}")

    @property
    def k(self) -> int:
        return self.probs.size

    @staticmethod
    def uniform(k: int, epsilon_floor: float = 0.0) -> "SimplexVec":
        return SimplexVec(np.full(k, 1.0 / k), epsilon_floor)

    @staticmethod
    def vertex(k: int, i: int) -> "SimplexVec":
        p = np.zeros(k)
        p[i] = 1.0
        return SimplexVec(p)

    @staticmethod
    def normalized(weights, epsilon_floor: float = 0.0) -> "SimplexVec":
        """Build from nonnegative weights, renormalizing the sum to 1."""
        w = np.array(weights, dtype=float)
        total = w.sum()
        if total <= 0.0 or not np.isfinite(total):
            raise ValueError("weights must have a positive finite sum")
        return SimplexVec(w / total, epsilon_floor)


def as_probs(x) -> np.ndarray:
    """Extract the probability array from a SimplexVec or array-like."""
    if isinstance(x, SimplexVec):
        return x.probs
    return np.asarray(x, dtype=float)


def neg_entropy(x) -> float:
    """Sum of x_i log x_i, with the 0 log 0 = 0 convention.

    Lies in [-log K, 0]: minimized at the uniform vector, maximized at
    vertices.
    """
    p = as_probs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return float(terms.sum())


def kl_div(x, y) -> float:
    """KL divergence sum x_i log(x_i / y_i); requires supp(x) ⊆ supp(y)."""
    p, q = as_probs(x), as_probs(y)
    if ((p > 0.0) & (q <= 0.0)).any():
        raise SupportMismatch("x has mass where y is zero")
    mask = p > 0.0
    return float((p[mask] * np.log(p[mask] / q[mask])).sum())


def bregman_neg_entropy(x, y) -> float:
    """Bregman divergence of negative entropy from its three-term definition.

    Equals kl_div(x, y) analytically; computed independently here so the
    identity can be checked numerically.
    """
    p, q = as_probs(x), as_probs(y)
    if ((p > 0.0) & (q <= 0.0)).any():
        raise SupportMismatch("x has mass where y is zero")
    mask = q > 0.0
    grad = 1.0 + np.log(q[mask])
    inner = float((grad * (p[mask] - q[mask])).sum())
    return neg_entropy(p) - neg_entropy(q) - inner


def log_sum_exp(q, mu: float) -> float:
    """mu * log sum_a exp(q_a / mu), computed via the max-shift trick."""
    if mu <= 0.0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {mu}")
    return float(mu * _scipy_logsumexp(np.asarray(q, dtype=float) / mu))


def softmax(q, mu: float) -> SimplexVec:
    """Temperature softmax exp(q_i/mu) / sum_j exp(q_j/mu), max-shifted."""
    if mu <= 0.0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {mu}")
    p = _scipy_softmax(np.asarray(q, dtype=float) / mu)
    return SimplexVec(p / p.sum(), 0.0)


def truncate(x, eps: float) -> SimplexVec:
    """Project onto the floored simplex {y : y_i >= eps, sum y = 1}.

    Coordinates below the floor are raised to eps and the remaining mass
    is renormalized over the free coordinates; the floored set only
    grows, so at most K passes are needed. Inputs already above the
    floor are returned unchanged.
    """
    p = as_probs(x).copy()
    k = p.size
    if eps <= 0.0 or eps > 1.0 / k + SUM_TOL:
        raise InvalidEpsilon(f"floor {eps} outside (0, 1/{k}]")
    if (p >= eps).all():
        return SimplexVec(p, eps)
    fixed = np.zeros(k, dtype=bool)
    for _ in range(k):
        low = (p < eps) & ~fixed
        if not low.any():
            break
        fixed |= low
        p[fixed] = eps
        free = ~fixed
        remaining = 1.0 - eps * fixed.sum()
        if not free.any() or remaining <= 0.0:
            # only reachable at eps ~ 1/K, where the answer is uniform
            p = np.full(k, 1.0 / k)
            return SimplexVec(p, eps)
        p[free] *= remaining / p[free].sum()
    return SimplexVec(p / p.sum(), eps)

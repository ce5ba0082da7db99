"""Entropy mirror descent on the simplex with dynamic-regret accounting.

The update is multiplicative: x_{t+1,i} ∝ x_{t,i} exp(-eta_t g_i),
renormalized and floored. Losses are linear (gradient plus offset) with
a time-varying entropy regularizer lambda_t added through the gradient,
and step sizes follow the monotone envelope eta_t = max(eta_{t-1},
c * lambda_t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryIterate,
    LengthMismatch,
    MissingScheduleMetadata,
    NonFiniteGradient,
    SupportMismatch,
)
from .scheduler import ScheduleConfig, eta_from_lambda
from .simplex import SimplexVec, as_probs, kl_div, truncate
from .trace import RunTrace


@dataclass(frozen=True)
class LinearLoss:
    """f(x) = <grad, x> + offset."""

    grad: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "grad", np.asarray(self.grad, dtype=float))

    def value(self, x) -> float:
        return float(self.grad @ as_probs(x)) + self.offset


@dataclass(frozen=True)
class OmdState:
    """Current iterate, last step size (for the envelope), step index."""

    x: SimplexVec
    eta_prev: float = 0.0
    t: int = 0


def md_step(state: OmdState, g, eta: float, eps: float) -> OmdState:
    """One multiplicative-weights step, then truncation to the eps-floor.

    eta = 0 is permitted and leaves the point unchanged (oracle schedules
    emit a zero temperature on drift-free rounds).
    """
    g = np.asarray(g, dtype=float)
    if not np.isfinite(g).all():
        raise NonFiniteGradient("gradient contains NaN or infinity")
    if eta < 0.0:
        raise ValueError("step size must be nonnegative")
    p = state.x.probs
    with np.errstate(divide="ignore"):
        logits = np.where(p > 0.0, np.log(np.where(p > 0.0, p, 1.0)), -np.inf)
    logits = logits - eta * g
    logits -= logits.max()
    w = np.exp(logits)
    if eps > 0.0:
        x_new = truncate(w / w.sum(), eps)
    else:
        x_new = SimplexVec(w / w.sum(), 0.0)
    return OmdState(x=x_new, eta_prev=max(state.eta_prev, eta), t=state.t + 1)


def regularized_grad(g_f, x, lam: float) -> np.ndarray:
    """Gradient of f + lambda * neg_entropy at an interior point.

    Componentwise g_f + lambda * (1 + log x); on the eps-floored simplex
    its sup norm is at most G + lambda * (1 + |log eps|).
    """
    p = as_probs(x)
    if (p <= 0.0).any():
        raise BoundaryIterate("entropy gradient needs all coordinates > 0")
    return np.asarray(g_f, dtype=float) + lam * (1.0 + np.log(p))


@dataclass(frozen=True)
class ExplicitConstants:
    """Constants of the per-round trade-off bound C0 + sum(C1 a/l + C2 l)."""

    c0: float
    c1: float
    c2: float

    @staticmethod
    def derive(cfg: ScheduleConfig, g_bound: float, k: int, eps: float,
               lambda1: float) -> "ExplicitConstants":
        """Concrete constants from the run parameters.

        Uses the entropy-gradient bound G_psi = 1 + |log eps| on the
        floored simplex, so eps must be positive. The drift coefficient
        C1 carries the conservative factor 2 G_psi / c (a tighter
        G_psi / c variant exists but the larger one is always safe).
        """
        if eps <= 0.0:
            raise ValueError("constants need a positive simplex floor")
        g_psi = 1.0 + abs(math.log(eps))
        c1 = 2.0 * g_psi / cfg.c
        c2 = 0.5 * cfg.c * (g_bound + cfg.lambda_max * g_psi) ** 2 + 2.0 * math.log(k)
        c0 = math.log(k) / (cfg.c * cfg.lambda_min) + c2 * lambda1
        return ExplicitConstants(c0=c0, c1=c1, c2=c2)

    @staticmethod
    def derive_from_trace(trace: RunTrace) -> "ExplicitConstants":
        m = trace.meta
        cfg = ScheduleConfig(
            c1=m.get("cfg_c1", 1.0), c2=m.get("cfg_c2", 1.0), c=m["c"],
            lambda_min=m["lambda_min"], lambda_max=m["lambda_max"],
            mode="fixed", fixed_value=m["lambda_min"],
        )
        return ExplicitConstants.derive(
            cfg, g_bound=m["g_bound"], k=int(m["k"]), eps=m["eps"],
            lambda1=m["lambda1"],
        )


def run_dynamic(stream, comparators, schedule, eps: float,
                x0: SimplexVec | None = None) -> RunTrace:
    """Run mirror descent against a drifting comparator sequence.

    Per round: drift alpha_t = ||u_t - u_{t-1}||_1 (zero at t=1) is fed
    to the schedule as the proxy, the step size follows the monotone
    envelope, the regret increment f_t(x_t) - f_t(u_t) is recorded, and
    the iterate is updated on the regularized gradient.

    The default start is uniform, which keeps the initial Bregman
    distance to any comparator at most log K.
    """
    stream = list(stream)
    comparators = [as_probs(u) for u in comparators]
    if len(stream) != len(comparators) or not stream:
        raise LengthMismatch(
            f"{len(stream)} losses vs {len(comparators)} comparators"
        )
    k = stream[0].grad.size
    cfg = schedule.cfg
    if x0 is None:
        x0 = SimplexVec.uniform(k)
    state = OmdState(x=truncate(x0, eps) if eps > 0.0 else x0)
    try:
        d_psi_start = kl_div(comparators[0], state.x)
    except SupportMismatch:
        d_psi_start = math.inf
    iterates = []

    t_col, lam_col, eta_col, alpha_col = [], [], [], []
    proxy_col, inc_col = [], []
    u_prev = comparators[0]
    g_bound = 0.0
    for t, (loss, u) in enumerate(zip(stream, comparators), start=1):
        alpha = float(np.abs(u - u_prev).sum())
        lam = schedule.step(alpha)
        eta = eta_from_lambda(lam, state.eta_prev, cfg)
        inc = loss.value(state.x) - loss.value(u)
        iterates.append(state.x.probs)
        g = regularized_grad(loss.grad, state.x, lam)
        state = md_step(state, g, eta, eps)
        g_bound = max(g_bound, float(np.abs(loss.grad).max()))
        t_col.append(t)
        lam_col.append(lam)
        eta_col.append(eta)
        alpha_col.append(alpha)
        # what the schedule actually accumulated (smoothed for online mode)
        proxy_col.append(
            schedule.state.ema_value if hasattr(schedule, "state") else alpha
        )
        inc_col.append(inc)
        u_prev = u

    inc = np.asarray(inc_col)
    columns = {
        "t": np.asarray(t_col),
        "lambda": np.asarray(lam_col),
        "eta": np.asarray(eta_col),
        "alpha": np.asarray(alpha_col),
        "proxy": np.asarray(proxy_col),
        "regret_inc": inc,
        "regret_cum": np.cumsum(inc),
    }
    meta = {
        "k": k,
        "eps": eps,
        "g_bound": g_bound,
        "c": cfg.c,
        "lambda_min": cfg.lambda_min,
        "lambda_max": cfg.lambda_max,
        "lambda1": lam_col[0],
        "cfg_c1": cfg.c1,
        "cfg_c2": cfg.c2,
        "d_psi_start": d_psi_start,  # divergence from x_1 to the first comparator
    }
    trace = RunTrace(columns=columns, meta=meta)
    trace.iterates = iterates
    return trace


def bound_rhs(trace: RunTrace, consts: ExplicitConstants) -> float:
    """Right-hand side C0 + sum_{t>=2} (C1 alpha_t/lambda_t + C2 lambda_t).

    Rounds with alpha_t = 0 contribute only the C2 term regardless of
    lambda_t (the 0/0 case reads as 0).
    """
    for name in ("lambda", "alpha"):
        if not trace.has(name):
            raise MissingScheduleMetadata(f"trace lacks column {name!r}")
    lam = trace.column("lambda")[1:]
    alpha = trace.column("alpha")[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        drift_terms = np.where(alpha > 0.0, consts.c1 * alpha / lam, 0.0)
    return float(consts.c0 + drift_terms.sum() + consts.c2 * lam.sum())


def proxy_bound_rhs(trace: RunTrace, consts: ExplicitConstants, k: int) -> float:
    """Online-schedule bound C0 log K + 4 sqrt(C1 C2 T A_hat_T)."""
    if not trace.has("proxy"):
        raise MissingScheduleMetadata("trace lacks column 'proxy'")
    a_hat_total = float(trace.column("proxy").sum())
    horizon = len(trace)
    return float(
        consts.c0 * math.log(k)
        + 4.0 * math.sqrt(consts.c1 * consts.c2 * horizon * a_hat_total)
    )

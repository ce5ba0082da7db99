"""Temperature schedules and the drift-proxy bookkeeping that feeds them.

Four schedule modes share one config: a fixed value, the per-round
oracle sqrt(C1*alpha_t/C2), the offline constant sqrt(C1*A_T/(C2*T)),
and the clipped online rule sqrt(C1/C2)*sqrt(A_hat_t/t) driven by an
observable proxy (e.g. a TD-error quantile).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatch, NegativeError

MODES = ("fixed", "oracle", "offline", "online")


@dataclass(frozen=True)
class ScheduleConfig:
    """Constants governing every lambda/eta schedule.

    ``c`` couples the mirror-descent step size to the temperature via
    eta = c * lambda. Defaults: quantile 0.9, EMA 0.95, clip range
    [0.05, 1.0], C1 = C2 = c = 1.
    """

    c1: float = 1.0
    c2: float = 1.0
    c: float = 1.0
    lambda_min: float = 0.05
    lambda_max: float = 1.0
    quantile_q: float = 0.9
    ema_beta: float = 0.95
    mode: str = "online"
    fixed_value: float = 0.1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("c1", "c2", "c", "lambda_min"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.lambda_max < self.lambda_min:
            raise ValueError("lambda_max must be >= lambda_min")
        if not 0.0 < self.quantile_q <= 1.0:
            raise ValueError("quantile_q must lie in (0, 1]")
        if not 0.0 <= self.ema_beta < 1.0:
            raise ValueError("ema_beta must lie in [0, 1)")
        if self.mode == "fixed" and self.fixed_value <= 0.0:
            raise ValueError("fixed_value must be positive in fixed mode")


@dataclass(frozen=True)
class ProxyState:
    """Running proxy statistics: EMA of the raw signal and its prefix sum."""

    a_hat_sum: float = 0.0
    t: int = 0
    ema_value: float = 0.0


def oracle_lambda(alpha_t: float, cfg: ScheduleConfig) -> float:
    """Per-round minimizer of C1*alpha/lambda + C2*lambda."""
    if alpha_t < 0.0:
        raise ValueError("drift must be nonnegative")
    return math.sqrt(cfg.c1 * alpha_t / cfg.c2)


def offline_lambda(a_total: float, horizon: int, cfg: ScheduleConfig) -> float:
    """Best constant temperature given total drift a_total over horizon rounds."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if a_total < 0.0:
        raise ValueError("total drift must be nonnegative")
    return math.sqrt(cfg.c1 * a_total / (cfg.c2 * horizon))


def online_lambda(state: ProxyState, cfg: ScheduleConfig) -> float:
    """Clipped prefix-average rule sqrt(C1/C2) * sqrt(A_hat_t / t)."""
    if state.t < 1:
        raise ValueError("proxy state has not been updated yet")
    raw = math.sqrt(cfg.c1 / cfg.c2) * math.sqrt(state.a_hat_sum / state.t)
    return float(min(cfg.lambda_max, max(cfg.lambda_min, raw)))


def td_quantile_proxy(abs_errors, q: float) -> float:
    """Nearest-rank q-quantile of a batch of absolute errors.

    Sorts ascending and returns the element at index ceil(q*n) - 1.
    """
    errs = np.asarray(abs_errors, dtype=float)
    if errs.size == 0:
        raise EmptyBatch("quantile of an empty batch")
    if (errs < 0.0).any():
        raise NegativeError("absolute errors must be nonnegative")
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1]")
    idx = math.ceil(q * errs.size) - 1
    return float(np.sort(errs)[idx])


def update_proxy(state: ProxyState, raw: float, cfg: ScheduleConfig) -> ProxyState:
    """Fold one raw proxy reading into the EMA and its prefix sum."""
    if raw < 0.0:
        raise NegativeError("proxy reading must be nonnegative")
    if state.t == 0:
        ema = float(raw)
    else:
        ema = cfg.ema_beta * state.ema_value + (1.0 - cfg.ema_beta) * raw
    return ProxyState(a_hat_sum=state.a_hat_sum + ema, t=state.t + 1, ema_value=ema)


def eta_from_lambda(lam: float, eta_prev: float, cfg: ScheduleConfig) -> float:
    """Monotone step-size envelope max(eta_prev, c * lambda)."""
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    return max(eta_prev, cfg.c * lam)


class FixedSchedule:
    """Constant temperature; ignores the proxy."""

    def __init__(self, cfg: ScheduleConfig):
        self.cfg = cfg

    def step(self, alpha_hat: float) -> float:
        return self.cfg.fixed_value


class OracleSchedule:
    """Per-round oracle sqrt(C1*alpha_t/C2); needs the true drift."""

    def __init__(self, cfg: ScheduleConfig):
        self.cfg = cfg

    def step(self, alpha_hat: float) -> float:
        return oracle_lambda(alpha_hat, self.cfg)


class OfflineSchedule:
    """Constant sqrt(C1*A_T/(C2*T)); needs the total drift up front."""

    def __init__(self, cfg: ScheduleConfig, total_drift: float, horizon: int):
        self.cfg = cfg
        self.value = offline_lambda(total_drift, horizon, cfg)

    def step(self, alpha_hat: float) -> float:
        return self.value


class OnlineSchedule:
    """Clipped prefix-average schedule; owns its ProxyState."""

    def __init__(self, cfg: ScheduleConfig):
        self.cfg = cfg
        self.state = ProxyState()

    def step(self, alpha_hat: float) -> float:
        self.state = update_proxy(self.state, alpha_hat, self.cfg)
        return online_lambda(self.state, self.cfg)


def build_schedule(cfg: ScheduleConfig, total_drift: float | None = None,
                   horizon: int | None = None):
    """Instantiate the schedule named by cfg.mode."""
    if cfg.mode == "fixed":
        return FixedSchedule(cfg)
    if cfg.mode == "oracle":
        return OracleSchedule(cfg)
    if cfg.mode == "offline":
        if total_drift is None or horizon is None:
            raise ValueError("offline mode needs total_drift and horizon")
        return OfflineSchedule(cfg, total_drift, horizon)
    return OnlineSchedule(cfg)

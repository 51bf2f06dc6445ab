"""Per-path delay models and deadline-hit probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ScenarioConfig
from .link import link_metrics
from .queueing import (
    QueueSpec,
    StateDistribution,
    cumulative_probability,
    state_probability,
    stationary_distribution,
    waiting_time,
)


@dataclass(frozen=True)
class DelayBreakdown:
    wait: float
    service: float
    t_ul: float = 0.0
    t_dl: float = 0.0
    round_trip_prop: float = 0.0

    @property
    def comm(self) -> float:
        return self.t_ul + self.t_dl + self.round_trip_prop

    @property
    def total(self) -> float:
        return self.wait + self.service + self.comm


@dataclass(frozen=True)
class DeadlineBudget:
    f_max: int
    delta: float
    feasible: bool = True
    # whole service slots available (floor of the slack ratio)
    slots: int = 0


@dataclass(frozen=True)
class CommDelays:
    t_ul: float
    t_dl: float
    tau_p: float

    @property
    def total(self) -> float:
        return self.t_ul + self.t_dl + 2.0 * self.tau_p


def sharing_users(cfg: ScenarioConfig, eta: float) -> float:
    if cfg.bandwidth_sharing == "offloading":
        return max(eta * cfg.n, 1.0)
    return float(cfg.n)


def comm_delays(cfg: ScenarioConfig, eta: float = 1.0) -> CommDelays:
    users = sharing_users(cfg, eta)
    ul = link_metrics(cfg.uplink, cfg.geometry, users)
    dl = link_metrics(cfg.downlink, cfg.geometry, users)
    return CommDelays(ul.t_tx, dl.t_tx, ul.tau_p)


def gv_queue(eta: float, cfg: ScenarioConfig) -> QueueSpec:
    return QueueSpec((1.0 - eta) * cfg.r, cfg.compute.gv_service_time, 1)


def hap_queue(eta: float, cfg: ScenarioConfig) -> QueueSpec:
    return QueueSpec(eta * cfg.r * cfg.n, cfg.compute.hap_service_time, cfg.compute.hap_servers)


def gv_delay(eta: float, cfg: ScenarioConfig) -> DelayBreakdown:
    spec = gv_queue(eta, cfg)
    spec.require_stable()
    return DelayBreakdown(wait=waiting_time(spec), service=spec.service_time)


def hap_delay(eta: float, cfg: ScenarioConfig) -> DelayBreakdown:
    spec = hap_queue(eta, cfg)
    spec.require_stable()
    cd = comm_delays(cfg, eta)
    return DelayBreakdown(
        wait=waiting_time(spec),
        service=spec.service_time,
        t_ul=cd.t_ul,
        t_dl=cd.t_dl,
        round_trip_prop=2.0 * cd.tau_p,
    )


def _budget(slack: float, service: float, servers: int) -> DeadlineBudget:
    if slack < 0:
        return DeadlineBudget(0, 0.0, feasible=False)
    x = slack / service
    whole = math.floor(x)
    return DeadlineBudget(servers * whole, x - whole, True, whole)


def deadline_budget_hap(cfg: ScenarioConfig, t_max: float | None = None, eta: float = 1.0) -> DeadlineBudget:
    t_max = cfg.deadline if t_max is None else t_max
    slack = t_max - comm_delays(cfg, eta).total
    return _budget(slack, cfg.compute.hap_service_time, cfg.compute.hap_servers)


def deadline_budget_gv(cfg: ScenarioConfig, t_max: float | None = None) -> DeadlineBudget:
    t_max = cfg.deadline if t_max is None else t_max
    return _budget(t_max, cfg.compute.gv_service_time, 1)


def binomial_pmf(k: int, n: int, p: float) -> float:
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def rt_prob_hap(dist: StateDistribution, budget: DeadlineBudget, c: int) -> float:
    # No whole service slot: the arriving frame cannot finish its own service.
    if not budget.feasible or budget.f_max == 0:
        return 0.0
    f, delta = budget.f_max, budget.delta
    residual = 0.0
    if delta > 0:
        partial = 0.0
        for k in range(1, c + 1):
            partial += state_probability(dist, f + k - 1)
            residual += binomial_pmf(k, c, delta) * partial
    return min(1.0, residual + cumulative_probability(dist, f))


def rt_prob_gv(dist: StateDistribution, budget: DeadlineBudget) -> float:
    if not budget.feasible or budget.f_max == 0:
        return 0.0
    f = budget.f_max
    return min(1.0, cumulative_probability(dist, f) + budget.delta * state_probability(dist, f))


def p_hap(eta: float, cfg: ScenarioConfig, t_max: float | None = None) -> float:
    spec = hap_queue(eta, cfg)
    spec.require_stable()
    return rt_prob_hap(
        stationary_distribution(spec), deadline_budget_hap(cfg, t_max, eta), spec.servers
    )


def p_gv(eta: float, cfg: ScenarioConfig, t_max: float | None = None) -> float:
    spec = gv_queue(eta, cfg)
    spec.require_stable()
    return rt_prob_gv(stationary_distribution(spec), deadline_budget_gv(cfg, t_max))


def rt_prob(eta: float, cfg: ScenarioConfig, t_max: float | None = None) -> float:
    """Blended probability that a frame meets the deadline."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"offloading factor must lie in [0, 1], got {eta}")
    total = 0.0
    if eta > 0:
        total += eta * p_hap(eta, cfg, t_max)
    if eta < 1:
        total += (1.0 - eta) * p_gv(eta, cfg, t_max)
    return total


def avg_latency(eta: float, cfg: ScenarioConfig) -> float:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"offloading factor must lie in [0, 1], got {eta}")
    total = 0.0
    if eta > 0:
        total += eta * hap_delay(eta, cfg).total
    if eta < 1:
        total += (1.0 - eta) * gv_delay(eta, cfg).total
    return total


__all__ = [
    "CommDelays",
    "DeadlineBudget",
    "DelayBreakdown",
    "avg_latency",
    "binomial_pmf",
    "comm_delays",
    "deadline_budget_gv",
    "deadline_budget_hap",
    "gv_delay",
    "gv_queue",
    "hap_delay",
    "hap_queue",
    "p_gv",
    "p_hap",
    "rt_prob",
    "rt_prob_gv",
    "rt_prob_hap",
]

"""Choice of the shared offloading factor eta."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .config import ScenarioConfig
from .errors import InfeasibleScenario
from .latency import avg_latency, gv_queue, hap_queue, rt_prob

STABILITY_MARGIN = 1e-6
COARSE_POINTS = 64
ETA_TOL = 1e-6
TIE_TOL = 1e-9


@dataclass(frozen=True)
class FeasibleRange:
    eta_min: float
    eta_max: float
    # stability bounds before the inward shrink
    raw_min: float = 0.0
    raw_max: float = 1.0

    @property
    def empty(self) -> bool:
        return self.eta_min > self.eta_max

    def contains(self, eta: float) -> bool:
        return self.eta_min <= eta <= self.eta_max

    def grid(self, points: int) -> np.ndarray:
        return np.linspace(self.eta_min, self.eta_max, points)


@dataclass(frozen=True)
class Evaluation:
    eta: float
    p_rt: float | None
    avg_latency: float | None
    gv_stable: bool
    hap_stable: bool

    @property
    def stable(self) -> bool:
        return self.gv_stable and self.hap_stable


@dataclass(frozen=True)
class OptimizationResult:
    eta_star: float
    p_rt_at_star: float
    avg_latency_at_star: float
    range: FeasibleRange
    eta_baseline: float
    baseline: Evaluation
    diagnostics: dict = field(default_factory=dict)

    @property
    def p_rt_baseline(self) -> float | None:
        return self.baseline.p_rt


def feasible_range(cfg: ScenarioConfig) -> FeasibleRange:
    rC = cfg.r * cfg.compute.frame_load
    gv_bound = 1.0 - cfg.compute.gv_capacity / rC
    hap_bound = cfg.compute.hap_servers * cfg.compute.hap_capacity / (rC * cfg.n)

    # G_GV < 1 and G_HAP < c are strict; step off any endpoint where they bind
    lo = max(0.0, gv_bound)
    if gv_bound >= 0.0:
        lo = gv_bound + STABILITY_MARGIN
    hi = min(1.0, hap_bound)
    if hap_bound <= 1.0:
        hi = hap_bound - STABILITY_MARGIN

    rng = FeasibleRange(lo, hi, max(0.0, gv_bound), min(1.0, hap_bound))
    if rng.empty:
        raise InfeasibleScenario(
            f"no stable offloading factor: need eta > {gv_bound:.6g} and eta < {hap_bound:.6g}"
        )
    return rng


def baseline_factor(cfg: ScenarioConfig) -> float:
    """Offloading factor giving equal per-server load on the HAP and the GVs."""
    p = cfg.compute
    return 1.0 / (cfg.n * p.gv_capacity / (p.hap_servers * p.hap_capacity) + 1.0)


def evaluate_at(cfg: ScenarioConfig, eta: float) -> Evaluation:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"offloading factor must lie in [0, 1], got {eta}")
    gv_ok = eta == 1.0 or gv_queue(eta, cfg).stable()
    hap_ok = eta == 0.0 or hap_queue(eta, cfg).stable()
    if not (gv_ok and hap_ok):
        return Evaluation(eta, None, None, gv_ok, hap_ok)
    return Evaluation(eta, rt_prob(eta, cfg), avg_latency(eta, cfg), True, True)


def _refine(objective, lo: float, hi: float) -> tuple[float, float, int]:
    res = minimize_scalar(
        lambda e: -objective(e),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": ETA_TOL * 0.1},
    )
    return float(res.x), float(-res.fun), int(res.nfev)


def optimize(cfg: ScenarioConfig, coarse_points: int = COARSE_POINTS) -> OptimizationResult:
    """Maximize the real-time probability over the stable range.

    A uniform grid locates the best bracket (the objective need not be
    unimodal), bounded Brent refines inside it. Near-ties resolve to the
    smaller eta; a refined point replaces the best grid point only if it
    improves on it by more than TIE_TOL.
    """
    rng = feasible_range(cfg)

    def objective(e: float) -> float:
        return rt_prob(min(max(e, rng.eta_min), rng.eta_max), cfg)

    evals = 0
    if rng.eta_max - rng.eta_min < ETA_TOL:
        grid = np.array([rng.eta_min])
    else:
        grid = rng.grid(coarse_points)
    values = np.array([objective(e) for e in grid])
    evals += grid.size

    best_val = values.max()
    # first index within TIE_TOL of the best: smallest eta among ties
    i = int(np.flatnonzero(values >= best_val - TIE_TOL)[0])
    eta_star, p_star = float(grid[i]), float(values[i])

    iterations = 0
    if grid.size > 1:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, grid.size - 1)]
        x, fx, iterations = _refine(objective, lo, hi)
        evals += iterations
        if fx > p_star + TIE_TOL:
            eta_star, p_star = x, fx

    eta_bl = baseline_factor(cfg)
    return OptimizationResult(
        eta_star=eta_star,
        p_rt_at_star=p_star,
        avg_latency_at_star=avg_latency(eta_star, cfg),
        range=rng,
        eta_baseline=eta_bl,
        baseline=evaluate_at(cfg, eta_bl),
        diagnostics={"grid_points": int(grid.size), "solver_evaluations": iterations,
                     "objective_evaluations": evals},
    )


def offered_traffic(cfg: ScenarioConfig, eta: float) -> tuple[float, float]:
    """(G_GV, G_HAP) at offloading factor eta."""
    return gv_queue(eta, cfg).offered_traffic, hap_queue(eta, cfg).offered_traffic


def is_finite(x: float | None) -> bool:
    return x is not None and math.isfinite(x)

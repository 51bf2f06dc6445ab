"""Seeded discrete-event simulation used as ground truth for the analysis.

Random streams come from numpy's PCG64 generator. ``simulate_mdc`` uses a
single stream seeded with ``seed``; ``simulate_system`` derives one child
stream per GV source plus one routing stream from ``SeedSequence(seed)``.
The same seed always reproduces the same statistics bit for bit on a given
backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import run_mdc
from .config import ScenarioConfig
from .latency import comm_delays, gv_queue, hap_queue
from .queueing import QueueSpec

MIN_FRAMES = 10_000
BATCHES = 32


@dataclass(frozen=True)
class SimConfig:
    scenario: ScenarioConfig
    eta: float
    frame_budget: int = 1_000_000
    warmup_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.frame_budget < MIN_FRAMES:
            raise ValueError(f"frame_budget must be >= {MIN_FRAMES}")
        if not 0.0 <= self.warmup_fraction < 0.5:
            raise ValueError("warmup_fraction must lie in [0, 0.5)")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class PathStats:
    frames: int
    arrival_rate: float
    state_probs: np.ndarray
    mean_wait: float
    mean_wait_se: float
    mean_latency: float
    mean_latency_se: float
    time_avg_queue: float
    deadline_fraction: float | None = None
    deadline_se: float | None = None


@dataclass(frozen=True, eq=False)
class FrameTrace:
    path: np.ndarray  # 0 = local, 1 = offloaded
    gen_time: np.ndarray
    end_time: np.ndarray
    met_deadline: np.ndarray


@dataclass(frozen=True, eq=False)
class SimStats:
    frames: int
    paths: dict[str, PathStats]
    mean_latency: float
    mean_latency_se: float
    deadline_fraction: float | None = None
    deadline_se: float | None = None
    trace: FrameTrace | None = field(default=None, repr=False)

    def __getitem__(self, path: str) -> PathStats:
        return self.paths[path]


def batch_means_se(x: np.ndarray, batches: int = BATCHES) -> float:
    """Standard error of the mean from contiguous batch means."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float("nan")
    b = min(batches, x.size)
    means = np.array([chunk.mean() for chunk in np.array_split(x, b)])
    se = means.std(ddof=1) / np.sqrt(b)
    if se == 0.0:
        # all batches identical (e.g. every frame missed the deadline): fall back to iid bound
        se = x.std(ddof=1) / np.sqrt(x.size)
    return float(se)


def _histogram(seen: np.ndarray) -> np.ndarray:
    counts = np.bincount(seen)
    return counts / counts.sum()


def _path_stats(waits, seen, latency, met, rate, area_q, duration) -> PathStats:
    return PathStats(
        frames=int(waits.size),
        arrival_rate=float(rate),
        state_probs=_histogram(seen),
        mean_wait=float(waits.mean()),
        mean_wait_se=batch_means_se(waits),
        mean_latency=float(latency.mean()),
        mean_latency_se=batch_means_se(latency),
        time_avg_queue=float(area_q / duration),
        deadline_fraction=None if met is None else float(met.mean()),
        deadline_se=None if met is None else batch_means_se(met),
    )


def simulate_mdc(
    spec: QueueSpec,
    frames: int,
    seed: int,
    warmup_fraction: float = 0.1,
    deadline: float | None = None,
    backend: str | None = None,
) -> SimStats:
    """FCFS M/D/c run with ``frames`` Poisson arrivals.

    ``deadline`` optionally scores each frame's sojourn time (wait + D).
    """
    spec.require_stable()
    if frames < MIN_FRAMES:
        raise ValueError(f"frames must be >= {MIN_FRAMES}")
    if spec.arrival_rate <= 0:
        raise ValueError("simulation needs a positive arrival rate")
    rng = np.random.Generator(np.random.PCG64(seed))
    arrivals = np.cumsum(rng.exponential(1.0 / spec.arrival_rate, frames))
    k0 = int(frames * warmup_fraction)
    t_lo, t_hi = arrivals[k0], arrivals[-1]

    waits, seen, area_q, _ = run_mdc(arrivals, spec.service_time, spec.servers, t_lo, t_hi, backend)
    waits, seen = waits[k0:], seen[k0:]
    sojourn = waits + spec.service_time
    met = None if deadline is None else (sojourn <= deadline).astype(float)
    duration = t_hi - t_lo
    stats = _path_stats(waits, seen, sojourn, met, (frames - k0 - 1) / duration, area_q, duration)
    return SimStats(
        frames=stats.frames,
        paths={"queue": stats},
        mean_latency=stats.mean_latency,
        mean_latency_se=stats.mean_latency_se,
        deadline_fraction=stats.deadline_fraction,
        deadline_se=stats.deadline_se,
    )


def simulate_system(sim: SimConfig, keep_trace: bool = False, backend: str | None = None) -> SimStats:
    """n Poisson GV sources, Bernoulli(eta) routing, per-GV M/D/1, shared M/D/c."""
    cfg = sim.scenario
    eta, n = sim.eta, cfg.n
    gv_spec, hap_spec = gv_queue(eta, cfg), hap_queue(eta, cfg)
    if eta < 1:
        gv_spec.require_stable()
    if eta > 0:
        hap_spec.require_stable()
    comm = comm_delays(cfg, eta)
    up_delay = comm.t_ul + comm.tau_p
    down_delay = comm.t_dl + comm.tau_p

    horizon = sim.frame_budget / (n * cfg.r)
    t_warm = sim.warmup_fraction * horizon
    window = horizon - t_warm
    gen_parts, route = _sources(cfg, horizon, sim.seed)
    gen = np.concatenate(gen_parts)
    offload = route < eta

    waits = np.zeros(gen.size)
    seen = np.zeros(gen.size, dtype=np.int64)
    latency = np.empty(gen.size)
    paths: dict[str, PathStats] = {}
    keep = gen >= t_warm

    if eta < 1:
        d_gv = gv_spec.service_time
        area = 0.0
        starts = np.concatenate([[0], np.cumsum([p.size for p in gen_parts])])
        for i in range(n):
            idx = starts[i] + np.flatnonzero(~offload[starts[i]:starts[i + 1]])
            w, s, a_q, _ = run_mdc(gen[idx], d_gv, 1, t_warm, horizon, backend)
            waits[idx], seen[idx] = w, s
            area += a_q
        local = ~offload
        latency[local] = waits[local] + d_gv
        sel = local & keep
        met = (latency[sel] <= cfg.deadline).astype(float)
        paths["gv"] = _path_stats(
            waits[sel], seen[sel], latency[sel], met, sel.sum() / (window * n), area / n, window
        )

    if eta > 0:
        d_hap = hap_spec.service_time
        idx = np.flatnonzero(offload)
        arr = gen[idx] + up_delay
        order = np.argsort(arr, kind="stable")
        idx, arr = idx[order], arr[order]
        w, s, a_q, _ = run_mdc(
            arr, d_hap, hap_spec.servers, t_warm + up_delay, horizon + up_delay, backend
        )
        waits[idx], seen[idx] = w, s
        latency[idx] = up_delay + w + d_hap + down_delay
        sel = offload & keep
        met = (latency[sel] <= cfg.deadline).astype(float)
        paths["hap"] = _path_stats(
            waits[sel], seen[sel], latency[sel], met, sel.sum() / window, a_q, window
        )

    order = np.argsort(gen, kind="stable")
    order = order[keep[order]]
    lat = latency[order]
    met_all = (lat <= cfg.deadline).astype(float)
    trace = None
    if keep_trace:
        trace = FrameTrace(
            path=offload[order].astype(np.int8),
            gen_time=gen[order],
            end_time=gen[order] + lat,
            met_deadline=met_all.astype(bool),
        )
    return SimStats(
        frames=int(order.size),
        paths=paths,
        mean_latency=float(lat.mean()),
        mean_latency_se=batch_means_se(lat),
        deadline_fraction=float(met_all.mean()),
        deadline_se=batch_means_se(met_all),
        trace=trace,
    )


def _sources(cfg: ScenarioConfig, horizon: float, seed: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-GV sorted generation times on [0, horizon) and one routing uniform per frame."""
    streams = np.random.SeedSequence(seed).spawn(cfg.n + 1)
    parts = []
    for s in streams[: cfg.n]:
        rng = np.random.Generator(np.random.PCG64(s))
        parts.append(np.sort(rng.uniform(0.0, horizon, rng.poisson(cfg.r * horizon))))
    total = sum(p.size for p in parts)
    route = np.random.Generator(np.random.PCG64(streams[cfg.n])).random(total)
    return parts, route


def hap_arrival_times(sim: SimConfig) -> np.ndarray:
    """Generation epochs of offloaded frames (superposed, thinned GV streams)."""
    cfg = sim.scenario
    parts, route = _sources(cfg, sim.frame_budget / (cfg.n * cfg.r), sim.seed)
    gen = np.concatenate(parts)
    return np.sort(gen[route < sim.eta])


def dispersion_index(times: np.ndarray, window: float) -> float:
    """Variance-to-mean ratio of event counts in consecutive windows."""
    t0, t1 = times.min(), times.max()
    bins = int((t1 - t0) // window)
    counts, _ = np.histogram(times, bins=bins, range=(t0, t0 + bins * window))
    return float(counts.var(ddof=1) / counts.mean())

"""Latency-aware offloading from ground vehicles to a HAP edge server.

Analytical M/D/1 and M/D/c queueing models, a mmWave link budget, the
real-time probability objective and its optimizer, plus a discrete-event
simulator used to check the analysis.
"""

from .config import ComputeProfile, ScenarioConfig, load_config, write_config
from .des import SimConfig, SimStats, simulate_mdc, simulate_system
from .errors import (
    ConfigError,
    HapvecError,
    InfeasibleScenario,
    NoConvergence,
    ParseError,
    SingularSystem,
    UnstableQueue,
    ValidationError,
)
from .latency import avg_latency, rt_prob
from .optimizer import baseline_factor, evaluate_at, feasible_range, optimize
from .queueing import (
    QueueSpec,
    compute_decay_root,
    mean_queue_length,
    mean_waiting_time,
    stationary_distribution,
    waiting_time,
)

__version__ = "0.1.0"

__all__ = [
    "ComputeProfile",
    "ConfigError",
    "HapvecError",
    "InfeasibleScenario",
    "NoConvergence",
    "ParseError",
    "QueueSpec",
    "ScenarioConfig",
    "SimConfig",
    "SimStats",
    "SingularSystem",
    "UnstableQueue",
    "ValidationError",
    "avg_latency",
    "baseline_factor",
    "compute_decay_root",
    "evaluate_at",
    "feasible_range",
    "load_config",
    "mean_queue_length",
    "mean_waiting_time",
    "optimize",
    "rt_prob",
    "simulate_mdc",
    "simulate_system",
    "stationary_distribution",
    "waiting_time",
    "write_config",
]

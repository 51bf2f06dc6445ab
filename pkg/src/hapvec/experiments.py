"""Single-point analysis, parameter sweeps and oracle validation reports.

Every runner returns plain rows (dicts with a fixed column order) that the
CLI writes as CSV. Cells that cannot hold a number carry a marker string:
``unstable`` (queue has no steady state), ``infeasible`` (empty stability
range) or ``n/a`` (quantity does not exist, e.g. HAP metrics at eta = 0).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import ScenarioConfig, config_from_dict, read_yaml
from .des import SimConfig, simulate_system
from .errors import InfeasibleScenario, ParseError, ValidationError
from .latency import gv_delay, hap_delay, hap_queue, gv_queue, p_gv, p_hap
from .optimizer import evaluate_at, optimize
from .queueing import waiting_time

UNSTABLE = "unstable"
INFEASIBLE = "infeasible"
NA = "n/a"

SWEEP_PARAMS = ("n", "r", "C_GV", "C_HAP", "n_UL", "t_max")
MODES = ("analytical", "simulate", "both")
PRESETS = ("default", "fig1a", "fig1b", "fig2a")

PARAM_COLUMNS = list(SWEEP_PARAMS)
ANALYTICAL_COLUMNS = [
    "status", "eta_min", "eta_max", "eta_star", "eta_baseline",
    "p_rt_star", "p_rt_baseline", "p_rt_local",
    "latency_star", "latency_baseline", "latency_local",
    "local_stable", "baseline_stable",
]
SIMULATION_COLUMNS = [
    "sim_frames", "sim_p_rt_star", "sim_p_rt_star_se", "sim_latency_star", "sim_latency_star_se",
    "sim_wq_gv", "sim_wq_gv_se", "sim_wq_hap", "sim_wq_hap_se",
]
VALIDATE_COLUMNS = ["metric", "analytical", "simulated", "sim_se", "abs_diff", "tolerance", "status"]


def result_columns(mode: str) -> list[str]:
    if mode == "analytical":
        return PARAM_COLUMNS + ANALYTICAL_COLUMNS
    if mode == "simulate":
        return PARAM_COLUMNS + ["status", "eta_star"] + SIMULATION_COLUMNS
    if mode == "both":
        return PARAM_COLUMNS + ANALYTICAL_COLUMNS + SIMULATION_COLUMNS
    raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    mode: str = "analytical"

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMS:
            raise ValidationError("sweep.parameter", f"must be one of {SWEEP_PARAMS}")
        if not self.values:
            raise ValidationError("sweep.values", "must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValidationError("sweep.values", "must be strictly increasing")
        if self.mode not in MODES:
            raise ValidationError("sweep.mode", f"must be one of {MODES}")


def sweep_from_dict(raw) -> SweepSpec | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ValidationError("sweep", "expected a mapping")
    values = raw.get("values")
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise ValidationError("sweep.values", "expected a list of numbers")
    return SweepSpec(str(raw.get("parameter")), tuple(float(v) for v in values),
                     str(raw.get("mode", "analytical")))


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise ValidationError("preset", f"unknown preset {name!r}; choose from {PRESETS}")
    return Path(str(resources.files("hapvec") / "presets" / f"{name}.yaml"))


def load_scenario(config: str | Path | None = None, preset: str | None = None):
    """Scenario plus optional sweep section; a config file overrides a preset key by key."""
    raw: dict = {}
    if preset is not None:
        raw = read_yaml(preset_path(preset))
    if config is not None:
        user = read_yaml(config)
        raw = _merge(raw, user)
    return config_from_dict(raw), sweep_from_dict(raw.get("sweep"))


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def row_seed(root: int, index: int) -> int:
    return int(np.random.SeedSequence([root, index]).generate_state(1, np.uint64)[0])


def _local_eval(cfg: ScenarioConfig):
    ev = evaluate_at(cfg, 0.0)
    return ev


def _cell(x):
    return UNSTABLE if x is None else x


def run_analyze(cfg: ScenarioConfig, mode: str = "analytical", seed: int = 0,
                frames: int = 1_000_000, index: int = 0) -> dict:
    cols = result_columns(mode)
    row: dict = {p: cfg.param_value(p) for p in SWEEP_PARAMS}
    local = _local_eval(cfg)
    try:
        res = optimize(cfg)
    except InfeasibleScenario:
        res = None

    if res is None:
        row.update(status=INFEASIBLE, eta_min=INFEASIBLE, eta_max=INFEASIBLE,
                   eta_star=INFEASIBLE, p_rt_star=INFEASIBLE, latency_star=INFEASIBLE)
    else:
        row.update(status="ok", eta_min=res.range.eta_min, eta_max=res.range.eta_max,
                   eta_star=res.eta_star, p_rt_star=res.p_rt_at_star,
                   latency_star=res.avg_latency_at_star)

    from .optimizer import baseline_factor

    eta_bl = baseline_factor(cfg)
    bl = evaluate_at(cfg, eta_bl)
    row.update(
        eta_baseline=eta_bl,
        p_rt_baseline=_cell(bl.p_rt),
        latency_baseline=_cell(bl.avg_latency),
        baseline_stable=bl.stable,
        p_rt_local=_cell(local.p_rt),
        latency_local=_cell(local.avg_latency),
        local_stable=local.stable,
    )

    if mode in ("simulate", "both"):
        if res is None:
            row.update({c: INFEASIBLE for c in SIMULATION_COLUMNS})
        else:
            st = simulate_system(SimConfig(cfg, res.eta_star, frames, seed=row_seed(seed, index)))
            gv, hap = st.paths.get("gv"), st.paths.get("hap")
            row.update(
                sim_frames=st.frames,
                sim_p_rt_star=st.deadline_fraction,
                sim_p_rt_star_se=st.deadline_se,
                sim_latency_star=st.mean_latency,
                sim_latency_star_se=st.mean_latency_se,
                sim_wq_gv=gv.mean_wait if gv else NA,
                sim_wq_gv_se=gv.mean_wait_se if gv else NA,
                sim_wq_hap=hap.mean_wait if hap else NA,
                sim_wq_hap_se=hap.mean_wait_se if hap else NA,
            )
    return {c: row[c] for c in cols}


def run_sweep(cfg: ScenarioConfig, sweep: SweepSpec, seed: int = 0,
              frames: int = 1_000_000) -> list[dict]:
    return [
        run_analyze(cfg.with_param(sweep.parameter, v), sweep.mode, seed, frames, index=i)
        for i, v in enumerate(sweep.values)
    ]


# tolerances for the validation report: (kind, value)
VALIDATE_TOLERANCES = {
    "p_rt": ("abs", 0.03),
    "p_rt_gv": ("abs", 0.03),
    "p_rt_hap": ("abs", 0.03),
    "wq_gv": ("rel", 0.02),
    "wq_hap": ("rel", 0.02),
    "latency_gv": ("rel", 0.02),
    "latency_hap": ("rel", 0.02),
    "latency_mean": ("rel", 0.02),
}


def _verdict(metric: str, analytical, simulated, se) -> dict:
    kind, tol = VALIDATE_TOLERANCES[metric]
    tol_text = f"{kind}<={tol}"
    if analytical is None or simulated is None:
        return dict(metric=metric, analytical=NA, simulated=NA, sim_se=NA, abs_diff=NA,
                    tolerance=tol_text, status=NA)
    diff = abs(simulated - analytical)
    limit = tol if kind == "abs" else tol * abs(analytical)
    # differences within three standard errors are statistically indistinguishable
    ok = diff <= limit or diff <= 3.0 * se
    return dict(metric=metric, analytical=analytical, simulated=simulated, sim_se=se,
                abs_diff=diff, tolerance=tol_text, status="pass" if ok else "fail")


def run_validate(cfg: ScenarioConfig, eta: float, frames: int, seed: int) -> list[dict]:
    ev = evaluate_at(cfg, eta)
    if not ev.stable:
        raise InfeasibleScenario(
            f"eta={eta} is unstable (gv_stable={ev.gv_stable}, hap_stable={ev.hap_stable})"
        )
    st = simulate_system(SimConfig(cfg, eta, frames, seed=seed))
    gv, hap = st.paths.get("gv"), st.paths.get("hap")
    has_gv, has_hap = eta < 1, eta > 0

    def pick(flag, fn):
        return fn() if flag else None

    rows = [
        _verdict("p_rt", ev.p_rt, st.deadline_fraction, st.deadline_se),
        _verdict("p_rt_gv", pick(has_gv, lambda: p_gv(eta, cfg)),
                 pick(has_gv, lambda: gv.deadline_fraction), pick(has_gv, lambda: gv.deadline_se)),
        _verdict("p_rt_hap", pick(has_hap, lambda: p_hap(eta, cfg)),
                 pick(has_hap, lambda: hap.deadline_fraction), pick(has_hap, lambda: hap.deadline_se)),
        _verdict("wq_gv", pick(has_gv, lambda: waiting_time(gv_queue(eta, cfg))),
                 pick(has_gv, lambda: gv.mean_wait), pick(has_gv, lambda: gv.mean_wait_se)),
        _verdict("wq_hap", pick(has_hap, lambda: waiting_time(hap_queue(eta, cfg))),
                 pick(has_hap, lambda: hap.mean_wait), pick(has_hap, lambda: hap.mean_wait_se)),
        _verdict("latency_gv", pick(has_gv, lambda: gv_delay(eta, cfg).total),
                 pick(has_gv, lambda: gv.mean_latency), pick(has_gv, lambda: gv.mean_latency_se)),
        _verdict("latency_hap", pick(has_hap, lambda: hap_delay(eta, cfg).total),
                 pick(has_hap, lambda: hap.mean_latency), pick(has_hap, lambda: hap.mean_latency_se)),
        _verdict("latency_mean", ev.avg_latency, st.mean_latency, st.mean_latency_se),
    ]
    return rows


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def rows_to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_cell(r[c]) for c in columns])
    return buf.getvalue()


def write_trace_csv(trace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["frame_id", "path", "gen_time", "end_time", "met_deadline"])
        for i in range(trace.gen_time.size):
            w.writerow([i, "hap" if trace.path[i] else "gv", repr(float(trace.gen_time[i])),
                        repr(float(trace.end_time[i])), "true" if trace.met_deadline[i] else "false"])


__all__ = [
    "ParseError",
    "SweepSpec",
    "load_scenario",
    "result_columns",
    "rows_to_csv",
    "run_analyze",
    "run_sweep",
    "run_validate",
]

"""Scenario description and its YAML file format.

Units: rates in frames/s, loads in FLOP, capacities in FLOP/s, sizes in
bits, frequencies and bandwidths in Hz, distances in m, areas in m^2,
radio gains in dB. Numeric values must be plain YAML numbers; strings such
as ``"38 GHz"`` are rejected.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from .errors import ParseError, ValidationError
from .link import Geometry, LinkParams

SHARING_MODES = ("all", "offloading")


@dataclass(frozen=True)
class ComputeProfile:
    frame_load: float = 60e9
    gv_capacity: float = 800e9
    hap_capacity: float = 3000e9
    hap_servers: int = 15

    @property
    def gv_service_time(self) -> float:
        return self.frame_load / self.gv_capacity

    @property
    def hap_service_time(self) -> float:
        return self.frame_load / self.hap_capacity


DEFAULT_CARRIER = 38e9
DEFAULT_BANDWIDTH = 400e6
DEFAULT_UPLINK = LinkParams(
    eirp=16.0, g_over_t=5.0, carrier_frequency=DEFAULT_CARRIER,
    bandwidth=DEFAULT_BANDWIDTH, payload_bits=1e6,
)
DEFAULT_DOWNLINK = LinkParams(
    eirp=43.0, g_over_t=5.0, carrier_frequency=DEFAULT_CARRIER,
    bandwidth=DEFAULT_BANDWIDTH, payload_bits=1e5,
)


@dataclass(frozen=True)
class ScenarioConfig:
    n: int = 100
    r: float = 10.0
    t_max: float | None = None
    compute: ComputeProfile = field(default_factory=ComputeProfile)
    uplink: LinkParams = DEFAULT_UPLINK
    downlink: LinkParams = DEFAULT_DOWNLINK
    geometry: Geometry = field(default_factory=Geometry)
    bandwidth_sharing: str = "all"

    @property
    def deadline(self) -> float:
        return 1.0 / self.r if self.t_max is None else self.t_max

    @property
    def n_ul(self) -> float:
        return self.uplink.payload_bits

    @property
    def n_dl(self) -> float:
        return self.downlink.payload_bits

    def with_param(self, name: str, value: float) -> "ScenarioConfig":
        """Copy with one sweepable parameter replaced."""
        if name == "n":
            return replace(self, n=int(value))
        if name == "r":
            return replace(self, r=float(value))
        if name == "t_max":
            return replace(self, t_max=float(value))
        if name == "C_GV":
            return replace(self, compute=replace(self.compute, gv_capacity=float(value)))
        if name == "C_HAP":
            return replace(self, compute=replace(self.compute, hap_capacity=float(value)))
        if name == "n_UL":
            return replace(self, uplink=replace(self.uplink, payload_bits=float(value)))
        raise ValueError(f"unknown sweep parameter {name!r}")

    def param_value(self, name: str) -> float:
        return {
            "n": self.n,
            "r": self.r,
            "t_max": self.deadline,
            "C_GV": self.compute.gv_capacity,
            "C_HAP": self.compute.hap_capacity,
            "n_UL": self.n_ul,
        }[name]


# --- YAML loading -----------------------------------------------------------

class _Loader(yaml.SafeLoader):
    pass


# YAML 1.1 wants "6.0e+10"; also accept "6e10" / "6.0e10".
_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"),
)

_TOP_KEYS = {"n", "r", "t_max", "n_ul", "n_dl", "compute", "radio", "geometry", "sweep"}
_COMPUTE_KEYS = {"frame_load", "gv_capacity", "hap_capacity", "hap_servers"}
_RADIO_KEYS = {"carrier_frequency", "bandwidth", "bandwidth_sharing", "uplink", "downlink"}
_LINK_KEYS = {"eirp", "g_over_t", "excess_loss", "carrier_frequency", "bandwidth"}
_GEOM_KEYS = {"hap_altitude", "aoi_area", "gv_radial_distance"}


def _section(raw: Any, path: str, allowed: set[str]) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ValidationError(path, "expected a mapping")
    unknown = set(raw) - allowed
    if unknown:
        bad = sorted(str(u) for u in unknown)[0]
        raise ValidationError(f"{path}.{bad}" if path else bad, "unknown key")
    return raw


def _number(sec: dict, key: str, path: str, default, *, lower=None, strict=True, integer=False,
            allow_none=False):
    full = f"{path}.{key}" if path else key
    if key not in sec:
        return default
    v = sec[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(full, f"expected a plain number, got {v!r}")
    if not math.isfinite(v):
        raise ValidationError(full, "must be finite")
    if integer and int(v) != v:
        raise ValidationError(full, "must be an integer")
    if lower is not None:
        if strict and not v > lower:
            raise ValidationError(full, f"must be > {lower}")
        if not strict and not v >= lower:
            raise ValidationError(full, f"must be >= {lower}")
    return int(v) if integer else float(v)


def _link(raw, path, base: LinkParams, f_c, bw, payload) -> LinkParams:
    sec = _section(raw, path, _LINK_KEYS)
    return LinkParams(
        eirp=_number(sec, "eirp", path, base.eirp),
        g_over_t=_number(sec, "g_over_t", path, base.g_over_t),
        excess_loss=_number(sec, "excess_loss", path, base.excess_loss, lower=0, strict=False),
        carrier_frequency=_number(sec, "carrier_frequency", path, f_c, lower=0),
        bandwidth=_number(sec, "bandwidth", path, bw, lower=0),
        payload_bits=payload,
    )


def config_from_dict(raw: dict | None) -> ScenarioConfig:
    top = _section(raw, "", _TOP_KEYS)
    d = ScenarioConfig()

    comp = _section(top.get("compute"), "compute", _COMPUTE_KEYS)
    compute = ComputeProfile(
        frame_load=_number(comp, "frame_load", "compute", d.compute.frame_load, lower=0),
        gv_capacity=_number(comp, "gv_capacity", "compute", d.compute.gv_capacity, lower=0),
        hap_capacity=_number(comp, "hap_capacity", "compute", d.compute.hap_capacity, lower=0),
        hap_servers=_number(comp, "hap_servers", "compute", d.compute.hap_servers, lower=1,
                            strict=False, integer=True),
    )

    radio = _section(top.get("radio"), "radio", _RADIO_KEYS)
    f_c = _number(radio, "carrier_frequency", "radio", DEFAULT_CARRIER, lower=0)
    bw = _number(radio, "bandwidth", "radio", DEFAULT_BANDWIDTH, lower=0)
    sharing = radio.get("bandwidth_sharing", d.bandwidth_sharing)
    if sharing not in SHARING_MODES:
        raise ValidationError("radio.bandwidth_sharing", f"must be one of {SHARING_MODES}")
    n_ul = _number(top, "n_ul", "", d.n_ul, lower=0)
    n_dl = _number(top, "n_dl", "", d.n_dl, lower=0)
    uplink = _link(radio.get("uplink"), "radio.uplink", DEFAULT_UPLINK, f_c, bw, n_ul)
    downlink = _link(radio.get("downlink"), "radio.downlink", DEFAULT_DOWNLINK, f_c, bw, n_dl)

    geo = _section(top.get("geometry"), "geometry", _GEOM_KEYS)
    geometry = Geometry(
        hap_altitude=_number(geo, "hap_altitude", "geometry", d.geometry.hap_altitude, lower=0),
        aoi_area=_number(geo, "aoi_area", "geometry", d.geometry.aoi_area, lower=0),
        gv_radial_distance=_number(geo, "gv_radial_distance", "geometry", None, lower=0,
                                   strict=False, allow_none=True),
    )

    return ScenarioConfig(
        n=_number(top, "n", "", d.n, lower=1, strict=False, integer=True),
        r=_number(top, "r", "", d.r, lower=0),
        t_max=_number(top, "t_max", "", None, lower=0, allow_none=True),
        compute=compute,
        uplink=uplink,
        downlink=downlink,
        geometry=geometry,
        bandwidth_sharing=sharing,
    )


def read_yaml(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError:
        raise
    try:
        raw = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be a mapping")
    return raw


def load_config(path: str | Path) -> ScenarioConfig:
    return config_from_dict(read_yaml(path))


def config_to_dict(cfg: ScenarioConfig) -> dict:
    def link(lp: LinkParams, shared_f: float, shared_bw: float) -> dict:
        out = {"eirp": lp.eirp, "g_over_t": lp.g_over_t, "excess_loss": lp.excess_loss}
        if lp.carrier_frequency != shared_f:
            out["carrier_frequency"] = lp.carrier_frequency
        if lp.bandwidth != shared_bw:
            out["bandwidth"] = lp.bandwidth
        return out

    f_c, bw = cfg.uplink.carrier_frequency, cfg.uplink.bandwidth
    return {
        "n": cfg.n,
        "r": cfg.r,
        "t_max": cfg.t_max,
        "n_ul": cfg.n_ul,
        "n_dl": cfg.n_dl,
        "compute": {
            "frame_load": cfg.compute.frame_load,
            "gv_capacity": cfg.compute.gv_capacity,
            "hap_capacity": cfg.compute.hap_capacity,
            "hap_servers": cfg.compute.hap_servers,
        },
        "radio": {
            "carrier_frequency": f_c,
            "bandwidth": bw,
            "bandwidth_sharing": cfg.bandwidth_sharing,
            "uplink": link(cfg.uplink, f_c, bw),
            "downlink": link(cfg.downlink, f_c, bw),
        },
        "geometry": {
            "hap_altitude": cfg.geometry.hap_altitude,
            "aoi_area": cfg.geometry.aoi_area,
            "gv_radial_distance": cfg.geometry.gv_radial_distance,
        },
    }


def write_config(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False), encoding="utf-8")

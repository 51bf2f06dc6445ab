"""GV <-> HAP radio link: free-space path loss, SNR, Shannon rate, delays.

Configuration values are in the dB domain (dBW, dB/K, dB); everything
below the public helpers works in linear SI units with sizes in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ZeroRate

SPEED_OF_LIGHT = 2.998e8  # m/s
BOLTZMANN = 1.380649e-23  # J/K


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class LinkParams:
    eirp: float  # dBW
    g_over_t: float  # dB/K
    carrier_frequency: float  # Hz
    bandwidth: float  # Hz, total band before any per-GV split
    payload_bits: float
    excess_loss: float = 0.0  # dB

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be > 0")
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be > 0")
        if not self.payload_bits > 0:
            raise ValueError("payload_bits must be > 0")
        if not self.excess_loss >= 0:
            raise ValueError("excess_loss must be >= 0")


@dataclass(frozen=True)
class Geometry:
    hap_altitude: float = 20e3  # m
    aoi_area: float = 1000e6  # m^2
    gv_radial_distance: float | None = None  # m, overrides the median

    def __post_init__(self):
        if not self.hap_altitude > 0:
            raise ValueError("hap_altitude must be > 0")
        if not self.aoi_area > 0:
            raise ValueError("aoi_area must be > 0")
        if self.gv_radial_distance is not None and self.gv_radial_distance < 0:
            raise ValueError("gv_radial_distance must be >= 0")

    @property
    def slant_distance(self) -> float:
        return median_slant_distance(self)


@dataclass(frozen=True)
class LinkMetrics:
    snr: float  # linear
    rate: float  # bit/s
    t_tx: float  # s
    tau_p: float  # s


def fspl_db(f_c: float, d: float) -> float:
    return 20.0 * math.log10(4.0 * math.pi * d * f_c / SPEED_OF_LIGHT)


def path_loss(f_c: float, d: float, excess_loss: float = 0.0) -> float:
    """Linear path loss: free space plus a flat excess term in dB."""
    if f_c <= 0 or d <= 0:
        raise ValueError("path loss needs positive frequency and distance")
    return db_to_linear(fspl_db(f_c, d) + excess_loss)


def snr(link: LinkParams, pl: float, bandwidth: float | None = None) -> float:
    """EIRP * (G/T) / (PL * k * B); ``bandwidth`` defaults to the full band."""
    B = link.bandwidth if bandwidth is None else bandwidth
    if pl <= 0 or B <= 0:
        raise ValueError("snr needs positive path loss and bandwidth")
    return db_to_linear(link.eirp) * db_to_linear(link.g_over_t) / (pl * BOLTZMANN * B)


def capacity(gamma: float, bandwidth: float) -> float:
    if gamma < 0 or bandwidth <= 0:
        raise ValueError("capacity needs gamma >= 0 and a positive bandwidth")
    return bandwidth * math.log2(1.0 + gamma)


def transmission_time(n_bits: float, rate: float) -> float:
    if rate <= 0:
        raise ZeroRate("link rate is zero; transmission never completes")
    return n_bits / rate


def propagation_delay(d: float) -> float:
    if d < 0:
        raise ValueError("distance must be >= 0")
    return d / SPEED_OF_LIGHT


def median_slant_distance(geom: Geometry) -> float:
    """Slant range to a GV at the median radius of a uniform disk AoI.

    Half of the disk area lies within r_med = sqrt(A / (2 pi)).
    """
    if geom.gv_radial_distance is not None:
        rho = geom.gv_radial_distance
    else:
        rho = math.sqrt(geom.aoi_area / (2.0 * math.pi))
    return math.hypot(geom.hap_altitude, rho)


def link_metrics(link: LinkParams, geom: Geometry, sharing_users: float = 1.0) -> LinkMetrics:
    """Per-GV metrics when the band is split evenly across ``sharing_users``."""
    d = median_slant_distance(geom)
    b_alloc = link.bandwidth / max(sharing_users, 1.0)
    gamma = snr(link, path_loss(link.carrier_frequency, d, link.excess_loss), b_alloc)
    rate = capacity(gamma, b_alloc)
    return LinkMetrics(
        snr=gamma,
        rate=rate,
        t_tx=transmission_time(link.payload_bits, rate),
        tau_p=propagation_delay(d),
    )

"""Link budget and the deterministic time components of offloading."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

BITS_PER_BYTE = 8


@dataclass(frozen=True)
class LinkBudget:
    pathloss_attenuation: float
    interference_power: float
    noise_power: float
    uplink_rate: float
    downlink_rate: float


@dataclass(frozen=True)
class OffloadTiming:
    transmit_time: float
    compute_time: float
    wait_time: float
    receive_time: float
    total: float
    relayed_total: float | None = None


def pathloss_db(distance_m):
    if np.any(np.asarray(distance_m) <= 0):
        raise ValueError("distance must be positive")
    return 140.7 + 36.7 * np.log10(np.asarray(distance_m) / 1000.0)


def pathloss_attenuation(distance_m):
    """Linear channel gain ``10^(-PL/10)`` for the 3GPP-style dB path loss."""
    return 10.0 ** (-pathloss_db(distance_m) / 10.0)


def interference(interferers: Iterable[tuple[float, float, float]]) -> float:
    """Sum of ``indicator * attenuation * power`` over co-cell EUs."""
    return sum(ind * att * p for ind, att, p in interferers)


def uplink_rate(tx_power, attenuation, interference_power, bandwidth, noise_density):
    noise = noise_density * bandwidth
    return bandwidth * np.log2(1.0 + attenuation * tx_power / (interference_power + noise))


def downlink_rate(tx_power, attenuation, bandwidth, noise_density):
    return uplink_rate(tx_power, attenuation, 0.0, bandwidth, noise_density)


def link_budget(distance_m, eu_power, bs_power, bandwidth, noise_density, interference_power=0.0) -> LinkBudget:
    att = pathloss_attenuation(distance_m)
    return LinkBudget(
        att, interference_power, noise_density * bandwidth,
        uplink_rate(eu_power, att, interference_power, bandwidth, noise_density),
        downlink_rate(bs_power, att, bandwidth, noise_density),
    )


def transfer_time(size_bytes, rate_bps):
    return BITS_PER_BYTE * size_bytes / rate_bps


def compute_time(task, flops):
    if np.any(np.asarray(flops) <= 0):
        raise ValueError("compute rate must be positive")
    return task.ops_per_byte * task.upload_size / flops


def offload_timing(task, uplink, compute_rate, wait_time, downlink,
                   backhaul_time=None, relay_downlink=None) -> OffloadTiming:
    tx = transfer_time(task.upload_size, uplink)
    comp = compute_time(task, compute_rate)
    rx = transfer_time(task.download_size, downlink)
    total = tx + comp + wait_time + rx
    relayed = None
    if backhaul_time is not None:
        dest = downlink if relay_downlink is None else relay_downlink
        relayed = tx + comp + wait_time + backhaul_time + transfer_time(task.download_size, dest)
    return OffloadTiming(tx, comp, wait_time, rx, total, relayed)


def offload_time(task, uplink, compute_rate, wait_time, downlink):
    return offload_timing(task, uplink, compute_rate, wait_time, downlink).total


def relayed_offload_time(task, uplink, compute_rate, wait_time, backhaul_time, destination_downlink):
    return offload_timing(task, uplink, compute_rate, wait_time, destination_downlink,
                          backhaul_time=backhaul_time, relay_downlink=destination_downlink).relayed_total

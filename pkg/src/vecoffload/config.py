"""Load a :class:`ScenarioConfig` from a YAML document."""
from __future__ import annotations

import dataclasses
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .core import (GIGA, MB, NetworkClass, PolicyConfig, ScenarioConfig, TaskConfig, TrafficSchedule,
                   VehicleConfig, place_stations)


def _networks(raw: list[dict], length: float, width: float) -> tuple[NetworkClass, ...]:
    nets = []
    for m, n in enumerate(raw):
        if "bs_positions" in n:
            pos = tuple(tuple(p) for p in n["bs_positions"])
        else:
            pos = place_stations(int(n["bs_count"]), length, width, n.get("sides", ["lower", "upper"]))
        nets.append(NetworkClass(
            id=m,
            name=n.get("name", f"net{m}"),
            coverage_radius=float(n["coverage_m"]),
            bs_height=float(n["height_m"]),
            bandwidth=float(n["bandwidth_hz"]),
            compute_rate=float(n["compute_gflops"]) * GIGA,
            bs_positions=pos,
        ))
    return tuple(nets)


def config_from_dict(doc: dict[str, Any]) -> ScenarioConfig:
    area = doc.get("area", {})
    length = float(area.get("length_m", 1000))
    width = float(area.get("width_m", 50))
    radio = doc.get("radio", {})
    veh = doc.get("vehicle", {})
    task = doc.get("task", {})
    relay = doc.get("relay", {})
    sched = doc["schedule"]

    v_lo, v_hi = veh.get("velocity_mps", [10, 20])
    s_lo, s_hi = task.get("size_mb", [1, 5])
    schedule = TrafficSchedule.from_boundaries(
        sched.get("change_points", []),
        int(sched["horizon"]),
        sched["params"],
        mean_interarrival=sched.get("mean_interarrival"),
        error_range=sched.get("error_range", 0.0),
    )
    return ScenarioConfig(
        networks=_networks(doc["networks"], length, width),
        schedule=schedule,
        area_length=length,
        area_width=width,
        vehicle=VehicleConfig(
            v_min=float(v_lo),
            v_max=float(v_hi),
            transmit_power=float(veh.get("transmit_power_w", 0.2)),
            local_compute_rate=float(veh.get("compute_gflops", 15)) * GIGA,
        ),
        task=TaskConfig(
            size_min=float(s_lo) * MB,
            size_max=float(s_hi) * MB,
            download_ratio=float(task.get("download_ratio", 5)),
            processing_ops_per_byte=float(task.get("processing_gflop_per_mb", 10)) * GIGA / MB,
            collecting_ops_per_byte=float(task.get("collecting_gflop_per_mb", 1)) * GIGA / MB,
            processing_share=float(task.get("processing_share", 0.5)),
        ),
        policy=PolicyConfig(**doc.get("policy", {})),
        noise_density=float(radio.get("noise_density_w_per_hz", 1e-20)),
        bs_transmit_power=float(radio.get("bs_transmit_power_w", 1.0)),
        interferers=int(radio.get("interferers", 0)),
        relay_enabled=bool(relay.get("enabled", True)),
        relay_backhaul_time=float(relay.get("backhaul_time_s", 0.05)),
        bs_cap=doc.get("bs_cap"),
        background_load=float(doc.get("background_load", 0.0)),
        round_duration=float(doc.get("round_duration_s", 1.0)),
        seed=int(doc.get("seed", 0)),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(yaml.safe_load(fh))


def default_config(**overrides) -> ScenarioConfig:
    """The packaged default scenario; keyword overrides replace top-level fields."""
    text = resources.files("vecoffload").joinpath("default.yaml").read_text(encoding="utf-8")
    cfg = config_from_dict(yaml.safe_load(text))
    return dataclasses.replace(cfg, **overrides) if overrides else cfg

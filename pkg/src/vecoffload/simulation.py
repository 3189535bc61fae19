"""Round-by-round simulation of network selection, BS selection and task loss.

Everything that does not depend on the learner's choice (trajectory, tasks, queue waits of
every network, the best BS of every network, link rates) is drawn up front for the whole
horizon. A policy run then only walks the rounds, and all policies of one seed face the
same realisation.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bs_select, radio
from .bandits import Policy, make_policy
from .changepoint import ChangePointDetector
from .core import ScenarioConfig, Vehicle, draw_tasks
from .edge_queue import sample_waits
from .geometry import sojourn_along
from .offpolicy import LogBook, OffPolicyAgent, OffPolicyResult, SmoothedLogger, collect_logs, run_offpolicy

log = logging.getLogger("vecoffload")
log.setLevel(os.environ.get("VECOFFLOAD_LOG_LEVEL", "WARNING").upper())

POLICIES = ("sw-ucb", "d-ucb", "ucb", "eps-greedy", "random", "off-policy")


def config_hash(config: ScenarioConfig) -> str:
    doc = json.dumps(dataclasses.asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def _streams(config: ScenarioConfig, seed: int, n: int) -> list[np.random.Generator]:
    ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(seed,))
    return [np.random.default_rng(s) for s in ss.spawn(n)]


def policy_rng(config: ScenarioConfig, seed: int, name: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(seed, zlib.crc32(name.encode())))
    return np.random.default_rng(ss)


def spawn_vehicle(config: ScenarioConfig, rng: np.random.Generator) -> Vehicle:
    """Random spawn on the road; vehicles in the lower half drive right, the upper half left."""
    y = rng.uniform(0, config.area_width)
    return Vehicle(
        x=float(rng.uniform(0, config.area_length)),
        y=float(y),
        velocity=float(rng.uniform(config.vehicle.v_min, config.vehicle.v_max)),
        direction=1 if y < config.area_width / 2 else -1,
        transmit_power=config.vehicle.transmit_power,
        local_compute_rate=config.vehicle.local_compute_rate,
    )


@dataclass
class Environment:
    """Per-seed realisation; all arrays have one row per round (row 0 = round 1)."""

    config: ScenarioConfig
    seed: int
    vehicle: Vehicle
    x: np.ndarray
    tasks: object
    lam: np.ndarray
    mu: np.ndarray
    waits: np.ndarray  # (T, M) realised wait of every network
    expected: np.ndarray  # (T, M) lambda * mu
    interval: np.ndarray
    has_bs: np.ndarray  # (T, M) some BS of the network can take the task
    covered: np.ndarray  # (T, M) some BS of the network covers the vehicle
    best_bs: np.ndarray  # (T, M) index of the longest-sojourn BS, -1 if none
    sojourn: np.ndarray  # (T, M) seconds
    uplink_time: np.ndarray
    compute_time: np.ndarray
    receive_time: np.ndarray
    local_time: np.ndarray  # (T,)

    @property
    def horizon(self) -> int:
        return len(self.x)

    @property
    def available_all(self) -> np.ndarray:
        return self.covered.all(axis=1)

    @classmethod
    def build(cls, config: ScenarioConfig, seed: int) -> "Environment":
        r_veh, r_task, r_wait, r_intf, r_occ = _streams(config, seed, 5)
        T, M = config.horizon, config.n_networks
        veh = spawn_vehicle(config, r_veh)
        steps = np.arange(T) * (veh.direction * veh.velocity * config.round_duration)
        x = np.mod(veh.x + steps, config.area_length)
        tasks = draw_tasks(r_task, config, T)
        lam, mu = config.schedule.as_arrays()
        waits = sample_waits(lam, mu, r_wait)

        shape = (T, M)
        has_bs = np.zeros(shape, bool)
        covered = np.zeros(shape, bool)
        best = np.full(shape, -1)
        soj = np.zeros(shape)
        up_t = np.full(shape, np.inf)
        comp_t = np.zeros(shape)
        rx_t = np.full(shape, np.inf)
        for m, net in enumerate(config.networks):
            bx = np.array([p[0] for p in net.bs_positions])
            by = np.array([p[1] for p in net.bs_positions])
            d = np.sqrt(net.bs_height ** 2 + (by - veh.y) ** 2 + (bx[None, :] - x[:, None]) ** 2)
            inside = d < net.coverage_radius
            eligible = inside
            if config.bs_cap is not None:
                occ = bs_select.occupancy_draw(r_occ, config.background_load, inside.shape)
                eligible = inside & (occ < config.bs_cap)
            xp = np.sqrt(np.maximum(net.coverage_radius ** 2 - net.bs_height ** 2 - (by - veh.y) ** 2, 0.0))
            delta = np.where(eligible, sojourn_along(x[:, None], veh.direction, bx[None, :], xp[None, :]), -np.inf)
            j = np.argmax(delta, axis=1)
            ok = eligible.any(axis=1)
            rows = np.arange(T)
            dist = d[rows, j]
            interf = _interference(config, net, bx[j], by[j], T, r_intf)
            up = radio.uplink_rate(veh.transmit_power, radio.pathloss_attenuation(dist), interf,
                                   net.bandwidth, config.noise_density)
            dn = radio.downlink_rate(config.bs_transmit_power, radio.pathloss_attenuation(dist),
                                     net.bandwidth, config.noise_density)
            has_bs[:, m] = ok
            covered[:, m] = inside.any(axis=1)
            best[:, m] = np.where(ok, j, -1)
            soj[:, m] = np.where(ok, delta[rows, j], 0.0) / veh.velocity
            up_t[:, m] = radio.transfer_time(tasks.upload_size, up)
            comp_t[:, m] = radio.compute_time(tasks, net.compute_rate)
            rx_t[:, m] = radio.transfer_time(tasks.download_size, dn)
        local = radio.compute_time(tasks, veh.local_compute_rate)
        return cls(config, seed, veh, x, tasks, lam, mu, waits, lam * mu, config.schedule.interval_ids(),
                   has_bs, covered, best, soj, up_t, comp_t, rx_t, local)

    def historical_waits(self) -> np.ndarray:
        """An independent realisation of the queue waits, used as the logging history."""
        (rng,) = _streams(self.config, self.seed + 1_000_003, 1)
        return sample_waits(self.lam, self.mu, rng)

    def vehicle_at(self, round: int) -> Vehicle:
        return dataclasses.replace(self.vehicle, x=float(self.x[round - 1]))


def _interference(config: ScenarioConfig, net, bs_x, bs_y, T, rng) -> np.ndarray | float:
    """Co-cell interferers placed uniformly on the road inside the serving cell."""
    k = config.interferers
    if k == 0:
        return 0.0
    iy = rng.uniform(0, config.area_width, size=(T, k))
    chord = np.sqrt(np.maximum(net.coverage_radius ** 2 - net.bs_height ** 2 - (bs_y[:, None] - iy) ** 2, 0.0))
    ix = bs_x[:, None] + rng.uniform(-1, 1, size=(T, k)) * chord
    dist = np.sqrt(net.bs_height ** 2 + (bs_y[:, None] - iy) ** 2 + (bs_x[:, None] - ix) ** 2)
    return np.sum(radio.pathloss_attenuation(dist) * config.vehicle.transmit_power, axis=1)


@dataclass
class RunTrace:
    """Per-round metrics of one (policy, seed) run."""

    policy: str
    seed: int
    network: np.ndarray
    bs: np.ndarray
    wait: np.ndarray
    regret: np.ndarray
    lost: np.ndarray
    lost_relay: np.ndarray
    relayed: np.ndarray
    available_all: np.ndarray
    interval: np.ndarray
    optimal: np.ndarray  # chosen network had minimal expected cost
    uplink_time: np.ndarray
    sojourn: np.ndarray
    offload_time: np.ndarray
    relayed_time: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.network)

    @property
    def cumulative_regret(self) -> float:
        return float(self.regret[self.available_all].sum())

    def average_regret_series(self) -> np.ndarray:
        """Cumulative regret over counted rounds divided by the number of counted rounds so far."""
        counted = self.available_all
        n = np.maximum(np.cumsum(counted), 1)
        return np.cumsum(np.where(counted, self.regret, 0.0)) / n

    @property
    def final_average_regret(self) -> float:
        n = int(self.available_all.sum())
        return self.cumulative_regret / n if n else 0.0

    def selection_fractions(self) -> np.ndarray:
        """``(n_intervals, M)`` share of counted rounds each network was chosen, per interval."""
        k = int(self.interval.max()) + 1 if self.horizon else 0
        m = int(self.network.max()) + 1 if self.horizon else 0
        out = np.zeros((k, max(m, 1)))
        for i in range(k):
            sel = (self.interval == i) & self.available_all
            if sel.any():
                out[i, :m] = np.bincount(self.network[sel], minlength=m) / sel.sum()
        return out

    def optimal_fraction(self, interval: int, skip: int = 0) -> float:
        """Share of optimal choices in ``interval``, ignoring its first ``skip`` rounds."""
        idx = np.flatnonzero((self.interval == interval) & self.available_all)[skip:]
        return float(self.optimal[idx].mean()) if idx.size else float("nan")

    def interval_average_regret(self) -> np.ndarray:
        k = int(self.interval.max()) + 1 if self.horizon else 0
        out = np.zeros(k)
        for i in range(k):
            sel = (self.interval == i) & self.available_all
            out[i] = self.regret[sel].mean() if sel.any() else 0.0
        return out

    @property
    def mean_wait(self) -> float:
        sel = self.available_all
        return float(self.wait[sel].mean()) if sel.any() else 0.0

    @property
    def loss_count(self) -> int:
        return int(self.lost.sum())

    @property
    def relay_loss_count(self) -> int:
        return int(self.lost_relay.sum())


def run_policy(env: Environment, policy: Policy, rng: np.random.Generator, name: str | None = None) -> RunTrace:
    T = env.horizon
    arms = np.empty(T, dtype=int)
    waits = env.waits
    for t in range(1, T + 1):
        a = policy.select(t, rng)
        policy.update(a, float(waits[t - 1, a]), t)
        arms[t - 1] = a
    return trace_from_choices(env, arms, name or policy.name)


def trace_from_choices(env: Environment, arms: np.ndarray, name: str) -> RunTrace:
    """Task-level outcome of a sequence of network choices."""
    cfg = env.config
    rows = np.arange(env.horizon)
    wait = env.waits[rows, arms]
    regret = env.expected[rows, arms] - env.expected.min(axis=1)
    ok = env.has_bs[rows, arms]
    bs = env.best_bs[rows, arms]
    up = env.uplink_time[rows, arms]
    soj = env.sojourn[rows, arms]
    total = np.where(ok, up + env.compute_time[rows, arms] + wait + env.receive_time[rows, arms], env.local_time)
    lost = ok & bs_select.classify_loss(soj, total)
    lost_relay = lost.copy()
    relayed = np.zeros_like(lost)
    relayed_time = np.full(env.horizon, np.nan)
    for i in np.flatnonzero(lost):
        if bs_select.classify_loss_relay(soj[i], up[i]):
            continue
        net = cfg.networks[arms[i]]
        veh = env.vehicle_at(i + 1)
        origin = net.stations[bs[i]]
        dest = bs_select.relay_destination(veh, net, origin, cfg.area_length, cfg.relay_enabled)
        if dest is None:
            continue
        ready = up[i] + env.compute_time[i, arms[i]] + wait[i] + cfg.relay_backhaul_time
        att = radio.pathloss_attenuation(bs_select.reception_distance(veh, dest, ready, cfg.area_length))
        dn = radio.downlink_rate(cfg.bs_transmit_power, att, net.bandwidth, cfg.noise_density)
        relayed_time[i] = ready + radio.transfer_time(env.tasks.download_size[i], dn)
        lost_relay[i] = False
        relayed[i] = True
    return RunTrace(
        policy=name, seed=env.seed, network=arms, bs=np.where(ok, bs, -1), wait=wait, regret=regret,
        lost=lost, lost_relay=lost_relay, relayed=relayed, available_all=env.available_all,
        interval=env.interval, optimal=regret <= 1e-12, uplink_time=up, sojourn=soj, offload_time=total,
        relayed_time=relayed_time,
    )


def offpolicy_logs(env: Environment) -> LogBook:
    """History produced by a smoothed SW-UCB logger on an independent draw of the waits."""
    pc = env.config.policy
    logger = SmoothedLogger(make_policy("sw-ucb", env.config.n_networks, pc), pc.logging_smoothing)
    return collect_logs(logger, env.historical_waits(), env.lam, env.mu,
                        policy_rng(env.config, env.seed, "logger"))


def make_detector(config: ScenarioConfig) -> ChangePointDetector:
    s, pc = config.schedule, config.policy
    return ChangePointDetector(s.mean_interarrival, s.error_range, pc.alpha, null="queue",
                               trials=pc.calibration_trials)


def fit_offpolicy(env: Environment, logs: LogBook | None = None) -> OffPolicyResult:
    logs = offpolicy_logs(env) if logs is None else logs
    return run_offpolicy(logs, make_detector(env.config), epsilon_floor=env.config.policy.epsilon_floor)


def run_named(env: Environment, name: str, **overrides) -> RunTrace:
    """One policy on one environment; ``off-policy`` first learns from logged history."""
    rng = policy_rng(env.config, env.seed, name)
    if name == "off-policy":
        return run_policy(env, OffPolicyAgent(fit_offpolicy(env)), rng, name)
    return run_policy(env, make_policy(name, env.config.n_networks, env.config.policy, **overrides), rng, name)


@dataclass
class ExperimentReport:
    """Per-(policy, seed) traces plus the figure-level aggregates derived from them."""

    policies: list[str]
    seeds: list[int]
    config_hash: str
    horizon: int
    n_networks: int
    traces: dict[tuple[str, int], RunTrace] = field(repr=False)

    def trace(self, policy: str, seed: int) -> RunTrace:
        return self.traces[(policy, seed)]

    def final_regret(self, policy: str) -> np.ndarray:
        """Final average regret per seed."""
        return np.array([self.trace(policy, s).final_average_regret for s in self.seeds])

    def average_regret_series(self, policy: str) -> np.ndarray:
        return np.mean([self.trace(policy, s).average_regret_series() for s in self.seeds], axis=0)

    def cumulative_regret_series(self, policy: str) -> np.ndarray:
        return np.mean([np.cumsum(np.where(t.available_all, t.regret, 0.0))
                        for t in (self.trace(policy, s) for s in self.seeds)], axis=0)

    def selection_fractions(self, policy: str) -> np.ndarray:
        return np.mean([self.trace(policy, s).selection_fractions() for s in self.seeds], axis=0)

    def interval_regret(self, policy: str) -> np.ndarray:
        return np.mean([self.trace(policy, s).interval_average_regret() for s in self.seeds], axis=0)

    def mean_wait(self, policy: str) -> float:
        return float(np.mean([self.trace(policy, s).mean_wait for s in self.seeds]))

    def loss_counts(self, policy: str) -> tuple[float, float]:
        """Mean task-loss count per seed, without and with relaying."""
        ts = [self.trace(policy, s) for s in self.seeds]
        if not ts:
            return 0.0, 0.0
        return float(np.mean([t.loss_count for t in ts])), float(np.mean([t.relay_loss_count for t in ts]))

    def summary(self) -> dict:
        out = {"config_hash": self.config_hash, "horizon": self.horizon, "seeds": list(self.seeds),
               "policies": {}}
        for p in self.policies:
            lost, lost_relay = self.loss_counts(p)
            out["policies"][p] = {
                "final_average_regret": float(self.final_regret(p).mean()) if self.seeds else 0.0,
                "final_average_regret_per_seed": self.final_regret(p).tolist(),
                "cumulative_regret": float(np.mean([self.trace(p, s).cumulative_regret for s in self.seeds]))
                if self.seeds else 0.0,
                "interval_average_regret": self.interval_regret(p).tolist() if self.seeds else [],
                "selection_fractions": self.selection_fractions(p).tolist() if self.seeds else [],
                "mean_wait_s": self.mean_wait(p) if self.seeds else 0.0,
                "loss_count": lost,
                "loss_count_relay": lost_relay,
            }
        return out


def run_experiment(config: ScenarioConfig, policies: Sequence[str] = POLICIES,
                   seeds: int | Sequence[int] = 10, **overrides) -> ExperimentReport:
    """Every policy on every seed; all policies of a seed share one environment draw."""
    unknown = [p for p in policies if p not in POLICIES]
    if unknown:
        raise ValueError(f"unknown policies: {', '.join(unknown)}")
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    traces = {}
    for seed in seeds:
        env = Environment.build(config, seed)
        for name in policies:
            traces[(name, seed)] = run_named(env, name, **overrides)
            log.info("seed %d %s: final average regret %.4f", seed, name, traces[(name, seed)].final_average_regret)
    return ExperimentReport(list(policies), seeds, config_hash(config), config.horizon, config.n_networks, traces)

"""Task-offloading simulator for vehicular edge computing with bandit network selection."""
from .bandits import DiscountedUCB, EpsilonGreedy, RandomPolicy, SlidingWindowUCB, UCB, make_policy
from .changepoint import ChangePointDetector, calibrate_threshold, detect, lrt_statistic
from .config import default_config, load_config
from .core import NetworkClass, ScenarioConfig, TrafficSchedule, Vehicle
from .edge_queue import QueueModel, sample_wait
from .offpolicy import LogBook, OffPolicyAgent, ips_value, optimize_target, run_offpolicy
from .report import emit_report, load_summary
from .simulation import Environment, ExperimentReport, RunTrace, run_experiment

__all__ = [
    "ChangePointDetector", "DiscountedUCB", "Environment", "EpsilonGreedy", "ExperimentReport", "LogBook",
    "NetworkClass", "OffPolicyAgent", "QueueModel", "RandomPolicy", "RunTrace", "ScenarioConfig",
    "SlidingWindowUCB", "TrafficSchedule", "UCB", "Vehicle", "calibrate_threshold", "default_config", "detect",
    "emit_report", "ips_value", "load_config", "load_summary", "lrt_statistic", "make_policy",
    "optimize_target", "run_experiment", "run_offpolicy", "sample_wait",
]

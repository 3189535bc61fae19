import dataclasses

import numpy as np
import pytest

from vecoffload.core import (MB, AppKind, NetworkClass, ScenarioConfig, TaskConfig, TrafficSchedule,
                             draw_tasks, generate_task, place_stations, schedule_params)

TABLE2 = [
    [[7, 0.4], [3, 0.3], [10, 0.5]],
    [[3, 0.3], [10, 0.5], [7, 0.4]],
    [[10, 0.5], [7, 0.4], [3, 0.3]],
    [[3, 0.3], [10, 0.5], [7, 0.4]],
    [[7, 0.4], [10, 0.5], [3, 0.3]],
]
MACRO, MICRO, PICO = 0, 1, 2


@pytest.fixture
def schedule():
    return TrafficSchedule.from_boundaries([5000, 10000, 15000, 20000], 25000, TABLE2, 5000, 500)


class TestTaskGeneration:
    def test_top_of_range_gives_one_mb_download(self):
        task_cfg = TaskConfig(size_min=5 * MB, size_max=5 * MB)
        task = generate_task(np.random.default_rng(0), task_cfg)
        assert task.upload_size == 5 * MB
        assert task.download_size == pytest.approx(1 * MB, rel=1e-9)

    def test_degenerate_range(self, rng):
        batch = draw_tasks(rng, TaskConfig(size_min=2 * MB, size_max=2 * MB), 1000)
        assert np.all(batch.upload_size == 2 * MB)

    def test_uniform_mean(self, rng):
        batch = draw_tasks(rng, TaskConfig(), 100_000)
        assert batch.upload_size.mean() == pytest.approx(3 * MB, rel=0.01)
        assert batch.upload_size.min() >= 1 * MB and batch.upload_size.max() <= 5 * MB

    def test_download_ratio_and_ops(self, rng):
        tc = TaskConfig()
        batch = draw_tasks(rng, tc, 1000)
        np.testing.assert_allclose(batch.download_size, batch.upload_size / 5, rtol=1e-12)
        assert set(np.unique(batch.ops_per_byte)) == {tc.processing_ops_per_byte, tc.collecting_ops_per_byte}
        assert np.all((batch.ops_per_byte == tc.processing_ops_per_byte) == batch.is_processing)

    def test_app_mix_is_even(self, rng):
        batch = draw_tasks(rng, TaskConfig(), 100_000)
        assert batch.is_processing.mean() == pytest.approx(0.5, abs=0.01)

    def test_task_kind(self, rng):
        assert generate_task(rng, TaskConfig(processing_share=1.0)).app_kind is AppKind.PROCESSING
        assert generate_task(rng, TaskConfig(processing_share=0.0)).app_kind is AppKind.COLLECTING

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            TaskConfig(size_min=5 * MB, size_max=1 * MB)


class TestSchedule:
    def test_first_interval(self, schedule):
        assert schedule_params(schedule, 100, MACRO) == (7, 0.4)

    def test_boundary_round_belongs_to_next_interval(self, schedule):
        assert schedule_params(schedule, 4999, MICRO) == (3, 0.3)
        assert schedule_params(schedule, 5000, MICRO) == (10, 0.5)

    def test_single_interval(self):
        s = TrafficSchedule.from_boundaries([], 50, [[[1, 1], [2, 2]]])
        assert {s.params(t, 1) for t in range(1, 51)} == {(2, 2)}

    def test_out_of_horizon(self, schedule):
        for bad in (0, 25001, -3):
            with pytest.raises(IndexError):
                schedule.params(bad, 0)

    def test_partition(self, schedule):
        ids = schedule.interval_ids()
        assert len(ids) == 25000
        assert np.all(np.diff(ids) >= 0)
        assert len(schedule.intervals) == len(schedule.change_points) + 1 == 5
        assert schedule.change_points == (5000, 10000, 15000, 20000)
        for t in (1, 4999, 5000, 12345, 25000):
            iv = schedule.intervals[schedule.interval_index(t)]
            assert iv.start <= t < iv.end

    def test_expected_costs_match_table(self, schedule):
        expected = [(2.8, 0.9, 5.0), (0.9, 5.0, 2.8), (5.0, 2.8, 0.9), (0.9, 5.0, 2.8), (2.8, 5.0, 0.9)]
        for iv, row in zip(schedule.intervals, expected):
            np.testing.assert_allclose(iv.expected_costs, row, rtol=1e-9)

    def test_arrays(self, schedule):
        lam, mu = schedule.as_arrays()
        assert lam.shape == mu.shape == (25000, 3)
        assert tuple(lam[4999]) == (3, 10, 7) and tuple(mu[4998]) == (0.4, 0.3, 0.5)

    def test_rejects_gaps(self):
        from vecoffload.core import Interval
        with pytest.raises(ValueError):
            TrafficSchedule((Interval(1, 5, ((1, 1), (1, 1))), Interval(6, 9, ((1, 1), (1, 1)))), 5, 0)

    def test_rejects_param_count_mismatch(self):
        with pytest.raises(ValueError):
            TrafficSchedule.from_boundaries([10], 20, [[[1, 1], [1, 1]]])


class TestValidation:
    def test_network_class_invariants(self):
        with pytest.raises(ValueError):
            NetworkClass(0, "bad", 3.0, 3.0, 1e7, 1e9, ())
        with pytest.raises(ValueError):
            NetworkClass(0, "bad", 100.0, 3.0, 0.0, 1e9, ())

    def test_needs_two_networks(self, config):
        one = TrafficSchedule.from_boundaries([], 10, [[[1, 1]]])
        with pytest.raises(ValueError):
            ScenarioConfig(config.networks[:1], one)

    def test_homogeneous_stations(self, config):
        for net in config.networks:
            st = net.stations
            assert {(s.radius, s.height) for s in st} == {(net.coverage_radius, net.bs_height)}

    def test_noise_power(self, config):
        assert config.noise_power(0) == pytest.approx(1e-13, rel=1e-9)

    def test_default_counts(self, config):
        assert [len(n.bs_positions) for n in config.networks] == [2, 5, 10]

    def test_placement(self):
        pos = place_stations(2, 1000, 50, ["lower", "upper"])
        assert pos == ((250.0, 0.0), (750.0, 50.0))

    def test_frozen(self, config):
        with pytest.raises(dataclasses.FrozenInstanceError):
            config.seed = 3

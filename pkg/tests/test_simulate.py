"""
Tests for the time-changed Brownian motion and its exit statistics
Monte Carlo assertions use a band of four standard errors
"""

import numpy as np
import pytest

from labs.errors import GridConstructionError, NumericConsistencyError, PreconditionError
from labs.scale import MonotoneMeasure, build_affine_slope, build_identity, lebesgue_measure
from labs.simulate import (
    ChainOracle,
    ChainProblem,
    brownian_path,
    chain_oracle_solve,
    coupled_simulation,
    coupled_terminal_samples,
    exit_statistics,
    independence_check,
    pcaf_clock,
    simulate_subspace_diffusion,
)

SE_BAND = 4.0


class TestPaths:

    def test_brownian_path_is_reproducible(self):
        first = brownian_path(0.0, 1.0, 1e-3, seed=7)
        second = brownian_path(0.0, 1.0, 1e-3, seed=7)
        np.testing.assert_array_equal(first.positions, second.positions)
        assert first.steps == 1000
        assert first.horizon == pytest.approx(1.0)

    def test_lebesgue_clock_is_the_identity(self):
        path = brownian_path(0.5, 1.0, 1e-3, seed=3)
        clock = pcaf_clock(path, lebesgue_measure((-10.0, 10.0)), 0.01)
        np.testing.assert_allclose(clock.A, path.times, atol=1e-12)

    def test_increments_have_mean_zero_and_variance_dt(self):
        dt = 1e-3
        path = brownian_path(0.0, 40.0, dt, seed=31)
        increments = np.diff(path.positions)
        assert increments.size == 40000
        assert abs(increments.mean()) <= SE_BAND * np.sqrt(dt / increments.size)
        assert increments.var(ddof=1) == pytest.approx(dt, rel=0.05)

    def test_unvisited_atom_leaves_only_the_lebesgue_part(self):
        path = brownian_path(0.0, 1.0, 1e-3, seed=5)
        far = MonotoneMeasure(np.array([-10.0, 10.0]), np.array([1.0]), np.array([50.0]), np.array([1.0]))
        clock = pcaf_clock(path, far, 0.01)
        np.testing.assert_allclose(clock.A, path.times, atol=1e-12)

    def test_clock_is_nondecreasing(self, fat_cantor):
        path = simulate_subspace_diffusion(fat_cantor, 0.5, 0.5, 1e-3, seed=11)
        assert np.all(np.diff(path.clock.A) >= 0)
        assert np.all(path.clock.A >= path.driving.times - 1e-12)

    def test_time_changed_path_stays_on_the_support_of_ds(self, fat_cantor):
        path = simulate_subspace_diffusion(fat_cantor, 0.5, 0.5, 1e-3, seed=5)
        positions = path.positions[(path.positions > 0.0) & (path.positions < 1.0)]
        inside_open_gap = fat_cantor.flat_indicator(positions) & ~np.isin(positions, fat_cantor.gap_left)
        assert not inside_open_gap.any()

    def test_needs_zero_one_slope(self):
        with pytest.raises(PreconditionError):
            simulate_subspace_diffusion(build_affine_slope(0.5), 0.5, 0.1, 1e-3)


class TestChainOracle:

    def test_brownian_closed_forms(self):
        s = build_identity()
        oracle = ChainOracle.build(s, 0.0, 1.0, 400, include=(0.3,))
        assert chain_oracle_solve(oracle, ChainProblem.HIT_PROBABILITY, 0.3) == pytest.approx(0.3, abs=1e-10)
        assert chain_oracle_solve(oracle, ChainProblem.EXPECTED_EXIT_TIME, 0.3) == pytest.approx(0.21, abs=1e-10)
        occupation = chain_oracle_solve(oracle, ChainProblem.OCCUPATION_TIME, 0.3, (0.0, 1.0))
        assert occupation == pytest.approx(0.21, abs=1e-10)

    def test_hit_probability_is_the_scale_ratio(self, fat_cantor):
        oracle = ChainOracle.build(fat_cantor, 0.0, 1.0, 2000, include=(0.3,))
        exact = (fat_cantor.eval(0.3) - fat_cantor.eval(0.0)) / (fat_cantor.eval(1.0) - fat_cantor.eval(0.0))
        assert chain_oracle_solve(oracle, ChainProblem.HIT_PROBABILITY, 0.3) == pytest.approx(exact, abs=1e-10)

    def test_flat_pieces_are_merged(self, fat_cantor):
        oracle = ChainOracle.build(fat_cantor, 0.0, 1.0, 2000)
        assert np.all(np.diff(oracle.scale_values) > 0)
        assert oracle.nodes.size < 2001

    def test_protected_points_on_one_flat_piece(self, fat_cantor):
        left, right, _ = fat_cantor.gaps()[0]
        with pytest.raises(GridConstructionError):
            ChainOracle.build(fat_cantor, 0.0, 1.0, 100, include=(left + 0.25 * (right - left),
                                                                  left + 0.75 * (right - left)))

    def test_start_must_be_a_node(self):
        oracle = ChainOracle.build(build_identity(), 0.0, 1.0, 10)
        with pytest.raises(PreconditionError):
            chain_oracle_solve(oracle, ChainProblem.HIT_PROBABILITY, 0.123)

    def test_finite_form_view(self):
        oracle = ChainOracle.build(build_identity(), 0.0, 1.0, 10)
        form = oracle.finite_form()
        assert form.size == oracle.nodes.size
        assert form.k.sum() == 0.0


class TestExitStatistics:

    def test_brownian_exit_from_the_unit_interval(self):
        stats = exit_statistics(build_identity(), 0.0, 1.0, 0.5, n_paths=1000, dt=1e-4, seed=17,
                                oracle_n=400, occupation_window=(0.25, 0.75))
        assert stats.censored == 0
        assert abs(stats.p_hit_b - 0.5) <= SE_BAND * stats.p_hit_b_se
        assert stats.exit_time_chain == pytest.approx(0.25, abs=1e-10)
        assert abs(stats.mean_exit_time - 0.25) <= max(0.02 * 0.25, SE_BAND * stats.mean_exit_time_se)
        # window end nodes carry full cell weight on the chain
        assert stats.occupation_chain == pytest.approx(0.1875, abs=1e-3)
        assert abs(stats.occupation_time - 0.1875) <= max(0.02 * 0.1875, SE_BAND * stats.occupation_time_se)

    def test_fat_cantor_hitting_probability(self, fat_cantor):
        stats = exit_statistics(fat_cantor, 0.0, 1.0, 0.3, n_paths=1000, dt=1e-4, seed=23, oracle_n=1000)
        assert stats.p_chain == pytest.approx(stats.p_exact, abs=1e-10)
        assert abs(stats.p_hit_b - stats.p_exact) <= SE_BAND * stats.p_hit_b_se

    def test_seeded_runs_repeat_across_worker_counts(self):
        s = build_identity()
        serial = exit_statistics(s, 0.0, 1.0, 0.4, n_paths=50, dt=1e-3, seed=3, oracle_n=100)
        threaded = exit_statistics(s, 0.0, 1.0, 0.4, n_paths=50, dt=1e-3, seed=3, oracle_n=100, workers=4)
        assert serial.as_dict() == threaded.as_dict()

    def test_start_must_lie_inside(self):
        with pytest.raises(PreconditionError):
            exit_statistics(build_identity(), 0.0, 1.0, 1.0)

    def test_every_path_censored(self, monkeypatch):
        # with no censoring slack each path gets a single chunk of steps
        monkeypatch.setattr("labs.simulate.exits.CENSOR_FACTOR", 0.0)
        with pytest.raises(NumericConsistencyError):
            exit_statistics(build_identity(), 0.0, 1.0, 0.5, n_paths=4, dt=1e-8, seed=2, oracle_n=50)


class TestCoupling:

    def test_coordinates_use_separate_streams(self):
        s = build_identity((0.0, 1.0))
        path = coupled_simulation([s, s], [0.5, 0.5], 0.1, 1e-3, seed=9)
        assert path.positions.shape == (101, 2)
        assert not np.array_equal(path.positions[:, 0], path.positions[:, 1])

    def test_terminal_samples_are_reproducible(self, fat_cantor):
        s = build_identity((0.0, 1.0))
        first = coupled_terminal_samples([s, fat_cantor], [0.5, 0.3], 0.05, 1e-3, 20, seed=4)
        second = coupled_terminal_samples([s, fat_cantor], [0.5, 0.3], 0.05, 1e-3, 20, seed=4)
        assert first.shape == (20, 2)
        np.testing.assert_array_equal(first, second)

    def test_independent_coordinates_pass(self, fat_cantor):
        s = build_identity((0.0, 1.0))
        samples = coupled_terminal_samples([s, fat_cantor], [0.5, 0.3], 0.1, 1e-3, 400, seed=8)
        report = independence_check(samples, lambda x: (x > 0.5).astype(float), np.sin, se_multiplier=SE_BAND)
        assert report.passes
        assert report.n_samples == 400

    def test_dependent_coordinates_fail(self, rng):
        x = rng.standard_normal(2000)
        report = independence_check(np.column_stack((x, x)), np.tanh, np.tanh)
        assert not report.passes

    def test_constant_function_is_trivially_independent(self, rng):
        samples = rng.standard_normal((100, 2))
        report = independence_check(samples, np.ones_like, np.sin)
        assert report.difference == 0.0
        assert report.passes

"""Quantized Laplace matrix, single solves and the randomized ensemble."""

import math

import numpy as np
import pytest

from conftest import TWO_PI
from laplaceforge.errors import EmptyOverlapError, InvalidInputError, RankDeficientError
from laplaceforge.models.params import (
    Aggregation,
    IltConfig,
    PartitionScheme,
    TestFunctionSpec,
    Truncation,
    ZGridSpec,
)
from laplaceforge.models.results import EnsembleResult
from laplaceforge.models.signals import KimeSampleSet, Partition, SurfaceSamples, TimeSignal
from laplaceforge.services.discrete_ilt import (
    _aggregate,
    _run_attempts,
    attempt_rng,
    build_lt_matrix,
    ensemble_convergence,
    error_metrics,
    quantization_residual_bound,
    randomized_ilt,
    reconstruct_surface,
    rerun_error_study,
    solve_once,
)
from laplaceforge.services.forward_lt import lt_sin_window
from laplaceforge.services.partitions import gen_partition
from laplaceforge.services.surface import sample_surface

ANNULUS = ZGridSpec(kind="annulus", count=60, r_range=(0.5, 3.0), re_min=0.5)


def _sin_surface(count=60, w=1.0, seed=0):
    return sample_surface(TestFunctionSpec(kind="sin", w=w), ANNULUS.model_copy(update={"count": count}), seed=seed)


def _flat_ensemble(values, aggregation="median"):
    grid = np.linspace(0.0, TWO_PI, values.size)
    return EnsembleResult(
        grid=grid,
        mean=values,
        median=values,
        q25=values,
        q75=values,
        weighted_mean=values,
        itn=1,
        n1=2,
        n2=2,
        seed=0,
        aggregation=aggregation,
    )


class TestBuildLtMatrix:
    def test_zero_frequency_gives_widths(self):
        p = Partition(breakpoints=[0.0, 1.0, 2.5, TWO_PI])
        np.testing.assert_allclose(build_lt_matrix([0.0], p)[0], p.widths, rtol=1e-15)

    def test_two_cells(self):
        p = Partition(breakpoints=[0.0, math.pi, TWO_PI])
        row = build_lt_matrix([1.0], p)[0]
        expected = [1 - math.exp(-math.pi), math.exp(-math.pi) - math.exp(-TWO_PI)]
        np.testing.assert_allclose(row, expected, rtol=1e-14)

    def test_rows_sum_to_window_transform(self, rng):
        p = gen_partition(PartitionScheme.normalized_uniform, 9, rng)
        zs = np.array([0.3 + 2j, 1.5 - 0.5j, 2.0])
        np.testing.assert_allclose(build_lt_matrix(zs, p).sum(axis=1), (1 - np.exp(-TWO_PI * zs)) / zs, rtol=1e-13)

    def test_shape(self, rng):
        p = gen_partition(PartitionScheme.equidistant, 4, rng)
        assert build_lt_matrix(np.ones(7), p).shape == (7, 4)


class TestSolveOnce:
    def test_recovers_consistent_data(self, rng):
        p = gen_partition(PartitionScheme.normalized_uniform, 5, rng)
        zs = ANNULUS.model_copy(update={"count": 12}).points(rng)
        u0 = rng.normal(size=5) + 1j * rng.normal(size=5)
        samples = SurfaceSamples(z=zs, values=build_lt_matrix(zs, p) @ u0)
        sol = solve_once(samples, p, 12, None, rng)
        np.testing.assert_allclose(sol.u, u0, rtol=1e-8, atol=1e-8)
        assert sol.residual_norm <= 1e-10
        assert not sol.rank_deficient
        assert sol.sigma_min <= sol.sigma_max

    def test_piecewise_constant_evaluation(self, rng):
        p = Partition(breakpoints=[0.0, 2.0, TWO_PI])
        zs = np.array([0.5, 1.0, 1.5 + 1j])
        samples = SurfaceSamples(z=zs, values=build_lt_matrix(zs, p) @ np.array([3.0, -1.0]))
        sol = solve_once(samples, p, 3, None, rng)
        np.testing.assert_allclose(sol.evaluate([0.5, 1.9, 2.0, 6.0]), [3.0, 3.0, -1.0, -1.0], atol=1e-10)

    def test_more_points_than_samples(self, rng):
        p = gen_partition(PartitionScheme.equidistant, 3, rng)
        samples = _sin_surface(count=10)
        with pytest.raises(InvalidInputError):
            solve_once(samples, p, 11, None, rng)

    def test_gcv_keeps_full_rank_on_consistent_data(self, rng):
        p = gen_partition(PartitionScheme.normalized_uniform, 5, rng)
        zs = ANNULUS.model_copy(update={"count": 12}).points(rng)
        u0 = rng.normal(size=5) + 1j * rng.normal(size=5)
        samples = SurfaceSamples(z=zs, values=build_lt_matrix(zs, p) @ u0)
        sol = solve_once(samples, p, 12, None, rng, Truncation.gcv)
        assert sol.rank == 5
        np.testing.assert_allclose(sol.u, u0, rtol=1e-8, atol=1e-8)

    def test_gcv_stays_inside_the_rcond_cut(self, rng):
        samples = _sin_surface(count=60, w=3.0)
        p = gen_partition(PartitionScheme.equidistant, 12, rng)
        plain = solve_once(samples, p, 40, None, np.random.default_rng(7), Truncation.rcond)
        cut = solve_once(samples, p, 40, None, np.random.default_rng(7), Truncation.gcv)
        assert 1 <= cut.rank <= plain.rank
        assert cut.rank_deficient == plain.rank_deficient
        assert np.linalg.norm(cut.u) <= np.linalg.norm(plain.u) * (1 + 1e-12)


class TestRandomizedIlt:
    def test_single_attempt_statistics_coincide(self):
        samples = _sin_surface()
        est = randomized_ilt(samples, IltConfig(n1=6, n2=20, itn=1, seed=3))
        np.testing.assert_array_equal(est.mean, est.median)
        np.testing.assert_allclose(est.weighted_mean, est.median, rtol=1e-12)
        assert est.itn == 1 and len(est.sigma_min_list) == 1

    def test_deterministic_for_seed(self):
        samples = _sin_surface()
        cfg = IltConfig(n1=6, n2=20, itn=15, seed=11)
        a = randomized_ilt(samples, cfg)
        b = randomized_ilt(samples, cfg)
        for name in ("mean", "median", "q25", "q75", "weighted_mean"):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

    def test_threads_do_not_change_result(self):
        samples = _sin_surface()
        cfg = IltConfig(n1=6, n2=20, itn=12, seed=5)
        serial = randomized_ilt(samples, cfg)
        threaded = randomized_ilt(samples, cfg.model_copy(update={"threads": 3}))
        np.testing.assert_array_equal(serial.mean, threaded.mean)
        np.testing.assert_array_equal(serial.median, threaded.median)

    def test_mean_independent_of_attempt_order(self):
        samples = _sin_surface()
        cfg = IltConfig(n1=6, n2=20, itn=9, seed=2)
        solutions = _run_attempts(samples, cfg, cfg.itn)
        grid = np.linspace(0.0, TWO_PI, cfg.grid_points)
        forward = _aggregate(grid, solutions, cfg)
        backward = _aggregate(grid, solutions[::-1], cfg)
        np.testing.assert_array_equal(forward.mean, backward.mean)
        np.testing.assert_array_equal(forward.median, backward.median)

    def test_attempt_streams_are_pure(self):
        a = attempt_rng(42, 3).uniform(size=4)
        b = attempt_rng(42, 3).uniform(size=4)
        c = attempt_rng(42, 4).uniform(size=4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_quartiles_bracket_median(self):
        est = randomized_ilt(_sin_surface(), IltConfig(n1=6, n2=20, itn=20, seed=1))
        assert np.all(est.q25 <= est.median + 1e-12) and np.all(est.median <= est.q75 + 1e-12)
        assert est.grid[0] == 0.0 and est.grid[-1] == pytest.approx(TWO_PI)

    def test_aggregation_selects_estimate(self):
        cfg = IltConfig(n1=6, n2=20, itn=5, seed=1, aggregation=Aggregation.weighted_mean)
        est = randomized_ilt(_sin_surface(), cfg)
        np.testing.assert_array_equal(est.estimate, est.weighted_mean)

    def test_n2_above_sample_count(self):
        with pytest.raises(InvalidInputError):
            randomized_ilt(_sin_surface(count=10), IltConfig(n1=4, n2=12, itn=2))

    def test_all_attempts_rank_deficient(self):
        samples = KimeSampleSet(z=np.full(10, 1.0 + 0j), values=np.ones(10))
        with pytest.raises(RankDeficientError):
            randomized_ilt(samples, IltConfig(n1=3, n2=6, itn=2, rcond=1e-10))

    def test_for_samples_defaults(self):
        cfg = IltConfig.for_samples(400)
        assert (cfg.n1, cfg.n2, cfg.itn) == (20, 40, 20)
        small = IltConfig.for_samples(5)
        assert small.n2 <= 5 and small.n2 >= small.n1


class TestReconstructionAndMetrics:
    def test_zero_curve_gives_zero_surface(self):
        est = _flat_ensemble(np.zeros(33))
        values = [s.value for s in reconstruct_surface(est, [0.5, 1 + 1j, 2.0])]
        np.testing.assert_array_equal(values, 0.0)

    def test_constant_curve_surface(self):
        est = _flat_ensemble(np.ones(17))
        zs = np.array([0.5, 1 + 1j, 2.5 - 0.5j])
        got = np.array([s.value for s in reconstruct_surface(est, zs)])
        np.testing.assert_allclose(got, (1 - np.exp(-TWO_PI * zs)) / zs, rtol=1e-13)

    def test_exact_curve_has_zero_error(self):
        grid = np.linspace(0.0, TWO_PI, 65)
        est = _flat_ensemble(np.sin(grid))
        metrics = error_metrics(est, TimeSignal(t=grid, y=np.sin(grid)))
        assert metrics.abs_err == pytest.approx(0.0, abs=1e-15)
        assert metrics.rel_err == pytest.approx(0.0, abs=1e-15)
        assert metrics.points == 65

    def test_constant_offset(self):
        grid = np.linspace(0.0, TWO_PI, 65)
        est = _flat_ensemble(np.sin(grid) + 0.25)
        metrics = error_metrics(est, TimeSignal(t=grid, y=np.sin(grid)))
        assert metrics.abs_err == pytest.approx(0.25, rel=1e-12)
        assert metrics.rel_err == pytest.approx(0.25 / np.sqrt(np.mean(np.sin(grid) ** 2)), rel=1e-12)

    def test_time_range_restricts_points(self):
        grid = np.linspace(0.0, TWO_PI, 65)
        est = _flat_ensemble(np.zeros(65))
        metrics = error_metrics(est, TimeSignal(t=grid, y=np.ones(65)), t_range=(0.0, math.pi + 1e-9))
        assert metrics.points == 33

    def test_no_overlap(self):
        est = _flat_ensemble(np.zeros(9))
        with pytest.raises(EmptyOverlapError):
            error_metrics(est, TimeSignal(t=[0.0, 1.0], y=[0.0, 1.0]), t_range=(7.0, 8.0))

    def test_surface_error(self):
        est = _flat_ensemble(np.ones(17))
        zs = np.array([0.5, 1 + 1j, 2.5 - 0.5j])
        truth = SurfaceSamples(z=zs, values=(1 - np.exp(-TWO_PI * zs)) / zs)
        assert error_metrics(est, truth).abs_err <= 1e-13

    def test_quantization_bound_holds(self, rng):
        for _ in range(5):
            p = gen_partition(PartitionScheme.normalized_uniform, 20, rng)
            zs = ANNULUS.points(rng)[:15]
            u = np.sin(p.breakpoints[:-1])
            gap = np.abs(lt_sin_window(1.0, zs) - build_lt_matrix(zs, p) @ u)
            assert np.all(gap <= quantization_residual_bound(1.0, p, zs) + 1e-14)

    def test_quantization_bound_shrinks_with_width(self, rng):
        coarse = Partition(breakpoints=np.linspace(0.0, TWO_PI, 5))
        fine = Partition(breakpoints=np.linspace(0.0, TWO_PI, 41))
        zs = [0.5, 1.0 + 2j]
        np.testing.assert_allclose(
            quantization_residual_bound(1.0, fine, zs), quantization_residual_bound(1.0, coarse, zs) / 10, rtol=1e-12
        )


class TestStudies:
    def test_convergence_rows(self):
        samples = _sin_surface(count=100)
        truth = TimeSignal.from_function(np.sin, 501)
        rows = ensemble_convergence(samples, truth, IltConfig(n1=8, n2=20, itn=5), itn_values=(10, 5))
        assert [r.itn for r in rows] == [5, 10]
        assert all(r.mean_rmse >= 0 and r.median_rmse >= 0 for r in rows)

    def test_rerun_study(self):
        truth = TimeSignal.from_function(np.sin, 501)
        study = rerun_error_study(
            lambda r: _sin_surface(count=60, seed=r), truth, IltConfig(n1=6, n2=20, itn=5), reruns=4
        )
        assert len(study.function_errors) == len(study.surface_errors) == 4
        assert -1.0 <= study.correlation <= 1.0

    def test_rerun_study_needs_three_runs(self):
        with pytest.raises(InvalidInputError):
            rerun_error_study(lambda r: _sin_surface(), TimeSignal.from_function(np.sin, 11), IltConfig(n1=4, n2=8, itn=1), reruns=2)

    @pytest.mark.slow
    def test_sin3_ensemble_accuracy(self):
        samples = sample_surface(
            TestFunctionSpec(kind="sin", w=3.0),
            ZGridSpec(kind="annulus", count=400, r_range=(0.5, 3.0), re_min=0.5),
            seed=0,
        )
        cfg = IltConfig.for_samples(len(samples), itn=100, seed=0)
        truth = TimeSignal.from_function(lambda t: np.sin(3.0 * t), 2001)
        est = randomized_ilt(samples, cfg)
        assert error_metrics(est, truth, (0.0, 5.0)).abs_err <= 0.1

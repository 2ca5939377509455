"""
Randomized inversion of a sampled kime-surface.

Each attempt draws a random partition and a random subset of the samples,
solves A u = b for a piecewise-constant u by truncated pseudoinverse, and
evaluates u on a shared time grid. Per-gridpoint statistics over the
attempts form the estimate.
"""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from laplaceforge.config import DOMAIN_END, WEIGHT_DELTA, resolve_threads
from laplaceforge.errors import EmptyOverlapError, InvalidInputError, RankDeficientError
from laplaceforge.models.params import IltConfig, Truncation
from laplaceforge.models.results import (
    ConvergenceRow,
    EnsembleResult,
    ErrorMetrics,
    ErrorStudy,
    QuantizedSolution,
)
from laplaceforge.models.signals import LtSample, Partition, SurfaceSamples, TimeSignal
from laplaceforge.services.forward_lt import forward_error_bound, monomial_windows
from laplaceforge.services.numerics import gcv_rank, pseudo_inverse_solve, svd
from laplaceforge.services.partitions import gen_partition

logger = logging.getLogger("laplaceforge.discrete_ilt")


def build_lt_matrix(zs: Sequence[complex], p: Partition) -> np.ndarray:
    """a_ij = int_{p_{j-1}}^{p_j} e^{-z_i t} dt, equal to p_j - p_{j-1} at z_i = 0."""
    zs = np.asarray(zs, dtype=complex)
    left = p.breakpoints[:-1]
    windows = monomial_windows(0, 0.0, p.widths[None, :], zs[:, None])[0]
    return np.exp(-np.outer(zs, left)) * windows


def solve_once(
    samples: SurfaceSamples,
    p: Partition,
    n2: int,
    rcond: float | None,
    rng: np.random.Generator,
    truncation: Truncation = Truncation.rcond,
) -> QuantizedSolution:
    """
    One attempt on n2 samples drawn without replacement. With gcv truncation
    the kept rank follows the part of b the partition cannot explain; the
    rank-deficient flag still reports the rcond cut only.
    """
    if n2 > len(samples):
        raise InvalidInputError(f"n2={n2} exceeds the {len(samples)} available samples")
    if n2 < 1:
        raise InvalidInputError(f"n2 must be >= 1, got {n2}")
    idx = rng.choice(len(samples), size=n2, replace=False)
    z, b = samples.z[idx], samples.values[idx]
    a = build_lt_matrix(z, p)
    factors = svd(a)
    rank = gcv_rank(factors, b) if Truncation(truncation) is Truncation.gcv else None
    solution = pseudo_inverse_solve(a, b, rcond, factors=factors, rank=rank)
    return QuantizedSolution(
        partition=p,
        u=solution.x,
        residual_norm=float(np.linalg.norm(a @ solution.x - b)),
        sigma_min=factors.sigma_min,
        sigma_max=factors.sigma_max,
        rank_deficient=solution.rank_deficient,
        rank=solution.rank,
    )


def attempt_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for attempt `index`, a pure function of (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _attempt(samples: SurfaceSamples, cfg: IltConfig, index: int) -> QuantizedSolution:
    rng = attempt_rng(cfg.seed, index)
    p = gen_partition(cfg.partition_scheme, cfg.n1, rng)
    return solve_once(samples, p, cfg.n2, cfg.rcond, rng, cfg.truncation)


def _run_attempts(samples: SurfaceSamples, cfg: IltConfig, count: int) -> list[QuantizedSolution]:
    threads = resolve_threads(cfg.threads)
    if threads > 1:
        return Parallel(n_jobs=threads, backend="threading")(
            delayed(_attempt)(samples, cfg, k) for k in range(count)
        )
    return [_attempt(samples, cfg, k) for k in range(count)]


def _aggregate(grid: np.ndarray, solutions: list[QuantizedSolution], cfg: IltConfig) -> EnsembleResult:
    curves = np.array([s.evaluate(grid) for s in solutions])
    flagged = np.array([s.rank_deficient for s in solutions])
    residuals = np.array([s.residual_norm for s in solutions])
    if flagged.all():
        raise RankDeficientError(
            f"all {len(solutions)} attempts were rank-deficient",
            sigma_min_list=[s.sigma_min for s in solutions],
        )
    if flagged.any():
        logger.warning("%d of %d attempts rank-deficient; excluded from median", flagged.sum(), len(solutions))

    # column-wise sort fixes the summation order, so attempt order cannot change the mean
    mean = np.sort(curves, axis=0).mean(axis=0)
    q25, median, q75 = np.quantile(curves[~flagged], [0.25, 0.5, 0.75], axis=0)
    weights = np.where(flagged, 0.0, 1.0 / (residuals + WEIGHT_DELTA))
    weighted = weights @ curves / weights.sum()

    return EnsembleResult(
        grid=grid,
        mean=mean,
        median=median,
        q25=q25,
        q75=q75,
        weighted_mean=weighted,
        itn=len(solutions),
        n1=cfg.n1,
        n2=cfg.n2,
        seed=cfg.seed,
        aggregation=cfg.aggregation.value,
        sigma_min_list=[s.sigma_min for s in solutions],
        residual_list=residuals.tolist(),
        rank_deficient_list=flagged.tolist(),
    )


def randomized_ilt(samples: SurfaceSamples, cfg: IltConfig) -> EnsembleResult:
    """itn independent attempts aggregated on a grid_points-point grid over [0, 2pi]."""
    if cfg.n2 > len(samples):
        raise InvalidInputError(f"n2={cfg.n2} exceeds the {len(samples)} available samples")
    grid = np.linspace(0.0, DOMAIN_END, cfg.grid_points)
    solutions = _run_attempts(samples, cfg, cfg.itn)
    result = _aggregate(grid, solutions, cfg)
    logger.info(
        "Randomized ILT: itn=%d n1=%d n2=%d seed=%d, median sigma_min %.3g, median kept rank %d (%s)",
        cfg.itn,
        cfg.n1,
        cfg.n2,
        cfg.seed,
        float(np.median(result.sigma_min_list)),
        int(np.median([s.rank for s in solutions])),
        cfg.truncation.value,
    )
    return result


def reconstruct_surface(est: EnsembleResult, zs: Sequence[complex], curve: str = "median") -> list[LtSample]:
    """
    Forward transform of an ensemble curve, taken as piecewise constant
    between grid points with the midpoint average of the two end values.
    """
    values = getattr(est, curve)
    cells = Partition(breakpoints=est.grid)
    heights = 0.5 * (values[:-1] + values[1:])
    zs = np.asarray(zs, dtype=complex)
    transformed = build_lt_matrix(zs, cells) @ heights
    return [LtSample(z=complex(z), value=complex(v)) for z, v in zip(zs, transformed)]


def error_metrics(
    est: EnsembleResult,
    truth: TimeSignal | SurfaceSamples,
    t_range: tuple[float, float] | None = None,
) -> ErrorMetrics:
    """
    RMSE of the aggregated curve against a time signal (on the grid points
    inside the common domain), or of the reconstructed surface against
    surface samples. rel_err divides by the RMS of the truth.
    """
    if isinstance(truth, TimeSignal):
        lo, hi = max(est.grid[0], truth.t[0]), min(est.grid[-1], truth.t[-1])
        if t_range is not None:
            lo, hi = max(lo, t_range[0]), min(hi, t_range[1])
        inside = (est.grid >= lo) & (est.grid <= hi)
        if not inside.any():
            raise EmptyOverlapError(f"no grid points in [{lo}, {hi}]")
        expected = np.interp(est.grid[inside], truth.t, truth.y)
        diff = est.estimate[inside] - expected
    else:
        if len(truth) == 0:
            raise EmptyOverlapError("no surface samples to compare against")
        expected = truth.values
        rebuilt = np.array([s.value for s in reconstruct_surface(est, truth.z, curve=est.aggregation)])
        diff = rebuilt - expected

    abs_err = float(np.sqrt(np.mean(np.abs(diff) ** 2)))
    scale = float(np.sqrt(np.mean(np.abs(expected) ** 2)))
    return ErrorMetrics(abs_err=abs_err, rel_err=abs_err / scale if scale else float("inf"), points=int(diff.size))


def ensemble_convergence(
    samples: SurfaceSamples,
    truth: TimeSignal,
    cfg: IltConfig,
    itn_values: Sequence[int] = (25, 100, 400),
    t_range: tuple[float, float] | None = (0.0, 5.0),
) -> list[ConvergenceRow]:
    """Error of the mean and median curves over the first itn attempts, for each itn."""
    itn_values = sorted(itn_values)
    solutions = _run_attempts(samples, cfg, itn_values[-1])
    grid = np.linspace(0.0, DOMAIN_END, cfg.grid_points)
    rows = []
    for itn in itn_values:
        result = _aggregate(grid, solutions[:itn], cfg)
        mean_err = error_metrics(result.model_copy(update={"aggregation": "mean"}), truth, t_range)
        median_err = error_metrics(result.model_copy(update={"aggregation": "median"}), truth, t_range)
        rows.append(ConvergenceRow(itn=itn, mean_rmse=mean_err.abs_err, median_rmse=median_err.abs_err))
    return rows


def rerun_error_study(
    surface_factory: Callable[[int], SurfaceSamples],
    truth: TimeSignal,
    cfg: IltConfig,
    reruns: int = 100,
    t_range: tuple[float, float] | None = (0.0, 5.0),
) -> ErrorStudy:
    """
    Function error against surface error over reruns with fresh sample
    points (surface_factory(r)) and seeds, with their Pearson correlation.
    """
    if reruns < 3:
        raise InvalidInputError(f"need >= 3 reruns for a correlation, got {reruns}")
    f_errs, s_errs = [], []
    for r in range(reruns):
        samples = surface_factory(r)
        est = randomized_ilt(samples, cfg.model_copy(update={"seed": cfg.seed + r}))
        f_errs.append(error_metrics(est, truth, t_range).abs_err)
        s_errs.append(error_metrics(est, samples).rel_err)
    correlation = float(stats.pearsonr(f_errs, s_errs).statistic)
    logger.info("Rerun study over %d runs: correlation %.3f", reruns, correlation)
    return ErrorStudy(function_errors=f_errs, surface_errors=s_errs, correlation=correlation)


def quantization_residual_bound(f_prime_sup: float, p: Partition, zs: Sequence[complex]) -> np.ndarray:
    """
    Bound on |L f(z) - (A u)(z)| when u holds f at the left end of each cell:
    sup|f'| * max cell width * int_0^{2pi} e^{-Re z t} dt.
    """
    step = f_prime_sup * float(p.widths.max())
    return np.array([forward_error_bound(step, 0.0, DOMAIN_END, max(complex(z).real, 0.0)) for z in zs])

"""
End-to-end acceptance checks. Each check returns a ValidationCheck with the
measured metric, the threshold it is held to, and enough detail to plot or
debug the run.
"""

from __future__ import annotations

import logging
import math
import time
from typing import Callable

import numpy as np

from laplaceforge.config import DOMAIN_END, resolve_threads
from laplaceforge.errors import InvalidInputError, LaplaceForgeError
from laplaceforge.models.params import (
    IltConfig,
    IltParams,
    PartitionScheme,
    PhaseDist,
    TestFunctionSpec,
    ValidationSettings,
    ZGridSpec,
)
from laplaceforge.models.results import ValidationCheck, ValidationReport
from laplaceforge.models.signals import PiecewisePoly, TimeSignal
from laplaceforge.services.analytic_ilt import cosh_inv_series, ilt_on_grid
from laplaceforge.services.discrete_ilt import ensemble_convergence, error_metrics, randomized_ilt
from laplaceforge.services.forward_lt import (
    fit_piecewise_poly,
    lt_piecewise_poly,
    lt_signal,
    lt_sin_window,
)
from laplaceforge.services.numerics import bessel_i0, bessel_j0
from laplaceforge.services.partitions import (
    INDEPENDENT_CONTROL,
    dependence_check,
    exp_order_stats_check,
    irwin_hall_ratio_cdf,
    normalized_ratios,
)
from laplaceforge.services.rmt_lab import (
    BAND_Z_SAMPLER,
    diff_matrix_svd,
    fit_gamma,
    isotropy_mc,
    phase_integral_identity,
    singval_sweep,
    uniform_phase_second_moment,
)
from laplaceforge.services.surface import composite, sample_surface

logger = logging.getLogger("laplaceforge.validation")

ROUNDTRIP_SAMPLES = 200
ROUNDTRIP_PARAMS = IltParams(n_sum=1000, n_euler=12)
DISCRETE_SURFACE = ZGridSpec(kind="annulus", count=400, r_range=(0.5, 3.0), re_min=0.5)
SWEEP_SIZES = (8, 16, 32, 64, 128)
# allowed rise of the mean-curve RMSE from one itn step to the next
TREND_SLACK = 1.02
MC_TRIALS = 100_000


def _timed(name: str, threshold: float, body: Callable[[], tuple[bool, float, dict]]) -> ValidationCheck:
    """Run body; a numeric or input failure inside it becomes a failed check with infinite metric."""
    start = time.perf_counter()
    try:
        passed, metric, detail = body()
    except (LaplaceForgeError, ValueError, ArithmeticError) as ex:
        record = ex.record() if isinstance(ex, LaplaceForgeError) else {"error": type(ex).__name__, "message": str(ex)}
        logger.error("%s raised %s: %s", name, type(ex).__name__, ex)
        passed, metric, detail = False, math.inf, {"error": record}
    seconds = time.perf_counter() - start
    logger.info("%s: %s (metric %.3g, threshold %.3g, %.2fs)", name, "ok" if passed else "FAILED", metric, threshold, seconds)
    return ValidationCheck(
        name=name, passed=bool(passed), metric=float(metric), threshold=threshold, detail=detail, seconds=seconds
    )


def random_continuous_poly(rng: np.random.Generator, pieces: int = 5, degree: int = 4) -> PiecewisePoly:
    """Random continuous piecewise polynomial on [0, 2pi] with O(1) local coefficients."""
    inner = np.sort(rng.uniform(0.5, DOMAIN_END - 0.5, size=pieces - 1))
    knots = np.concatenate([[0.0], inner, [DOMAIN_END]])
    widths = np.diff(knots)
    local = rng.uniform(-1.0, 1.0, size=(pieces, degree + 1))
    for k in range(1, pieces):
        # piece k starts where piece k-1 ends
        local[k, 0] = np.polynomial.polynomial.polyval(widths[k - 1], local[k - 1])
    return PiecewisePoly.from_local(knots, local)


# ---------- Checks ----------


def check_forward_lt(settings: ValidationSettings) -> ValidationCheck:
    """sin sampled on [0, 2pi], degree-4 fit, against (1 - e^{-2pi z})/(z^2 + 1) on Re z = 0.1."""

    def body():
        sig = TimeSignal.from_function(np.sin, settings.points)
        zs = 0.1 + 1j * np.linspace(0.0, 20.0, 202)[1:-1]
        numeric = np.array([s.value for s in lt_signal(sig, zs, degree=4)])
        err = np.abs(numeric - lt_sin_window(1.0, zs))
        return err.max() <= 1e-8, err.max(), {"points": settings.points, "z_count": int(zs.size)}

    return _timed("forward_lt_sin", 1e-8, body)


def check_analytic_pairs(settings: ValidationSettings) -> ValidationCheck:
    """1/z, 1/(z+1), 1/(z^2+1) inverted on [0.2, 5] with default parameters."""
    pairs = {
        "1/z": (lambda z: 1.0 / z, lambda t: np.ones_like(t)),
        "1/(z+1)": (lambda z: 1.0 / (z + 1.0), lambda t: np.exp(-t)),
        "1/(z^2+1)": (lambda z: 1.0 / (z * z + 1.0), np.sin),
    }

    def body():
        ts = np.linspace(0.2, 5.0, 20)
        errors = {}
        for name, (F, f) in pairs.items():
            got = ilt_on_grid(F, ts).y
            want = f(ts)
            errors[name] = float(np.max(np.abs(got - want)) / np.max(np.abs(want)))
        worst = max(errors.values())
        return worst <= 1e-4, worst, {"relative_errors": errors}

    return _timed("analytic_ilt_pairs", 1e-4, body)


def check_roundtrip(settings: ValidationSettings) -> ValidationCheck:
    """Composite signal -> spline LT -> analytic ILT, inside the window and past its end."""

    def body():
        poly = fit_piecewise_poly(TimeSignal.from_function(composite, ROUNDTRIP_SAMPLES), 4)
        F = lambda z: lt_piecewise_poly(poly, z)
        workers = resolve_threads(settings.threads)
        inside = np.linspace(0.1, DOMAIN_END - 0.1, 60)
        outside = np.linspace(DOMAIN_END + 0.5, 3.0 * math.pi, 10)[1:-1]
        rec_in = ilt_on_grid(F, inside, ROUNDTRIP_PARAMS, threads=workers)
        rec_out = ilt_on_grid(F, outside, ROUNDTRIP_PARAMS, threads=workers)
        rmse = float(np.sqrt(np.mean((rec_in.y - composite(inside)) ** 2)))
        tail = float(np.max(np.abs(rec_out.y)))
        return rmse <= 1e-2 and tail <= 1e-2, rmse, {"rmse": rmse, "max_outside": tail}

    return _timed("roundtrip_composite", 1e-2, body)


def check_discrete_ilt(settings: ValidationSettings) -> ValidationCheck:
    """sin(3x) surface at 400 points, 100 attempts; median RMSE on [0, 5] and the mean-curve trend."""

    def body():
        spec = TestFunctionSpec(kind="sin", w=3.0)
        samples = sample_surface(spec, DISCRETE_SURFACE, seed=settings.seed)
        cfg = IltConfig.for_samples(
            len(samples), itn=100, seed=settings.seed, threads=resolve_threads(settings.threads)
        )
        truth = TimeSignal.from_function(lambda t: np.sin(3.0 * t), 2001)
        est = randomized_ilt(samples, cfg)
        median_rmse = error_metrics(est, truth, (0.0, 5.0)).abs_err
        trend = ensemble_convergence(samples, truth, cfg, (25, 100, 400), (0.0, 5.0))
        mean_rmse = [row.mean_rmse for row in trend]
        monotone = all(b <= a * TREND_SLACK for a, b in zip(mean_rmse, mean_rmse[1:]))
        detail = {
            "n1": cfg.n1,
            "n2": cfg.n2,
            "scheme": cfg.partition_scheme.value,
            "truncation": cfg.truncation.value,
            "mean_rmse": mean_rmse,
            "monotone": monotone,
        }
        return median_rmse <= 0.1 and monotone, median_rmse, detail

    return _timed("discrete_ilt_sin3", 0.1, body)


def check_singval_decay(settings: ValidationSettings) -> ValidationCheck:
    """
    sigma_min sweep n = 8..128 at aspect 1.2 with Im z spread over [-n/2, n/2];
    strictly decreasing means and gamma in (0, 2).
    """

    def body():
        sweep = singval_sweep(
            SWEEP_SIZES,
            aspect=1.2,
            z_sampler=BAND_Z_SAMPLER,
            trials=50,
            seed=settings.seed,
            threads=settings.threads,
            scale_with_n=True,
        )
        fit = fit_gamma(sweep)
        means = sweep.mean_sigma_min
        decreasing = bool(np.all(np.diff(means) < 0))
        detail = {"mean_sigma_min": means.tolist(), "gamma": fit.gamma, "r_squared": fit.r_squared}
        return decreasing and 0.0 < fit.gamma < 2.0, fit.gamma, detail

    return _timed("singval_decay", 2.0, body)


def check_difference_matrix(settings: ValidationSettings) -> ValidationCheck:
    """Closed-form SVD of the n x (n-1) difference matrix for n = 2..12."""

    def body():
        recon, spread = [], []
        for n in range(2, 13):
            result = diff_matrix_svd(n)
            recon.append(result.reconstruction_error)
            spread.append(float(np.max(np.abs(result.closed_form.s - result.numeric.s))))
        ok = max(recon) <= 1e-12 and max(spread) <= 1e-10
        return ok, max(max(recon), max(spread)), {"reconstruction": max(recon), "sigma_gap": max(spread)}

    return _timed("difference_matrix_svd", 1e-12, body)


def check_isotropy(settings: ValidationSettings) -> ValidationCheck:
    """Uniform and von Mises phase moments, the I0 second moment and the phase integral."""

    def body():
        rng = np.random.default_rng(settings.seed)
        failures = []
        for a in (0.5, 1.0, 2.0):
            if not isotropy_mc(PhaseDist.uniform(), a, MC_TRIALS, rng).within(target_c=1.0):
                failures.append(f"uniform a={a}")
            vm = isotropy_mc(PhaseDist.von_mises(), a, MC_TRIALS, rng)
            if not vm.within(target_c=bessel_j0(a) / bessel_i0(a), target_cc=1.0):
                failures.append(f"von_mises a={a}")
        moment = uniform_phase_second_moment(1.0, 1.0, 1_000_000, rng)
        exact = bessel_i0(2.0) - 1.0
        moment_rel = abs(moment - exact) / exact
        if moment_rel > 0.01:
            failures.append("second moment")
        identity_gap = 0.0
        for a in (0.0, 1.0, 2.5):
            lhs, rhs = phase_integral_identity(a)
            identity_gap = max(identity_gap, abs(lhs - rhs))
        if identity_gap > 1e-10:
            failures.append("phase integral")
        detail = {"failures": failures, "second_moment_rel": moment_rel, "identity_gap": identity_gap}
        return not failures, moment_rel, detail

    return _timed("isotropy_identities", 0.01, body)


def check_cosh_truncation(settings: ValidationSettings) -> ValidationCheck:
    """Ten-term 1/cosh series against 1/cosh on [0, 3]."""

    def body():
        x = np.linspace(0.0, 3.0, 301)
        series = np.array([cosh_inv_series(v, 10).real for v in x])
        err = float(np.max(np.abs(series - 1.0 / np.cosh(x))))
        return err <= 0.05, err, {"terms": 10}

    return _timed("cosh_truncation", 0.05, body)


def check_partition_theory(settings: ValidationSettings) -> ValidationCheck:
    """Beta marginals, the Irwin-Hall ratio CDF and dependence of normalized breakpoints."""

    def body():
        rng = np.random.default_rng(settings.seed)
        ks = exp_order_stats_check(4, 10_000, rng).max_statistic

        ratios = normalized_ratios(PartitionScheme.normalized_uniform, 3, MC_TRIALS, rng)
        t_grid = np.linspace(0.0, 1.0, 101)
        gap = 0.0
        for k in range(1, 4):
            empirical = np.searchsorted(np.sort(ratios[:, k - 1]), t_grid, side="right") / MC_TRIALS
            analytic = np.array([irwin_hall_ratio_cdf(k, 3, t) for t in t_grid])
            gap = max(gap, float(np.max(np.abs(empirical - analytic))))

        dependent = min(
            dependence_check(scheme, 3, MC_TRIALS, rng).max_gap
            for scheme in (PartitionScheme.normalized_uniform, PartitionScheme.normalized_exponential)
        )
        control = dependence_check(INDEPENDENT_CONTROL, 3, MC_TRIALS, rng).max_gap

        ok = ks <= 0.02 and gap <= 0.01 and dependent >= 0.1 and control <= 0.03
        detail = {"ks": ks, "ratio_cdf_gap": gap, "dependent_gap": dependent, "control_gap": control}
        return ok, max(ks, gap), detail

    return _timed("partition_theory", 0.02, body)


def check_invariants(settings: ValidationSettings) -> ValidationCheck:
    """Finite-domain derivative identity and linearity over random continuous piecewise polynomials."""

    def body():
        rng = np.random.default_rng(settings.seed)
        worst_derivative = 0.0
        worst_linear = 0.0
        for _ in range(50):
            p = random_continuous_poly(rng)
            q = PiecewisePoly(knots=p.knots, local=rng.uniform(-1.0, 1.0, size=p.local.shape))
            s = rng.uniform(0.1, 5.0, size=20) + 1j * rng.uniform(-10.0, 10.0, size=20)

            lhs = lt_piecewise_poly(p.derivative(), s)
            ends = p.evaluate(np.array([0.0, DOMAIN_END]))
            rhs = s * lt_piecewise_poly(p, s) - ends[0] + np.exp(-DOMAIN_END * s) * ends[1]
            scale = np.maximum(1.0, np.abs(rhs))
            worst_derivative = max(worst_derivative, float(np.max(np.abs(lhs - rhs) / scale)))

            alpha, beta = rng.uniform(-2.0, 2.0, size=2)
            combined = lt_piecewise_poly(p.scaled(alpha) + q.scaled(beta), s)
            separate = alpha * lt_piecewise_poly(p, s) + beta * lt_piecewise_poly(q, s)
            worst_linear = max(
                worst_linear, float(np.max(np.abs(combined - separate) / np.maximum(1.0, np.abs(separate))))
            )
        ok = worst_derivative <= 1e-10 and worst_linear <= 1e-12
        return ok, worst_derivative, {"derivative": worst_derivative, "linearity": worst_linear}

    return _timed("derivative_and_linearity", 1e-10, body)


CASES: dict[str, Callable[[ValidationSettings], ValidationCheck]] = {
    "sin": check_forward_lt,
    "ilt-pairs": check_analytic_pairs,
    "roundtrip": check_roundtrip,
    "discrete": check_discrete_ilt,
    "singvals": check_singval_decay,
    "diff-matrix": check_difference_matrix,
    "isotropy": check_isotropy,
    "cosh": check_cosh_truncation,
    "partitions": check_partition_theory,
    "invariants": check_invariants,
}


def run_validation(case: str = "all", settings: ValidationSettings | None = None) -> ValidationReport:
    settings = settings or ValidationSettings()
    if case == "all":
        selected = list(CASES.values())
    elif case in CASES:
        selected = [CASES[case]]
    else:
        raise InvalidInputError(f"unknown validation case {case!r}; choose from all, {', '.join(CASES)}")
    report = ValidationReport(checks=[check(settings) for check in selected])
    logger.info("Validation %s: %d/%d passed", case, sum(c.passed for c in report.checks), len(report.checks))
    return report

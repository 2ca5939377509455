"""
Random-matrix experiments around the quantized Laplace matrix.

  - decay of the smallest singular value with partition size, and the
    power-law fit sigma_min ~ n^-gamma
  - closed-form SVD of the first-order difference matrix and the
    sigma_min(CD) >= sigma_min(C) sigma_min(D) bound
  - isotropy of c = e^{a e^{i phi}} under uniform and von Mises phases,
    including the Bessel-zero breakpoint strategy
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import integrate, optimize, stats

from laplaceforge.config import DOMAIN_END, resolve_threads
from laplaceforge.errors import InsufficientZerosError, InvalidInputError
from laplaceforge.models.params import PartitionScheme, PhaseDist, ZGridSpec
from laplaceforge.models.results import (
    BoundCheck,
    DiffMatrixSvd,
    GammaFit,
    MonteCarloEstimate,
    SingvalSweep,
    SvdResult,
    SweepRow,
)
from laplaceforge.models.signals import Partition
from laplaceforge.services.discrete_ilt import build_lt_matrix
from laplaceforge.services.numerics import bessel_i0, bessel_j0, sigma_min, svd
from laplaceforge.services.partitions import gen_partition

logger = logging.getLogger("laplaceforge.rmt_lab")

NOISE_FLOOR = 1e-13
MIN_SWEEP_TRIALS = 10
MIN_MC_TRIALS = 10_000

DEFAULT_Z_SAMPLER = ZGridSpec(kind="annulus", count=1, r_range=(0.5, 3.0), re_min=0.0)
# im in [-n/2, n/2] once scaled by n: rows resolve cells of width ~2pi/n
BAND_Z_SAMPLER = ZGridSpec(kind="rect", count=1, re_range=(0.0, 0.5), im_range=(-0.5, 0.5))


# ---------- Smallest singular value ----------


def _row_sampler(sampler: ZGridSpec, n: int, n_prime: int, scale_with_n: bool) -> ZGridSpec:
    update = {"count": n_prime}
    if scale_with_n:
        lo, hi = sampler.im_range
        update["im_range"] = (lo * n, hi * n)
    return sampler.model_copy(update=update)


def _trial_sigma_min(
    n: int,
    n_prime: int,
    scheme: PartitionScheme,
    sampler: ZGridSpec | np.ndarray,
    seed: int,
    trial: int,
    scale_with_n: bool = False,
) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, trial)))
    if isinstance(sampler, ZGridSpec):
        zs = _row_sampler(sampler, n, n_prime, scale_with_n).points(rng)
    else:
        zs = sampler[:n_prime]
    p = gen_partition(scheme, n, rng)
    return sigma_min(build_lt_matrix(zs, p))


def singval_sweep(
    n_list: Sequence[int],
    aspect: float = 1.2,
    scheme: PartitionScheme = PartitionScheme.normalized_uniform,
    z_sampler: ZGridSpec | Sequence[complex] | None = None,
    trials: int = 50,
    seed: int = 0,
    threads: int = 1,
    scale_with_n: bool = False,
) -> SingvalSweep:
    """
    Mean and spread of sigma_min of the ceil(aspect*n) x n Laplace matrix per n.

    z_sampler is a ZGridSpec (its count is replaced per row) or a fixed list
    of points, of which the first ceil(aspect*n) are used. With scale_with_n
    the imaginary range of a line or rect sampler is multiplied by n, so the
    frequencies keep pace with the shrinking cells.
    """
    if aspect < 1:
        raise InvalidInputError(f"aspect must be >= 1, got {aspect}")
    if trials < MIN_SWEEP_TRIALS:
        raise InvalidInputError(f"need >= {MIN_SWEEP_TRIALS} trials per row, got {trials}")
    scheme = PartitionScheme(scheme)
    sampler = DEFAULT_Z_SAMPLER if z_sampler is None else z_sampler
    if not isinstance(sampler, ZGridSpec):
        sampler = np.asarray(sampler, dtype=complex)
    if scale_with_n and not (isinstance(sampler, ZGridSpec) and sampler.kind in ("line", "rect")):
        raise InvalidInputError("scale_with_n needs a line or rect z sampler")
    workers = resolve_threads(threads)

    rows = []
    for n in n_list:
        n_prime = math.ceil(aspect * n)
        if not isinstance(sampler, ZGridSpec) and sampler.size < n_prime:
            raise InvalidInputError(f"fixed z list has {sampler.size} points, row n={n} needs {n_prime}")
        jobs = (delayed(_trial_sigma_min)(n, n_prime, scheme, sampler, seed, t, scale_with_n) for t in range(trials))
        values = np.array(Parallel(n_jobs=workers, backend="threading")(jobs))
        rows.append(
            SweepRow(
                n=n,
                n_prime=n_prime,
                mean_sigma_min=float(values.mean()),
                std=float(values.std(ddof=1)),
                trials=trials,
            )
        )
        logger.info("n=%d n'=%d mean sigma_min=%.4g", n, n_prime, rows[-1].mean_sigma_min)
    return SingvalSweep(rows=rows, aspect=aspect, scheme=scheme)


def fit_gamma(sweep: SingvalSweep) -> GammaFit:
    """Least-squares slope of log mean sigma_min against log n; gamma = -slope."""
    means = sweep.mean_sigma_min
    if np.any(means <= 0):
        raise InvalidInputError("mean sigma_min must be positive for a log-log fit")
    keep = means >= NOISE_FLOOR
    if not keep.all():
        logger.warning("Dropping %d sweep rows below the %.0e noise floor", (~keep).sum(), NOISE_FLOOR)
    if keep.sum() < 4:
        raise InvalidInputError(f"gamma fit needs >= 4 usable rows, got {int(keep.sum())}")
    fit = stats.linregress(np.log(sweep.n[keep]), np.log(means[keep]))
    return GammaFit(gamma=-fit.slope, intercept=fit.intercept, r_squared=fit.rvalue**2, points=int(keep.sum()))


def predicted_error(n, gamma: float, c2: float, c3: float):
    """C2 n^(gamma-1) + C3 n^gamma: quantization error shrinking, noise amplification growing."""
    n = np.asarray(n, dtype=float)
    return c2 * n ** (gamma - 1.0) + c3 * n**gamma


def optimal_partition_size(gamma: float, c2: float, c3: float) -> float:
    """Minimizer (1 - gamma) C2 / (gamma C3) of predicted_error, for gamma in (0, 1)."""
    if not 0 < gamma < 1:
        raise InvalidInputError(f"an interior optimum needs gamma in (0, 1), got {gamma}")
    if c2 <= 0 or c3 <= 0:
        raise InvalidInputError("C2 and C3 must be positive")
    return (1.0 - gamma) * c2 / (gamma * c3)


# ---------- Difference matrix ----------


def difference_matrix(n: int) -> np.ndarray:
    """n x (n-1) first-order difference matrix: D[j, j] = 1, D[j+1, j] = -1."""
    if n < 2:
        raise InvalidInputError(f"n must be >= 2, got {n}")
    d = np.zeros((n, n - 1))
    j = np.arange(n - 1)
    d[j, j] = 1.0
    d[j + 1, j] = -1.0
    return d


def diff_matrix_svd(n: int) -> DiffMatrixSvd:
    """
    Closed form D = U S V^T with, for k = n-1..1 (so S is nonincreasing),
      U[m, k] = sqrt(2/n) cos((2m - 1) k pi / (2n)),  m = 1..n
      S[k]    = 2 sin(k pi / (2n))
      V[j, k] = sqrt(2/n) sin(j k pi / n),             j = 1..n-1
    """
    d = difference_matrix(n)
    k = np.arange(n - 1, 0, -1)
    m = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n)[:, None]
    u = math.sqrt(2.0 / n) * np.cos((2 * m - 1) * k * math.pi / (2 * n))
    s = 2.0 * np.sin(k * math.pi / (2 * n))
    v = math.sqrt(2.0 / n) * np.sin(j * k * math.pi / n)
    closed = SvdResult(u=u, s=s, vh=v.T)
    return DiffMatrixSvd(matrix=d, closed_form=closed, numeric=svd(d))


def composite_bound_check(c, n: int | None = None, d=None, tol: float = 1e-12) -> BoundCheck:
    """sigma_min(CD) >= sigma_min(C) sigma_min(D), D the difference matrix of size n unless given."""
    c = np.asarray(c, dtype=complex)
    d = difference_matrix(n or c.shape[1]) if d is None else np.asarray(d, dtype=complex)
    if c.shape[1] != d.shape[0]:
        raise InvalidInputError(f"incompatible shapes {c.shape} and {d.shape}")
    product = sigma_min(c @ d)
    s_c = sigma_min(c)
    s_d = sigma_min(d)
    bound = s_c * s_d
    scale = max(float(np.linalg.norm(c, 2)) * float(np.linalg.norm(d, 2)), 1.0)
    return BoundCheck(
        sigma_min_product=product,
        sigma_min_c=s_c,
        sigma_min_d=s_d,
        bound=bound,
        holds=product >= bound - tol * scale,
    )


# ---------- Isotropy ----------


def phase_density(dist: PhaseDist, phi, a: float = 0.0):
    """Uniform 1/(2pi), or e^{-k cos phi} / (2pi I0(k)) with k = dist.resolve(a)."""
    phi = np.asarray(phi, dtype=float)
    if dist.kind == "uniform":
        return np.full(phi.shape, 1.0 / (2.0 * math.pi))
    kappa = dist.resolve(a)
    return np.exp(-kappa * np.cos(phi)) / (2.0 * math.pi * bessel_i0(kappa))


def sample_phases(dist: PhaseDist, a: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Phases on [0, 2pi); von Mises by rejection from uniform under the envelope e^{|k|}."""
    if dist.kind == "uniform":
        return rng.uniform(0.0, 2.0 * math.pi, size=size)
    kappa = dist.resolve(a)
    out = np.empty(0)
    while out.size < size:
        batch = max(2 * (size - out.size), 1024)
        phi = rng.uniform(0.0, 2.0 * math.pi, size=batch)
        accept = rng.uniform(size=batch) < np.exp(-kappa * np.cos(phi) - abs(kappa))
        out = np.concatenate([out, phi[accept]])
    return out[:size]


def _estimate(c: np.ndarray) -> MonteCarloEstimate:
    trials = c.size
    cc = np.abs(c) ** 2
    return MonteCarloEstimate(
        mean_c=complex(c.mean()),
        se_c=float(np.sqrt((c.real.var(ddof=1) + c.imag.var(ddof=1)) / trials)),
        mean_cc=float(cc.mean()),
        se_cc=float(cc.std(ddof=1) / math.sqrt(trials)),
        trials=trials,
    )


def isotropy_mc(dist: PhaseDist, a: float, trials: int, rng: np.random.Generator) -> MonteCarloEstimate:
    """Monte-Carlo E[e^{a e^{i phi}}] and E|e^{a e^{i phi}}|^2 with phi ~ dist."""
    if trials < MIN_MC_TRIALS:
        raise InvalidInputError(f"isotropy_mc needs >= {MIN_MC_TRIALS} trials, got {trials}")
    phi = sample_phases(dist, a, trials, rng)
    return _estimate(np.exp(a * np.exp(1j * phi)))


def uniform_phase_second_moment(p: float, r: float, trials: int, rng: np.random.Generator) -> float:
    """Monte-Carlo E|e^{-zp} - 1|^2 for z = r e^{i phi}, phi uniform; the exact value is I0(2pr) - 1."""
    if not 0 < p <= DOMAIN_END:
        raise InvalidInputError(f"p must lie in (0, 2pi], got {p}")
    if r <= 0:
        raise InvalidInputError(f"r must be > 0, got {r}")
    phi = rng.uniform(0.0, 2.0 * math.pi, size=trials)
    c = np.exp(-r * p * np.exp(1j * phi)) - 1.0
    return float(np.mean(np.abs(c) ** 2))


def phase_integral_identity(a: float) -> tuple[complex, float]:
    """Quadrature of int_0^{2pi} e^{a e^{i phi}} e^{-i phi} d phi, against 2 pi a."""
    integrand = lambda phi: np.exp(a * np.exp(1j * phi) - 1j * phi)
    opts = {"epsabs": 1e-13, "epsrel": 1e-13, "limit": 200}
    re, _ = integrate.quad(lambda phi: integrand(phi).real, 0.0, 2.0 * math.pi, **opts)
    im, _ = integrate.quad(lambda phi: integrand(phi).imag, 0.0, 2.0 * math.pi, **opts)
    return complex(re, im), 2.0 * math.pi * a


# ---------- Bessel-zero breakpoints ----------


def bessel_j0_zero(j: int) -> float:
    """j-th positive zero of J0, bracketed around (j - 1/4) pi."""
    if j < 1:
        raise InvalidInputError(f"zero index must be >= 1, got {j}")
    guess = (j - 0.25) * math.pi
    return optimize.brentq(bessel_j0, guess - 0.5, guess + 0.5, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def bessel_zero_partition(r: float, n: int) -> Partition:
    """Breakpoints p_j = x_j / r at the first n zeros x_j of J0, plus 0 and 2pi."""
    if r <= 0 or n < 1:
        raise InvalidInputError(f"need r > 0 and n >= 1, got r={r}, n={n}")
    zeros = np.array([bessel_j0_zero(j) for j in range(1, n + 1)])
    if zeros[-1] >= DOMAIN_END * r:
        min_r = zeros[-1] / DOMAIN_END
        raise InsufficientZerosError(
            f"only zeros below {DOMAIN_END * r:.4g} fit in (0, 2pi r); r must exceed {min_r:.6g}",
            min_r=min_r,
        )
    return Partition(breakpoints=np.concatenate([[0.0], zeros / r, [DOMAIN_END]]))


def bessel_zero_isotropy(r: float, n: int, trials: int, rng: np.random.Generator) -> list[MonteCarloEstimate]:
    """
    Coupled strategy: at each zero breakpoint the phase is von Mises with
    concentration r p_j, so E[b] = J0(r p_j)/I0(r p_j) = 0 and E|b|^2 = 1.
    """
    p = bessel_zero_partition(r, n)
    return [isotropy_mc(PhaseDist.von_mises(), r * pj, trials, rng) for pj in p.interior]

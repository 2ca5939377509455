"""
Random partitions of [0, 2pi] and their distribution theory.

n counts intervals for gen_partition. The order-statistics helpers use the
normalized-variate indexing instead: n + 1 IID variates X_j with partial
sums S_k, and ratios S_k / S_{n+1} for k = 1..n.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import integrate, stats

from laplaceforge.config import DOMAIN_END, IRWIN_HALL_MAX_N
from laplaceforge.errors import InvalidInputError, InvalidPartitionError
from laplaceforge.models.params import PartitionScheme
from laplaceforge.models.results import DependenceReport, KsReport
from laplaceforge.models.signals import Partition

logger = logging.getLogger("laplaceforge.partitions")

MAX_REDRAWS = 100
INDEPENDENT_CONTROL = "independent"


# ---------- Generation ----------


def _draw_variates(scheme: PartitionScheme, size, rng: np.random.Generator) -> np.ndarray:
    if scheme == PartitionScheme.normalized_exponential:
        return rng.exponential(1.0, size=size)
    return rng.uniform(0.0, 1.0, size=size)


def _interior(scheme: PartitionScheme, n: int, rng: np.random.Generator) -> np.ndarray:
    if scheme == PartitionScheme.equidistant:
        return DOMAIN_END * np.arange(1, n) / n
    if scheme in (PartitionScheme.normalized_uniform, PartitionScheme.normalized_exponential):
        sums = np.cumsum(_draw_variates(scheme, n, rng))
        return DOMAIN_END * sums[:-1] / sums[-1]
    j = np.arange(1, n)
    if scheme == PartitionScheme.segments_centered:
        centers = DOMAIN_END * j / n
        return rng.uniform(centers - math.pi / n, centers + math.pi / n)
    if scheme == PartitionScheme.segments_left:
        width = DOMAIN_END / (n - 1) if n > 1 else DOMAIN_END
        return rng.uniform((j - 1) * width, j * width)
    raise InvalidPartitionError(f"unknown partition scheme {scheme!r}")


def gen_partition(scheme: PartitionScheme | str, n: int, rng: np.random.Generator) -> Partition:
    """
    n-interval partition 0 = p_0 < ... < p_n = 2pi.

      equidistant            p_j = 2pi j/n
      normalized_*           p_j = 2pi S_j/S_n, X uniform or exponential
      segments_centered      p_j ~ U(2pi j/n - pi/n, 2pi j/n + pi/n)
      segments_left          p_j ~ U(2pi (j-1)/(n-1), 2pi j/(n-1))

    Draws with coincident breakpoints are redrawn.
    """
    scheme = PartitionScheme(scheme)
    if n < 1:
        raise InvalidPartitionError(f"partition size must be >= 1, got {n}")
    for _ in range(MAX_REDRAWS):
        inner = _interior(scheme, n, rng)
        p = np.concatenate([[0.0], inner, [DOMAIN_END]])
        if np.all(np.diff(p) > 0):
            return Partition(breakpoints=p)
        logger.debug("Redrawing degenerate %s partition (n=%d)", scheme.value, n)
    raise InvalidPartitionError(f"could not draw a nondegenerate {scheme.value} partition of size {n}")


def compare_schemes(n: int, trials: int, rng: np.random.Generator) -> pd.DataFrame:
    """Mean and spread of every interior breakpoint for each scheme."""
    rows = []
    for scheme in PartitionScheme:
        draws = np.array([gen_partition(scheme, n, rng).interior for _ in range(trials)])
        for j in range(n - 1):
            rows.append(
                {
                    "scheme": scheme.value,
                    "j": j + 1,
                    "mean": float(draws[:, j].mean()),
                    "std": float(draws[:, j].std(ddof=1)) if trials > 1 else 0.0,
                }
            )
    return pd.DataFrame(rows, columns=["scheme", "j", "mean", "std"])


# ---------- Dependence of normalized breakpoints ----------


def normalized_ratios(scheme: PartitionScheme, n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    sums = np.cumsum(_draw_variates(scheme, (trials, n + 1), rng), axis=1)
    return sums[:, :-1] / sums[:, -1:]


def dependence_check(
    scheme: PartitionScheme | str,
    n: int,
    trials: int,
    rng: np.random.Generator,
    i: int = 1,
    k: int = 2,
    eps: float = 0.05,
    u_grid: Sequence[float] | None = None,
) -> DependenceReport:
    """
    P(V < u | |U - u| < eps) against P(V < u) for U = S_i/S_{n+1},
    V = S_k/S_{n+1}. scheme="independent" pairs U and V from two
    unrelated draws as a control.
    """
    if trials < 1000:
        raise InvalidInputError(f"dependence_check needs >= 1000 trials, got {trials}")
    if not 1 <= i < k <= n:
        raise InvalidInputError(f"need 1 <= i < k <= n, got i={i}, k={k}, n={n}")
    u_grid = np.linspace(0.3, 0.7, 5) if u_grid is None else np.asarray(u_grid, dtype=float)

    if scheme == INDEPENDENT_CONTROL:
        base = PartitionScheme.normalized_uniform
        u_vals = normalized_ratios(base, n, trials, rng)[:, i - 1]
        v_vals = normalized_ratios(base, n, trials, rng)[:, k - 1]
        label = INDEPENDENT_CONTROL
    else:
        scheme = PartitionScheme(scheme)
        if scheme not in (PartitionScheme.normalized_uniform, PartitionScheme.normalized_exponential):
            raise InvalidInputError(f"dependence_check applies to normalized schemes, got {scheme.value}")
        r = normalized_ratios(scheme, n, trials, rng)
        u_vals, v_vals = r[:, i - 1], r[:, k - 1]
        label = scheme.value

    conditional, marginal = [], []
    for u in u_grid:
        near = np.abs(u_vals - u) < eps
        conditional.append(float(np.mean(v_vals[near] < u)) if near.any() else float("nan"))
        marginal.append(float(np.mean(v_vals < u)))
    gaps = [abs(c - m) for c, m in zip(conditional, marginal)]
    return DependenceReport(
        scheme=label,
        n=n,
        i=i,
        k=k,
        trials=trials,
        u_grid=[float(u) for u in u_grid],
        conditional=conditional,
        marginal=marginal,
        gaps=gaps,
        max_gap=float(np.nanmax(gaps)),
    )


# ---------- Irwin-Hall distribution ----------


def _check_irwin_hall(m: int) -> None:
    if not 1 <= m <= IRWIN_HALL_MAX_N + 1:
        raise InvalidInputError(f"Irwin-Hall order must be in 1..{IRWIN_HALL_MAX_N + 1}, got {m}")


def irwin_hall_pdf(x: float, m: int) -> float:
    """Density of a sum of m IID U(0,1) variates."""
    _check_irwin_hall(m)
    if x < 0 or x > m:
        return 0.0
    terms = ((-1) ** j * math.comb(m, j) * (x - j) ** (m - 1) for j in range(int(math.floor(x)) + 1))
    return max(math.fsum(terms) / math.factorial(m - 1), 0.0)


def irwin_hall_cdf(x: float, m: int) -> float:
    _check_irwin_hall(m)
    if x <= 0:
        return 0.0
    if x >= m:
        return 1.0
    if x > m / 2:
        return 1.0 - irwin_hall_cdf(m - x, m)
    terms = ((-1) ** j * math.comb(m, j) * (x - j) ** m for j in range(int(math.floor(x)) + 1))
    return min(max(math.fsum(terms) / math.factorial(m), 0.0), 1.0)


def irwin_hall_sf(x: float, m: int) -> float:
    return irwin_hall_cdf(m - x, m)


def irwin_hall_ratio_cdf(k: int, n: int, t: float) -> float:
    """
    P(S_k / S_{n+1} <= t) for n + 1 IID uniforms:

        int_0^k P(R >= l(1 - t)/t) f_{S_k}(l) dl,   R = S_{n+1} - S_k
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError(f"t must lie in [0, 1], got {t}")
    if not 1 <= k <= n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > IRWIN_HALL_MAX_N:
        raise InvalidInputError(f"analytic ratio CDF is capped at n <= {IRWIN_HALL_MAX_N}; use Monte-Carlo beyond")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0

    rest = n + 1 - k
    scale = (1.0 - t) / t
    breaks = [float(j) for j in range(1, k)]
    breaks += [j / scale for j in range(1, rest + 1) if 0 < j / scale < k]

    value, _ = integrate.quad(
        lambda l: irwin_hall_sf(l * scale, rest) * irwin_hall_pdf(l, k),
        0.0,
        float(k),
        points=sorted(set(breaks)) or None,
        epsabs=1e-10,
        epsrel=1e-10,
        limit=200,
    )
    return min(max(value, 0.0), 1.0)


def exp_order_stats_check(n: int, trials: int, rng: np.random.Generator) -> KsReport:
    """KS distance of S_k/S_{n+1} (exponential X) from Beta(k, n+1-k), k = 1..n."""
    if trials < 10_000:
        raise InvalidInputError(f"exp_order_stats_check needs >= 10000 trials, got {trials}")
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    ratios = normalized_ratios(PartitionScheme.normalized_exponential, n, trials, rng)
    statistics = [
        float(stats.kstest(ratios[:, k - 1], stats.beta(k, n + 1 - k).cdf).statistic) for k in range(1, n + 1)
    ]
    return KsReport(n=n, trials=trials, statistics=statistics, max_statistic=max(statistics))

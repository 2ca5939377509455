"""
Inversion of analytic Laplace-domain functions with the cosh kernel.

    e^{st} ~ e^a / (2 cosh(a - st))

turns the Bromwich integral into a residue series over the poles
s_n = (a + i(n - 1/2)pi)/t, n >= 1:

    f(t) ~ (e^a / t) sum_{n>=1} (-1)^n Im F(s_n)

The series is summed raw for n_sum terms and the following n_euler terms are
folded in with Euler (binomial) weights. The approximation carries the bias
sum_{n>=1} (-1)^n e^{-2na} f((2n+1)t), which is never subtracted.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from laplaceforge.config import POLE_GUARD
from laplaceforge.errors import InvalidInputError, NumericError, PoleProximityError
from laplaceforge.models.params import IltParams
from laplaceforge.models.results import IltDiagnostics
from laplaceforge.models.signals import TimeSignal

logger = logging.getLogger("laplaceforge.analytic_ilt")

ComplexFunction = Callable[[complex], complex]


# ---------- Series acceleration ----------


def euler_weights(n_euler: int) -> list[int]:
    """
    E_1..E_N with E_N = 1 and E_k = E_{k+1} + C(N, k).

    The N + 1 partial sums S_M, .., S_{M+N} are averaged with weights
    C(N, j) / 2^N, where S_M is the raw sum. Tail term k then carries
    sum_{j>=k} C(N, j), so the row is C(N, k) and not C(N + 1, k).
    """
    if n_euler < 1:
        raise InvalidInputError(f"n_euler must be >= 1, got {n_euler}")
    weights = [0] * n_euler
    weights[-1] = 1
    for k in range(n_euler - 1, 0, -1):
        weights[k - 1] = weights[k] + math.comb(n_euler, k)
    return weights


def euler_accelerate(y: Sequence[float], n_euler: int) -> float:
    """
    Sum of the alternating series y_1 - y_2 + y_3 - ...

    The first len(y) - n_euler terms are summed as they are, the last n_euler
    are weighted by 2^{-N} E_k. This equals the binomial average of the
    partial sums S_m, ..., S_{m+N}.
    """
    terms = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(terms)):
        raise NumericError("series terms must be finite")
    n_sum = terms.size - n_euler
    if n_sum < 0:
        raise InvalidInputError(f"need at least n_euler={n_euler} terms, got {terms.size}")

    signs = np.where(np.arange(terms.size) % 2 == 0, 1.0, -1.0)
    signed = signs * terms
    raw = math.fsum(signed[:n_sum])
    weights = np.array(euler_weights(n_euler), dtype=float) / 2.0**n_euler
    return raw + math.fsum(weights * signed[n_sum:])


def binomial_tail_remainder(i: int, m: int) -> float:
    """
    2 - sum_{n=i}^{m} C(n, i) / 2^n, i.e. 2 P(Bin(m + 1, 1/2) <= i).

    Stays positive after the partial sum itself has rounded to 2.0.
    """
    if i < 0 or m < i:
        raise InvalidInputError(f"need 0 <= i <= m, got i={i}, m={m}")
    return float(2.0 * stats.binom.cdf(i, m + 1, 0.5))


def binomial_tail_sum(i: int, m: int) -> float:
    """sum_{n=i}^{m} C(n, i) / 2^n = 2 P(Bin(m + 1, 1/2) > i); nondecreasing in m and <= 2."""
    if i < 0 or m < i:
        raise InvalidInputError(f"need 0 <= i <= m, got i={i}, m={m}")
    return float(2.0 * stats.binom.sf(i, m + 1, 0.5))


def cosh_inv_series(z: complex, n_terms: int) -> complex:
    """Truncated 2pi sum_{n<n_terms} (-1)^n (n + 1/2) / ((n + 1/2)^2 pi^2 + z^2)."""
    if n_terms < 1:
        raise InvalidInputError(f"n_terms must be >= 1, got {n_terms}")
    z = complex(z)
    # poles at z = +-i(k + 1/2)pi
    k = round(abs(z.imag) / math.pi - 0.5)
    for kk in (k - 1, k, k + 1):
        if kk >= 0 and abs(complex(z.real, abs(z.imag)) - 1j * (kk + 0.5) * math.pi) <= POLE_GUARD:
            raise PoleProximityError(f"z = {z} is a pole of 1/cosh", z=str(z))
    c = np.arange(n_terms) + 0.5
    signs = np.where(np.arange(n_terms) % 2 == 0, 1.0, -1.0)
    return complex(2.0 * math.pi * np.sum(signs * c / (c * c * math.pi**2 + z * z)))


# ---------- Inversion ----------


def _residue_terms(F: ComplexFunction, t: float, p: IltParams) -> np.ndarray:
    n = np.arange(1, p.n_sum + p.n_euler + 1)
    nodes = (p.a_param + 1j * (n - 0.5) * math.pi) / t
    try:
        values = np.asarray(F(nodes), dtype=complex)
        if values.shape != nodes.shape:
            raise ValueError("F is not vectorized")
    except (TypeError, ValueError):
        values = np.array([F(complex(s)) for s in nodes], dtype=complex)
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)][0]
        raise NumericError(f"F is not finite at z = {bad}", t=t)
    return values


def ilt_valsa_detailed(F: ComplexFunction, t: float, p: IltParams | None = None) -> IltDiagnostics:
    """
    Value of the cosh-kernel series at t, with the magnitude of the
    imaginary residue that real-valued output drops.
    """
    p = p or IltParams()
    if not t > 0:
        raise InvalidInputError(f"t must be > 0, got {t}")
    values = _residue_terms(F, t, p)
    scale = math.exp(p.a_param) / t
    # sum (-1)^n Im F(s_n) = y_1 - y_2 + ... with y_n = -Im F(s_n)
    value = scale * euler_accelerate(-values.imag, p.n_euler)
    discarded = scale * euler_accelerate(values.real, p.n_euler)
    return IltDiagnostics(value=value, discarded_imag=abs(discarded), terms=values.size)


def ilt_valsa(F: ComplexFunction, t: float, p: IltParams | None = None) -> float:
    return ilt_valsa_detailed(F, t, p).value


def ilt_on_grid(
    F: ComplexFunction,
    ts: Sequence[float],
    p: IltParams | None = None,
    threads: int = 1,
) -> TimeSignal:
    p = p or IltParams()
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise InvalidInputError("every grid time must be > 0")
    if threads > 1:
        values = Parallel(n_jobs=threads, backend="threading")(delayed(ilt_valsa)(F, float(t), p) for t in ts)
    else:
        values = [ilt_valsa(F, float(t), p) for t in ts]
    logger.debug("Inverted %d grid points (a=%g, n_sum=%d, N=%d)", ts.size, p.a_param, p.n_sum, p.n_euler)
    return TimeSignal(t=ts, y=np.array(values))


def valsa_bias(f: Callable[[float], float], t: float, a: float, terms: int = 20) -> float:
    """sum_{n=1}^{terms} (-1)^n e^{-2na} f((2n+1)t) for a known f."""
    return math.fsum((-1) ** n * math.exp(-2.0 * n * a) * f((2 * n + 1) * t) for n in range(1, terms + 1))

"""
Forward Laplace transform of sampled signals on a finite window.

Signals are fitted by piecewise polynomials (degree <= 4) and every piece is
integrated exactly against e^{-zt}. Windowed monomial integrals
int_a^b t^n e^{-zt} dt come from the binomial closed form
A_{a,n}(z) - A_{b,n}(z), or from its Taylor series in z when |z|*max(|a|,|b|)
is below 1, where the closed form cancels.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate
from scipy.interpolate import CubicSpline

from laplaceforge.config import DOMAIN_END, FIT_WINDOW, NEAR_ZERO, STEPWISE_MAX_TERMS
from laplaceforge.errors import (
    DivergentSeriesError,
    InvalidInputError,
    InvalidSignalError,
    InvalidWindowError,
    NearZeroFrequencyError,
    PoleProximityError,
)
from laplaceforge.models.results import EnergyCheck, StepwiseComparison
from laplaceforge.models.signals import LtSample, PiecewisePoly, TimeSignal

logger = logging.getLogger("laplaceforge.forward_lt")

TAYLOR_TERMS = 30

# ---------- Windowed monomials ----------


def _closed_form(degree: int, a: np.ndarray, b: np.ndarray, z: np.ndarray) -> np.ndarray:
    # I_n = (a^n e^{-za} - b^n e^{-zb}) / z + (n / z) I_{n-1}
    out = np.empty((degree + 1,) + z.shape, dtype=complex)
    ea = np.exp(-a * z)
    eb = np.exp(-b * z)
    inv = 1.0 / z
    out[0] = (ea - eb) * inv
    pa = np.ones(z.shape)
    pb = np.ones(z.shape)
    for n in range(1, degree + 1):
        pa = pa * a
        pb = pb * b
        out[n] = (pa * ea - pb * eb + n * out[n - 1]) * inv
    return out


def _taylor(degree: int, a: np.ndarray, b: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros((degree + 1,) + z.shape, dtype=complex)
    coef = np.ones(z.shape, dtype=complex)
    for m in range(TAYLOR_TERMS):
        if m:
            coef = coef * (-z) / m
        for n in range(degree + 1):
            p = n + m + 1
            out[n] += coef * (b**p - a**p) / p
    return out


def monomial_windows(degree: int, a, b, z) -> np.ndarray:
    """
    int_a^b t^n e^{-zt} dt for n = 0..degree.

    a, b and z broadcast together; the result has shape (degree + 1, *broadcast).
    """
    a, b, z = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(z, dtype=complex)
    )
    out = np.empty((degree + 1,) + z.shape, dtype=complex)
    small = np.abs(z) * np.maximum(np.abs(a), np.abs(b)) < 1.0
    if np.any(small):
        out[:, small] = _taylor(degree, a[small], b[small], z[small])
    big = ~small
    if np.any(big):
        out[:, big] = _closed_form(degree, a[big], b[big], z[big])
    return out


def _unwrap(value: np.ndarray, like):
    return complex(value) if np.ndim(like) == 0 else value


def lt_shifted_monomial(n: int, a: float, z):
    """A_{a,n}(z) = int_a^inf t^n e^{-zt} dt."""
    if not 0 <= n <= 4:
        raise InvalidInputError(f"degree must be in 0..4, got {n}")
    if a < 0:
        raise InvalidWindowError(f"a must be >= 0, got {a}")
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) <= NEAR_ZERO):
        raise NearZeroFrequencyError("no finite transform of an unbounded window at z = 0", a=a, n=n)
    total = np.zeros(zz.shape, dtype=complex)
    for k in range(n + 1):
        total += math.comb(n, k) * a ** (n - k) * math.factorial(k) / zz ** (k + 1)
    return _unwrap(np.exp(-a * zz) * total, z)


def lt_power_window(n: int, a: float, b: float, z):
    """int_a^b t^n e^{-zt} dt, with the z -> 0 limit (b^{n+1} - a^{n+1})/(n+1)."""
    if not 0 <= n <= 4:
        raise InvalidInputError(f"degree must be in 0..4, got {n}")
    if a < 0 or a >= b:
        raise InvalidWindowError(f"invalid window [{a}, {b}]", a=a, b=b)
    return _unwrap(monomial_windows(n, a, b, z)[n], z)


# ---------- Fitting ----------


def _check_fit_input(sig: TimeSignal, degree: int) -> None:
    if degree not in (3, 4):
        raise InvalidInputError(f"fit degree must be 3 or 4, got {degree}")
    if len(sig) < degree + 1:
        raise InvalidSignalError(f"degree {degree} fit needs >= {degree + 1} samples, got {len(sig)}")


def _fit_cubic(sig: TimeSignal) -> PiecewisePoly:
    spline = CubicSpline(sig.t, sig.y, bc_type="natural")
    # spline.c rows are descending local powers
    local = spline.c[::-1].T
    poly = PiecewisePoly.from_local(sig.t, local)
    residual = float(np.max(np.abs(poly.evaluate(sig.t) - sig.y)))
    return PiecewisePoly.from_local(sig.t, local, fit_residual=residual)


def _fit_quartic(sig: TimeSignal, window: int = FIT_WINDOW) -> PiecewisePoly:
    """
    Per interval, a quartic p(u) = y_k + u*dy + u(u-1)(c0 + c1 u + c2 u^2),
    u = (t - t_k)/h, fitted by least squares to the samples of a sliding window.
    p interpolates both interval ends, so the pieces join continuously.
    """
    t, y = sig.t, sig.y
    size = min(window, t.size)
    local = np.zeros((t.size - 1, 5))
    worst = 0.0
    bubble = np.array([0.0, -1.0, 1.0])  # u(u-1)

    for k in range(t.size - 1):
        start = int(np.clip(k - (size - 1) // 2 + 1, 0, t.size - size))
        tw = t[start : start + size]
        yw = y[start : start + size]
        h = t[k + 1] - t[k]
        dy = y[k + 1] - y[k]
        u = (tw - t[k]) / h

        base = npoly.polyval(u, [y[k], dy])
        design = np.stack([u * (u - 1.0) * u**j for j in range(3)], axis=1)
        c, *_ = np.linalg.lstsq(design, yw - base, rcond=None)

        in_u = npoly.polyadd([y[k], dy], npoly.polymul(bubble, c))
        in_u = np.pad(in_u, (0, 5 - in_u.size))
        local[k] = in_u / h ** np.arange(5)
        worst = max(worst, float(np.max(np.abs(design @ c - (yw - base)))))

    return PiecewisePoly.from_local(t, local, fit_residual=worst)


def fit_piecewise_poly(sig: TimeSignal, degree: int = 4) -> PiecewisePoly:
    """
    degree 3: natural cubic spline through every sample.
    degree 4: continuous piecewise quartic from local least squares over
    a FIT_WINDOW-sample window; fit_residual is the largest window residual.
    """
    _check_fit_input(sig, degree)
    poly = _fit_cubic(sig) if degree == 3 else _fit_quartic(sig)
    logger.debug("Fitted degree-%d model over %d pieces (residual %.3g)", degree, poly.pieces, poly.fit_residual)
    return poly


# ---------- Transforms of fitted models ----------


def lt_piecewise_poly(poly: PiecewisePoly, z):
    """
    sum_k sum_n q_{n,k} int_{a_k}^{a_{k+1}} t^n e^{-zt} dt.

    Each piece is integrated in its local variable s = t - a_k,
    e^{-z a_k} sum_m d_{m,k} int_0^{h_k} s^m e^{-zs} ds,
    with d read straight from the stored local coefficients.
    """
    if poly.start < 0:
        raise InvalidWindowError(f"model starts at {poly.start} < 0", start=poly.start)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    local = poly.local_coeffs()
    widths = np.diff(poly.knots)
    windows = monomial_windows(poly.degree, 0.0, widths[:, None], zz[None, :])
    per_piece = np.einsum("km,mkz->kz", local, windows)
    shift = np.exp(-np.outer(poly.knots[:-1], zz))
    values = np.sum(shift * per_piece, axis=0)
    return complex(values[0]) if np.ndim(z) == 0 else values


def lt_signal(
    sig: TimeSignal,
    zs: Sequence[complex],
    degree: int = 4,
    reparameterize: bool = False,
) -> list[LtSample]:
    """
    Fit sig, then transform the fit at each z.

    With reparameterize=True the sample window [t_0, t_end] is mapped
    affinely onto [0, 2pi] first.
    """
    if reparameterize:
        t = (sig.t - sig.t[0]) * (DOMAIN_END / (sig.t[-1] - sig.t[0]))
        sig = TimeSignal(t=t, y=sig.y)
    poly = fit_piecewise_poly(sig, degree)
    zs = np.asarray(zs, dtype=complex)
    values = lt_piecewise_poly(poly, zs)
    return [LtSample(z=complex(z), value=complex(v)) for z, v in zip(zs, values)]


# ---------- Closed forms ----------


def _guard_pole(z: np.ndarray, w: float) -> np.ndarray:
    denom = z * z + w * w
    if np.any(np.abs(denom) <= NEAR_ZERO):
        raise PoleProximityError(f"z is within {NEAR_ZERO} of a pole at +-{w}i", w=w)
    return denom


def lt_sin_window(w: float, z, end: float = DOMAIN_END):
    """int_0^end sin(wt) e^{-zt} dt."""
    if w <= 0:
        raise InvalidInputError(f"w must be > 0, got {w}")
    zz = np.asarray(z, dtype=complex)
    denom = _guard_pole(zz, w)
    decay = np.exp(-zz * end)
    value = (w - decay * (zz * math.sin(w * end) + w * math.cos(w * end))) / denom
    return _unwrap(value, z)


def lt_cos_window(w: float, z, end: float = DOMAIN_END):
    """int_0^end cos(wt) e^{-zt} dt."""
    if w <= 0:
        raise InvalidInputError(f"w must be > 0, got {w}")
    zz = np.asarray(z, dtype=complex)
    denom = _guard_pole(zz, w)
    decay = np.exp(-zz * end)
    value = (zz + decay * (w * math.sin(w * end) - zz * math.cos(w * end))) / denom
    return _unwrap(value, z)


def lt_exp_window(w: float, z, end: float = DOMAIN_END):
    """int_0^end e^{-wt} e^{-zt} dt; equals end when z + w = 0."""
    zz = np.asarray(z, dtype=complex)
    return _unwrap(monomial_windows(0, 0.0, end, zz + w)[0], z)


# ---------- Dirichlet series vs. stepwise functions ----------


def lt_stepwise(jumps: Sequence[tuple[float, float]], z: complex, z0: complex = 0.0) -> StepwiseComparison:
    """
    Both sides of f(z + z0)/z = L[g](z), f(s) = sum_n a_n e^{-lambda_n s} and
    g(t) = sum_{lambda_n <= t} a_n e^{-lambda_n z0}.
    """
    z = complex(z)
    z0 = complex(z0)
    if z.real <= 0:
        raise InvalidInputError(f"needs Re z > 0, got {z}")
    if len(jumps) > STEPWISE_MAX_TERMS:
        raise DivergentSeriesError(f"{len(jumps)} terms exceeds the cap of {STEPWISE_MAX_TERMS}")
    if not jumps:
        return StepwiseComparison(dirichlet=0j, stepwise=0j, discrepancy=0.0, terms=0)

    lam = np.array([j[0] for j in jumps], dtype=float)
    amp = np.array([j[1] for j in jumps], dtype=float)
    if np.any(lam < 0):
        raise InvalidInputError("jump positions must be >= 0")
    if np.any(np.diff(lam) < 0):
        raise DivergentSeriesError("jump positions must be nondecreasing so |e^{-lambda z}| decreases")

    weights = amp * np.exp(-lam * z0)
    dirichlet = complex(np.sum(weights * np.exp(-lam * z)) / z)

    levels = np.cumsum(weights)
    gaps = np.diff(lam)
    inner = monomial_windows(0, 0.0, gaps, z)[0] * np.exp(-lam[:-1] * z)
    stepwise = complex(np.sum(levels[:-1] * inner) + levels[-1] * np.exp(-lam[-1] * z) / z)

    return StepwiseComparison(
        dirichlet=dirichlet,
        stepwise=stepwise,
        discrepancy=abs(dirichlet - stepwise),
        terms=len(jumps),
    )


# ---------- Error bound and energy check ----------


def forward_error_bound(sup_diff: float, a: float, b: float, re_z: float) -> float:
    """sup|fit - f| * (e^{-x a} - e^{-x b}) / x, with limit sup|fit - f| * (b - a) at x = 0."""
    if a >= b:
        raise InvalidWindowError(f"invalid window [{a}, {b}]", a=a, b=b)
    if sup_diff < 0 or re_z < 0:
        raise InvalidInputError("sup_diff and re_z must be >= 0")
    if re_z <= NEAR_ZERO:
        return sup_diff * (b - a)
    return sup_diff * math.exp(-re_z * a) * -math.expm1(-re_z * (b - a)) / re_z


def hardy_energy_check(
    lt: Callable[[complex], complex],
    f: Callable[[float], float],
    x: float,
    y_max: float = 200.0,
    end: float = DOMAIN_END,
) -> EnergyCheck:
    """
    (1/2pi) int_{-Y}^{Y} |F(x+iy)|^2 dy against int_0^end |f(t)|^2 e^{-2xt} dt.
    """
    edges = np.linspace(-y_max, y_max, int(2 * y_max) + 1)
    pieces = [
        integrate.quad(lambda y: abs(lt(complex(x, y))) ** 2, lo, hi, limit=200)[0]
        for lo, hi in zip(edges[:-1], edges[1:])
    ]
    lt_energy = math.fsum(pieces) / (2.0 * math.pi)
    time_energy, _ = integrate.quad(lambda t: f(t) ** 2 * math.exp(-2.0 * x * t), 0.0, end, limit=200)
    logger.debug("Energy check at x=%g: %g vs %g", x, lt_energy, time_energy)
    return EnergyCheck(x=x, lt_energy=lt_energy, time_energy=time_energy)

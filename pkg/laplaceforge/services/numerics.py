"""
Linear algebra, special functions and polynomial evaluation shared by the
transform, inversion and random-matrix services.

Bessel functions of order 0 are evaluated in-repo:
  J0: power series for |x| <= 6, trapezoidal sum of the Bessel integral
      (1/2pi) int cos(x sin t) dt for 6 < |x| < 25, Hankel asymptotics beyond.
  I0: power series for |x| <= 30, asymptotic expansion beyond, |x| <= 700.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
import scipy.linalg

from laplaceforge.config import I0_OVERFLOW_GUARD, MACHINE_EPS, MAX_POLY_DEGREE
from laplaceforge.errors import ConvergenceError, InvalidInputError, OverflowGuardError
from laplaceforge.models.results import LstsqResult, SvdResult

logger = logging.getLogger("laplaceforge.numerics")

# ---------- Linear algebra ----------


def _as_matrix(a) -> np.ndarray:
    mat = np.asarray(a, dtype=complex)
    if mat.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise InvalidInputError("matrix has non-finite entries")
    return mat


def svd(a) -> SvdResult:
    """
    Thin SVD through LAPACK (gesdd, falling back to gesvd on failure).
    Singular values come back nonincreasing.
    """
    mat = _as_matrix(a)
    try:
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        logger.warning("gesdd did not converge on %s matrix; retrying with gesvd", mat.shape)
        try:
            u, s, vh = scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")
        except np.linalg.LinAlgError as ex:
            raise ConvergenceError(f"SVD did not converge for {mat.shape} matrix", shape=list(mat.shape)) from ex
    return SvdResult(u=u, s=s, vh=vh)


def singular_values(a) -> np.ndarray:
    mat = _as_matrix(a)
    try:
        return np.linalg.svd(mat, compute_uv=False)
    except np.linalg.LinAlgError as ex:
        raise ConvergenceError(f"SVD did not converge for {mat.shape} matrix") from ex


def sigma_min(a) -> float:
    s = singular_values(a)
    return float(s[-1]) if s.size else 0.0


def pseudo_inverse_solve(
    a,
    b,
    rcond: float | None = None,
    factors: SvdResult | None = None,
    rank: int | None = None,
) -> LstsqResult:
    """
    x = sum over sigma_k > rcond*sigma_1 of (1/sigma_k) v_k (u_k^* b).

    rank_deficient is set when any direction is truncated by rcond; with every
    direction truncated x is the zero vector. rank, when given, further keeps
    only the leading rank directions and leaves the flag alone.
    """
    mat = _as_matrix(a)
    rhs = np.asarray(b, dtype=complex)
    if rhs.shape != (mat.shape[0],):
        raise InvalidInputError(f"b has shape {rhs.shape}, expected ({mat.shape[0]},)")
    if rcond is None:
        rcond = max(mat.shape) * MACHINE_EPS
    if not 0 <= rcond < 1:
        raise InvalidInputError(f"rcond must lie in [0, 1), got {rcond}")
    if rank is not None and rank < 0:
        raise InvalidInputError(f"rank must be >= 0, got {rank}")

    f = factors if factors is not None else svd(mat)
    cutoff = rcond * f.sigma_max
    keep = f.s > cutoff
    numeric_rank = int(np.count_nonzero(keep))
    if rank is not None:
        keep &= np.arange(f.s.size) < rank
    kept = int(np.count_nonzero(keep))
    if kept == 0:
        return LstsqResult(
            x=np.zeros(mat.shape[1], dtype=complex),
            rank=0,
            rank_deficient=numeric_rank < mat.shape[1],
            cutoff=cutoff,
        )

    coeffs = (f.u[:, keep].conj().T @ rhs) / f.s[keep]
    x = f.vh[keep].conj().T @ coeffs
    return LstsqResult(x=x, rank=kept, rank_deficient=numeric_rank < mat.shape[1], cutoff=cutoff)


def gcv_rank(factors: SvdResult, b, max_rank: int | None = None) -> int:
    """
    Truncation rank k in 1..max_rank minimizing the generalized cross-validation
    score ||b - U_k U_k^* b||^2 / (m - k)^2.

    Residuals are summed from the dropped coefficients, not by subtraction.
    Square and wide systems have no spare rows to score with and get
    max_rank back.
    """
    rhs = np.asarray(b, dtype=complex)
    m = factors.u.shape[0]
    top = factors.s.size if max_rank is None else min(max_rank, factors.s.size)
    if top < 1:
        return 0
    if m <= top:
        return top
    beta = factors.u.conj().T @ rhs
    outside = float(np.linalg.norm(rhs - factors.u @ beta) ** 2)
    energy = np.abs(beta[:top]) ** 2
    # tail[k-1] = ||b_perp||^2 + sum_{j > k} |beta_j|^2 for k = 1..top, j 1-based
    tail = outside + np.concatenate([np.cumsum(energy[::-1])[::-1][1:], [0.0]])
    tail += float(np.sum(np.abs(beta[top:]) ** 2))
    k = np.arange(1, top + 1)
    score = tail / (m - k) ** 2.0
    return int(np.argmin(score)) + 1


# ---------- Special functions ----------

_J0_SERIES_MAX = 6.0
_J0_ASYMPTOTIC_MIN = 25.0
_J0_TRAPEZOID_NODES = 64
_I0_SERIES_MAX = 30.0


def _series_j0_like(x2_quarter: float, sign: float) -> float:
    """sum_k (sign * x^2/4)^k / (k!)^2, stopped once terms are below 1e-17 of the sum."""
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= sign * x2_quarter / (k * k)
        total += term
        if abs(term) <= 1e-17 * abs(total) or k > 500:
            return total


def _hankel_pq(x: float) -> tuple[float, float]:
    """
    Asymptotic P0, Q0 truncated at the smallest term, with
    term_k = prod_{j<=k} (2j-1)^2 / (k! (8x)^k):
      P0 = sum_{k even} (-1)^(k/2) term_k,  Q0 = sum_{k odd} (-1)^((k+1)/2) term_k.
    """
    p, q = 1.0, 0.0
    term = 1.0
    for k in range(1, 60):
        nxt = term * ((2 * k - 1) ** 2) / (k * 8.0 * x)
        if nxt >= term:
            break
        term = nxt
        if k % 2:
            q += (-1) ** ((k + 1) // 2) * term
        else:
            p += (-1) ** (k // 2) * term
    return p, q


def bessel_j0(x: float) -> float:
    ax = abs(float(x))
    if not math.isfinite(ax):
        raise InvalidInputError(f"bessel_j0 needs a finite argument, got {x}")
    if ax <= _J0_SERIES_MAX:
        return _series_j0_like(ax * ax / 4.0, -1.0)
    if ax < _J0_ASYMPTOTIC_MIN:
        theta = 2.0 * np.pi * np.arange(_J0_TRAPEZOID_NODES) / _J0_TRAPEZOID_NODES
        return float(np.mean(np.cos(ax * np.sin(theta))))
    p, q = _hankel_pq(ax)
    chi = ax - math.pi / 4.0
    return math.sqrt(2.0 / (math.pi * ax)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_i0(x: float) -> float:
    ax = abs(float(x))
    if not math.isfinite(ax) or ax > I0_OVERFLOW_GUARD:
        raise OverflowGuardError(f"bessel_i0 overflow guard: |x| = {ax} > {I0_OVERFLOW_GUARD}")
    if ax <= _I0_SERIES_MAX:
        return _series_j0_like(ax * ax / 4.0, 1.0)
    # e^x / sqrt(2 pi x) * sum_k a_k / x^k, a_k = ((2k-1)!!)^2 / (k! 8^k)
    total = 1.0
    term = 1.0
    for k in range(1, 40):
        nxt = term * ((2 * k - 1) ** 2) / (k * 8.0 * ax)
        if nxt >= term:
            break
        term = nxt
        total += term
        if term < 1e-17 * total:
            break
    return math.exp(ax) / math.sqrt(2.0 * math.pi * ax) * total


# ---------- Polynomials ----------


def eval_poly(coeffs: Sequence[float], t):
    """Horner evaluation of sum_n q_n t^n (q ascending, degree <= 4)."""
    q = list(coeffs)
    if not q:
        raise InvalidInputError("eval_poly needs at least one coefficient")
    if len(q) - 1 > MAX_POLY_DEGREE:
        raise InvalidInputError(f"degree {len(q) - 1} exceeds {MAX_POLY_DEGREE}")
    acc = q[-1] * np.ones_like(t, dtype=float) if isinstance(t, np.ndarray) else float(q[-1])
    for c in reversed(q[:-1]):
        acc = acc * t + c
    return acc

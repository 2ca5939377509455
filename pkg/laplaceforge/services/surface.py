"""
Test signals and sampled kime-surfaces.

composite(x) = 2 sin x + cos 4x + sin(7x + 0.5) + 0.3 (x - 3)(x - 5) on [0, 2pi].
"""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np

from laplaceforge.config import DOMAIN_END
from laplaceforge.errors import InvalidInputError
from laplaceforge.models.params import TestFunctionSpec, ZGridSpec
from laplaceforge.models.signals import KimeSampleSet, TimeSignal
from laplaceforge.services.forward_lt import (
    fit_piecewise_poly,
    lt_cos_window,
    lt_piecewise_poly,
    lt_sin_window,
    monomial_windows,
)
from laplaceforge.storage.local import read_signal

logger = logging.getLogger("laplaceforge.surface")

DENSE_POINTS = 2001


def composite(x):
    x = np.asarray(x, dtype=float)
    return 2.0 * np.sin(x) + np.cos(4.0 * x) + np.sin(7.0 * x + 0.5) + 0.3 * (x - 3.0) * (x - 5.0)


def composite_lt(z):
    """Closed-form transform of the composite signal on [0, 2pi]."""
    zz = np.asarray(z, dtype=complex)
    w = monomial_windows(2, 0.0, DOMAIN_END, zz)
    value = (
        2.0 * lt_sin_window(1.0, zz)
        + lt_cos_window(4.0, zz)
        + math.cos(0.5) * lt_sin_window(7.0, zz)
        + math.sin(0.5) * lt_cos_window(7.0, zz)
        + 0.3 * (w[2] - 8.0 * w[1] + 15.0 * w[0])
    )
    return complex(value) if np.ndim(z) == 0 else value


def truth_function(spec: TestFunctionSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Noise-free time-domain signal (zero outside its window)."""
    if spec.kind == "sin":
        base = lambda t: np.sin(spec.w * np.asarray(t, dtype=float))
    elif spec.kind == "composite":
        base = composite
    else:
        sig = read_signal(spec.csv_path)
        base = lambda t: np.interp(np.asarray(t, dtype=float), sig.t, sig.y)
        return lambda t: np.where((np.asarray(t) >= sig.t[0]) & (np.asarray(t) <= sig.t[-1]), base(t), 0.0)

    return lambda t: np.where((np.asarray(t) >= 0) & (np.asarray(t) <= DOMAIN_END), base(t), 0.0)


def signal_samples(spec: TestFunctionSpec, points: int) -> TimeSignal:
    """Uniform samples on [0, 2pi], with IID Gaussian noise of scale spec.noise_sigma."""
    if spec.kind == "custom-csv":
        sig = read_signal(spec.csv_path)
        t, y = sig.t, sig.y
    else:
        t = np.linspace(0.0, DOMAIN_END, points)
        y = truth_function(spec)(t)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        y = y + rng.normal(0.0, spec.noise_sigma, size=t.size)
    return TimeSignal(t=t, y=y)


def transform_function(spec: TestFunctionSpec) -> Callable:
    """
    F(z) of the test signal: a closed form for noise-free sin and composite,
    otherwise the degree-4 fit of a dense sampling.
    """
    if spec.noise_sigma == 0 and spec.kind == "sin":
        return lambda z: lt_sin_window(spec.w, z)
    if spec.noise_sigma == 0 and spec.kind == "composite":
        return composite_lt
    poly = fit_piecewise_poly(signal_samples(spec, DENSE_POINTS), 4)
    return lambda z: lt_piecewise_poly(poly, z)


def sample_surface(
    spec: TestFunctionSpec,
    z_grid: ZGridSpec,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> KimeSampleSet:
    """
    F at the z_grid points plus complex Gaussian noise with E|eps|^2 = noise_sigma^2.
    Random grids and the noise share one stream seeded by `seed`.
    """
    if noise_sigma < 0:
        raise InvalidInputError(f"noise sigma must be >= 0, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    zs = z_grid.points(rng)
    values = np.asarray(transform_function(spec)(zs), dtype=complex)
    if noise_sigma > 0:
        scale = noise_sigma / math.sqrt(2.0)
        values = values + scale * (rng.normal(size=zs.size) + 1j * rng.normal(size=zs.size))
    logger.info("Sampled %s surface at %d points (noise %.3g)", spec.kind, zs.size, noise_sigma)
    return KimeSampleSet(z=zs, values=values)

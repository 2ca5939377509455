import math

import numpy as np
import pytest

from laplaceforge.models.signals import TimeSignal

TWO_PI = 2.0 * math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sin_signal():
    """sin(t) at 200 uniform points on [0, 2pi]."""
    return TimeSignal.from_function(np.sin, 200)


def sin_window_exact(z, w=1.0):
    """Closed form of int_0^{2pi} sin(wt) e^{-zt} dt for integer w."""
    z = np.asarray(z, dtype=complex)
    return w * (1.0 - np.exp(-TWO_PI * z)) / (z * z + w * w)

"""Test signals and sampled surfaces."""

import numpy as np
import pytest
from scipy import integrate

from conftest import TWO_PI
from laplaceforge.errors import InvalidInputError
from laplaceforge.models.params import TestFunctionSpec, ZGridSpec
from laplaceforge.models.signals import TimeSignal
from laplaceforge.services.forward_lt import lt_sin_window
from laplaceforge.services.surface import (
    composite,
    composite_lt,
    sample_surface,
    signal_samples,
    transform_function,
    truth_function,
)
from laplaceforge.storage.local import write_signal

GRID = ZGridSpec(kind="annulus", count=50, r_range=(0.5, 3.0), re_min=0.5)


class TestComposite:
    @pytest.mark.parametrize("z", [0.5, 1.0 + 2.0j, 0.1 - 7.0j, 3.0 + 0.5j])
    def test_closed_form_against_quadrature(self, z):
        opts = {"limit": 400, "epsabs": 1e-12}
        re, _ = integrate.quad(lambda t: (composite(t) * np.exp(-z * t)).real, 0.0, TWO_PI, **opts)
        im, _ = integrate.quad(lambda t: (composite(t) * np.exp(-z * t)).imag, 0.0, TWO_PI, **opts)
        assert composite_lt(z) == pytest.approx(complex(re, im), abs=1e-9)

    def test_vectorized(self):
        zs = np.array([0.5, 1.0 + 1.0j])
        np.testing.assert_allclose(composite_lt(zs), [composite_lt(0.5), composite_lt(1.0 + 1.0j)], rtol=1e-14)


class TestSignals:
    def test_truth_is_zero_outside_window(self):
        f = truth_function(TestFunctionSpec(kind="sin", w=2.0))
        np.testing.assert_array_equal(f(np.array([-1.0, 7.0])), [0.0, 0.0])
        assert f(np.array([1.0]))[0] == pytest.approx(np.sin(2.0))

    def test_noise_is_seeded(self):
        spec = TestFunctionSpec(kind="composite", noise_sigma=0.1, seed=4)
        a = signal_samples(spec, 100)
        b = signal_samples(spec, 100)
        np.testing.assert_array_equal(a.y, b.y)
        assert np.std(a.y - composite(a.t)) == pytest.approx(0.1, rel=0.3)

    def test_custom_csv(self, tmp_path):
        path = tmp_path / "ramp.csv"
        write_signal(TimeSignal(t=np.linspace(0.0, 2.0, 21), y=np.linspace(0.0, 2.0, 21)), path)
        spec = TestFunctionSpec.parse(str(path))
        assert truth_function(spec)(np.array([1.5, 3.0])).tolist() == pytest.approx([1.5, 0.0])
        assert len(signal_samples(spec, 999)) == 21

    def test_noisy_sin_uses_fit(self):
        F = transform_function(TestFunctionSpec(kind="sin", w=1.0, noise_sigma=1e-9, seed=1))
        assert F(1.0 + 1.0j) == pytest.approx(lt_sin_window(1.0, 1.0 + 1.0j), abs=1e-7)


class TestSampleSurface:
    def test_noise_free_matches_closed_form(self):
        samples = sample_surface(TestFunctionSpec(kind="sin", w=3.0), GRID)
        np.testing.assert_allclose(samples.values, lt_sin_window(3.0, samples.z), rtol=1e-14)
        assert np.all(samples.z.real >= 0.5)
        assert np.all((np.abs(samples.z) >= 0.5) & (np.abs(samples.z) <= 3.0))

    def test_seed_reproducibility(self):
        spec = TestFunctionSpec(kind="sin")
        a = sample_surface(spec, GRID, noise_sigma=0.05, seed=8)
        b = sample_surface(spec, GRID, noise_sigma=0.05, seed=8)
        c = sample_surface(spec, GRID, noise_sigma=0.05, seed=9)
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.z, c.z)

    def test_noise_level(self):
        grid = ZGridSpec(kind="line", count=4000, re=1.0, im_range=(-5.0, 5.0))
        clean = sample_surface(TestFunctionSpec(kind="sin"), grid)
        noisy = sample_surface(TestFunctionSpec(kind="sin"), grid, noise_sigma=0.2, seed=3)
        assert np.sqrt(np.mean(np.abs(noisy.values - clean.values) ** 2)) == pytest.approx(0.2, rel=0.05)

    def test_negative_noise(self):
        with pytest.raises(InvalidInputError):
            sample_surface(TestFunctionSpec(kind="sin"), GRID, noise_sigma=-1.0)

"""Parameter parsing and model validation."""

from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import TWO_PI
from laplaceforge.models.params import (
    IltConfig,
    IltParams,
    PartitionScheme,
    PhaseDist,
    TestFunctionSpec,
    Truncation,
    ZGridSpec,
)
from laplaceforge.models.signals import KimeSampleSet, PiecewisePoly


class TestZGridSpec:
    def test_line(self):
        spec = ZGridSpec.parse("re=0.1,im=0..20,count=200")
        assert (spec.kind, spec.re, spec.im_range, spec.count) == ("line", 0.1, (0.0, 20.0), 200)
        pts = spec.points()
        assert pts.size == 200 and np.all(pts.real == 0.1)
        assert pts[0].imag == 0.0 and pts[-1].imag == 20.0

    def test_annulus(self):
        spec = ZGridSpec.parse("r=0.5..3, re_min=0.5, count=400")
        assert spec.kind == "annulus" and spec.r_range == (0.5, 3.0) and spec.re_min == 0.5
        pts = spec.points(np.random.default_rng(1))
        assert pts.size == 400 and np.all(pts.real >= 0.5)

    def test_rect(self):
        spec = ZGridSpec.parse("re=0.5..3,im=-3..3,count=50")
        pts = spec.points(np.random.default_rng(2))
        assert spec.kind == "rect"
        assert np.all((pts.real >= 0.5) & (pts.real <= 3.0) & (np.abs(pts.imag) <= 3.0))

    @pytest.mark.parametrize("text", ["re=0.1,im=0..20", "count=10", "r=3..1,count=5", "re=0.1,im=0-20,count=4"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            ZGridSpec.parse(text)

    @pytest.mark.parametrize("text", ["r=0.5..3,re_min=4,count=5", "r=0.5..3,re_min=3,count=5", "r=0..0,count=5"])
    def test_rejects_empty_annulus(self, text):
        with pytest.raises(ValueError):
            ZGridSpec.parse(text)

    def test_rejects_inverted_ranges(self):
        with pytest.raises(ValueError):
            ZGridSpec(kind="rect", count=3, re_range=(1.0, 0.5), im_range=(-1.0, 1.0))
        with pytest.raises(ValueError):
            ZGridSpec(kind="line", count=3, re=0.1, im_range=(2.0, -2.0))
        with pytest.raises(ValueError):
            ZGridSpec(kind="annulus", count=3, r_range=(-1.0, 2.0))

    def test_thin_annulus_still_fills(self):
        spec = ZGridSpec.parse("r=0.5..3,re_min=2.9,count=20")
        pts = spec.points(np.random.default_rng(4))
        assert pts.size == 20 and np.all(pts.real >= 2.9)


class TestFunctionSpecParsing:
    def test_sin_default_frequency(self):
        assert TestFunctionSpec.parse("sin").w == 1.0

    def test_sin_frequency(self):
        spec = TestFunctionSpec.parse("sin(3)", noise_sigma=0.2, seed=7)
        assert (spec.kind, spec.w, spec.noise_sigma, spec.seed) == ("sin", 3.0, 0.2, 7)

    def test_composite(self):
        assert TestFunctionSpec.parse("composite").kind == "composite"

    def test_csv(self):
        spec = TestFunctionSpec.parse("data/signal.csv")
        assert spec.kind == "custom-csv" and spec.csv_path == Path("data/signal.csv")

    def test_unknown(self):
        with pytest.raises(ValueError):
            TestFunctionSpec.parse("gaussian")

    def test_csv_needs_path(self):
        with pytest.raises(ValidationError):
            TestFunctionSpec(kind="custom-csv")


class TestIltModels:
    def test_n2_below_n1(self):
        with pytest.raises(ValidationError):
            IltConfig(n1=10, n2=5, itn=3)

    def test_seed_range(self):
        with pytest.raises(ValidationError):
            IltConfig(n1=2, n2=2, itn=1, seed=2**64)

    def test_default_scheme_and_truncation(self):
        cfg = IltConfig.for_samples(400)
        assert cfg.partition_scheme is PartitionScheme.segments_centered
        assert cfg.truncation is Truncation.gcv

    def test_params_positive(self):
        with pytest.raises(ValidationError):
            IltParams(a_param=0.0)

    def test_phase_dist_resolution(self):
        assert PhaseDist.von_mises().resolve(2.5) == 2.5
        assert PhaseDist.von_mises(0.3).resolve(2.5) == 0.3


class TestSignalModels:
    def test_kime_samples_need_two_points(self):
        with pytest.raises(ValidationError):
            KimeSampleSet(z=[1.0], values=[1.0])

    def test_arrays_are_read_only(self):
        poly = PiecewisePoly.constant(2.0)
        with pytest.raises(ValueError):
            poly.coeffs[0, 0] = 1.0

    def test_local_coefficients_round_trip(self, rng):
        knots = np.array([0.0, 1.0, 2.5, TWO_PI])
        local = rng.uniform(-1, 1, size=(3, 5))
        poly = PiecewisePoly.from_local(knots, local)
        np.testing.assert_allclose(poly.local_coeffs(), local, atol=1e-12)

    def test_local_coefficients_are_stored_exactly(self, rng):
        knots = np.linspace(0.0, TWO_PI, 80)
        local = rng.normal(size=(79, 5)) / (knots[1] ** np.arange(5))
        poly = PiecewisePoly.from_local(knots, local, fit_residual=0.5)
        assert np.array_equal(poly.local_coeffs(), local)
        assert poly.fit_residual == 0.5

    def test_global_coefficients_give_local_ones(self):
        poly = PiecewisePoly(knots=[0.0, 1.0, 3.0], coeffs=[[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
        # t^2 about t = 1 is 1 + 2s + s^2
        np.testing.assert_allclose(poly.local[1], [1.0, 2.0, 1.0])
        np.testing.assert_allclose(poly.evaluate([0.5, 2.0]), [0.25, 4.0])

    def test_one_representation_only(self):
        with pytest.raises(ValidationError):
            PiecewisePoly(knots=[0.0, 1.0], coeffs=[[1.0]], local=[[1.0]])
        with pytest.raises(ValidationError):
            PiecewisePoly(knots=[0.0, 1.0])

    def test_evaluate_and_derivative(self):
        poly = PiecewisePoly(knots=[0.0, 1.0, 2.0], coeffs=[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        np.testing.assert_allclose(poly.evaluate([0.5, 1.5, 2.0, 3.0]), [0.25, 1.0, 1.0, 0.0])
        np.testing.assert_allclose(poly.derivative().evaluate([0.5, 1.5]), [1.0, 0.0])

    def test_degree_cap(self):
        with pytest.raises(ValidationError):
            PiecewisePoly(knots=[0.0, 1.0], coeffs=[[1.0] * 6])

    def test_addition_needs_shared_knots(self):
        with pytest.raises(ValueError):
            PiecewisePoly.constant(1.0) + PiecewisePoly.constant(1.0, end=3.0)

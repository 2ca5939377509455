"""End-to-end runs of the command-line entry point."""

import json

import numpy as np
import pandas as pd
import pytest

from laplaceforge.cli import main
from laplaceforge.models.signals import TimeSignal
from laplaceforge.storage.local import write_signal


@pytest.fixture
def sin_csv(tmp_path):
    path = tmp_path / "sin.csv"
    write_signal(TimeSignal.from_function(np.sin, 200), path)
    return path


def _error_record(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestForwardCommand:
    def test_lt_writes_one_row_per_point(self, tmp_path, sin_csv):
        out = tmp_path / "lt.csv"
        code = main(["lt", "--input", str(sin_csv), "--z-line", "re=0.1,im=0..20,count=200", "--out", str(out)])
        assert code == 0
        df = pd.read_csv(out)
        assert list(df.columns) == ["re_z", "im_z", "re_F", "im_F"]
        assert len(df) == 200

    def test_missing_input_is_io_error(self, tmp_path, capsys):
        code = main(["lt", "--input", str(tmp_path / "absent.csv"), "--z-line", "re=0.1,im=0..1,count=3"])
        assert code == 2
        record = _error_record(capsys)
        assert record["error"] == "io" and record["exit_code"] == 2

    def test_bad_z_spec_is_usage_error(self, sin_csv, capsys):
        assert main(["lt", "--input", str(sin_csv), "--z-line", "re=0.1"]) == 1
        assert _error_record(capsys)["error"] == "usage"

    def test_annulus_outside_re_min_is_usage_error(self, tmp_path, capsys):
        args = ["sample-surface", "--function", "sin", "--z-grid", "r=0.5..3,re_min=4,count=10"]
        assert main([*args, "--out", str(tmp_path / "s.csv")]) == 1
        record = _error_record(capsys)
        assert record["error"] == "usage" and record["exit_code"] == 1


class TestUsage:
    def test_unknown_flag(self, capsys):
        assert main(["lt", "--bogus"]) == 1
        assert _error_record(capsys)["exit_code"] == 1

    def test_missing_command(self):
        assert main([]) == 1

    def test_bad_seed(self):
        assert main(["validate", "--case", "cosh", "--seed", "-1"]) == 1

    def test_unknown_function(self, tmp_path, capsys):
        code = main(["ilt-analytic", "--function", "gaussian", "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "--function" in _error_record(capsys)["message"]


class TestInversionCommands:
    def test_analytic_sin(self, tmp_path):
        out = tmp_path / "ilt.csv"
        plot = tmp_path / "ilt.svg"
        code = main(
            ["ilt-analytic", "--function", "sin", "--t-range", "0.5..5", "--points", "30", "--out", str(out), "--plot", str(plot)]
        )
        assert code == 0
        df = pd.read_csv(out)
        np.testing.assert_allclose(df["y"], np.sin(df["t"]), atol=1e-3)
        assert plot.read_text(encoding="utf-8").lstrip().startswith("<?xml")

    def test_analytic_rejects_zero_time(self, tmp_path, capsys):
        code = main(["ilt-analytic", "--function", "sin", "--t-range", "0..1", "--out", str(tmp_path / "x.csv")])
        assert code == 3
        assert _error_record(capsys)["error"] == "invalid-input"

    def test_surface_then_discrete_is_deterministic(self, tmp_path):
        surface = tmp_path / "surface.csv"
        args = ["sample-surface", "--function", "sin(2)", "--z-grid", "r=0.5..3,re_min=0.5,count=80", "--seed", "3"]
        assert main([*args, "--out", str(surface)]) == 0

        outputs = []
        for run in ("a", "b"):
            out = tmp_path / f"est_{run}.csv"
            code = main(["ilt-discrete", "--input", str(surface), "--itn", "6", "--seed", "5", "--out", str(out)])
            assert code == 0
            outputs.append(out.read_bytes())
            diagnostics = json.loads(out.with_suffix(".json").read_text(encoding="utf-8"))
            assert diagnostics["itn"] == 6 and len(diagnostics["sigma_min_list"]) == 6
        assert outputs[0] == outputs[1]

    def test_discrete_truncation_modes(self, tmp_path, capsys):
        surface = tmp_path / "surface.csv"
        main(["sample-surface", "--function", "sin(3)", "--z-grid", "r=0.5..3,re_min=0.5,count=60", "--out", str(surface)])
        base = ["ilt-discrete", "--input", str(surface), "--itn", "3", "--seed", "1"]
        assert main([*base, "--truncation", "rcond", "--out", str(tmp_path / "rcond.csv")]) == 0
        assert main([*base, "--out", str(tmp_path / "gcv.csv")]) == 0
        assert main([*base, "--truncation", "tikhonov", "--out", str(tmp_path / "x.csv")]) == 1
        assert _error_record(capsys)["exit_code"] == 1

    def test_discrete_n2_too_large(self, tmp_path, capsys):
        surface = tmp_path / "surface.csv"
        main(["sample-surface", "--function", "sin", "--z-grid", "r=0.5..3,count=10", "--out", str(surface)])
        code = main(["ilt-discrete", "--input", str(surface), "--n1", "4", "--n2", "50", "--out", str(tmp_path / "e.csv")])
        assert code == 3
        assert _error_record(capsys)["exit_code"] == 3


class TestExperimentCommands:
    def test_singvals(self, tmp_path):
        out = tmp_path / "sv.csv"
        code = main(["exp-singvals", "--n-list", "4,8,12,16", "--trials", "10", "--out", str(out)])
        assert code == 0
        assert len(pd.read_csv(out)) == 4
        fit = json.loads(out.with_suffix(".fit.json").read_text(encoding="utf-8"))
        assert fit["points"] == 4

    def test_singvals_band_sampler(self, tmp_path):
        out = tmp_path / "band.csv"
        args = ["exp-singvals", "--n-list", "4,8,12,16", "--trials", "10", "--z-grid", "re=0..0.5,im=-0.5..0.5,count=1"]
        assert main([*args, "--scale-with-n", "--out", str(out)]) == 0
        assert (pd.read_csv(out)["mean_sigma_min"] > 0).all()

    def test_singvals_fit_needs_rows(self, tmp_path):
        code = main(
            ["exp-singvals", "--n-list", "4,8", "--trials", "10", "--out", str(tmp_path / "sv.csv"), "--fit-out", str(tmp_path / "f.json")]
        )
        assert code == 3

    def test_partition_report(self, tmp_path):
        out = tmp_path / "schemes.csv"
        part = tmp_path / "p.json"
        code = main(["exp-partition", "--n", "3", "--trials", "1000", "--out", str(out), "--partition-out", str(part)])
        assert code == 0
        report = json.loads(out.with_suffix(".json").read_text(encoding="utf-8"))
        assert report["exp_order_stats"]["n"] == 3
        assert [d["scheme"] for d in report["dependence"]] == ["normalized_uniform", "normalized_exponential", "independent"]
        assert set(report["irwin_hall_ratio_cdf"]["cdf"]) == {"1", "2", "3"}
        assert len(json.loads(part.read_text(encoding="utf-8"))["breakpoints"]) == 5

    def test_isotropy_report(self, tmp_path):
        out = tmp_path / "iso.json"
        code = main(["exp-isotropy", "--a-list", "1.0", "--trials", "10000", "--bessel-r", "10", "--bessel-n", "2", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert len(report["phase_moments"]) == 2
        assert len(report["bessel_zeros"]["breakpoints"]) == 4

    def test_isotropy_insufficient_zeros(self, tmp_path, capsys):
        code = main(["exp-isotropy", "--trials", "10000", "--bessel-r", "1", "--out", str(tmp_path / "iso.json")])
        assert code == 3
        record = _error_record(capsys)
        assert record["min_r"] > 1.0


class TestValidateCommand:
    def test_cosh_case_passes(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["validate", "--case", "cosh", "--out", str(out)]) == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["passed"] is True
        assert [c["name"] for c in report["checks"]] == ["cosh_truncation"]
        assert "PASS" in capsys.readouterr().out

    def test_unknown_case(self):
        assert main(["validate", "--case", "nonsense"]) == 1

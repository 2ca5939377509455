"""CSV/JSON persistence: exact round trips, header checks and atomic writes."""

import numpy as np
import pytest

from conftest import TWO_PI
from laplaceforge.errors import InvalidSignalError, StorageError
from laplaceforge.models.params import PartitionScheme
from laplaceforge.models.results import EnsembleResult, SingvalSweep, SweepRow
from laplaceforge.models.signals import KimeSampleSet, Partition, TimeSignal
from laplaceforge.storage.local import (
    atomic_path,
    read_ensemble_curves,
    read_json,
    read_partition,
    read_samples,
    read_signal,
    read_sweep_rows,
    write_ensemble,
    write_json,
    write_partition,
    write_samples,
    write_signal,
    write_sweep,
)


class TestSignals:
    def test_bit_exact(self, tmp_path, rng):
        t = np.sort(rng.uniform(0, TWO_PI, size=50))
        sig = TimeSignal(t=t, y=rng.normal(size=50) / 3.0)
        path = tmp_path / "sig.csv"
        write_signal(sig, path)
        back = read_signal(path)
        np.testing.assert_array_equal(back.t, sig.t)
        np.testing.assert_array_equal(back.y, sig.y)

    def test_header(self, tmp_path):
        path = tmp_path / "sig.csv"
        write_signal(TimeSignal(t=[0.0, 1.0], y=[2.0, 3.0]), path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "t,y"

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,value\n0,1\n1,2\n", encoding="utf-8")
        with pytest.raises(StorageError) as info:
            read_signal(path)
        assert info.value.exit_code == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError):
            read_signal(tmp_path / "nope.csv")

    def test_duplicate_times(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("t,y\n0,1\n1,2\n1,3\n", encoding="utf-8")
        with pytest.raises(InvalidSignalError) as info:
            read_signal(path)
        assert info.value.exit_code == 3


class TestSamples:
    def test_bit_exact(self, tmp_path, rng):
        z = rng.uniform(0.0, 3.0, size=40) + 1j * rng.uniform(-3.0, 3.0, size=40)
        samples = KimeSampleSet(z=z, values=np.exp(-z) / 7.0)
        path = tmp_path / "surface.csv"
        write_samples(samples, path)
        back = read_samples(path)
        np.testing.assert_array_equal(back.z, samples.z)
        np.testing.assert_array_equal(back.values, samples.values)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "re_z,im_z,re_F,im_F"

    def test_negative_real_part_rejected(self, tmp_path):
        path = tmp_path / "surface.csv"
        path.write_text("re_z,im_z,re_F,im_F\n-1,0,1,0\n1,0,1,0\n", encoding="utf-8")
        with pytest.raises(InvalidSignalError):
            read_samples(path)


class TestOtherFormats:
    def test_ensemble(self, tmp_path):
        grid = np.linspace(0.0, TWO_PI, 9)
        est = EnsembleResult(
            grid=grid,
            mean=np.sin(grid),
            median=np.cos(grid),
            q25=np.cos(grid) - 0.1,
            q75=np.cos(grid) + 0.1,
            weighted_mean=np.sin(grid),
            itn=3,
            n1=4,
            n2=8,
            seed=5,
            sigma_min_list=[0.1, 0.2, 0.3],
            residual_list=[1e-3, 2e-3, 3e-3],
            rank_deficient_list=[False, False, True],
        )
        write_ensemble(est, tmp_path / "est.csv", tmp_path / "est.json")
        curves = read_ensemble_curves(tmp_path / "est.csv")
        np.testing.assert_array_equal(curves["t"], grid)
        np.testing.assert_array_equal(curves["median"], est.median)
        diagnostics = read_json(tmp_path / "est.json")
        assert diagnostics["itn"] == 3 and diagnostics["rank_deficient_list"] == [False, False, True]

    def test_partition(self, tmp_path):
        p = Partition(breakpoints=[0.0, 0.123456789, 3.3, TWO_PI])
        write_partition(p, tmp_path / "p.json")
        np.testing.assert_array_equal(read_partition(tmp_path / "p.json").breakpoints, p.breakpoints)

    def test_invalid_partition(self, tmp_path):
        write_json({"breakpoints": [0.0, 2.0, 1.0, TWO_PI]}, tmp_path / "p.json")
        with pytest.raises(StorageError):
            read_partition(tmp_path / "p.json")

    def test_sweep(self, tmp_path):
        rows = [SweepRow(n=n, n_prime=n + 2, mean_sigma_min=1.0 / n, std=0.01, trials=10) for n in (8, 16)]
        write_sweep(SingvalSweep(rows=rows, aspect=1.2, scheme=PartitionScheme.equidistant), tmp_path / "s.csv")
        assert read_sweep_rows(tmp_path / "s.csv") == rows

    def test_malformed_json(self, tmp_path):
        (tmp_path / "bad.json").write_text("{not json", encoding="utf-8")
        with pytest.raises(StorageError):
            read_json(tmp_path / "bad.json")


class TestAtomicWrite:
    def test_no_temporary_left_behind(self, tmp_path):
        write_json({"a": 1}, tmp_path / "out" / "report.json")
        assert [p.name for p in (tmp_path / "out").iterdir()] == ["report.json"]

    def test_failure_keeps_previous_file(self, tmp_path):
        target = tmp_path / "keep.json"
        write_json({"version": 1}, target)
        with pytest.raises(RuntimeError):
            with atomic_path(target) as tmp:
                tmp.write_text("partial", encoding="utf-8")
                raise RuntimeError("interrupted")
        assert read_json(target) == {"version": 1}
        assert [p.name for p in tmp_path.iterdir()] == ["keep.json"]

from pathlib import Path
from contextlib import contextmanager
import json
import os
import tempfile

import numpy as np
import pandas as pd
from pydantic import ValidationError

from laplaceforge.errors import InvalidSignalError, StorageError
from laplaceforge.models.results import EnsembleResult, SingvalSweep, SweepRow
from laplaceforge.models.signals import KimeSampleSet, LtSample, Partition, SurfaceSamples, TimeSignal

#
# File formats
#
#   TimeSignal      t,y
#   Surface samples re_z,im_z,re_F,im_F
#   EnsembleResult  t,mean,median,q25,q75 (+ JSON diagnostics)
#   Singval sweep   n,n_prime,mean_sigma_min,std,trials
#   Partition       {"breakpoints": [...]}
#
# Floats are written in shortest round-trip form and read back with
# float_precision="round_trip", so a write/read cycle is bit-exact.
#

SIGNAL_COLUMNS = ["t", "y"]
SAMPLE_COLUMNS = ["re_z", "im_z", "re_F", "im_F"]
ENSEMBLE_COLUMNS = ["t", "mean", "median", "q25", "q75"]
SWEEP_COLUMNS = ["n", "n_prime", "mean_sigma_min", "std", "trials"]


@contextmanager
def atomic_path(target_path: Path):
    """
    Yields a temporary path next to target_path; on success it replaces
    target_path in one rename, on failure it is removed.
    """
    target_path = Path(target_path)
    try:
        target_path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target_path.parent, prefix=f".{target_path.name}.", suffix=".tmp")
        os.close(fd)
    except OSError as ex:
        raise StorageError(f"cannot write {target_path}: {ex}", path=str(target_path)) from ex

    try:
        yield Path(tmp)
        os.replace(tmp, target_path)
    except OSError as ex:
        raise StorageError(f"cannot write {target_path}: {ex}", path=str(target_path)) from ex
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def write_csv(df: pd.DataFrame, target_path: Path) -> str:
    with atomic_path(target_path) as tmp:
        df.to_csv(tmp, index=False, encoding="utf-8")
    return str(target_path)


def read_csv(source_path: Path, columns: list[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(source_path, float_precision="round_trip", encoding="utf-8")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as ex:
        raise StorageError(f"cannot read {source_path}: {ex}", path=str(source_path)) from ex
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise StorageError(
            f"{source_path} is missing columns {missing}; expected header {','.join(columns)}",
            path=str(source_path),
        )
    return df[columns]


def write_json(payload: dict, target_path: Path) -> str:
    with atomic_path(target_path) as tmp:
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
    return str(target_path)


def read_json(source_path: Path) -> dict:
    try:
        with open(source_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as ex:
        raise StorageError(f"cannot read {source_path}: {ex}", path=str(source_path)) from ex


# ------------------------------
# Typed readers / writers
# ------------------------------


def write_signal(sig: TimeSignal, target_path: Path) -> str:
    return write_csv(pd.DataFrame({"t": sig.t, "y": sig.y}), target_path)


def read_signal(source_path: Path) -> TimeSignal:
    df = read_csv(source_path, SIGNAL_COLUMNS)
    try:
        return TimeSignal(t=df["t"].to_numpy(float), y=df["y"].to_numpy(float))
    except (ValidationError, ValueError) as ex:
        raise InvalidSignalError(f"invalid signal in {source_path}: {ex}", path=str(source_path)) from ex


def write_samples(samples: SurfaceSamples | list[LtSample], target_path: Path) -> str:
    if not isinstance(samples, SurfaceSamples):
        samples = SurfaceSamples(z=[s.z for s in samples], values=[s.value for s in samples])
    df = pd.DataFrame(
        {
            "re_z": samples.z.real,
            "im_z": samples.z.imag,
            "re_F": samples.values.real,
            "im_F": samples.values.imag,
        }
    )
    return write_csv(df, target_path)


def read_samples(source_path: Path) -> KimeSampleSet:
    df = read_csv(source_path, SAMPLE_COLUMNS)
    z = df["re_z"].to_numpy(float) + 1j * df["im_z"].to_numpy(float)
    values = df["re_F"].to_numpy(float) + 1j * df["im_F"].to_numpy(float)
    try:
        return KimeSampleSet(z=z, values=values)
    except (ValidationError, ValueError) as ex:
        raise InvalidSignalError(f"invalid surface samples in {source_path}: {ex}", path=str(source_path)) from ex


def write_ensemble(est: EnsembleResult, target_path: Path, diagnostics_path: Path | None = None) -> str:
    df = pd.DataFrame({c: est.grid if c == "t" else getattr(est, c) for c in ENSEMBLE_COLUMNS})
    write_csv(df, target_path)
    if diagnostics_path is not None:
        write_json(est.diagnostics(), diagnostics_path)
    return str(target_path)


def read_ensemble_curves(source_path: Path) -> dict[str, np.ndarray]:
    df = read_csv(source_path, ENSEMBLE_COLUMNS)
    return {c: df[c].to_numpy(float) for c in ENSEMBLE_COLUMNS}


def write_partition(p: Partition, target_path: Path) -> str:
    return write_json(p.to_json(), target_path)


def read_partition(source_path: Path) -> Partition:
    payload = read_json(source_path)
    try:
        return Partition(breakpoints=payload["breakpoints"])
    except (KeyError, ValidationError, ValueError) as ex:
        raise StorageError(f"invalid partition in {source_path}: {ex}", path=str(source_path)) from ex


def write_sweep(sweep: SingvalSweep, target_path: Path) -> str:
    df = pd.DataFrame([r.model_dump() for r in sweep.rows], columns=SWEEP_COLUMNS)
    return write_csv(df, target_path)


def read_sweep_rows(source_path: Path) -> list[SweepRow]:
    df = read_csv(source_path, SWEEP_COLUMNS)
    return [SweepRow(**row) for row in df.to_dict(orient="records")]

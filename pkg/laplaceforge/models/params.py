from __future__ import annotations

import math
import re
from enum import Enum
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from laplaceforge.config import DEFAULT_GRID_POINTS


class PartitionScheme(str, Enum):
    normalized_uniform = "normalized_uniform"
    normalized_exponential = "normalized_exponential"
    segments_centered = "segments_centered"  # E1
    segments_left = "segments_left"  # E2
    equidistant = "equidistant"


class Aggregation(str, Enum):
    mean = "mean"
    median = "median"
    weighted_mean = "weighted_mean"


class Truncation(str, Enum):
    """How many SVD directions an attempt keeps."""

    rcond = "rcond"  # every sigma_k > rcond * sigma_1
    gcv = "gcv"  # generalized cross-validation rank, within the rcond cut


class IltParams(BaseModel):
    """Cosh-kernel inversion settings: a > gamma*t, base terms, Euler tail terms."""

    model_config = ConfigDict(frozen=True)

    a_param: float = Field(6.0, gt=0)
    n_sum: int = Field(50, ge=1)
    n_euler: int = Field(12, ge=1)


class IltConfig(BaseModel):
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    n1: int = Field(..., ge=2, description="partition size (intervals)")
    n2: int = Field(..., ge=2, description="points sampled per attempt")
    itn: int = Field(..., ge=1, description="number of attempts")
    rcond: Optional[float] = Field(None, ge=0, lt=1)
    seed: int = Field(0, ge=0, lt=2**64)
    partition_scheme: PartitionScheme = PartitionScheme.segments_centered
    aggregation: Aggregation = Aggregation.median
    truncation: Truncation = Truncation.gcv
    grid_points: int = Field(DEFAULT_GRID_POINTS, ge=2)
    threads: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.n2 < self.n1:
            raise ValueError(f"n2 ({self.n2}) must be >= n1 ({self.n1})")
        return self

    @classmethod
    def for_samples(cls, n_samples: int, **overrides) -> "IltConfig":
        """n1 = ceil(sqrt(N)), n2 = min(2*n1, N), itn = ceil(sqrt(N)) unless overridden."""
        root = max(2, math.ceil(math.sqrt(n_samples)))
        values = {"n1": root, "itn": root}
        values.update({k: v for k, v in overrides.items() if v is not None})
        values.setdefault("n2", min(2 * values["n1"], max(n_samples, values["n1"])))
        return cls(**values)


class PhaseDist(BaseModel):
    """
    Phase law on [0, 2pi): uniform, or von Mises with density
    exp(-a cos phi) / (2 pi I0(a)). A von Mises law without a fixed
    concentration takes it from the caller (coupled strategy).
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform", "von_mises"] = "uniform"
    concentration: Optional[float] = None

    @classmethod
    def uniform(cls) -> "PhaseDist":
        return cls(kind="uniform")

    @classmethod
    def von_mises(cls, concentration: float | None = None) -> "PhaseDist":
        return cls(kind="von_mises", concentration=concentration)

    def resolve(self, a: float) -> float:
        return a if self.concentration is None else self.concentration


_RANGE = r"(-?[\d.eE+-]+)\.\.(-?[\d.eE+-]+)"


class ZGridSpec(BaseModel):
    """
    Evaluation points in the complex plane.

      line:    re=0.1,im=0..20,count=200       (vertical line, evenly spaced)
      annulus: r=0.5..3,re_min=0.5,count=400   (random |z|, phase with Re z >= re_min)
      rect:    re=0.5..3,im=-3..3,count=400    (random uniform in a rectangle)
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["line", "annulus", "rect"]
    count: int = Field(..., ge=1)
    re: float = 0.0
    re_range: tuple[float, float] = (0.0, 0.0)
    im_range: tuple[float, float] = (0.0, 0.0)
    r_range: tuple[float, float] = (0.0, 0.0)
    re_min: float = 0.0

    @model_validator(mode="after")
    def _check(self):
        for name in ("re_range", "im_range", "r_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise ValueError(f"{name} must be a finite lo..hi with lo <= hi, got {lo}..{hi}")
        if self.kind == "annulus":
            lo, hi = self.r_range
            if lo < 0 or hi <= 0:
                raise ValueError(f"annulus radii must satisfy 0 <= lo <= hi, hi > 0, got {lo}..{hi}")
            # points have Re z <= |z| <= hi
            if self.re_min >= hi:
                raise ValueError(f"re_min={self.re_min} leaves no point of the annulus r={lo}..{hi}")
        return self

    @classmethod
    def parse(cls, text: str) -> "ZGridSpec":
        fields = dict(part.split("=", 1) for part in text.replace(" ", "").split(",") if part)
        if "count" not in fields:
            raise ValueError(f"z grid spec needs count=: {text!r}")
        count = int(fields["count"])
        if "r" in fields:
            lo, hi = _parse_range(fields["r"])
            return cls(kind="annulus", count=count, r_range=(lo, hi), re_min=float(fields.get("re_min", 0.0)))
        if ".." in fields.get("re", ""):
            return cls(
                kind="rect",
                count=count,
                re_range=_parse_range(fields["re"]),
                im_range=_parse_range(fields.get("im", "0..0")),
            )
        if "re" in fields and "im" in fields:
            return cls(kind="line", count=count, re=float(fields["re"]), im_range=_parse_range(fields["im"]))
        raise ValueError(f"unrecognized z grid spec: {text!r}")

    def points(self, rng: np.random.Generator | None = None) -> np.ndarray:
        if self.kind == "line":
            return self.re + 1j * np.linspace(self.im_range[0], self.im_range[1], self.count)
        rng = rng if rng is not None else np.random.default_rng(0)
        if self.kind == "rect":
            re = rng.uniform(*self.re_range, size=self.count)
            im = rng.uniform(*self.im_range, size=self.count)
            return re + 1j * im
        out = np.empty(0, dtype=complex)
        while out.size < self.count:
            r = rng.uniform(*self.r_range, size=2 * self.count)
            phi = rng.uniform(-np.pi / 2, np.pi / 2, size=2 * self.count)
            z = r * np.exp(1j * phi)
            out = np.concatenate([out, z[z.real >= self.re_min]])
        return out[: self.count]


def _parse_range(text: str) -> tuple[float, float]:
    m = re.fullmatch(_RANGE, text)
    if not m:
        raise ValueError(f"expected lo..hi, got {text!r}")
    lo, hi = float(m.group(1)), float(m.group(2))
    if hi < lo:
        raise ValueError(f"empty range {text!r}")
    return lo, hi


class TestFunctionSpec(BaseModel):
    """sin(w), the composite test signal, or samples read from a CSV file."""

    __test__ = False  # not a pytest class

    model_config = ConfigDict(frozen=True)

    kind: Literal["sin", "composite", "custom-csv"]
    w: float = 1.0
    noise_sigma: float = Field(0.0, ge=0)
    csv_path: Optional[Path] = None
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "custom-csv" and self.csv_path is None:
            raise ValueError("custom-csv needs csv_path")
        return self

    @classmethod
    def parse(cls, text: str, noise_sigma: float = 0.0, seed: int = 0) -> "TestFunctionSpec":
        text = text.strip()
        m = re.fullmatch(r"sin(?:\(([-\d.eE+]+)\))?", text)
        if m:
            return cls(kind="sin", w=float(m.group(1) or 1.0), noise_sigma=noise_sigma, seed=seed)
        if text == "composite":
            return cls(kind="composite", noise_sigma=noise_sigma, seed=seed)
        if text.endswith(".csv"):
            return cls(kind="custom-csv", csv_path=Path(text), noise_sigma=noise_sigma, seed=seed)
        raise ValueError(f"unknown test function {text!r}")


class ValidationSettings(BaseModel):
    """Knobs shared by the acceptance checks: sample count, master seed, workers (0 = auto)."""

    model_config = ConfigDict(frozen=True)

    points: int = Field(200, ge=8)
    seed: int = Field(0, ge=0, lt=2**64)
    threads: int = Field(1, ge=0)

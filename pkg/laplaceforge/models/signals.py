from __future__ import annotations

from typing import Callable, Iterator

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from laplaceforge.config import DOMAIN_END, MAX_POLY_DEGREE


def _frozen_array(value, dtype) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class TimeSignal(ArrayModel):
    """Ordered real samples (t_i, y_i)."""

    t: np.ndarray
    y: np.ndarray

    @field_validator("t", "y", mode="before")
    @classmethod
    def _as_real(cls, v):
        return _frozen_array(v, float)

    @model_validator(mode="after")
    def _check(self):
        if self.t.ndim != 1 or self.y.ndim != 1:
            raise ValueError("t and y must be one-dimensional")
        if self.t.size != self.y.size:
            raise ValueError(f"t and y lengths differ: {self.t.size} != {self.y.size}")
        if self.t.size < 2:
            raise ValueError("a signal needs at least 2 samples")
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.y))):
            raise ValueError("signal samples must be finite")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be strictly increasing (duplicate t values?)")
        return self

    @classmethod
    def from_function(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        count: int,
        start: float = 0.0,
        end: float = DOMAIN_END,
    ) -> "TimeSignal":
        t = np.linspace(start, end, count)
        return cls(t=t, y=f(t))

    def __len__(self) -> int:
        return int(self.t.size)


class PiecewisePoly(ArrayModel):
    """
    Spline model: on [knots[k], knots[k+1]) the value is
    sum_m local[k, m] * (t - knots[k])**m.

    Either representation may be passed; coeffs holds the same pieces in
    global powers of t (ascending) and is derived from local when only
    local is given. Evaluation and transforms read local.
    """

    knots: np.ndarray
    coeffs: np.ndarray | None = None
    local: np.ndarray | None = None
    fit_residual: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def _fill_representations(cls, data):
        if not isinstance(data, dict):
            return data
        has_global = data.get("coeffs") is not None
        has_local = data.get("local") is not None
        if has_global == has_local:
            raise ValueError("give exactly one of coeffs and local")
        knots = np.asarray(data.get("knots"), dtype=float)
        if knots.ndim != 1:
            return data
        if has_local:
            return {**data, "coeffs": _shift_rows(data["local"], knots[:-1])}
        return {**data, "local": _shift_rows(data["coeffs"], -knots[:-1])}

    @field_validator("knots", mode="before")
    @classmethod
    def _as_knots(cls, v):
        return _frozen_array(v, float)

    @field_validator("coeffs", "local", mode="before")
    @classmethod
    def _as_coeffs(cls, v):
        if v is None:
            return None
        return _frozen_array(_as_rows(v), float)

    @model_validator(mode="after")
    def _check(self):
        if self.knots.ndim != 1 or self.knots.size < 2:
            raise ValueError("need at least two knots")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if self.coeffs is None or self.local is None:
            raise ValueError("coefficients are missing")
        if self.local.ndim != 2 or self.local.shape[0] != self.knots.size - 1:
            raise ValueError(
                f"coeffs must have one row per piece: expected {self.knots.size - 1}, "
                f"got shape {self.local.shape}"
            )
        if self.local.shape[1] - 1 > MAX_POLY_DEGREE:
            raise ValueError(f"degree must be <= {MAX_POLY_DEGREE}")
        if not all(np.all(np.isfinite(a)) for a in (self.knots, self.local, self.coeffs)):
            raise ValueError("knots and coefficients must be finite")
        return self

    @property
    def degree(self) -> int:
        return self.local.shape[1] - 1

    @property
    def pieces(self) -> int:
        return self.local.shape[0]

    @property
    def start(self) -> float:
        return float(self.knots[0])

    @property
    def end(self) -> float:
        return float(self.knots[-1])

    @classmethod
    def constant(cls, value: float, start: float = 0.0, end: float = DOMAIN_END) -> "PiecewisePoly":
        return cls(knots=[start, end], local=[[value]])

    @classmethod
    def from_local(cls, knots, local_coeffs, fit_residual: float = 0.0) -> "PiecewisePoly":
        """Build from per-piece coefficients in powers of (t - knots[k]); they are stored as given."""
        return cls(knots=knots, local=local_coeffs, fit_residual=fit_residual)

    def piece_index(self, t) -> np.ndarray:
        idx = np.searchsorted(self.knots, np.asarray(t, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.pieces - 1)

    def evaluate(self, t) -> np.ndarray:
        """Value at t; outside [start, end] the signal is 0, the right end uses the last piece."""
        t = np.asarray(t, dtype=float)
        idx = self.piece_index(t)
        rows = self.local[idx]
        s = t - self.knots[idx]
        out = np.zeros(t.shape)
        for n in range(self.degree, -1, -1):
            out = out * s + rows[..., n]
        inside = (t >= self.start) & (t <= self.end)
        return np.where(inside, out, 0.0)

    def derivative(self) -> "PiecewisePoly":
        if self.degree == 0:
            return PiecewisePoly(knots=self.knots, local=np.zeros((self.pieces, 1)))
        powers = np.arange(1, self.degree + 1)
        return PiecewisePoly(knots=self.knots, local=self.local[:, 1:] * powers)

    def local_coeffs(self) -> np.ndarray:
        """Row k in powers of (t - knots[k])."""
        return self.local

    def scaled(self, factor: float) -> "PiecewisePoly":
        return PiecewisePoly(knots=self.knots, local=self.local * factor, fit_residual=self.fit_residual)

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        if not np.array_equal(self.knots, other.knots):
            raise ValueError("piecewise polynomials must share knots to be added")
        width = max(self.degree, other.degree) + 1
        total = np.zeros((self.pieces, width))
        total[:, : self.degree + 1] += self.local
        total[:, : other.degree + 1] += other.local
        return PiecewisePoly(knots=self.knots, local=total)


def _as_rows(v) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def _shift_rows(rows, origins) -> np.ndarray:
    """Row k re-expanded about origins[k]: sum_m c_m (t - o)**m in powers of t."""
    rows = _as_rows(rows)
    if rows.ndim != 2 or rows.shape[0] != len(origins):
        return rows
    return np.array([_to_global(row, o) for row, o in zip(rows, origins)]).reshape(rows.shape)


def _to_global(local_row, origin: float) -> np.ndarray:
    """Coefficients of sum_m c_m (t - origin)**m in powers of t."""
    result = np.zeros(len(local_row))
    shift = np.array([1.0])
    base = np.array([-origin, 1.0])
    for m, c in enumerate(local_row):
        if m:
            shift = npoly.polymul(shift, base)
        result[: shift.size] += c * shift
    return result


class LtSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    z: complex
    value: complex


class SurfaceSamples(ArrayModel):
    """Complex evaluation points z with values F(z)."""

    z: np.ndarray
    values: np.ndarray

    @field_validator("z", "values", mode="before")
    @classmethod
    def _as_complex(cls, v):
        return _frozen_array(np.atleast_1d(np.asarray(v, dtype=complex)), complex)

    @model_validator(mode="after")
    def _check(self):
        if self.z.ndim != 1 or self.z.shape != self.values.shape:
            raise ValueError("z and values must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(self.z)) and np.all(np.isfinite(self.values))):
            raise ValueError("surface samples must be finite")
        return self

    def __len__(self) -> int:
        return int(self.z.size)

    def records(self) -> Iterator[LtSample]:
        for z, v in zip(self.z, self.values):
            yield LtSample(z=complex(z), value=complex(v))

    def subset(self, index) -> "SurfaceSamples":
        return type(self)(z=self.z[index], values=self.values[index])


class KimeSampleSet(SurfaceSamples):
    """Discrete kime-surface: at least two finite samples with Re z >= 0."""

    @model_validator(mode="after")
    def _check_kime(self):
        if self.z.size < 2:
            raise ValueError("a kime sample set needs at least 2 records")
        if np.any(self.z.real < 0):
            raise ValueError("kime samples require Re z >= 0")
        return self


class Partition(ArrayModel):
    """Breakpoints 0 = p_0 < p_1 < ... < p_n = end."""

    breakpoints: np.ndarray

    @field_validator("breakpoints", mode="before")
    @classmethod
    def _as_real(cls, v):
        return _frozen_array(v, float)

    @model_validator(mode="after")
    def _check(self):
        p = self.breakpoints
        if p.ndim != 1 or p.size < 2:
            raise ValueError("a partition needs at least two breakpoints")
        if not np.all(np.isfinite(p)):
            raise ValueError("breakpoints must be finite")
        if p[0] != 0.0:
            raise ValueError(f"first breakpoint must be 0, got {p[0]!r}")
        if abs(p[-1] - DOMAIN_END) > 1e-12:
            raise ValueError(f"last breakpoint must be 2*pi, got {p[-1]!r}")
        if np.any(np.diff(p) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        return self

    @property
    def intervals(self) -> int:
        return int(self.breakpoints.size - 1)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def interior(self) -> np.ndarray:
        return self.breakpoints[1:-1]

    def cell_index(self, t) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(t, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.intervals - 1)

    def to_json(self) -> dict:
        return {"breakpoints": [float(p) for p in self.breakpoints]}

from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from laplaceforge.models.params import PartitionScheme
from laplaceforge.models.signals import ArrayModel, Partition


class SvdResult(ArrayModel):
    """Thin SVD A = U diag(s) Vh with s nonincreasing."""

    u: np.ndarray
    s: np.ndarray
    vh: np.ndarray

    @model_validator(mode="after")
    def _check(self):
        if np.any(np.diff(self.s) > 0):
            raise ValueError("singular values must be nonincreasing")
        if np.any(self.s < 0):
            raise ValueError("singular values must be nonnegative")
        return self

    @property
    def sigma_max(self) -> float:
        return float(self.s[0]) if self.s.size else 0.0

    @property
    def sigma_min(self) -> float:
        return float(self.s[-1]) if self.s.size else 0.0

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.vh


class LstsqResult(ArrayModel):
    x: np.ndarray
    rank: int
    rank_deficient: bool
    cutoff: float


class StepwiseComparison(BaseModel):
    dirichlet: complex
    stepwise: complex
    discrepancy: float
    terms: int


class EnergyCheck(BaseModel):
    """Laplace-side and time-side energies along Re z = x."""

    x: float
    lt_energy: float
    time_energy: float

    @property
    def ratio(self) -> float:
        return self.lt_energy / self.time_energy if self.time_energy else float("inf")

    def within(self, tol: float = 0.01) -> bool:
        return abs(self.ratio - 1.0) <= tol


class IltDiagnostics(BaseModel):
    value: float
    discarded_imag: float
    terms: int


class QuantizedSolution(ArrayModel):
    partition: Partition
    u: np.ndarray
    residual_norm: float
    sigma_min: float
    sigma_max: float
    rank_deficient: bool = False
    rank: Optional[int] = None

    @model_validator(mode="after")
    def _check(self):
        if self.u.shape != (self.partition.intervals,):
            raise ValueError("u must have one value per partition interval")
        return self

    def evaluate(self, t) -> np.ndarray:
        """Real part of the piecewise-constant recovery at times t."""
        return self.u.real[self.partition.cell_index(t)]


class EnsembleResult(ArrayModel):
    grid: np.ndarray
    mean: np.ndarray
    median: np.ndarray
    q25: np.ndarray
    q75: np.ndarray
    weighted_mean: np.ndarray
    itn: int = Field(..., ge=1)
    n1: int
    n2: int
    seed: int
    aggregation: str = "median"
    sigma_min_list: list[float] = []
    residual_list: list[float] = []
    rank_deficient_list: list[bool] = []

    @model_validator(mode="after")
    def _check(self):
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        for name in ("mean", "median", "q25", "q75", "weighted_mean"):
            if getattr(self, name).shape != self.grid.shape:
                raise ValueError(f"{name} must match the grid")
        return self

    @property
    def estimate(self) -> np.ndarray:
        return getattr(self, self.aggregation)

    def diagnostics(self) -> dict:
        return {
            "itn": self.itn,
            "n1": self.n1,
            "n2": self.n2,
            "seed": self.seed,
            "sigma_min_list": list(self.sigma_min_list),
            "residual_list": list(self.residual_list),
            "rank_deficient_list": list(self.rank_deficient_list),
        }


class ErrorMetrics(BaseModel):
    abs_err: float
    rel_err: float
    points: int


class ConvergenceRow(BaseModel):
    itn: int
    mean_rmse: float
    median_rmse: float


class ErrorStudy(BaseModel):
    """Paired function-space and surface-space errors over independent reruns."""

    function_errors: list[float]
    surface_errors: list[float]
    correlation: float


class SweepRow(BaseModel):
    n: int
    n_prime: int
    mean_sigma_min: float
    std: float
    trials: int = Field(..., ge=1)


class SingvalSweep(BaseModel):
    rows: list[SweepRow]
    aspect: float
    scheme: PartitionScheme

    @model_validator(mode="after")
    def _check(self):
        ns = [r.n for r in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("sweep rows must have increasing n")
        return self

    @property
    def n(self) -> np.ndarray:
        return np.array([r.n for r in self.rows])

    @property
    def mean_sigma_min(self) -> np.ndarray:
        return np.array([r.mean_sigma_min for r in self.rows])


class GammaFit(BaseModel):
    gamma: float
    intercept: float
    r_squared: float
    points: int


class DiffMatrixSvd(ArrayModel):
    matrix: np.ndarray
    closed_form: SvdResult
    numeric: SvdResult

    @property
    def reconstruction_error(self) -> float:
        return float(np.linalg.norm(self.closed_form.reconstruct() - self.matrix))


class BoundCheck(BaseModel):
    sigma_min_product: float
    sigma_min_c: float
    sigma_min_d: float
    bound: float
    holds: bool


class MonteCarloEstimate(BaseModel):
    """Complex and real sample means with standard errors."""

    mean_c: complex
    se_c: float
    mean_cc: float
    se_cc: float
    trials: int

    def within(self, target_c: complex | None = None, target_cc: float | None = None, bands: float = 4.0) -> bool:
        ok = True
        if target_c is not None:
            ok &= abs(self.mean_c - target_c) <= bands * self.se_c
        if target_cc is not None:
            ok &= abs(self.mean_cc - target_cc) <= bands * self.se_cc
        return bool(ok)


class DependenceReport(BaseModel):
    scheme: str
    n: int
    i: int
    k: int
    trials: int
    u_grid: list[float]
    conditional: list[float]
    marginal: list[float]
    gaps: list[float]
    max_gap: float


class KsReport(BaseModel):
    n: int
    trials: int
    statistics: list[float]
    max_statistic: float


class ValidationCheck(BaseModel):
    name: str
    passed: bool
    metric: float
    threshold: float
    detail: dict = {}
    seconds: Optional[float] = None


class ValidationReport(BaseModel):
    checks: list[ValidationCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

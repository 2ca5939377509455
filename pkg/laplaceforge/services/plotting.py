"""SVG figures. Output is deterministic: fixed hash salt, no date metadata."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from laplaceforge.errors import InvalidInputError
from laplaceforge.models.results import EnsembleResult, GammaFit, SingvalSweep
from laplaceforge.storage.local import atomic_path

logger = logging.getLogger("laplaceforge.plotting")

plt.rcParams["svg.hashsalt"] = "laplaceforge"
plt.rcParams["svg.fonttype"] = "none"

Series = Mapping[str, tuple[Sequence[float], Sequence[float]]]


def _save(fig, path: Path) -> str:
    with atomic_path(path) as tmp:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("Wrote plot: %s", path)
    return str(path)


def emit_plot(
    series: Series,
    path: Path,
    title: str | None = None,
    xlabel: str = "t",
    ylabel: str = "",
    log_y: bool = False,
) -> str:
    """One line per named (x, y) series, with a legend."""
    if not series:
        raise InvalidInputError("emit_plot needs at least one series")
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, (x, y) in series.items():
        ax.plot(np.asarray(x, dtype=float), np.asarray(y, dtype=float), label=name, linewidth=1.2)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_ensemble(est: EnsembleResult, path: Path, truth=None, title: str | None = None) -> str:
    """Median with its interquartile band, the mean, and optionally the true curve."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.fill_between(est.grid, est.q25, est.q75, alpha=0.25, label="q25-q75")
    ax.plot(est.grid, est.median, label="median", linewidth=1.4)
    ax.plot(est.grid, est.mean, label="mean", linewidth=0.8, linestyle="--")
    if truth is not None:
        ax.plot(est.grid, truth(est.grid), label="truth", color="black", linewidth=0.8)
    ax.set_xlabel("t")
    ax.set_title(title or f"randomized ILT (itn={est.itn}, n1={est.n1}, n2={est.n2})")
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_sweep(sweep: SingvalSweep, path: Path, fit: GammaFit | None = None) -> str:
    """Mean sigma_min against n on log-log axes, with the fitted power law."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(sweep.n, sweep.mean_sigma_min, yerr=[r.std for r in sweep.rows], marker="o", capsize=3, label="mean")
    if fit is not None:
        n = sweep.n.astype(float)
        ax.plot(n, np.exp(fit.intercept) * n ** (-fit.gamma), linestyle="--", label=f"n^-{fit.gamma:.2f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("sigma_min")
    ax.set_title(f"smallest singular value, n' = {sweep.aspect:g} n")
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)

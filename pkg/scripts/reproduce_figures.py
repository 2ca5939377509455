#!/usr/bin/env python3
"""
reproduce_figures.py

Renders the validation figures as SVG into <out-dir>:
  lt_magnitude.svg       |F(0.1 + iy)| of sin: closed form vs spline transform
  roundtrip.svg          composite signal recovered by the analytic ILT
  ensemble_sin3.svg      randomized ILT median and quartile band for sin(3x)
  singvals.svg           sigma_min decay with the fitted power law
  cosh_truncation.svg    1/cosh series error for 5, 10, 20 terms

Usage:
  python scripts/reproduce_figures.py --out-dir work/plots --seed 0
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from laplaceforge.config import DOMAIN_END, PLOTS_DIR, resolve_threads
from laplaceforge.models.params import IltConfig, TestFunctionSpec
from laplaceforge.models.signals import TimeSignal
from laplaceforge.services.analytic_ilt import cosh_inv_series, ilt_on_grid
from laplaceforge.services.discrete_ilt import randomized_ilt
from laplaceforge.services.forward_lt import fit_piecewise_poly, lt_piecewise_poly, lt_signal, lt_sin_window
from laplaceforge.services.plotting import emit_plot, plot_ensemble, plot_sweep
from laplaceforge.services.rmt_lab import fit_gamma, singval_sweep
from laplaceforge.services.surface import composite, sample_surface
from laplaceforge.services.validation import DISCRETE_SURFACE, ROUNDTRIP_PARAMS, ROUNDTRIP_SAMPLES, SWEEP_SIZES

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s %(levelname)s %(message)s"
)

logger = logging.getLogger("reproduce-figures")

# --------------------------------------------------------------------
# Figures
# --------------------------------------------------------------------

def lt_magnitude(out_dir: Path):
    sig = TimeSignal.from_function(np.sin, 200)
    y = np.linspace(0.0, 20.0, 400)
    zs = 0.1 + 1j * y
    numeric = np.array([s.value for s in lt_signal(sig, zs)])
    series = {
        "closed form": (y, np.abs(lt_sin_window(1.0, zs))),
        "spline transform": (y, np.abs(numeric)),
    }
    emit_plot(series, out_dir / "lt_magnitude.svg", title="|F(0.1 + iy)| for sin on [0, 2pi]", xlabel="y", ylabel="|F|")


def roundtrip(out_dir: Path, threads: int):
    poly = fit_piecewise_poly(TimeSignal.from_function(composite, ROUNDTRIP_SAMPLES), 4)
    ts = np.linspace(0.1, 3.0 * np.pi, 240)
    rec = ilt_on_grid(lambda z: lt_piecewise_poly(poly, z), ts, ROUNDTRIP_PARAMS, threads=threads)
    truth = np.where(ts <= DOMAIN_END, composite(ts), 0.0)
    emit_plot(
        {"recovered": (ts, rec.y), "composite": (ts, truth)},
        out_dir / "roundtrip.svg",
        title="spline LT then analytic ILT",
        ylabel="f(t)",
    )


def ensemble(out_dir: Path, seed: int, threads: int):
    samples = sample_surface(TestFunctionSpec(kind="sin", w=3.0), DISCRETE_SURFACE, seed=seed)
    cfg = IltConfig.for_samples(len(samples), itn=100, seed=seed, threads=threads)
    est = randomized_ilt(samples, cfg)
    plot_ensemble(est, out_dir / "ensemble_sin3.svg", truth=lambda t: np.sin(3.0 * t))


def singvals(out_dir: Path, seed: int, threads: int):
    sweep = singval_sweep(SWEEP_SIZES, aspect=1.2, trials=50, seed=seed, threads=threads)
    plot_sweep(sweep, out_dir / "singvals.svg", fit_gamma(sweep))


def cosh_truncation(out_dir: Path):
    x = np.linspace(0.0, 3.0, 301)
    exact = 1.0 / np.cosh(x)
    series = {
        f"{terms} terms": (x, np.abs(np.array([cosh_inv_series(v, terms).real for v in x]) - exact))
        for terms in (5, 10, 20)
    }
    emit_plot(series, out_dir / "cosh_truncation.svg", title="1/cosh series error", xlabel="x", log_y=True)


# --------------------------------------------------------------------
# MAIN
# --------------------------------------------------------------------

def main():
    parser = argparse.ArgumentParser(description="Render validation figures as SVG")
    parser.add_argument("--out-dir", default=str(PLOTS_DIR))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--skip-slow", action="store_true", help="skip the ensemble and sweep figures")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    threads = resolve_threads(args.threads)

    lt_magnitude(out_dir)
    roundtrip(out_dir, threads)
    cosh_truncation(out_dir)
    if not args.skip_slow:
        ensemble(out_dir, args.seed, threads)
        singvals(out_dir, args.seed, threads)

    logger.info("✔ Figures written to %s", out_dir)


if __name__ == "__main__":
    main()

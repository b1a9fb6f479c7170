"""Render experiment results as figures next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ExperimentResult


def render_result(result: ExperimentResult, path) -> str:
    """Write a PNG summary of one experiment; returns the path written.

    Beta runs get a semilog plot of the empirical rate with its confidence
    band, the certified envelope, and the fitted exponent line; alpha runs
    get the empirical rate against the requested level.
    """
    ms = np.array([row.m for row in result.rows], dtype=float)
    rates = np.array([row.rate for row in result.rows])
    lo = np.array([row.ci_lo for row in result.rows])
    hi = np.array([row.ci_hi for row in result.rows])
    env = np.array([row.envelope for row in result.rows])

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if result.mode == "beta":
        floor = 0.5 / result.trials  # display floor for zero-error points
        shown = np.maximum(rates, floor)
        yerr = np.vstack([shown - np.maximum(lo, floor), np.maximum(hi, floor) - shown])
        ax.errorbar(ms, shown, yerr=yerr, fmt="o-", capsize=3, label="empirical type II rate")
        zero = rates == 0.0
        if zero.any():
            ax.plot(ms[zero], np.full(zero.sum(), floor), "v", color="C3",
                    label="no errors observed (display floor)")
        ax.plot(ms, np.maximum(env, floor), "s--", color="C1", label="certified envelope")
        if result.fit is not None:
            grid = np.linspace(ms.min(), ms.max(), 128)
            ax.plot(grid, np.exp(-(result.fit.slope * grid + result.fit.intercept)),
                    ":", color="C2",
                    label=f"fit: exp(-{result.fit.slope:.4g} m + c)")
        ax.set_yscale("log")
        ax.set_ylabel("type II error rate")
    else:
        ax.errorbar(ms, rates, yerr=np.vstack([rates - lo, hi - rates]), fmt="o-",
                    capsize=3, label="empirical type I rate")
        ax.axhline(result.alpha, color="C1", linestyle="--",
                   label=f"requested level {result.alpha:g}")
        ax.set_ylabel("type I error rate")
        ax.set_ylim(bottom=-0.01)
    ax.set_xlabel("copies m")
    ax.set_title(f"{result.kind} / {result.scheme} ({result.mode} run, seed {result.master_seed})")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)

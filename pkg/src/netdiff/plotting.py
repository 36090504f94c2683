"""Figure rendering for report outputs.

Each CLI report path can render a matplotlib figure next to its
delimited output; these helpers own the figure layout. The Agg backend
is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_infection_curves(curves: dict, path, title: str | None = None):
    """Mean infection curves with shaded 95% bands, one per label."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, band in curves.items():
        t = np.arange(len(band.mean))
        line, = ax.plot(t, band.mean, label=label, lw=1.6)
        ax.fill_between(t, band.lo, band.hi, alpha=0.25, color=line.get_color(), lw=0)
    ax.set_xlabel("timestep")
    ax.set_ylabel("fraction infected")
    ax.set_ylim(0, 1.02)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_traces(samples: np.ndarray, names, path, burn_in: int = 0):
    """Per-parameter trace plots of an MCMC run (kept samples)."""
    dim = samples.shape[1]
    fig, axes = plt.subplots(dim, 1, figsize=(7, 1.8 * dim), sharex=True, squeeze=False)
    for k in range(dim):
        ax = axes[k, 0]
        ax.plot(samples[:, k], lw=0.5)
        ax.set_ylabel(names[k])
        if burn_in:
            ax.axvline(burn_in, color="crimson", lw=0.8, ls="--")
    axes[-1, 0].set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_motif_correlations(result, path):
    """Mean correlation per motif with +/- 1 sd error bars."""
    names = [n for n, v in result.valid_runs.items() if v >= 2]
    means = [result.mean_corr[n] for n in names]
    sds = [result.sd_corr[n] for n in names]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    pos = np.arange(len(names))
    ax.bar(pos, means, yerr=sds, capsize=4, color="#4878d0")
    ax.set_xticks(pos)
    ax.set_xticklabels(names, rotation=20)
    ax.set_ylabel("corr(speed, concentration)")
    ax.axhline(0, color="black", lw=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

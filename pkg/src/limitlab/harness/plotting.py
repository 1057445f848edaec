"""Figures for sweep reports, rendered to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402


def convergence_figure(reports, path) -> Path:
    """Convergence step per episode, grouped by channel."""
    reports = sorted(reports, key=lambda r: (r.channel, r.seed, r.ordering))
    labels = [f"{r.channel} {r.ordering} s{r.seed}" for r in reports]
    values = [r.converged_at if r.converged_at is not None else 0 for r in reports]
    colors = ["tab:green" if r.verified else "tab:red" for r in reports]
    fig, ax = plt.subplots(figsize=(max(5.0, 0.35 * len(reports) + 2), 3.8))
    ax.bar(range(len(reports)), values, color=colors)
    ax.set_xticks(range(len(reports)))
    ax.set_xticklabels(labels, rotation=70, ha="right", fontsize=7)
    ax.set_ylabel("converged at t (0: none)")
    ax.yaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_title("convergence (green = verified)", fontsize=10)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def mass_figure(reports, path) -> Path:
    """Observed mass against number of distinct samples."""
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    for ch in sorted({r.channel for r in reports}):
        rs = [r for r in reports if r.channel == ch]
        ax.scatter([r.samples for r in rs], [r.mass for r in rs], label=ch, alpha=0.7)
    ax.set_xlabel("distinct samples")
    ax.set_ylabel("mass (bytes)")
    ax.set_title("mass vs samples", fontsize=10)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def render_all(reports, directory) -> list:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    return [convergence_figure(reports, d / "convergence.png"), mass_figure(reports, d / "mass.png")]

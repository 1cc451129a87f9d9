"""Matplotlib figure rendering for the experiment report paths.

Figures are written next to the delimited output files; nothing here is
interactive.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_sim1_figure(summary, path):
    """Kernel densities (variant a style) of the selected thresholds."""
    fig, ax = plt.subplots(figsize=(6, 4))
    density = summary.density
    for col in density.columns:
        if col.startswith("density_"):
            ax.plot(density["grid"], density[col], label=col[len("density_") :])
    ax.set_xlabel("selected threshold")
    ax.set_ylabel("density")
    ax.legend(title="split criterion")
    ax.set_title("Root-split threshold selection")
    return _finish(fig, path)


def render_sim1_boxplot(summary, path):
    """Boxplots of selected thresholds per criterion (variant b style)."""
    fig, ax = plt.subplots(figsize=(5, 4))
    groups = summary.records.dropna().groupby("criterion")["threshold"]
    labels, series = zip(*[(k, v.to_numpy()) for k, v in groups])
    ax.boxplot(series, tick_labels=labels)
    true_thr = summary.config.get("true_threshold")
    if true_thr is not None:
        ax.axhline(true_thr, color="grey", linestyle="--", linewidth=1)
    ax.set_ylabel("selected threshold")
    ax.set_title("Root-split thresholds by criterion")
    return _finish(fig, path)


def render_sim2_figure(summary, path):
    """Boxplots of the paired concordance differences."""
    fig, ax = plt.subplots(figsize=(5, 4))
    cols = ["diff_harrell", "diff_uno"]
    data = [summary.records[c].to_numpy() for c in cols]
    ax.boxplot(data, tick_labels=["Harrell eval", "Uno eval"])
    ax.axhline(0.0, color="grey", linestyle="--", linewidth=1)
    ax.set_ylabel("C(c-split) - C(logrank-split)")
    ax.set_title(
        f"n={summary.config['n']}, p={summary.config['p']}, "
        f"censoring={summary.config['censoring_rate']:.0%}"
    )
    return _finish(fig, path)


def render_importance_figure(report, path, top: int = 30):
    """Horizontal bar chart of scaled permutation importances."""
    frame = report.to_frame().sort_values("rank").head(top).iloc[::-1]
    fig, ax = plt.subplots(figsize=(6, max(3, 0.25 * len(frame))))
    ax.barh(frame["variable"], frame["scaled"])
    ax.set_xlabel("scaled permutation importance")
    ax.set_title(f"Baseline OOB C = {report.baseline:.3f}")
    return _finish(fig, path)

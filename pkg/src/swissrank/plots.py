"""Matplotlib rendering for the CLI report paths.

Figures are written straight to files next to the CSV/JSON reports; the Agg
backend keeps everything headless. These are convenience views of data the
delimited exports already carry in full.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import (
    CLASS_GENERALIST,
    CLASS_INTERMEDIATE,
    CLASS_SPECIALIST,
    FsaReport,
    RankingComparison,
)
from .montecarlo import SimulationResult

_CLASS_COLORS = {
    CLASS_GENERALIST: "tab:green",
    CLASS_INTERMEDIATE: "tab:orange",
    CLASS_SPECIALIST: "tab:red",
}


def _save(fig, path: str | Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ranking(result: SimulationResult, path: str | Path, title: str = "Expected win score") -> None:
    """Horizontal bar chart of expected scores with standard-error bars."""
    order = sorted(
        range(len(result.models)),
        key=lambda i: (-result.expected_scores[i], result.models[i]),
    )
    names = [result.models[i] for i in order]
    values = [result.expected_scores[i] for i in order]
    errors = [result.std_error[i] for i in order]
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.35 * len(names))))
    positions = range(len(names) - 1, -1, -1)
    ax.barh(list(positions), values, xerr=errors, color="tab:blue", alpha=0.8)
    ax.set_yticks(list(positions))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xlabel("expected win score")
    ax.set_title(title)
    _save(fig, path)


def plot_fsa_curves(report: FsaReport, path: str | Path) -> None:
    """Expected score against elimination count, one line per model."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for m, model in enumerate(report.models):
        ax.errorbar(
            report.t_grid,
            report.curves[m],
            yerr=report.curve_errors[m],
            marker="o",
            markersize=3,
            linewidth=1,
            label=model,
        )
    ax.set_xlabel("eliminations per round")
    ax.set_ylabel("expected win score")
    ax.set_xticks(list(report.t_grid))
    ax.set_title("Score under elimination pressure")
    ax.legend(fontsize=7, ncol=2)
    _save(fig, path)


def plot_fsa_profile(report: FsaReport, path: str | Path) -> None:
    """Risk-profile map: base score against sensitivity slope."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for m, model in enumerate(report.models):
        color = _CLASS_COLORS[report.classification[m]]
        ax.scatter(report.base_score[m], report.sensitivity[m], color=color, s=30)
        ax.annotate(
            model,
            (report.base_score[m], report.sensitivity[m]),
            textcoords="offset points",
            xytext=(4, 3),
            fontsize=7,
        )
    ax.axhline(0.0, color="grey", linewidth=0.8)
    ax.axhline(report.thresholds.specialist_slope, color="tab:red", linewidth=0.8, linestyle="--")
    ax.set_xlabel("base expected score (no elimination pressure)")
    ax.set_ylabel("sensitivity (slope vs eliminations)")
    ax.set_title("Risk profile")
    handles = [
        plt.Line2D([], [], marker="o", linestyle="", color=color, label=label)
        for label, color in _CLASS_COLORS.items()
    ]
    ax.legend(handles=handles, fontsize=7)
    _save(fig, path)


def plot_rank_comparison(comparison: RankingComparison, path: str | Path) -> None:
    """Signed rank movement per model for both ranking methods."""
    count = len(comparison.models)
    csd = [comparison.csd_delta(i) for i in range(count)]
    avg = [comparison.avg_delta(i) for i in range(count)]
    positions = list(range(count))
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.4 * count)))
    ax.barh([p + 0.2 for p in positions], csd, height=0.4, label="contest ranking", color="tab:blue")
    ax.barh([p - 0.2 for p in positions], avg, height=0.4, label="average-score ranking", color="tab:grey")
    ax.set_yticks(positions)
    ax.set_yticklabels(comparison.models, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("rank change after perturbation (positive = dropped)")
    ax.set_title("Perturbation impact by ranking method")
    ax.legend(fontsize=8)
    _save(fig, path)

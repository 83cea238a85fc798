"""Render summary and comparison figures next to their CSV outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dataset import ComparisonTable, DatasetSummary


def render_summary_figure(summary: DatasetSummary, path: Union[str, Path]) -> Path:
    """Horizontal bar chart of per-class flow counts, saved as an image."""
    rows = summary.ordered()
    labels = [label for label, _ in rows][::-1]
    counts = [count for _, count in rows][::-1]
    height = max(2.5, 0.4 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    bars = ax.barh(labels, counts, color="#3a6ea5")
    ax.bar_label(bars, padding=3, fontsize=8)
    ax.set_xlabel("flows")
    ax.set_title(f"{summary.name}: {summary.total} flows")
    if counts and max(counts) / max(1, min(c for c in counts if c) or 1) > 1000:
        ax.set_xscale("log")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_comparison_figure(table: ComparisonTable, path: Union[str, Path]) -> Path:
    """Grouped bars per class for the two summaries being compared."""
    labels = [r.label for r in table.rows]
    a_counts = [r.a_count for r in table.rows]
    b_counts = [r.b_count for r in table.rows]
    positions = range(len(labels))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(labels) + 2), 4.5))
    ax.bar([p - width / 2 for p in positions], a_counts, width, label=table.a_name)
    ax.bar([p + width / 2 for p in positions], b_counts, width, label=table.b_name)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("flows")
    all_counts = [c for c in a_counts + b_counts if c]
    if all_counts and max(all_counts) / min(all_counts) > 1000:
        ax.set_yscale("log")
    for r, p in zip(table.rows, positions):
        if r.flagged:
            ax.annotate(
                "largest divergence",
                xy=(p, max(r.a_count, r.b_count)),
                xytext=(0, 6),
                textcoords="offset points",
                ha="center",
                fontsize=8,
                color="#a53a3a",
            )
    ax.legend()
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out

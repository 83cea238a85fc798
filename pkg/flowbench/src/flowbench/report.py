"""Result table renderings: aligned text, CSV, and a metrics figure."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence, Union

from .models import FAMILIES
from .search import EvalReport

_COLUMNS = (
    ("Accuracy", "accuracy"),
    ("Precision", "macro_precision"),
    ("Recall", "macro_recall"),
    ("F1-Score", "macro_f1"),
)

FOOTER = "zero-denominator precision/recall scores 0"


def ordered_reports(reports: Sequence[EvalReport]) -> list[EvalReport]:
    """Group by dataset version (input order) then by family order."""
    if not reports:
        raise ValueError("no evaluation reports to render")
    versions: list[str] = []
    for report in reports:
        if report.dataset_version not in versions:
            versions.append(report.dataset_version)
    family_rank = {family: i for i, family in enumerate(FAMILIES)}
    return sorted(
        reports,
        key=lambda r: (versions.index(r.dataset_version),
                       family_rank.get(r.family, len(FAMILIES))),
    )


def report_text(reports: Sequence[EvalReport]) -> str:
    rows = ordered_reports(reports)
    version_width = max(len("Version"), max(len(r.dataset_version) for r in rows))
    lines = [
        f"{'Version':<{version_width}}  {'Model':<5}  "
        + "  ".join(f"{header:>9}" for header, _ in _COLUMNS)
    ]
    for r in rows:
        cells = "  ".join(f"{getattr(r, attr):>9.2f}" for _, attr in _COLUMNS)
        lines.append(f"{r.dataset_version:<{version_width}}  {r.family:<5}  {cells}")
    lines.append(f"({FOOTER})")
    return "\n".join(lines) + "\n"


def write_report_csv(reports: Sequence[EvalReport], path: Union[str, Path]) -> None:
    rows = ordered_reports(reports)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["version", "model"] + [h.lower() for h, _ in _COLUMNS])
        for r in rows:
            writer.writerow(
                [r.dataset_version, r.family]
                + [f"{getattr(r, attr):.2f}" for _, attr in _COLUMNS]
            )


def render_report_figure(reports: Sequence[EvalReport], path: Union[str, Path]) -> Path:
    """Grouped bar chart: one panel per metric, bars per version/model."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = ordered_reports(reports)
    labels = [f"{r.dataset_version}\n{r.family}" for r in rows]
    fig, axes = plt.subplots(2, 2, figsize=(max(8, 1.2 * len(rows)), 7), sharey=True)
    for ax, (header, attr) in zip(axes.flat, _COLUMNS):
        values = [getattr(r, attr) for r in rows]
        ax.bar(range(len(rows)), values, color="#3a6ea5")
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels(labels, fontsize=7)
        ax.set_ylim(0, 100)
        ax.set_title(header, fontsize=10)
        ax.grid(axis="y", alpha=0.3)
    fig.suptitle("holdout metrics (%)")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out

"""Multiclass evaluation metrics.

All four headline numbers are percentages in [0, 100]. Macro averages
are unweighted means over the classes present in the true labels, so
minority classes carry the same weight as the majority. Whenever a
precision or recall denominator is zero the score for that class is 0
(the pessimistic convention, noted in report footers).
"""

from __future__ import annotations

from typing import Sequence


def macro_metrics(
    y_true: Sequence, y_pred: Sequence
) -> tuple[float, float, float, float]:
    """(accuracy, macro_precision, macro_recall, macro_f1) as percentages."""
    if len(y_true) == 0:
        raise ValueError("cannot score an empty label sequence")
    if len(y_true) != len(y_pred):
        raise ValueError("label sequences differ in length")

    classes = sorted(set(y_true))
    hits = sum(1 for t, p in zip(y_true, y_pred) if t == p)
    accuracy = hits / len(y_true)

    precisions, recalls, f1s = [], [], []
    for cls in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
        predicted = sum(1 for p in y_pred if p == cls)
        actual = sum(1 for t in y_true if t == cls)
        precision = tp / predicted if predicted else 0.0
        recall = tp / actual if actual else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)

    n = len(classes)
    return (
        100.0 * accuracy,
        100.0 * sum(precisions) / n,
        100.0 * sum(recalls) / n,
        100.0 * sum(f1s) / n,
    )

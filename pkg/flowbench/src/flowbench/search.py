"""Cross-validated grid search and holdout evaluation.

Model selection follows the published protocol: every grid point is
scored by mean macro-F1 over 5 stratified folds, the best point is
retrained on the complete training set, and the holdout set produces
the reported metrics. Ties between grid points break toward the
lexicographically smaller hyperparameter assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .metrics import macro_metrics
from .models import ModelConfig, build_model, grid_configs


@dataclass(frozen=True)
class GridResult:
    best: ModelConfig
    scores: dict[ModelConfig, float]


@dataclass(frozen=True)
class EvalReport:
    dataset_version: str
    family: str
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def metrics(self) -> tuple[float, float, float, float]:
        return (self.accuracy, self.macro_precision, self.macro_recall, self.macro_f1)


def cv_score(X, y, config: ModelConfig, folds: int, seed: int) -> float:
    """Mean macro-F1 over stratified folds for one grid point."""
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    scores = []
    for train_idx, valid_idx in splitter.split(X, y):
        model = build_model(config, seed)
        model.fit(X[train_idx], y[train_idx])
        predictions = model.predict(X[valid_idx])
        _, _, _, f1 = macro_metrics(list(y[valid_idx]), list(predictions))
        scores.append(f1)
    return float(np.mean(scores))


def grid_search_cv(
    X,
    y,
    family: str,
    grid: Optional[dict[str, list]] = None,
    folds: int = 5,
    seed: int = 0,
) -> GridResult:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    configs = grid_configs(family, grid)
    scores: dict[ModelConfig, float] = {}
    for config in configs:
        scores[config] = cv_score(X, y, config, folds, seed)
    # configs are pre-sorted lexicographically, so max() keeps the smaller
    # assignment on ties
    best = max(configs, key=lambda c: scores[c])
    return GridResult(best=best, scores=scores)


def evaluate(
    train_X,
    train_y,
    holdout_X,
    holdout_y,
    config: ModelConfig,
    seed: int,
    dataset_version: str = "HERA",
) -> EvalReport:
    """Retrain on the full training set, score the untouched holdout."""
    model = build_model(config, seed)
    model.fit(np.asarray(train_X, dtype=float), np.asarray(train_y))
    predictions = model.predict(np.asarray(holdout_X, dtype=float))
    accuracy, precision, recall, f1 = macro_metrics(list(holdout_y), list(predictions))
    return EvalReport(
        dataset_version=dataset_version,
        family=config.family,
        accuracy=accuracy,
        macro_precision=precision,
        macro_recall=recall,
        macro_f1=f1,
    )

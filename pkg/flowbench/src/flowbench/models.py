"""Model family registry: grids, published ranges and builders.

Four tree-ensemble families, each fixed at 100 estimators with the
published hyperparameter ranges; the grids discretise those ranges at
the endpoints plus a midpoint. The XGB and LGBM families are backed by
scikit-learn's histogram gradient boosting (depth-limited growth for
the level-wise family, leaf-limited for the leaf-wise one) because the
upstream implementations are not available in this environment; EBM is
the in-package cyclic additive booster.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from sklearn.ensemble import HistGradientBoostingClassifier, RandomForestClassifier

from .ebm import CyclicAdditiveBoostingClassifier

N_ESTIMATORS = 100

FAMILIES = ("RF", "XGB", "LGBM", "EBM")

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "RF": {"max_depth": [8, 12, 16], "min_samples_leaf": [1, 2, 4]},
    "XGB": {"learning_rate": [0.05, 0.10, 0.20, 0.30], "max_depth": [4, 8, 16]},
    "LGBM": {"learning_rate": [0.05, 0.10, 0.20], "max_leaves": [7, 15]},
    "EBM": {"learning_rate": [0.10, 0.15], "max_leaves": [3, 7]},
}

# Published tuning ranges; grid values must stay inside them.
PARAM_RANGES: dict[str, dict[str, tuple[float, float]]] = {
    "RF": {"max_depth": (8, 16), "min_samples_leaf": (1, 4)},
    "XGB": {"learning_rate": (0.05, 0.30), "max_depth": (4, 16)},
    "LGBM": {"learning_rate": (0.05, 0.20), "max_leaves": (7, 15),
             "min_samples_leaf": (2, 4)},
    "EBM": {"learning_rate": (0.10, 0.15), "max_leaves": (3, 7),
            "min_samples_leaf": (1, 2)},
}


@dataclass(frozen=True, eq=False)
class ModelConfig:
    family: str
    params: dict = field(default_factory=dict)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModelConfig)
            and self.family == other.family
            and self.params == other.params
        )

    def __hash__(self) -> int:
        return hash((self.family, tuple(sorted(self.params.items()))))

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        ranges = PARAM_RANGES[self.family]
        for name, value in self.params.items():
            if name in ranges:
                low, high = ranges[name]
                if not low <= value <= high:
                    raise ValueError(
                        f"{self.family} {name}={value} outside published range "
                        f"[{low}, {high}]"
                    )

    def sort_key(self) -> tuple:
        return tuple(sorted(self.params.items()))


def grid_configs(family: str, grid: Optional[dict[str, list]] = None) -> list[ModelConfig]:
    """Expand a grid into configs, ordered lexicographically for tie-breaks."""
    if grid is None:
        grid = DEFAULT_GRIDS[family]
    if not grid:
        raise ValueError(f"empty hyperparameter grid for {family}")
    names = sorted(grid)
    configs = [
        ModelConfig(family, dict(zip(names, values)))
        for values in product(*(grid[name] for name in names))
    ]
    return sorted(configs, key=ModelConfig.sort_key)


def build_model(config: ModelConfig, seed: int):
    """Instantiate the estimator for one grid point."""
    params = config.params
    if config.family == "RF":
        return RandomForestClassifier(
            n_estimators=N_ESTIMATORS,
            criterion="gini",
            max_features="sqrt",
            max_depth=params.get("max_depth", 12),
            min_samples_leaf=params.get("min_samples_leaf", 1),
            random_state=seed,
            n_jobs=-1,
        )
    if config.family == "XGB":
        # level-wise histogram boosting: bound depth, leave leaf count free
        return HistGradientBoostingClassifier(
            loss="log_loss",
            max_iter=N_ESTIMATORS,
            learning_rate=params.get("learning_rate", 0.1),
            max_depth=params.get("max_depth", 8),
            max_leaf_nodes=None,
            min_samples_leaf=1,
            max_features=0.9,
            early_stopping=False,
            random_state=seed,
        )
    if config.family == "LGBM":
        # leaf-wise histogram boosting: bound leaves, leave depth free
        return HistGradientBoostingClassifier(
            loss="log_loss",
            max_iter=N_ESTIMATORS,
            learning_rate=params.get("learning_rate", 0.1),
            max_depth=None,
            max_leaf_nodes=params.get("max_leaves", 15),
            min_samples_leaf=params.get("min_samples_leaf", 2),
            max_features=0.9,
            early_stopping=False,
            random_state=seed,
        )
    if config.family == "EBM":
        return CyclicAdditiveBoostingClassifier(
            n_rounds=N_ESTIMATORS,
            learning_rate=params.get("learning_rate", 0.1),
            max_leaves=params.get("max_leaves", 3),
            max_bins=256,
            min_samples_leaf=params.get("min_samples_leaf", 1),
            random_state=seed,
        )
    raise ValueError(f"unknown model family {config.family!r}")

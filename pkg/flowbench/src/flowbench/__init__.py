"""flowbench: tree-ensemble benchmarks for flow-based NID datasets."""

from .data import (
    BUILTIN_MAPPINGS,
    CIC_MAPPING,
    UNSW_MAPPING,
    align_features,
    load_dataset,
    load_mapping,
    split_data,
)
from .ebm import CyclicAdditiveBoostingClassifier
from .metrics import macro_metrics
from .models import DEFAULT_GRIDS, FAMILIES, ModelConfig, build_model, grid_configs
from .report import report_text, render_report_figure, write_report_csv
from .search import EvalReport, GridResult, evaluate, grid_search_cv

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_MAPPINGS",
    "CIC_MAPPING",
    "CyclicAdditiveBoostingClassifier",
    "DEFAULT_GRIDS",
    "EvalReport",
    "FAMILIES",
    "GridResult",
    "ModelConfig",
    "UNSW_MAPPING",
    "align_features",
    "build_model",
    "evaluate",
    "grid_configs",
    "grid_search_cv",
    "load_dataset",
    "load_mapping",
    "macro_metrics",
    "render_report_figure",
    "report_text",
    "split_data",
    "write_report_csv",
    "__version__",
]

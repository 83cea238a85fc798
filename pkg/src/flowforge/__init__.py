"""flowforge: turn packet captures into labelled flow datasets."""

from .dataset import (
    DEFAULT_FEATURES,
    DatasetSummary,
    compare_summaries,
    read_flow_csv,
    summarize,
    write_csv,
)
from .errors import (
    CaptureFormatError,
    ConfigError,
    DatasetError,
    FlowforgeError,
    GroundTruthError,
)
from .features import FeatureVector
from .flows import FlowKey, FlowState, FlowTable
from .labelling import GroundTruthRule, label_dataset, match_label, parse_ground_truth
from .packets import CaptureReader, PacketRecord, Proto, decode_packet, open_capture
from .pipeline import PipelineConfig, RunStats, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "CaptureFormatError",
    "CaptureReader",
    "ConfigError",
    "DatasetError",
    "DatasetSummary",
    "DEFAULT_FEATURES",
    "FeatureVector",
    "FlowKey",
    "FlowState",
    "FlowTable",
    "FlowforgeError",
    "GroundTruthError",
    "GroundTruthRule",
    "PacketRecord",
    "PipelineConfig",
    "Proto",
    "RunStats",
    "compare_summaries",
    "decode_packet",
    "label_dataset",
    "match_label",
    "open_capture",
    "parse_ground_truth",
    "read_flow_csv",
    "run_pipeline",
    "summarize",
    "write_csv",
    "__version__",
]

"""End-to-end pipeline: decode -> flows -> features -> labels -> CSV.

Multiple input captures are concatenated in listed order into one
logical capture sharing a single flow table. Records stream straight to
the output CSV as they are emitted, so memory stays bounded by the live
flow count. On any failure, partially written outputs are removed.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import dataset, flows, labelling, packets
from .errors import ConfigError, FlowforgeError


@dataclass(slots=True)
class PipelineConfig:
    inputs: list[str] = field(default_factory=list)
    interval: float = flows.DEFAULT_INTERVAL_S
    idle_timeout: float = flows.DEFAULT_IDLE_TIMEOUT_S
    active_threshold: float = flows.DEFAULT_ACTIVE_THRESHOLD_S
    features: Sequence[str] = dataset.DEFAULT_FEATURES
    ground_truth: Optional[str] = None
    tz_offset: int = 0
    output: str = "flows.csv"
    summary_output: Optional[str] = None

    def validate(self) -> None:
        if not self.inputs:
            raise ConfigError("no input captures given")
        if self.interval < 1.0:
            raise ConfigError("interval must be at least 1 second")
        if self.idle_timeout <= 0:
            raise ConfigError("idle timeout must be positive")
        if self.active_threshold <= 0:
            raise ConfigError("active threshold must be positive")
        dataset.validate_features(list(self.features))


@dataclass(slots=True)
class RunStats:
    packets_read: int = 0
    packets_decoded: int = 0
    packets_skipped: int = 0
    flows: int = 0
    records: int = 0
    anomalies: int = 0
    class_counts: dict[str, int] = field(default_factory=dict)

    def lines(self) -> list[str]:
        return [
            f"packets: read={self.packets_read} decoded={self.packets_decoded} "
            f"skipped={self.packets_skipped}",
            f"flows: {self.flows}",
            f"records: {self.records}",
            f"anomalies: {self.anomalies}",
        ]


def run_pipeline(config: PipelineConfig) -> RunStats:
    """Process the configured captures into a labelled flow CSV.

    Raises FlowforgeError (or OSError) on failure after removing any
    partial outputs; on success the stats describe the whole run.
    """
    config.validate()
    for path in config.inputs:
        if not Path(path).is_file():
            raise ConfigError(f"input capture not found: {path}")

    rules: list[labelling.GroundTruthRule] = []
    if config.ground_truth:
        rules = labelling.parse_ground_truth(config.ground_truth, config.tz_offset)

    feature_names = dataset.validate_features(list(config.features))
    stats = RunStats()
    table = flows.FlowTable(
        interval=config.interval,
        idle_timeout=config.idle_timeout,
        active_threshold=config.active_threshold,
    )

    out_path = Path(config.output)
    tmp_path = out_path.with_name(out_path.name + ".tmp")
    created: list[Path] = [tmp_path]
    try:
        with open(tmp_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(feature_names)

            def emit(records) -> None:
                for record in records:
                    record.GTLabel = labelling.match_label(record, rules)
                    stats.class_counts[record.GTLabel] = (
                        stats.class_counts.get(record.GTLabel, 0) + 1
                    )
                    writer.writerow(
                        [
                            dataset.format_value(name, getattr(record, name))
                            for name in feature_names
                        ]
                    )
                    stats.records += 1

            for input_path in config.inputs:
                reader = packets.open_capture(input_path)
                for packet in reader:
                    emit(table.ingest_packet(packet))
                stats.packets_read += reader.stats.read
                stats.packets_decoded += reader.stats.decoded
                stats.packets_skipped += reader.stats.skipped
            emit(table.close_all())

        os.replace(tmp_path, out_path)
        created = [out_path]

        stats.flows = table.flows_created
        stats.anomalies = table.ts_anomalies + table.handshake_anomalies

        if config.summary_output:
            summary = dataset.DatasetSummary(
                name=out_path.stem, class_counts=dict(stats.class_counts)
            )
            created.append(Path(config.summary_output))
            dataset.write_summary_csv(summary, config.summary_output)
        return stats
    except (FlowforgeError, OSError):
        for path in created:
            try:
                path.unlink()
            except OSError:
                pass
        raise

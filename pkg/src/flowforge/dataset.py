"""Flow dataset CSV writing/reading, class summaries and comparisons.

CSV dialect is RFC-4180 with UTF-8, LF line endings and no BOM.
Numeric formats: integer features print bare, every float feature
(milliseconds, seconds, loads, mean sizes) prints with 6 decimal places,
and StartTime/LastTime print as ISO-8601 UTC with microseconds. With a
fixed feature selection the writer is fully deterministic, so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import DatasetError
from .features import FEATURE_NAMES, FeatureVector

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

KIND_INT = "int"
KIND_FLOAT = "float"
KIND_TIME = "time"
KIND_STR = "str"

FIELD_KINDS: dict[str, str] = {
    "FlowID": KIND_INT, "Rank": KIND_INT,
    "SrcAddr": KIND_STR, "Sport": KIND_INT, "DstAddr": KIND_STR, "Dport": KIND_INT,
    "Proto": KIND_STR, "State": KIND_STR,
    "Dur": KIND_FLOAT,
    "SrcBytes": KIND_INT, "DstBytes": KIND_INT,
    "sTtl": KIND_INT, "dTtl": KIND_INT,
    "SrcLoss": KIND_INT, "DstLoss": KIND_INT,
    "SrcLoad": KIND_FLOAT, "DstLoad": KIND_FLOAT,
    "SrcPkts": KIND_INT, "DstPkts": KIND_INT,
    "SrcWin": KIND_INT, "DstWin": KIND_INT,
    "SrcTCPBase": KIND_INT, "DstTCPBase": KIND_INT,
    "sMeanPktSz": KIND_FLOAT, "dMeanPktSz": KIND_FLOAT,
    "SrcJitter": KIND_FLOAT, "DstJitter": KIND_FLOAT,
    "SIntPkt": KIND_FLOAT, "SIntPktMax": KIND_FLOAT, "SIntPktMin": KIND_FLOAT,
    "DIntPkt": KIND_FLOAT, "DIntPktMax": KIND_FLOAT, "DIntPktMin": KIND_FLOAT,
    "StartTime": KIND_TIME, "LastTime": KIND_TIME,
    "TcpRtt": KIND_FLOAT, "SynAck": KIND_FLOAT, "AckDat": KIND_FLOAT,
    "Mean": KIND_FLOAT, "StdDev": KIND_FLOAT, "Max": KIND_FLOAT, "Min": KIND_FLOAT,
    "GTLabel": KIND_STR,
}

# The documented feature dictionary: default column order of the flow CSV.
DEFAULT_FEATURES: tuple[str, ...] = FEATURE_NAMES

LABEL_COLUMN = "GTLabel"


def iso_us(ts_us: int) -> str:
    """Epoch microseconds → ISO-8601 UTC with microsecond precision."""
    return (_EPOCH + timedelta(microseconds=ts_us)).isoformat(timespec="microseconds")


def parse_iso_us(token: str) -> int:
    if token.endswith("Z"):
        token = token[:-1] + "+00:00"
    dt = datetime.fromisoformat(token)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - _EPOCH
    return delta.days * 86_400_000_000 + delta.seconds * 1_000_000 + delta.microseconds


def format_value(name: str, value) -> str:
    kind = FIELD_KINDS[name]
    if kind == KIND_INT:
        return str(int(value))
    if kind == KIND_FLOAT:
        return f"{value:.6f}"
    if kind == KIND_TIME:
        return iso_us(int(value))
    return str(value)


def validate_features(selected: Sequence[str]) -> list[str]:
    if not selected:
        raise DatasetError("feature selection is empty")
    unknown = [name for name in selected if name not in FIELD_KINDS]
    if unknown:
        raise DatasetError(
            f"unknown feature(s) {', '.join(unknown)}; "
            f"valid names: {', '.join(DEFAULT_FEATURES)}"
        )
    return list(selected)


def write_csv(
    records: Iterable[FeatureVector],
    path: Union[str, Path],
    selected_features: Sequence[str] = DEFAULT_FEATURES,
) -> int:
    """Write records with the selected columns; returns the row count."""
    names = validate_features(selected_features)
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for record in records:
            writer.writerow([format_value(n, getattr(record, n)) for n in names])
            count += 1
    return count


def parse_value(name: str, token: str):
    kind = FIELD_KINDS.get(name)
    if kind == KIND_INT:
        return int(token)
    if kind == KIND_FLOAT:
        return float(token)
    if kind == KIND_TIME:
        return parse_iso_us(token)
    return token


def read_flow_csv(path: Union[str, Path]) -> tuple[list[dict], list[str]]:
    """Read a flow CSV back into typed dicts.

    Known columns are parsed to their native types; unknown columns are
    preserved as opaque text. Returns (records, header).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: missing header row") from None
        records = []
        for line, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: line {line}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                records.append(
                    {name: parse_value(name, token) for name, token in zip(header, row)}
                )
            except ValueError as exc:
                raise DatasetError(f"{path}: line {line}: {exc}") from None
    return records, header


@dataclass(slots=True)
class DatasetSummary:
    """Per-class flow counts for one dataset."""

    name: str
    class_counts: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.class_counts.values())

    def ordered(self) -> list[tuple[str, int]]:
        """Classes by descending count, label as tiebreak."""
        return sorted(self.class_counts.items(), key=lambda kv: (-kv[1], kv[0]))


def summarize(
    source: Union[str, Path, Iterable],
    label_column: str = LABEL_COLUMN,
    name: str = "dataset",
) -> DatasetSummary:
    """Count records per class from a CSV path or a record iterable."""
    counts: dict[str, int] = {}
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DatasetError(f"{source}: missing header row") from None
            if label_column not in header:
                raise DatasetError(f"{source}: no column named {label_column!r}")
            idx = header.index(label_column)
            for line, row in enumerate(reader, start=2):
                if idx >= len(row):
                    raise DatasetError(f"{source}: line {line}: short row")
                label = row[idx]
                counts[label] = counts.get(label, 0) + 1
    else:
        for record in source:
            label = getattr(record, label_column, None)
            if label is None:
                label = record[label_column]
            counts[label] = counts.get(label, 0) + 1
    return DatasetSummary(name=name, class_counts=counts)


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    label: str
    a_count: int
    b_count: int
    diff: int
    ratio: float  # b/a; inf when a is 0
    flagged: bool  # largest divergence from parity


@dataclass(slots=True)
class ComparisonTable:
    a_name: str
    b_name: str
    rows: list[ComparisonRow]


def compare_summaries(a: DatasetSummary, b: DatasetSummary) -> ComparisonTable:
    """Side-by-side class counts with absolute and ratio differences.

    Ratio is b/a by convention; a zero denominator renders as inf. The
    row whose ratio is farthest from 1.0 (in either direction) is
    flagged as the largest divergence.
    """
    labels = set(a.class_counts) | set(b.class_counts)
    ordered = sorted(
        labels,
        key=lambda lbl: (-a.class_counts.get(lbl, 0), -b.class_counts.get(lbl, 0), lbl),
    )
    raw = []
    for label in ordered:
        ca = a.class_counts.get(label, 0)
        cb = b.class_counts.get(label, 0)
        ratio = cb / ca if ca else float("inf")
        raw.append((label, ca, cb, cb - ca, ratio))

    def divergence(ratio: float) -> float:
        if ratio == float("inf"):
            return float("inf")
        if ratio <= 0:
            return float("inf")
        return max(ratio, 1.0 / ratio)

    worst = None
    if raw:
        worst = max(range(len(raw)), key=lambda i: divergence(raw[i][4]))
        if divergence(raw[worst][4]) == 1.0:
            worst = None  # identical summaries: nothing to flag
    rows = [
        ComparisonRow(label, ca, cb, diff, ratio, flagged=(i == worst))
        for i, (label, ca, cb, diff, ratio) in enumerate(raw)
    ]
    return ComparisonTable(a_name=a.name, b_name=b.name, rows=rows)


# -- renderings ---------------------------------------------------------


def summary_text(summary: DatasetSummary) -> str:
    rows = summary.ordered()
    width = max([len("class")] + [len(lbl) for lbl, _ in rows])
    lines = [f"{'class':<{width}}  {'flows':>12}"]
    for label, count in rows:
        lines.append(f"{label:<{width}}  {count:>12}")
    lines.append(f"{'total':<{width}}  {summary.total:>12}")
    return "\n".join(lines) + "\n"


def write_summary_csv(summary: DatasetSummary, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "count"])
        for label, count in summary.ordered():
            writer.writerow([label, count])


def read_summary_csv(path: Union[str, Path], name: str = "") -> DatasetSummary:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["label", "count"]:
            raise DatasetError(f"{path}: not a summary CSV (expected header label,count)")
        counts = {row[0]: int(row[1]) for row in reader if row}
    return DatasetSummary(name=name or str(path), class_counts=counts)


def _ratio_token(ratio: float) -> str:
    return "inf" if ratio == float("inf") else f"{ratio:.4f}"


def comparison_text(table: ComparisonTable) -> str:
    width = max([len("class")] + [len(r.label) for r in table.rows])
    a, b = table.a_name, table.b_name
    ca = max(len(a), 12)
    cb = max(len(b), 12)
    lines = [f"{'class':<{width}}  {a:>{ca}}  {b:>{cb}}  {'diff':>12}  {'ratio':>10}"]
    for r in table.rows:
        flag = "  <- largest divergence" if r.flagged else ""
        lines.append(
            f"{r.label:<{width}}  {r.a_count:>{ca}}  {r.b_count:>{cb}}  "
            f"{r.diff:>+12}  {_ratio_token(r.ratio):>10}{flag}"
        )
    total_a = sum(r.a_count for r in table.rows)
    total_b = sum(r.b_count for r in table.rows)
    total_ratio = total_b / total_a if total_a else float("inf")
    lines.append(
        f"{'total':<{width}}  {total_a:>{ca}}  {total_b:>{cb}}  "
        f"{total_b - total_a:>+12}  {_ratio_token(total_ratio):>10}"
    )
    return "\n".join(lines) + "\n"


def write_comparison_csv(table: ComparisonTable, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["label", table.a_name, table.b_name, "diff", "ratio", "flag"]
        )
        for r in table.rows:
            writer.writerow(
                [
                    r.label,
                    r.a_count,
                    r.b_count,
                    r.diff,
                    _ratio_token(r.ratio),
                    "largest-divergence" if r.flagged else "",
                ]
            )

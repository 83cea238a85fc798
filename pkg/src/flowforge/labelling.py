"""Assign attack labels to flow records from a ground-truth rule file.

Rules come from a CSV with header
``start,end,proto,src_ip,src_port,dst_ip,dst_port,label``. A record is
labelled by the first rule (file order) whose protocol matches, whose
endpoints match in either orientation (``*`` wildcards match anything),
and whose time window overlaps the record's [StartTime, LastTime] span.
Anything unmatched is Benign.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone
from ipaddress import ip_address
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import GroundTruthError
from .features import BENIGN_LABEL, FeatureVector

GROUND_TRUTH_HEADER = ["start", "end", "proto", "src_ip", "src_port", "dst_ip", "dst_port", "label"]

_KNOWN_PROTOS = {"tcp", "udp", "icmp", "any"}


@dataclass(frozen=True, slots=True)
class GroundTruthRule:
    """One attack window; None endpoint fields are wildcards."""

    start_ts: int
    end_ts: int
    proto: Optional[str]
    src_ip: Optional[str]
    src_port: Optional[int]
    dst_ip: Optional[str]
    dst_port: Optional[int]
    label: str


def _parse_time(token: str, tz_offset_s: int, line: int) -> int:
    """ISO-8601 → epoch µs; naive times are shifted by tz_offset_s."""
    token = token.strip()
    if token.endswith("Z"):
        token = token[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(token)
    except ValueError as exc:
        raise GroundTruthError(f"line {line}: bad timestamp {token!r}: {exc}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
        return round(dt.timestamp() * 1e6) - tz_offset_s * 1_000_000
    return round(dt.timestamp() * 1e6)


def _parse_ip(token: str, line: int) -> Optional[str]:
    token = token.strip()
    if token == "*":
        return None
    try:
        return str(ip_address(token))
    except ValueError:
        raise GroundTruthError(f"line {line}: bad IP address {token!r}") from None


def _parse_port(token: str, line: int) -> Optional[int]:
    token = token.strip()
    if token == "*":
        return None
    try:
        port = int(token)
    except ValueError:
        raise GroundTruthError(f"line {line}: bad port {token!r}") from None
    if not 0 <= port <= 65535:
        raise GroundTruthError(f"line {line}: port {port} out of range")
    return port


def parse_ground_truth(path: Union[str, Path], tz_offset_s: int = 0) -> list[GroundTruthRule]:
    """Read attack rules, in file order.

    ``tz_offset_s`` is the UTC offset, in seconds, of timestamps that
    carry no explicit offset (e.g. -10800 for captures documented in
    ADT); timestamps with an embedded offset are used as-is.
    """
    rules: list[GroundTruthRule] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise GroundTruthError(f"{path}: empty file, expected header row") from None
        if [h.strip() for h in header] != GROUND_TRUTH_HEADER:
            raise GroundTruthError(
                f"{path}: bad header, expected {','.join(GROUND_TRUTH_HEADER)}"
            )
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(GROUND_TRUTH_HEADER):
                raise GroundTruthError(
                    f"line {line}: expected {len(GROUND_TRUTH_HEADER)} fields, got {len(row)}"
                )
            start_ts = _parse_time(row[0], tz_offset_s, line)
            end_ts = _parse_time(row[1], tz_offset_s, line)
            if start_ts > end_ts:
                raise GroundTruthError(f"line {line}: start time is after end time")
            proto = row[2].strip().lower()
            if proto not in _KNOWN_PROTOS and not proto.isdigit():
                raise GroundTruthError(f"line {line}: unknown protocol {row[2]!r}")
            label = row[7].strip()
            if not label:
                raise GroundTruthError(f"line {line}: empty label")
            if label == BENIGN_LABEL:
                raise GroundTruthError(
                    f"line {line}: label {BENIGN_LABEL!r} is the default, not a rule label"
                )
            rules.append(
                GroundTruthRule(
                    start_ts=start_ts,
                    end_ts=end_ts,
                    proto=None if proto == "any" else proto,
                    src_ip=_parse_ip(row[3], line),
                    src_port=_parse_port(row[4], line),
                    dst_ip=_parse_ip(row[5], line),
                    dst_port=_parse_port(row[6], line),
                    label=label,
                )
            )
    return rules


def _endpoints_match(rule: GroundTruthRule, src: str, sport: int, dst: str, dport: int) -> bool:
    return (
        (rule.src_ip is None or rule.src_ip == src)
        and (rule.src_port is None or rule.src_port == sport)
        and (rule.dst_ip is None or rule.dst_ip == dst)
        and (rule.dst_port is None or rule.dst_port == dport)
    )


def match_label(record: FeatureVector, rules: Iterable[GroundTruthRule]) -> str:
    """First matching rule's label, else Benign.

    Endpoints match in either orientation because flow direction depends
    on first-packet arrival, which ground truth cannot know. Time match
    is interval overlap, not containment.
    """
    for rule in rules:
        if rule.proto is not None and rule.proto != record.Proto:
            continue
        if not (record.StartTime <= rule.end_ts and rule.start_ts <= record.LastTime):
            continue
        if _endpoints_match(
            rule, record.SrcAddr, record.Sport, record.DstAddr, record.Dport
        ) or _endpoints_match(
            rule, record.DstAddr, record.Dport, record.SrcAddr, record.Sport
        ):
            return rule.label
    return BENIGN_LABEL


def label_dataset(
    records: Iterable[FeatureVector], rules: list[GroundTruthRule]
) -> tuple[list[FeatureVector], dict[str, int]]:
    """Label every record in place; return them plus per-class counts."""
    counts: dict[str, int] = {}
    out = []
    for record in records:
        record.GTLabel = match_label(record, rules)
        counts[record.GTLabel] = counts.get(record.GTLabel, 0) + 1
        out.append(record)
    return out, counts

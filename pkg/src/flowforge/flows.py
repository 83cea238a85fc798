"""Streaming bidirectional flow table.

Packets are aggregated per canonical 5-tuple; the endpoint that sends
the first observed packet of a tuple is the initiator, and everything
with the reversed tuple maps onto the same flow in the reverse
direction.

A flow emits one status record per elapsed ``interval`` of continued
activity (window statistics reset each record), a final record when TCP
semantics terminate it (both FINs acknowledged, or any RST), when it
sits idle past ``idle_timeout``, or at end of capture. Sticky connection
state (first-seen TTLs, first TCP windows, initial sequence numbers,
handshake timestamps, state flags) persists across windows and is
reported on every record of the flow.

Eviction is driven purely by arriving packet timestamps, never by the
wall clock, so replays are deterministic. Timestamps may regress up to
``reorder_tolerance`` (they are kept in sorted order inside the window);
larger regressions are clamped to the running maximum and counted as
anomalies instead of aborting the run.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass, field
from typing import Optional

from .features import FeatureVector, SeqTracker, detect_retransmission, finalize_record
from .packets import PacketRecord, Proto

FORWARD = "forward"
REVERSE = "reverse"

DEFAULT_INTERVAL_S = 60.0
DEFAULT_IDLE_TIMEOUT_S = 60.0
DEFAULT_ACTIVE_THRESHOLD_S = 5.0
REORDER_TOLERANCE_S = 0.001


@dataclass(frozen=True, slots=True)
class FlowKey:
    """Canonical flow identity: initiator first, as observed on the wire."""

    proto: Proto
    proto_code: int
    init_ip: str
    init_port: int
    resp_ip: str
    resp_port: int


@dataclass(slots=True)
class DirState:
    """Per-direction accumulators: sticky fields plus the open window."""

    # sticky for the flow lifetime
    seen: bool = False
    ttl: Optional[int] = None
    win: Optional[int] = None
    tcp_base: Optional[int] = None
    tracker: SeqTracker = field(default_factory=SeqTracker)
    fin_seen: bool = False
    fin_acked: bool = False
    # reset per record window
    ts: list[int] = field(default_factory=list)
    bytes: int = 0
    pkts: int = 0
    loss: int = 0

    def reset_window(self) -> None:
        self.ts = []
        self.bytes = 0
        self.pkts = 0
        self.loss = 0


@dataclass(slots=True)
class FlowState:
    key: FlowKey
    flow_id: int
    start_ts: int
    rank: int = 0
    last_ts: int = 0
    window_start_ts: int = 0
    fwd: DirState = field(default_factory=DirState)
    rev: DirState = field(default_factory=DirState)
    syn_ts: Optional[int] = None
    synack_ts: Optional[int] = None
    ack_ts: Optional[int] = None
    rst_seen: bool = False

    def window_last_ts(self) -> int:
        last = self.window_start_ts
        if self.fwd.ts:
            last = max(last, self.fwd.ts[-1])
        if self.rev.ts:
            last = max(last, self.rev.ts[-1])
        return last


class FlowTable:
    """Single-writer flow table; emitted records are immutable values."""

    def __init__(
        self,
        interval: float = DEFAULT_INTERVAL_S,
        idle_timeout: float = DEFAULT_IDLE_TIMEOUT_S,
        active_threshold: float = DEFAULT_ACTIVE_THRESHOLD_S,
    ):
        if interval < 1.0:
            raise ValueError("interval must be at least 1 second")
        if idle_timeout <= 0 or active_threshold <= 0:
            raise ValueError("idle_timeout and active_threshold must be positive")
        self.interval_us = round(interval * 1e6)
        self.idle_timeout_us = round(idle_timeout * 1e6)
        self.active_threshold_s = active_threshold
        self.reorder_tolerance_us = round(REORDER_TOLERANCE_S * 1e6)
        self._flows: dict[tuple, FlowState] = {}
        self._next_id = 0
        self._max_ts: Optional[int] = None
        self.flows_created = 0
        self.ts_anomalies = 0
        self.handshake_anomalies = 0

    def __len__(self) -> int:
        return len(self._flows)

    # -- keying ----------------------------------------------------------

    @staticmethod
    def _tuple_of(p: PacketRecord) -> tuple:
        return (p.proto, p.proto_code, p.src_ip, p.src_port, p.dst_ip, p.dst_port)

    @staticmethod
    def _reversed_tuple(p: PacketRecord) -> tuple:
        return (p.proto, p.proto_code, p.dst_ip, p.dst_port, p.src_ip, p.src_port)

    def canonical_key(self, p: PacketRecord) -> tuple[FlowKey, str]:
        """Map a packet onto its flow key and direction.

        If neither orientation of the packet's 5-tuple is live, a new key
        is created with the packet's source as initiator.
        """
        fwd = self._tuple_of(p)
        if fwd in self._flows:
            return self._flows[fwd].key, FORWARD
        rev = self._reversed_tuple(p)
        if rev in self._flows:
            return self._flows[rev].key, REVERSE
        return (
            FlowKey(p.proto, p.proto_code, p.src_ip, p.src_port, p.dst_ip, p.dst_port),
            FORWARD,
        )

    # -- ingest ----------------------------------------------------------

    def ingest_packet(self, p: PacketRecord) -> list[FeatureVector]:
        """Feed one packet; return every record this packet caused.

        Emission sources, in one call: idle evictions triggered by the
        packet's timestamp, an interval window split on the packet's own
        flow, and TCP termination (FIN-complete or RST). The returned
        list is ordered by window start time.
        """
        ts = self._admit_ts(p.ts)
        records = self.evict_idle(ts)

        key, direction = self.canonical_key(p)
        flow_tuple = (key.proto, key.proto_code, key.init_ip, key.init_port,
                      key.resp_ip, key.resp_port)
        fs = self._flows.get(flow_tuple)
        if fs is None:
            fs = FlowState(
                key=key,
                flow_id=self._next_id,
                start_ts=ts,
                last_ts=ts,
                window_start_ts=ts,
            )
            self._next_id += 1
            self.flows_created += 1
            self._flows[flow_tuple] = fs
        elif ts - fs.window_start_ts >= self.interval_us:
            records.append(self._finalize_window(fs))
            fs.rank += 1
            fs.fwd.reset_window()
            fs.rev.reset_window()
            fs.window_start_ts = ts

        self._update(fs, p, ts, direction)

        if fs.key.proto is Proto.TCP and (
            fs.rst_seen or (fs.fwd.fin_acked and fs.rev.fin_acked)
        ):
            records.append(self._finalize_window(fs))
            del self._flows[flow_tuple]

        records.sort(key=lambda r: (r.StartTime, r.FlowID, r.Rank))
        return records

    def evict_idle(self, now: int) -> list[FeatureVector]:
        """Flush and drop every flow idle for at least the idle timeout."""
        stale = [
            (t, fs)
            for t, fs in self._flows.items()
            if now - fs.last_ts >= self.idle_timeout_us
        ]
        stale.sort(key=lambda item: item[1].flow_id)
        records = []
        for flow_tuple, fs in stale:
            records.append(self._finalize_window(fs))
            del self._flows[flow_tuple]
        return records

    def close_all(self, final_ts: Optional[int] = None) -> list[FeatureVector]:
        """Flush every live flow's open window (end of capture)."""
        remaining = sorted(self._flows.values(), key=lambda fs: fs.flow_id)
        records = [self._finalize_window(fs) for fs in remaining]
        self._flows.clear()
        return records

    # -- internals ---------------------------------------------------------

    def _admit_ts(self, ts: int) -> int:
        if self._max_ts is None or ts > self._max_ts:
            self._max_ts = ts
            return ts
        if self._max_ts - ts > self.reorder_tolerance_us:
            self.ts_anomalies += 1
            return self._max_ts
        return ts  # small regressions pass through unmodified

    def _update(self, fs: FlowState, p: PacketRecord, ts: int, direction: str) -> None:
        d = fs.fwd if direction == FORWARD else fs.rev
        opposite = fs.rev if direction == FORWARD else fs.fwd

        d.seen = True
        if d.ttl is None:
            d.ttl = p.ttl
        insort(d.ts, ts)
        d.bytes += p.ip_bytes
        d.pkts += 1
        fs.last_ts = max(fs.last_ts, ts)

        if p.tcp is not None:
            if d.win is None:
                d.win = p.tcp.window
            if d.tcp_base is None:
                d.tcp_base = p.tcp.seq
            if detect_retransmission(d.tracker, p):
                d.loss += 1
            # An ACK acknowledges an opposite-direction FIN sent earlier.
            if p.tcp.ack and opposite.fin_seen:
                opposite.fin_acked = True
            if p.tcp.fin:
                d.fin_seen = True
            if p.tcp.rst:
                fs.rst_seen = True
            self._track_handshake(fs, p, ts, direction)

    @staticmethod
    def _track_handshake(fs: FlowState, p: PacketRecord, ts: int, direction: str) -> None:
        tcp = p.tcp
        assert tcp is not None
        if direction == FORWARD and tcp.syn and not tcp.ack and fs.syn_ts is None:
            fs.syn_ts = ts
        elif (
            direction == REVERSE
            and tcp.syn
            and tcp.ack
            and fs.syn_ts is not None
            and fs.synack_ts is None
        ):
            fs.synack_ts = ts
        elif (
            direction == FORWARD
            and tcp.ack
            and not tcp.syn
            and fs.synack_ts is not None
            and fs.ack_ts is None
        ):
            fs.ack_ts = ts

    def _finalize_window(self, fs: FlowState) -> FeatureVector:
        if not (
            fs.syn_ts is None
            or fs.synack_ts is None
            or fs.ack_ts is None
            or fs.syn_ts <= fs.synack_ts <= fs.ack_ts
        ):
            self.handshake_anomalies += 1
        return finalize_record(fs, fs.window_last_ts(), self.active_threshold_s)

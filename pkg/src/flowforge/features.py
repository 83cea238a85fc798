"""Per-window flow feature computation.

Every statistic here is a pure function over the finalized window of a
flow plus its sticky connection state. Conventions shared with the CSV
layer:

* timestamps are integer epoch microseconds,
* every time-derived feature (inter-packet, jitter, TCP setup, active
  periods) is reported in milliseconds,
* loads are bits per second over the record window duration,
* a direction with too few packets reports 0 for its gap statistics
  rather than a missing value, keeping the dataset fully numeric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

from .packets import PacketRecord, Proto, proto_name

_SEQ_MOD = 1 << 32

STATE_INT = "INT"
STATE_REQ = "REQ"
STATE_CON = "CON"
STATE_FIN = "FIN"
STATE_RST = "RST"

BENIGN_LABEL = "Benign"


@dataclass(slots=True)
class FeatureVector:
    """One emitted flow record: identity, window bounds and all features."""

    FlowID: int
    Rank: int
    SrcAddr: str
    Sport: int
    DstAddr: str
    Dport: int
    Proto: str
    State: str
    Dur: float
    SrcBytes: int
    DstBytes: int
    sTtl: int
    dTtl: int
    SrcLoss: int
    DstLoss: int
    SrcLoad: float
    DstLoad: float
    SrcPkts: int
    DstPkts: int
    SrcWin: int
    DstWin: int
    SrcTCPBase: int
    DstTCPBase: int
    sMeanPktSz: float
    dMeanPktSz: float
    SrcJitter: float
    DstJitter: float
    SIntPkt: float
    SIntPktMax: float
    SIntPktMin: float
    DIntPkt: float
    DIntPktMax: float
    DIntPktMin: float
    StartTime: int
    LastTime: int
    TcpRtt: float
    SynAck: float
    AckDat: float
    Mean: float
    StdDev: float
    Max: float
    Min: float
    GTLabel: str = ""


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FeatureVector))


def interpkt_stats(timestamps: Sequence[int]) -> tuple[float, float, float]:
    """(mean, max, min) of inter-packet gaps, in milliseconds.

    Fewer than two timestamps yields (0, 0, 0). The input must already
    be sorted non-decreasing; that is an internal contract of the flow
    engine, not a user-facing error.
    """
    n = len(timestamps)
    if n < 2:
        return 0.0, 0.0, 0.0
    gaps = [timestamps[i + 1] - timestamps[i] for i in range(n - 1)]
    assert all(g >= 0 for g in gaps), "inter-packet timestamps not sorted"
    return (
        sum(gaps) / len(gaps) / 1000.0,
        max(gaps) / 1000.0,
        min(gaps) / 1000.0,
    )


def jitter_ms(timestamps: Sequence[int]) -> float:
    """Mean absolute difference of successive inter-packet gaps, in ms.

    Needs at least three timestamps (two gaps); otherwise 0.
    """
    n = len(timestamps)
    if n < 3:
        return 0.0
    gaps = [timestamps[i + 1] - timestamps[i] for i in range(n - 1)]
    diffs = [abs(gaps[i + 1] - gaps[i]) for i in range(len(gaps) - 1)]
    return sum(diffs) / len(diffs) / 1000.0


def load_bps(byte_count: int, dur_s: float) -> float:
    """Bits per second; windows shorter than 1 µs report 0."""
    if dur_s < 1e-6:
        return 0.0
    return 8.0 * byte_count / dur_s


def tcp_setup_times(
    syn_ts: Optional[int], synack_ts: Optional[int], ack_ts: Optional[int]
) -> tuple[float, float, float]:
    """(SynAck, AckDat, TcpRtt) in ms; TcpRtt = SynAck + AckDat.

    Any missing or out-of-order stage makes the handshake incomplete and
    all three are 0.
    """
    if syn_ts is None or synack_ts is None or ack_ts is None:
        return 0.0, 0.0, 0.0
    if not syn_ts <= synack_ts <= ack_ts:
        return 0.0, 0.0, 0.0
    syn_ack = (synack_ts - syn_ts) / 1000.0
    ack_dat = (ack_ts - synack_ts) / 1000.0
    return syn_ack, ack_dat, syn_ack + ack_dat


def serial_lt(a: int, b: int) -> bool:
    """32-bit serial-number a < b (RFC 1982 style half-space comparison)."""
    return 0 < (b - a) % _SEQ_MOD < _SEQ_MOD // 2


@dataclass(slots=True)
class SeqTracker:
    """Highest end-of-data seen in one direction, modulo 2^32."""

    max_end: Optional[int] = None


def detect_retransmission(tracker: SeqTracker, p: PacketRecord) -> bool:
    """True iff p's data segment overlaps the already covered range.

    Only data-bearing TCP segments count; pure ACKs never register as
    retransmissions. Coverage state advances whether or not the segment
    was a retransmission.
    """
    assert p.tcp is not None
    if p.payload_len <= 0:
        return False
    seq = p.tcp.seq
    end = (seq + p.payload_len) % _SEQ_MOD
    overlap = tracker.max_end is not None and serial_lt(seq, tracker.max_end)
    if tracker.max_end is None or serial_lt(tracker.max_end, end):
        tracker.max_end = end
    return overlap


def transaction_state(
    proto: Proto,
    *,
    syn_seen: bool,
    synack_seen: bool,
    ack_seen: bool,
    fin_fwd_acked: bool,
    fin_rev_acked: bool,
    rst_seen: bool,
    fwd_seen: bool,
    rev_seen: bool,
) -> str:
    """Transaction state code for a record.

    TCP: RST beats FIN beats CON (full handshake) beats REQ (lone SYN)
    beats INT. Non-TCP: CON once both directions have spoken, else INT.
    """
    if proto is Proto.TCP:
        if rst_seen:
            return STATE_RST
        if fin_fwd_acked and fin_rev_acked:
            return STATE_FIN
        if syn_seen and synack_seen and ack_seen:
            return STATE_CON
        if syn_seen and not synack_seen:
            return STATE_REQ
        return STATE_INT
    return STATE_CON if (fwd_seen and rev_seen) else STATE_INT


def active_idle_stats(
    timestamps: Sequence[int], idle_threshold_s: float
) -> tuple[float, float, float, float]:
    """(Mean, StdDev, Max, Min) of active-period durations, in ms.

    Packets are partitioned into maximal runs whose consecutive gaps stay
    below the idle threshold; a run's duration is last minus first, so a
    single-packet run contributes 0. StdDev is the population standard
    deviation. An empty window yields all zeros.
    """
    if not timestamps:
        return 0.0, 0.0, 0.0, 0.0
    threshold_us = idle_threshold_s * 1e6
    durations_ms: list[float] = []
    run_start = prev = timestamps[0]
    for ts in timestamps[1:]:
        assert ts >= prev, "active-period timestamps not sorted"
        if ts - prev >= threshold_us:
            durations_ms.append((prev - run_start) / 1000.0)
            run_start = ts
        prev = ts
    durations_ms.append((prev - run_start) / 1000.0)
    mean = sum(durations_ms) / len(durations_ms)
    var = sum((d - mean) ** 2 for d in durations_ms) / len(durations_ms)
    return mean, math.sqrt(var), max(durations_ms), min(durations_ms)


def finalize_record(fs, window_end: int, idle_threshold_s: float) -> FeatureVector:
    """Assemble the full feature vector for a flow's finalized window.

    ``fs`` is the engine's FlowState; the engine guarantees the window
    holds at least one packet. GTLabel is left empty for the labeller.
    """
    fwd, rev = fs.fwd, fs.rev
    assert fwd.pkts + rev.pkts > 0, "cannot finalize an empty window"

    start = fs.window_start_ts
    last = window_end
    dur = (last - start) / 1e6

    s_int, s_int_max, s_int_min = interpkt_stats(fwd.ts)
    d_int, d_int_max, d_int_min = interpkt_stats(rev.ts)

    merged = _merge_sorted(fwd.ts, rev.ts)
    mean_ms, std_ms, max_ms, min_ms = active_idle_stats(merged, idle_threshold_s)

    syn_ack, ack_dat, tcp_rtt = tcp_setup_times(fs.syn_ts, fs.synack_ts, fs.ack_ts)

    return FeatureVector(
        FlowID=fs.flow_id,
        Rank=fs.rank,
        SrcAddr=fs.key.init_ip,
        Sport=fs.key.init_port,
        DstAddr=fs.key.resp_ip,
        Dport=fs.key.resp_port,
        Proto=proto_name(fs.key.proto, fs.key.proto_code),
        State=transaction_state(
            fs.key.proto,
            syn_seen=fs.syn_ts is not None,
            synack_seen=fs.synack_ts is not None,
            ack_seen=fs.ack_ts is not None,
            fin_fwd_acked=fwd.fin_acked,
            fin_rev_acked=rev.fin_acked,
            rst_seen=fs.rst_seen,
            fwd_seen=fwd.seen,
            rev_seen=rev.seen,
        ),
        Dur=dur,
        SrcBytes=fwd.bytes,
        DstBytes=rev.bytes,
        sTtl=fwd.ttl or 0,
        dTtl=rev.ttl or 0,
        SrcLoss=fwd.loss,
        DstLoss=rev.loss,
        SrcLoad=load_bps(fwd.bytes, dur),
        DstLoad=load_bps(rev.bytes, dur),
        SrcPkts=fwd.pkts,
        DstPkts=rev.pkts,
        SrcWin=fwd.win or 0,
        DstWin=rev.win or 0,
        SrcTCPBase=fwd.tcp_base or 0,
        DstTCPBase=rev.tcp_base or 0,
        sMeanPktSz=fwd.bytes / fwd.pkts if fwd.pkts else 0.0,
        dMeanPktSz=rev.bytes / rev.pkts if rev.pkts else 0.0,
        SrcJitter=jitter_ms(fwd.ts),
        DstJitter=jitter_ms(rev.ts),
        SIntPkt=s_int,
        SIntPktMax=s_int_max,
        SIntPktMin=s_int_min,
        DIntPkt=d_int,
        DIntPktMax=d_int_max,
        DIntPktMin=d_int_min,
        StartTime=start,
        LastTime=last,
        TcpRtt=tcp_rtt,
        SynAck=syn_ack,
        AckDat=ack_dat,
        Mean=mean_ms,
        StdDev=std_ms,
        Max=max_ms,
        Min=min_ms,
        GTLabel="",
    )


def _merge_sorted(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out: list[int] = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] <= b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out

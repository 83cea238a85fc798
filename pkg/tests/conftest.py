"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from craft import TCP_ACK, TCP_FIN, TCP_RST, TCP_SYN, Intent  # noqa: E402

from flowforge.packets import PacketRecord, Proto, TcpInfo  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


def intent_to_record(intent: Intent) -> PacketRecord:
    """Turn a crafted intent into the engine's packet type."""
    proto = {"tcp": Proto.TCP, "udp": Proto.UDP, "icmp": Proto.ICMP}.get(
        intent.proto, Proto.OTHER
    )
    code = {"tcp": 6, "udp": 17, "icmp": 1}.get(intent.proto)
    if code is None:
        code = int(intent.proto)
    tcp = None
    if proto is Proto.TCP:
        flags = intent.tcp_flags
        tcp = TcpInfo(
            seq=intent.tcp_seq or 0,
            syn=bool(flags & TCP_SYN),
            ack=bool(flags & TCP_ACK),
            fin=bool(flags & TCP_FIN),
            rst=bool(flags & TCP_RST),
            psh=False,
            urg=False,
            window=intent.tcp_window,
        )
    return PacketRecord(
        ts=intent.ts,
        src_ip=intent.src_ip,
        dst_ip=intent.dst_ip,
        src_port=intent.src_port,
        dst_port=intent.dst_port,
        proto=proto,
        proto_code=code,
        ip_bytes=intent.ip_bytes,
        payload_len=intent.payload_len,
        ttl=intent.ttl,
        tcp=tcp,
    )


def random_capture(rng: random.Random, max_packets: int = 500, max_tuples: int = 20):
    """A sorted synthetic packet stream exercising every flow code path."""
    ips = [f"10.0.{i // 4}.{i % 4 + 1}" for i in range(8)]
    tuples = []
    for _ in range(rng.randint(1, max_tuples)):
        proto = rng.choice(["tcp", "tcp", "udp", "icmp", "47"])
        src, dst = rng.sample(ips, 2)
        if proto in ("icmp", "47"):
            sport = dport = 0
        else:
            sport = rng.randint(1024, 65535)
            dport = rng.choice([22, 53, 80, 443, 8080])
        tuples.append((proto, src, sport, dst, dport))

    n_packets = rng.randint(2, max_packets)
    ts = rng.randint(0, 10**9) * 1_000_000
    seq_state: dict[tuple, int] = {}
    intents = []
    for _ in range(n_packets):
        # mostly small gaps, occasionally long enough to trip idle timeouts
        ts += rng.choice([rng.randint(0, 2_000_000)] * 9 + [rng.randint(30_000_000, 90_000_000)])
        proto, src, sport, dst, dport = rng.choice(tuples)
        reverse = rng.random() < 0.4
        if reverse:
            src, sport, dst, dport = dst, dport, src, sport
        intent = Intent(
            ts=ts, src_ip=src, dst_ip=dst, src_port=sport, dst_port=dport,
            proto=proto, ip_bytes=0, payload_len=0, ttl=rng.randint(32, 128),
        )
        payload = rng.choice([0, 0, rng.randint(1, 1200)])
        if proto == "tcp":
            roll = rng.random()
            if roll < 0.06:
                flags, payload = TCP_SYN, 0
            elif roll < 0.10:
                flags = TCP_SYN | TCP_ACK
                payload = 0
            elif roll < 0.16:
                flags = TCP_FIN | TCP_ACK
            elif roll < 0.19:
                flags = TCP_RST
                payload = 0
            else:
                flags = TCP_ACK
            dir_key = (src, sport, dst, dport)
            if rng.random() < 0.15 and dir_key in seq_state:
                seq = max(0, seq_state[dir_key] - rng.randint(1, 300))  # revisit old data
            else:
                seq = seq_state.get(dir_key, rng.randint(0, 100_000))
            seq_state[dir_key] = seq + payload
            intent.tcp_seq = seq
            intent.tcp_flags = flags
            intent.tcp_window = rng.randint(0, 65535)
            intent.payload_len = payload
            intent.ip_bytes = 40 + payload
        elif proto == "udp":
            intent.payload_len = payload
            intent.ip_bytes = 28 + payload
        elif proto == "icmp":
            intent.payload_len = payload
            intent.ip_bytes = 28 + payload
        else:
            intent.payload_len = payload
            intent.ip_bytes = 20 + payload
        intents.append(intent)
    return intents

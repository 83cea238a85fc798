"""Hand-rolled frame and capture-file builders used as test fixtures.

Everything here is written from the wire formats directly (struct
packing, no imports from the package under test), so crafted frames
carry known-intended field values that decoded records can be checked
against.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from ipaddress import ip_address
from typing import Optional

ETHERTYPE_IPV4 = 0x0800
ETHERTYPE_IPV6 = 0x86DD
ETHERTYPE_VLAN = 0x8100
ETHERTYPE_ARP = 0x0806

TCP_FIN = 0x01
TCP_SYN = 0x02
TCP_RST = 0x04
TCP_PSH = 0x08
TCP_ACK = 0x10
TCP_URG = 0x20


def mac(last: int) -> bytes:
    return bytes([0x02, 0, 0, 0, 0, last & 0xFF])


def ethernet(payload: bytes, ethertype: int, vlan: Optional[int] = None) -> bytes:
    header = mac(2) + mac(1)
    if vlan is not None:
        header += struct.pack("!HH", ETHERTYPE_VLAN, vlan & 0x0FFF)
    return header + struct.pack("!H", ethertype) + payload


def ipv4(
    src: str,
    dst: str,
    proto: int,
    payload: bytes,
    *,
    ttl: int = 64,
    ident: int = 0,
    frag_offset: int = 0,
    more_fragments: bool = False,
    options: bytes = b"",
) -> bytes:
    assert len(options) % 4 == 0
    ihl = 20 + len(options)
    total_len = ihl + len(payload)
    frag_word = (0x2000 if more_fragments else 0) | (frag_offset & 0x1FFF)
    header = struct.pack(
        "!BBHHHBBH4s4s",
        (4 << 4) | (ihl // 4),
        0,
        total_len,
        ident,
        frag_word,
        ttl,
        proto,
        0,
        ip_address(src).packed,
        ip_address(dst).packed,
    )
    return header + options + payload


def ipv6(src: str, dst: str, next_header: int, payload: bytes, *, hop_limit: int = 64) -> bytes:
    header = struct.pack(
        "!IHBB16s16s",
        6 << 28,
        len(payload),
        next_header,
        hop_limit,
        ip_address(src).packed,
        ip_address(dst).packed,
    )
    return header + payload


def tcp(
    sport: int,
    dport: int,
    *,
    seq: int = 0,
    ack_num: int = 0,
    flags: int = TCP_ACK,
    window: int = 8192,
    payload: bytes = b"",
    options: bytes = b"",
) -> bytes:
    assert len(options) % 4 == 0
    doff = (20 + len(options)) // 4
    header = struct.pack(
        "!HHIIBBHHH",
        sport,
        dport,
        seq & 0xFFFFFFFF,
        ack_num & 0xFFFFFFFF,
        doff << 4,
        flags,
        window,
        0,
        0,
    )
    return header + options + payload


def udp(sport: int, dport: int, payload: bytes = b"") -> bytes:
    return struct.pack("!HHHH", sport, dport, 8 + len(payload), 0) + payload


def icmp_echo(payload: bytes = b"", *, reply: bool = False) -> bytes:
    return struct.pack("!BBHHH", 0 if reply else 8, 0, 0, 1, 1) + payload


def arp_frame() -> bytes:
    body = struct.pack("!HHBBH", 1, ETHERTYPE_IPV4, 6, 4, 1)
    body += mac(1) + ip_address("10.0.0.1").packed + mac(0) + ip_address("10.0.0.2").packed
    return ethernet(body, ETHERTYPE_ARP)


# -- capture containers --------------------------------------------------


def pcap_bytes(
    frames: list[tuple[int, bytes]],
    *,
    link_type: int = 1,
    nanos: bool = False,
    big_endian: bool = False,
    snaplen: int = 65535,
) -> bytes:
    endian = ">" if big_endian else "<"
    magic = 0xA1B23C4D if nanos else 0xA1B2C3D4
    out = struct.pack(endian + "IHHiIII", magic, 2, 4, 0, 0, snaplen, link_type)
    for ts_us, frame in frames:
        sec, us = divmod(ts_us, 1_000_000)
        frac = us * 1000 if nanos else us
        out += struct.pack(endian + "IIII", sec, frac, len(frame), len(frame))
        out += frame
    return out


def _pcapng_block(block_type: int, body: bytes) -> bytes:
    pad = (-len(body)) % 4
    total = 12 + len(body) + pad
    return (
        struct.pack("<II", block_type, total)
        + body
        + b"\x00" * pad
        + struct.pack("<I", total)
    )


def pcapng_bytes(
    frames: list[tuple[int, bytes]], *, link_type: int = 1, tsresol: int = 6
) -> bytes:
    shb = _pcapng_block(
        0x0A0D0D0A, struct.pack("<IHHq", 0x1A2B3C4D, 1, 0, -1)
    )
    options = struct.pack("<HHB3x", 9, 1, tsresol) + struct.pack("<HH", 0, 0)
    idb = _pcapng_block(0x00000001, struct.pack("<HHI", link_type, 0, 65535) + options)
    out = shb + idb
    scale = 10 ** (tsresol - 6) if tsresol >= 6 else 1
    down = 10 ** (6 - tsresol) if tsresol < 6 else 1
    for ts_us, frame in frames:
        units = ts_us * scale // down
        body = struct.pack(
            "<IIIII", 0, (units >> 32) & 0xFFFFFFFF, units & 0xFFFFFFFF, len(frame), len(frame)
        )
        pad = (-len(frame)) % 4
        out += _pcapng_block(0x00000006, body + frame + b"\x00" * pad)
    return out


# -- scenario builder -----------------------------------------------------


@dataclass
class Intent:
    """The field values a crafted frame is supposed to decode to."""

    ts: int
    src_ip: str
    dst_ip: str
    src_port: int
    dst_port: int
    proto: str  # tcp/udp/icmp or numeric string
    ip_bytes: int
    payload_len: int
    ttl: int
    tcp_seq: Optional[int] = None
    tcp_flags: int = 0
    tcp_window: int = 0


@dataclass
class Scenario:
    """Accumulates frames plus their intended decodes, in order."""

    frames: list[tuple[int, bytes]] = field(default_factory=list)
    intents: list[Optional[Intent]] = field(default_factory=list)  # None = skip expected

    def add_raw(self, ts_us: int, frame: bytes) -> None:
        self.frames.append((ts_us, frame))
        self.intents.append(None)

    def add_tcp(
        self,
        ts_us: int,
        src: str,
        sport: int,
        dst: str,
        dport: int,
        *,
        flags: int,
        seq: int = 0,
        ack_num: int = 0,
        payload_len: int = 0,
        ttl: int = 64,
        window: int = 8192,
        vlan: Optional[int] = None,
    ) -> None:
        segment = tcp(
            sport, dport, seq=seq, ack_num=ack_num, flags=flags, window=window,
            payload=bytes(payload_len),
        )
        frame = ethernet(ipv4(src, dst, 6, segment, ttl=ttl), ETHERTYPE_IPV4, vlan=vlan)
        self.frames.append((ts_us, frame))
        self.intents.append(
            Intent(
                ts=ts_us, src_ip=src, dst_ip=dst, src_port=sport, dst_port=dport,
                proto="tcp", ip_bytes=40 + payload_len, payload_len=payload_len,
                ttl=ttl, tcp_seq=seq, tcp_flags=flags, tcp_window=window,
            )
        )

    def add_udp(
        self,
        ts_us: int,
        src: str,
        sport: int,
        dst: str,
        dport: int,
        *,
        payload_len: int = 0,
        ttl: int = 64,
        vlan: Optional[int] = None,
    ) -> None:
        frame = ethernet(
            ipv4(src, dst, 17, udp(sport, dport, bytes(payload_len)), ttl=ttl),
            ETHERTYPE_IPV4,
            vlan=vlan,
        )
        self.frames.append((ts_us, frame))
        self.intents.append(
            Intent(
                ts=ts_us, src_ip=src, dst_ip=dst, src_port=sport, dst_port=dport,
                proto="udp", ip_bytes=28 + payload_len, payload_len=payload_len, ttl=ttl,
            )
        )

    def add_icmp(
        self,
        ts_us: int,
        src: str,
        dst: str,
        *,
        payload_len: int = 0,
        reply: bool = False,
        ttl: int = 64,
    ) -> None:
        frame = ethernet(
            ipv4(src, dst, 1, icmp_echo(bytes(payload_len), reply=reply), ttl=ttl),
            ETHERTYPE_IPV4,
        )
        self.frames.append((ts_us, frame))
        self.intents.append(
            Intent(
                ts=ts_us, src_ip=src, dst_ip=dst, src_port=0, dst_port=0,
                proto="icmp", ip_bytes=28 + payload_len, payload_len=payload_len, ttl=ttl,
            )
        )

    def sort_by_time(self) -> None:
        """Put frames and intents in capture order (stable by timestamp)."""
        order = sorted(range(len(self.frames)), key=lambda i: self.frames[i][0])
        self.frames = [self.frames[i] for i in order]
        self.intents = [self.intents[i] for i in order]

    def pcap(self, **kwargs) -> bytes:
        return pcap_bytes(self.frames, **kwargs)

    def pcapng(self, **kwargs) -> bytes:
        return pcapng_bytes(self.frames, **kwargs)

"""Decode PCAP / PCAPNG capture files into normalized packet records.

Supports classic PCAP (microsecond and nanosecond magics, both byte
orders) and PCAPNG (section header, interface description and enhanced
packet blocks; every other block type is ignored). Link layers: Ethernet
(1, with at most one VLAN tag) and raw IP (101).

All timestamps are converted to integer epoch microseconds at the
boundary; nothing downstream ever touches capture-format time units.
Byte counts are taken from the IP layer onward (``ip_bytes`` is the IPv4
total-length field, or 40 + payload-length for IPv6), so records do not
depend on the capture medium.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from ipaddress import ip_address
from pathlib import Path
from typing import BinaryIO, Iterator, Optional

from .errors import CaptureFormatError

LINKTYPE_ETHERNET = 1
LINKTYPE_RAW_IP = 101

_PCAP_MAGIC_US = 0xA1B2C3D4
_PCAP_MAGIC_NS = 0xA1B23C4D
_PCAPNG_BLOCK_SHB = 0x0A0D0D0A
_PCAPNG_BYTE_ORDER = 0x1A2B3C4D
_PCAPNG_BLOCK_IDB = 0x00000001
_PCAPNG_BLOCK_EPB = 0x00000006

_ETHERTYPE_IPV4 = 0x0800
_ETHERTYPE_IPV6 = 0x86DD
_ETHERTYPE_VLAN = 0x8100
_ETHERTYPE_QINQ = 0x88A8

_IPPROTO_ICMP = 1
_IPPROTO_TCP = 6
_IPPROTO_UDP = 17
_IPPROTO_ICMPV6 = 58

# IPv6 extension headers we walk through to reach the transport layer.
_IPV6_EXT_HEADERS = {0, 43, 60}
_IPV6_FRAGMENT = 44


class Proto(Enum):
    """Transport protocol of a packet / flow."""

    TCP = "tcp"
    UDP = "udp"
    ICMP = "icmp"
    OTHER = "other"

    @staticmethod
    def from_ip_proto(number: int) -> tuple["Proto", int]:
        if number == _IPPROTO_TCP:
            return Proto.TCP, number
        if number == _IPPROTO_UDP:
            return Proto.UDP, number
        if number in (_IPPROTO_ICMP, _IPPROTO_ICMPV6):
            return Proto.ICMP, number
        return Proto.OTHER, number


def proto_name(proto: Proto, code: int) -> str:
    """Wire name used in CSV output and ground-truth matching."""
    if proto is Proto.OTHER:
        return str(code)
    return proto.value


@dataclass(frozen=True, slots=True)
class TcpInfo:
    seq: int
    syn: bool
    ack: bool
    fin: bool
    rst: bool
    psh: bool
    urg: bool
    window: int


@dataclass(frozen=True, slots=True)
class PacketRecord:
    """One decoded IP packet.

    ``ts`` is epoch microseconds. ``ip_bytes`` counts from the IP header
    through the payload; ``payload_len`` is transport payload only, so
    ``payload_len <= ip_bytes`` always holds. ``tcp`` is present exactly
    when ``proto`` is TCP.
    """

    ts: int
    src_ip: str
    dst_ip: str
    src_port: int
    dst_port: int
    proto: Proto
    proto_code: int
    ip_bytes: int
    payload_len: int
    ttl: int
    tcp: Optional[TcpInfo] = None


@dataclass(slots=True)
class CaptureStats:
    """Frame accounting for one capture; decoded + skipped = read."""

    read: int = 0
    decoded: int = 0
    skipped: int = 0
    skip_reasons: dict[str, int] = field(default_factory=dict)

    def skip(self, reason: str) -> None:
        self.skipped += 1
        self.skip_reasons[reason] = self.skip_reasons.get(reason, 0) + 1


SKIP_NON_IP = "non-ip"
SKIP_FRAGMENT = "fragment"
SKIP_MALFORMED = "malformed"
SKIP_QINQ = "qinq"
SKIP_TRUNCATED = "truncated-frame"


def decode_packet(frame: bytes, link_type: int, ts: int = 0) -> Optional[PacketRecord]:
    """Decode one link-layer frame into a PacketRecord, or None to skip.

    Raises CaptureFormatError for unsupported link types. Decoding is
    pure: no state is carried between frames.
    """
    record, _reason = _decode(frame, link_type, ts)
    return record


def _decode(
    frame: bytes, link_type: int, ts: int
) -> tuple[Optional[PacketRecord], Optional[str]]:
    if link_type == LINKTYPE_ETHERNET:
        if len(frame) < 14:
            return None, SKIP_MALFORMED
        ethertype = struct.unpack_from("!H", frame, 12)[0]
        offset = 14
        if ethertype in (_ETHERTYPE_VLAN, _ETHERTYPE_QINQ):
            if len(frame) < 18:
                return None, SKIP_MALFORMED
            inner = struct.unpack_from("!H", frame, 16)[0]
            if ethertype == _ETHERTYPE_QINQ or inner in (_ETHERTYPE_VLAN, _ETHERTYPE_QINQ):
                return None, SKIP_QINQ
            ethertype = inner
            offset = 18
        if ethertype == _ETHERTYPE_IPV4:
            return _decode_ipv4(frame, offset, ts)
        if ethertype == _ETHERTYPE_IPV6:
            return _decode_ipv6(frame, offset, ts)
        return None, SKIP_NON_IP
    if link_type == LINKTYPE_RAW_IP:
        if not frame:
            return None, SKIP_MALFORMED
        version = frame[0] >> 4
        if version == 4:
            return _decode_ipv4(frame, 0, ts)
        if version == 6:
            return _decode_ipv6(frame, 0, ts)
        return None, SKIP_NON_IP
    raise CaptureFormatError(f"unsupported link type {link_type}")


def _decode_ipv4(frame: bytes, offset: int, ts: int) -> tuple[Optional[PacketRecord], Optional[str]]:
    if len(frame) < offset + 20:
        return None, SKIP_MALFORMED
    vihl, _tos, total_len, _ident, frag_word, ttl, proto_num = struct.unpack_from(
        "!BBHHHBB", frame, offset
    )
    if vihl >> 4 != 4:
        return None, SKIP_MALFORMED
    ihl = (vihl & 0x0F) * 4
    if ihl < 20 or total_len < ihl:
        return None, SKIP_MALFORMED
    if len(frame) < offset + ihl:
        return None, SKIP_MALFORMED
    if frag_word & 0x1FFF:  # non-first fragment
        return None, SKIP_FRAGMENT
    src = str(ip_address(frame[offset + 12 : offset + 16]))
    dst = str(ip_address(frame[offset + 16 : offset + 20]))
    return _decode_transport(
        frame,
        l4_offset=offset + ihl,
        l4_len=total_len - ihl,
        ip_bytes=total_len,
        proto_num=proto_num,
        ttl=ttl,
        src=src,
        dst=dst,
        ts=ts,
    )


def _decode_ipv6(frame: bytes, offset: int, ts: int) -> tuple[Optional[PacketRecord], Optional[str]]:
    if len(frame) < offset + 40:
        return None, SKIP_MALFORMED
    ver_tc_fl, payload_len, next_header, hop_limit = struct.unpack_from(
        "!IHBB", frame, offset
    )
    if ver_tc_fl >> 28 != 6:
        return None, SKIP_MALFORMED
    src = str(ip_address(frame[offset + 8 : offset + 24]))
    dst = str(ip_address(frame[offset + 24 : offset + 40]))
    l4_offset = offset + 40
    l4_len = payload_len
    # Walk the common extension-header chain to the transport header.
    while next_header in _IPV6_EXT_HEADERS or next_header == _IPV6_FRAGMENT:
        if len(frame) < l4_offset + 8 or l4_len < 8:
            return None, SKIP_MALFORMED
        if next_header == _IPV6_FRAGMENT:
            frag_offset = struct.unpack_from("!H", frame, l4_offset + 2)[0] >> 3
            if frag_offset:
                return None, SKIP_FRAGMENT
            ext_len = 8
        else:
            ext_len = (frame[l4_offset + 1] + 1) * 8
        if l4_len < ext_len:
            return None, SKIP_MALFORMED
        next_header = frame[l4_offset]
        l4_offset += ext_len
        l4_len -= ext_len
    return _decode_transport(
        frame,
        l4_offset=l4_offset,
        l4_len=l4_len,
        ip_bytes=40 + payload_len,
        proto_num=next_header,
        ttl=hop_limit,
        src=src,
        dst=dst,
        ts=ts,
    )


def _decode_transport(
    frame: bytes,
    *,
    l4_offset: int,
    l4_len: int,
    ip_bytes: int,
    proto_num: int,
    ttl: int,
    src: str,
    dst: str,
    ts: int,
) -> tuple[Optional[PacketRecord], Optional[str]]:
    proto, code = Proto.from_ip_proto(proto_num)
    src_port = dst_port = 0
    tcp: Optional[TcpInfo] = None

    if proto is Proto.TCP:
        if l4_len < 20 or len(frame) < l4_offset + 20:
            return None, SKIP_MALFORMED
        src_port, dst_port, seq = struct.unpack_from("!HHI", frame, l4_offset)
        doff = (frame[l4_offset + 12] >> 4) * 4
        flags = frame[l4_offset + 13]
        window = struct.unpack_from("!H", frame, l4_offset + 14)[0]
        if doff < 20 or l4_len < doff:
            return None, SKIP_MALFORMED
        payload_len = l4_len - doff
        tcp = TcpInfo(
            seq=seq,
            syn=bool(flags & 0x02),
            ack=bool(flags & 0x10),
            fin=bool(flags & 0x01),
            rst=bool(flags & 0x04),
            psh=bool(flags & 0x08),
            urg=bool(flags & 0x20),
            window=window,
        )
    elif proto is Proto.UDP:
        if l4_len < 8 or len(frame) < l4_offset + 8:
            return None, SKIP_MALFORMED
        src_port, dst_port, udp_len = struct.unpack_from("!HHH", frame, l4_offset)
        if udp_len < 8 or udp_len > l4_len:
            return None, SKIP_MALFORMED
        payload_len = udp_len - 8
    elif proto is Proto.ICMP:
        if l4_len < 8:
            return None, SKIP_MALFORMED
        payload_len = l4_len - 8
    else:
        payload_len = l4_len

    return (
        PacketRecord(
            ts=ts,
            src_ip=src,
            dst_ip=dst,
            src_port=src_port,
            dst_port=dst_port,
            proto=proto,
            proto_code=code,
            ip_bytes=ip_bytes,
            payload_len=payload_len,
            ttl=ttl,
            tcp=tcp,
        ),
        None,
    )


class CaptureReader:
    """Iterate PacketRecords out of a capture file, keeping frame totals.

    Usage::

        reader = open_capture("traffic.pcap")
        for packet in reader:
            ...
        print(reader.stats.read, reader.stats.decoded, reader.stats.skipped)
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.stats = CaptureStats()

    def __iter__(self) -> Iterator[PacketRecord]:
        with open(self.path, "rb") as fh:
            head = fh.read(4)
            if len(head) < 4:
                raise CaptureFormatError(f"{self.path}: not a capture file")
            fh.seek(0)
            magic_le = struct.unpack("<I", head)[0]
            magic_be = struct.unpack(">I", head)[0]
            if magic_be == _PCAPNG_BLOCK_SHB:
                yield from self._iter_pcapng(fh)
            elif magic_le in (_PCAP_MAGIC_US, _PCAP_MAGIC_NS) or magic_be in (
                _PCAP_MAGIC_US,
                _PCAP_MAGIC_NS,
            ):
                yield from self._iter_pcap(fh)
            else:
                raise CaptureFormatError(
                    f"{self.path}: unknown capture magic 0x{magic_be:08X}"
                )

    # -- classic PCAP ---------------------------------------------------

    def _iter_pcap(self, fh: BinaryIO) -> Iterator[PacketRecord]:
        header = fh.read(24)
        magic_le = struct.unpack("<I", header[:4])[0]
        if magic_le in (_PCAP_MAGIC_US, _PCAP_MAGIC_NS):
            endian = "<"
            nanos = magic_le == _PCAP_MAGIC_NS
        else:
            endian = ">"
            nanos = struct.unpack(">I", header[:4])[0] == _PCAP_MAGIC_NS
        link_type = struct.unpack(endian + "I", header[20:24])[0] & 0x0FFFFFFF
        while True:
            rec_header = fh.read(16)
            if not rec_header:
                return
            if len(rec_header) < 16:
                self.stats.read += 1
                self.stats.skip(SKIP_TRUNCATED)
                return
            ts_sec, ts_frac, incl_len, _orig_len = struct.unpack(
                endian + "IIII", rec_header
            )
            frame = fh.read(incl_len)
            self.stats.read += 1
            if len(frame) < incl_len:
                self.stats.skip(SKIP_TRUNCATED)
                return
            ts = ts_sec * 1_000_000 + (ts_frac // 1000 if nanos else ts_frac)
            yield from self._emit(frame, link_type, ts)

    # -- PCAPNG ----------------------------------------------------------

    def _iter_pcapng(self, fh: BinaryIO) -> Iterator[PacketRecord]:
        endian = "<"
        # Each interface stores (link_type, numer, denom) so that
        # ts_us = units * numer // denom, exact for power-of-10 resolutions.
        ifaces: list[tuple[int, int, int]] = []
        while True:
            head = fh.read(8)
            if len(head) < 8:
                return
            block_type = struct.unpack(endian + "I", head[:4])[0]
            if block_type == _PCAPNG_BLOCK_SHB:
                # Byte order may change per section; peek the magic.
                magic_bytes = fh.read(4)
                if len(magic_bytes) < 4:
                    return
                if struct.unpack("<I", magic_bytes)[0] == _PCAPNG_BYTE_ORDER:
                    endian = "<"
                elif struct.unpack(">I", magic_bytes)[0] == _PCAPNG_BYTE_ORDER:
                    endian = ">"
                else:
                    raise CaptureFormatError(f"{self.path}: bad PCAPNG byte-order magic")
                total_len = struct.unpack(endian + "I", head[4:8])[0]
                rest = fh.read(total_len - 12)
                if len(rest) < total_len - 12:
                    return
                ifaces = []
                continue
            total_len = struct.unpack(endian + "I", head[4:8])[0]
            if total_len < 12 or total_len % 4:
                raise CaptureFormatError(f"{self.path}: corrupt PCAPNG block length")
            raw = fh.read(total_len - 8)
            if len(raw) < total_len - 8:
                if block_type == _PCAPNG_BLOCK_EPB:
                    self.stats.read += 1
                    self.stats.skip(SKIP_TRUNCATED)
                return
            body = raw[: total_len - 12]  # drop trailing block-length field
            if block_type == _PCAPNG_BLOCK_IDB:
                link_type = struct.unpack_from(endian + "H", body, 0)[0]
                numer, denom = self._tsresol(body[8:], endian)
                ifaces.append((link_type, numer, denom))
            elif block_type == _PCAPNG_BLOCK_EPB:
                self.stats.read += 1
                if len(body) < 20:
                    self.stats.skip(SKIP_MALFORMED)
                    continue
                iface_id, ts_high, ts_low, cap_len, _orig_len = struct.unpack_from(
                    endian + "IIIII", body, 0
                )
                if iface_id >= len(ifaces) or len(body) < 20 + cap_len:
                    self.stats.skip(SKIP_MALFORMED)
                    continue
                link_type, numer, denom = ifaces[iface_id]
                units = (ts_high << 32) | ts_low
                ts = units * numer // denom
                frame = body[20 : 20 + cap_len]
                yield from self._emit(frame, link_type, ts)
            # all other block types ignored

    @staticmethod
    def _tsresol(options: bytes, endian: str) -> tuple[int, int]:
        """Return (numer, denom) converting interface time units to µs."""
        resol = 6  # default: microseconds
        pos = 0
        while pos + 4 <= len(options):
            code, length = struct.unpack_from(endian + "HH", options, pos)
            if code == 0:
                break
            value = options[pos + 4 : pos + 4 + length]
            if code == 9 and length >= 1:
                resol = value[0]
            pos += 4 + ((length + 3) & ~3)
        if resol & 0x80:
            return 1_000_000, 2 ** (resol & 0x7F)
        if resol >= 6:
            return 1, 10 ** (resol - 6)
        return 10 ** (6 - resol), 1

    def _emit(self, frame: bytes, link_type: int, ts: int) -> Iterator[PacketRecord]:
        record, reason = _decode(frame, link_type, ts)
        if record is None:
            self.stats.skip(reason or SKIP_MALFORMED)
        else:
            self.stats.decoded += 1
            yield record


def open_capture(path: str | Path) -> CaptureReader:
    """Open a PCAP or PCAPNG file for iteration.

    The file must exist and start with a recognised magic number;
    otherwise CaptureFormatError (or the underlying OSError) is raised
    when iteration starts.
    """
    reader = CaptureReader(path)
    if not reader.path.is_file():
        raise FileNotFoundError(f"capture file not found: {path}")
    return reader

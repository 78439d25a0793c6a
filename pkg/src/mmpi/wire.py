"""Binary frame codec shared by every node, regardless of implementation language.

Frame layout (all multi-byte integers big-endian):

    offset  size  field
    0       4     magic  0x4D 0x4D 0x50 0x49  ("MMPI")
    4       1     version (0x01)
    5       1     message type
    6       4     source rank   (0xFFFFFFFF = unassigned / control endpoint)
    10      4     dest rank     (0xFFFFFFFF = head control endpoint)
    14      4     tag
    18      1     payload kind
    19      4     payload byte length
    23      ...   payload bytes

Header is exactly 23 bytes.  U64/F64 array payloads are big-endian 8-byte
elements; F64 elements are raw IEEE-754 binary64 bits.  See docs/protocol.md
for hex-dump examples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple

from .errors import (
    BadMagic,
    LengthMismatch,
    OversizePayload,
    Truncated,
    UnknownKind,
    UnknownType,
    UnsupportedVersion,
)

MAGIC = b"MMPI"
VERSION = 1
HEADER_LEN = 23
MAX_PAYLOAD = 2**31 - 1

#: Rank value meaning "no rank": unassigned source, or the head's control
#: endpoint when used as a destination.
NO_RANK = 0xFFFFFFFF

_HEADER = struct.Struct(">4sBBIIIBI")


class MsgType(IntEnum):
    HELLO = 1
    WELCOME = 2
    START = 3
    SEND = 4
    BARRIER = 5
    BARRIER_RELEASE = 6
    SHUTDOWN = 7
    ERROR = 8


class PayloadKind(IntEnum):
    EMPTY = 0
    BYTES = 1
    U64_ARRAY = 2
    F64_ARRAY = 3


@dataclass(frozen=True)
class Payload:
    """Typed frame payload.

    values is b"" for EMPTY, bytes for BYTES, a tuple of ints for U64_ARRAY
    and a tuple of floats for F64_ARRAY.
    """

    kind: PayloadKind = PayloadKind.EMPTY
    values: bytes | tuple = b""

    @staticmethod
    def empty() -> "Payload":
        return Payload(PayloadKind.EMPTY, b"")

    @staticmethod
    def of_bytes(data: bytes) -> "Payload":
        return Payload(PayloadKind.BYTES, bytes(data))

    @staticmethod
    def u64(values) -> "Payload":
        return Payload(PayloadKind.U64_ARRAY, tuple(int(v) for v in values))

    @staticmethod
    def f64(values) -> "Payload":
        return Payload(PayloadKind.F64_ARRAY, tuple(float(v) for v in values))

    def to_bytes(self) -> bytes:
        if self.kind == PayloadKind.EMPTY:
            return b""
        if self.kind == PayloadKind.BYTES:
            return bytes(self.values)
        if self.kind == PayloadKind.U64_ARRAY:
            return b"".join(struct.pack(">Q", v) for v in self.values)
        return b"".join(struct.pack(">d", v) for v in self.values)

    @staticmethod
    def from_bytes(kind: PayloadKind, data: bytes) -> "Payload":
        if kind == PayloadKind.EMPTY:
            if data:
                raise LengthMismatch("EMPTY payload with nonzero length")
            return Payload.empty()
        if kind == PayloadKind.BYTES:
            return Payload.of_bytes(data)
        if len(data) % 8:
            raise LengthMismatch(
                f"{kind.name} length {len(data)} is not a multiple of 8"
            )
        n = len(data) // 8
        if kind == PayloadKind.U64_ARRAY:
            return Payload(kind, struct.unpack(f">{n}Q", data))
        return Payload(kind, struct.unpack(f">{n}d", data))


@dataclass(frozen=True)
class MessageFrame:
    msg_type: MsgType
    source: int = NO_RANK
    dest: int = NO_RANK
    tag: int = 0
    payload: Payload = field(default_factory=Payload.empty)


def encode_frame(frame: MessageFrame) -> bytes:
    """Serialize a frame; raises OversizePayload above the 2**31-1 limit."""
    body = frame.payload.to_bytes()
    if len(body) > MAX_PAYLOAD:
        raise OversizePayload(f"payload of {len(body)} bytes exceeds limit")
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        int(frame.msg_type),
        frame.source & 0xFFFFFFFF,
        frame.dest & 0xFFFFFFFF,
        frame.tag & 0xFFFFFFFF,
        int(frame.payload.kind),
        len(body),
    )
    return header + body


class FrameHeader(NamedTuple):
    msg_type: MsgType
    source: int
    dest: int
    tag: int
    kind: PayloadKind
    length: int


def decode_header(buf: bytes | bytearray | memoryview) -> FrameHeader:
    """Validate and parse a frame header; the payload is not inspected.

    Raises Truncated when fewer than HEADER_LEN bytes are present and the
    bytes so far are still a viable prefix.
    """
    buf = bytes(buf)
    if len(buf) >= 4:
        if buf[:4] != MAGIC:
            raise BadMagic(f"expected {MAGIC!r}, got {buf[:4]!r}")
    elif buf != MAGIC[: len(buf)]:
        raise BadMagic(f"expected prefix of {MAGIC!r}, got {buf!r}")
    if len(buf) >= 5 and buf[4] != VERSION:
        raise UnsupportedVersion(f"version {buf[4]}, only {VERSION} supported")
    if len(buf) < HEADER_LEN:
        raise Truncated("incomplete header")
    _, _, raw_type, source, dest, tag, raw_kind, length = _HEADER.unpack_from(buf)
    try:
        msg_type = MsgType(raw_type)
    except ValueError:
        raise UnknownType(f"message type {raw_type}") from None
    try:
        kind = PayloadKind(raw_kind)
    except ValueError:
        raise UnknownKind(f"payload kind {raw_kind}") from None
    if length > MAX_PAYLOAD:
        raise OversizePayload(f"declared payload of {length} bytes exceeds limit")
    return FrameHeader(msg_type, source, dest, tag, kind, length)


def decode_frame(buf: bytes | bytearray | memoryview) -> tuple[MessageFrame, int]:
    """Decode one frame from the start of buf.

    Returns (frame, bytes_consumed).  Raises Truncated when buf holds only a
    strict prefix of a frame, so stream readers can wait for more bytes; any
    other error means the bytes can never become a valid frame.
    """
    buf = bytes(buf)
    hdr = decode_header(buf[:HEADER_LEN])
    end = HEADER_LEN + hdr.length
    if len(buf) < end:
        raise Truncated(f"need {end} bytes, have {len(buf)}")
    payload = Payload.from_bytes(hdr.kind, buf[HEADER_LEN:end])
    return MessageFrame(hdr.msg_type, hdr.source, hdr.dest, hdr.tag, payload), end

"""The golden frame corpus: every message type and payload kind.

scripts/gen_golden.py writes these to tests/golden/ as .bin files plus a
JSON manifest; the Python and TypeScript suites both check their codecs
against the same files.
"""

import math

from mmpi.wire import MessageFrame, MsgType, NO_RANK, Payload

GOLDEN_FRAMES = [
    ("hello", MessageFrame(MsgType.HELLO)),
    ("welcome_rank5_of8", MessageFrame(
        MsgType.WELCOME, source=NO_RANK, dest=5, payload=Payload.u64([5, 8]))),
    ("start_rank2", MessageFrame(MsgType.START, source=NO_RANK, dest=2)),
    ("send_u64_single", MessageFrame(
        MsgType.SEND, source=0, dest=1, tag=7, payload=Payload.u64([6]))),
    ("send_u64_array", MessageFrame(
        MsgType.SEND, source=3, dest=0, tag=0xFFFF0003,
        payload=Payload.u64([2, 3, 5, 7, 11, 13, 2**64 - 1]))),
    ("send_f64_array", MessageFrame(
        MsgType.SEND, source=1, dest=2, tag=42,
        payload=Payload.f64([0.0, 0.5, math.pi, -1.0, 2.0**-53, math.inf]))),
    ("send_bytes", MessageFrame(
        MsgType.SEND, source=2, dest=1, tag=9,
        payload=Payload.of_bytes(b"\x00\x01\x02hello\xff"))),
    ("barrier_rank3", MessageFrame(MsgType.BARRIER, source=3, dest=NO_RANK)),
    ("barrier_release_rank3", MessageFrame(
        MsgType.BARRIER_RELEASE, source=NO_RANK, dest=3)),
    ("shutdown_rank1", MessageFrame(MsgType.SHUTDOWN, source=NO_RANK, dest=1)),
    ("error_message", MessageFrame(
        MsgType.ERROR, source=4, dest=NO_RANK,
        payload=Payload.of_bytes("unknown kernel 'bogus'".encode()))),
]

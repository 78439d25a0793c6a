"""TCP registration and star-topology relay.

Workers hold exactly one socket, to the head.  The head (rank 0) accepts
connections, assigns ranks in arrival order, relays worker-to-worker frames
by destination rank, and owns the barrier bookkeeping.  Relay decisions look
only at the 23-byte header; payload bytes are forwarded untouched.

Set MMPI_TRANSCRIPT_DIR to make the head append every raw inbound frame to
one file per source rank (transcript-rank<NNN>.bin), used by the
cross-implementation conformance tests.
"""

from __future__ import annotations

import os
import socket
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import wire
from .errors import (
    BindFailure,
    ConnectFailure,
    Disconnected,
    HeadClosed,
    ProtocolError,
    ProtocolViolation,
    RegistrationTimeout,
)
from .wire import HEADER_LEN, NO_RANK, MessageFrame, MsgType, Payload, encode_frame

DEFAULT_PORT = 29500


class Role(Enum):
    HEAD_PARTICIPANT = "head"
    WORKER = "worker"


@dataclass(frozen=True)
class ClusterConfig:
    head_address: str = f"127.0.0.1:{DEFAULT_PORT}"
    expected_workers: int = 0
    connect_timeout: float = 30.0
    hosts: list | None = None

    def __post_init__(self):
        if self.expected_workers < 0:
            raise ValueError("expected_workers must be >= 0")
        if self.connect_timeout <= 0:
            raise ValueError("connect_timeout must be > 0")


def parse_address(address: str) -> tuple[str, int]:
    host, _, port = address.partition(":")
    return host or "127.0.0.1", int(port) if port else DEFAULT_PORT


@dataclass(frozen=True)
class HostEntry:
    host: str
    port: int | None = None
    slots: int = 1


@dataclass(frozen=True)
class HostsFile:
    entries: tuple[HostEntry, ...]
    exec_template: str | None = None  # "#exec:" directive, e.g. "ssh {host} {cmd}"

    @property
    def total_slots(self) -> int:
        return sum(e.slots for e in self.entries)


def parse_hosts_file(path) -> HostsFile:
    """machinefile-style: one "hostname[:port] [slots=N]" per line, # comments."""
    entries = []
    template = None
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if line.startswith("#exec:"):
            template = line[len("#exec:"):].strip()
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        host, _, port = fields[0].partition(":")
        slots = 1
        for extra in fields[1:]:
            key, _, value = extra.partition("=")
            if key != "slots":
                raise ValueError(f"unknown hosts-file option {extra!r}")
            slots = int(value)
        entries.append(HostEntry(host, int(port) if port else None, slots))
    return HostsFile(tuple(entries), template)


# -- socket helpers ----------------------------------------------------------

class _Eof(Exception):
    pass


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    chunks = []
    got = 0
    while got < n:
        block = sock.recv(n - got)
        if not block:
            raise _Eof
        chunks.append(block)
        got += len(block)
    return b"".join(chunks)


def _read_raw_frame(sock: socket.socket) -> tuple[wire.FrameHeader, bytes]:
    """One frame off the socket: parsed header plus the complete raw bytes."""
    header_bytes = _recv_exact(sock, HEADER_LEN)
    header = wire.decode_header(header_bytes)
    body = _recv_exact(sock, header.length) if header.length else b""
    return header, header_bytes + body


def _read_frame(sock: socket.socket) -> MessageFrame:
    header, raw = _read_raw_frame(sock)
    frame, _ = wire.decode_frame(raw)
    return frame


class _Transcript:
    """Per-source-rank append log of raw inbound frames at the head."""

    def __init__(self, directory: str):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def record(self, rank: int, raw: bytes) -> None:
        with self._lock:
            with open(self.dir / f"transcript-rank{rank:03d}.bin", "ab") as fh:
                fh.write(raw)


# -- the communicator handle --------------------------------------------------

class WorldHandle:
    """One process's view of the world: rank, size, and live connections.

    User-facing operations (mmpi.runtime, mmpi.collectives) are called from a
    single logical thread; a background receiver owned by this handle drains
    the socket(s) into the match queue.
    """

    def __init__(self, my_rank: int, world_size: int, role: Role):
        assert 0 <= my_rank < world_size
        self.my_rank = my_rank
        self.world_size = world_size
        self.role = role
        self.connections: dict[int, socket.socket] = {}
        self._send_locks: dict[int, threading.Lock] = {}
        self._cond = threading.Condition()
        self._inbox: list[tuple[int, int, Payload]] = []  # (source, tag, payload)
        self._barrier_tokens = 0
        self._shutdown_seen = False
        self._closing = False
        self._dead: str | None = None
        self._remote_error: str | None = None
        self._threads: list[threading.Thread] = []
        self._transcript: _Transcript | None = None

    # -- wiring (package-internal) --

    def _attach(self, rank: int, sock: socket.socket) -> None:
        self.connections[rank] = sock
        self._send_locks[rank] = threading.Lock()

    def _write_frame(self, rank: int, frame: MessageFrame) -> None:
        self._write_raw(rank, encode_frame(frame))

    def _write_raw(self, rank: int, raw: bytes) -> None:
        sock = self.connections.get(rank)
        if sock is None or self._dead is not None:
            raise Disconnected(self._dead or f"no connection for rank {rank}")
        try:
            with self._send_locks[rank]:
                sock.sendall(raw)
        except OSError as exc:
            self._mark_dead(f"write to rank {rank} failed: {exc}")
            raise Disconnected(str(exc)) from None

    def _mark_dead(self, reason: str) -> None:
        with self._cond:
            if self._dead is None:
                self._dead = reason
            self._cond.notify_all()

    def _deliver(self, source: int, tag: int, payload: Payload) -> None:
        with self._cond:
            self._inbox.append((source, tag, payload))
            self._cond.notify_all()

    def _barrier_token(self) -> None:
        with self._cond:
            self._barrier_tokens += 1
            self._cond.notify_all()

    def _set_remote_error(self, message: str) -> None:
        with self._cond:
            self._remote_error = message
            if self._dead is None:
                self._dead = f"remote error: {message}"
            self._cond.notify_all()

    def _set_shutdown(self) -> None:
        with self._cond:
            self._shutdown_seen = True
            self._cond.notify_all()

    def _close_sockets(self) -> None:
        for sock in self.connections.values():
            # shutdown() wakes any thread blocked in recv(); close() alone
            # can leave it stuck forever
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                sock.close()
            except OSError:
                pass

    # -- receiver loops --

    def _worker_recv_loop(self) -> None:
        sock = self.connections[0]
        while True:
            try:
                frame = _read_frame(sock)
            except (_Eof, OSError, ProtocolError):
                if not (self._shutdown_seen or self._closing):
                    self._mark_dead("connection to head lost")
                return
            if frame.msg_type == MsgType.SEND:
                self._deliver(frame.source, frame.tag, frame.payload)
            elif frame.msg_type == MsgType.BARRIER_RELEASE:
                self._barrier_token()
            elif frame.msg_type == MsgType.SHUTDOWN:
                self._set_shutdown()
                return
            elif frame.msg_type == MsgType.ERROR:
                self._set_remote_error(_error_text(frame.payload))
                return
            else:
                self._mark_dead(f"unexpected {frame.msg_type.name} frame from head")
                return

    def _head_relay_loop(self, source_rank: int) -> None:
        """Drain one worker connection, dispatching by header only.

        Per-connection reads plus a per-destination write lock preserve FIFO
        order for every (source, dest) pair.
        """
        sock = self.connections[source_rank]
        while True:
            try:
                header, raw = _read_raw_frame(sock)
            except (_Eof, OSError, ProtocolError):
                if not (self._shutdown_seen or self._closing):
                    self._mark_dead(f"rank {source_rank} disconnected")
                return
            if self._transcript is not None:
                self._transcript.record(source_rank, raw)
            if header.msg_type == MsgType.SEND:
                if header.source != source_rank:
                    self._mark_dead(
                        f"rank {source_rank} forged source {header.source}"
                    )
                    return
                if header.dest == self.my_rank:
                    frame, _ = wire.decode_frame(raw)
                    self._deliver(frame.source, frame.tag, frame.payload)
                elif header.dest in self.connections:
                    try:
                        self._write_raw(header.dest, raw)
                    except Disconnected:
                        return
                else:
                    self._mark_dead(
                        f"rank {source_rank} sent to invalid rank {header.dest}"
                    )
                    return
            elif header.msg_type == MsgType.BARRIER:
                self._barrier_token()
            elif header.msg_type == MsgType.ERROR:
                frame, _ = wire.decode_frame(raw)
                self._set_remote_error(_error_text(frame.payload))
                return
            else:
                self._mark_dead(
                    f"unexpected {header.msg_type.name} frame from rank {source_rank}"
                )
                return

    def _start_receivers(self) -> None:
        if self.role == Role.WORKER:
            targets = [(self._worker_recv_loop, ())]
        else:
            targets = [(self._head_relay_loop, (r,)) for r in self.connections]
        for fn, args in targets:
            t = threading.Thread(target=fn, args=args, daemon=True)
            t.start()
            self._threads.append(t)


def _error_text(payload: Payload) -> str:
    if payload.kind == wire.PayloadKind.BYTES:
        return bytes(payload.values).decode("utf-8", "replace")
    return repr(payload)


# -- registration -------------------------------------------------------------

def bind_head(config: ClusterConfig) -> socket.socket:
    """Bind and listen on the configured head address (port 0 = ephemeral)."""
    host, port = parse_address(config.head_address)
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        listener.bind((host, port))
        listener.listen()
    except OSError as exc:
        listener.close()
        raise BindFailure(f"cannot bind {config.head_address}: {exc}") from None
    return listener


def head_start(config: ClusterConfig, *, listener: socket.socket | None = None) -> WorldHandle:
    """Register all expected workers, announce start, return the rank-0 handle.

    Ranks 1.. are assigned in connection-arrival order.  Each worker gets
    WELCOME [rank, world_size] immediately; START goes out only once every
    worker is registered.
    """
    if listener is None:
        listener = bind_head(config)
    world_size = config.expected_workers + 1
    handle = WorldHandle(0, world_size, Role.HEAD_PARTICIPANT)
    transcript_dir = os.environ.get("MMPI_TRANSCRIPT_DIR")
    if transcript_dir:
        handle._transcript = _Transcript(transcript_dir)
    deadline = time.monotonic() + config.connect_timeout
    try:
        for next_rank in range(1, world_size):
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise RegistrationTimeout(
                    f"{next_rank - 1}/{config.expected_workers} workers registered"
                )
            listener.settimeout(remaining)
            try:
                conn, _addr = listener.accept()
            except socket.timeout:
                raise RegistrationTimeout(
                    f"{next_rank - 1}/{config.expected_workers} workers registered"
                ) from None
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            conn.settimeout(max(deadline - time.monotonic(), 0.001))
            try:
                header, raw = _read_raw_frame(conn)
            except (_Eof, OSError, ProtocolError) as exc:
                conn.close()
                raise ProtocolViolation(f"bad registration frame: {exc}") from None
            if header.msg_type != MsgType.HELLO:
                conn.close()
                raise ProtocolViolation(
                    f"expected HELLO, got {header.msg_type.name}"
                )
            if handle._transcript is not None:
                handle._transcript.record(next_rank, raw)
            conn.settimeout(None)
            handle._attach(next_rank, conn)
            handle._write_frame(next_rank, MessageFrame(
                MsgType.WELCOME,
                source=NO_RANK,
                dest=next_rank,
                payload=Payload.u64([next_rank, world_size]),
            ))
        for rank in range(1, world_size):
            handle._write_frame(rank, MessageFrame(
                MsgType.START, source=NO_RANK, dest=rank,
            ))
    except BaseException:
        handle._close_sockets()
        listener.close()
        raise
    listener.close()
    handle._start_receivers()
    return handle


def worker_join(config: ClusterConfig) -> WorldHandle:
    """Connect, HELLO, block for WELCOME then START; returns the ranked handle."""
    host, port = parse_address(config.head_address)
    deadline = time.monotonic() + config.connect_timeout
    while True:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise ConnectFailure(f"head {config.head_address} unreachable")
        try:
            sock = socket.create_connection((host, port), timeout=min(1.0, remaining))
            break
        except OSError:
            time.sleep(0.05)
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    sock.settimeout(None)
    try:
        sock.sendall(encode_frame(MessageFrame(MsgType.HELLO)))
        welcome = _expect_control(sock, MsgType.WELCOME)
        my_rank, world_size = welcome.payload.values
        _expect_control(sock, MsgType.START)
    except BaseException:
        sock.close()
        raise
    handle = WorldHandle(int(my_rank), int(world_size), Role.WORKER)
    handle._attach(0, sock)
    handle._start_receivers()
    return handle


def _expect_control(sock: socket.socket, expected: MsgType) -> MessageFrame:
    try:
        frame = _read_frame(sock)
    except (_Eof, OSError):
        raise HeadClosed(f"head closed before {expected.name}") from None
    if frame.msg_type != expected:
        raise ProtocolViolation(f"expected {expected.name}, got {frame.msg_type.name}")
    return frame

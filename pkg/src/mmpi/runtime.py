"""Blocking point-to-point messaging and synchronization over a WorldHandle.

Matching follows the usual message-passing rules: recv takes the oldest
queued message satisfying its (source, tag) filter, and non-matching
messages stay queued for later calls.  Delivery is reliable and FIFO per
(source, dest) pair.  ANY (None) wildcards match everything.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Disconnected, InvalidRank, SelfSend
from .transport import Role, WorldHandle
from .wire import NO_RANK, MessageFrame, MsgType, Payload

#: Wildcard for recv filters.
ANY = None


@dataclass(frozen=True)
class Envelope:
    source: int
    tag: int
    payload: Payload


def send(world: WorldHandle, dest: int, tag: int, payload: Payload) -> None:
    """Enqueue one message for reliable, per-pair FIFO delivery."""
    if not 0 <= dest < world.world_size:
        raise InvalidRank(f"dest {dest} not in world of {world.world_size}")
    if dest == world.my_rank:
        raise SelfSend(f"rank {dest} sending to itself")
    if world._dead is not None or world._shutdown_seen or world._closing:
        raise Disconnected(world._dead or "world has shut down")
    frame = MessageFrame(MsgType.SEND, source=world.my_rank, dest=dest, tag=tag,
                         payload=payload)
    # Workers have one socket (to the head, which relays on dest); the head
    # writes straight to the destination worker.
    world._write_frame(dest if world.role == Role.HEAD_PARTICIPANT else 0, frame)


def recv(world: WorldHandle, source: int | None = ANY, tag: int | None = ANY) -> Envelope:
    """Block until a message matching the (source, tag) filter is available."""
    with world._cond:
        while True:
            for i, (src, tg, payload) in enumerate(world._inbox):
                if (source is ANY or src == source) and (tag is ANY or tg == tag):
                    del world._inbox[i]
                    return Envelope(src, tg, payload)
            if world._dead is not None:
                raise Disconnected(world._dead)
            if world._shutdown_seen or world._closing:
                raise Disconnected("world has shut down")
            world._cond.wait()


def barrier(world: WorldHandle) -> None:
    """Return only after every rank has entered this barrier round."""
    if world.world_size == 1:
        return
    if world.role == Role.HEAD_PARTICIPANT:
        needed = world.world_size - 1
        with world._cond:
            while world._barrier_tokens < needed:
                if world._dead is not None:
                    raise Disconnected(world._dead)
                world._cond.wait()
            world._barrier_tokens -= needed
        for rank in range(1, world.world_size):
            world._write_frame(rank, MessageFrame(
                MsgType.BARRIER_RELEASE, source=NO_RANK, dest=rank))
    else:
        world._write_frame(0, MessageFrame(
            MsgType.BARRIER, source=world.my_rank, dest=NO_RANK))
        with world._cond:
            while world._barrier_tokens < 1:
                if world._dead is not None:
                    raise Disconnected(world._dead)
                world._cond.wait()
            world._barrier_tokens -= 1


def shutdown(world: WorldHandle) -> None:
    """Collective teardown: head announces SHUTDOWN, everyone closes cleanly.

    Best-effort on already-broken links; never raises.
    """
    if world.role == Role.HEAD_PARTICIPANT:
        with world._cond:
            world._closing = True
            world._cond.notify_all()
        for rank in list(world.connections):
            try:
                world._write_frame(rank, MessageFrame(
                    MsgType.SHUTDOWN, source=NO_RANK, dest=rank))
            except Disconnected:
                pass
    else:
        with world._cond:
            world._cond.wait_for(
                lambda: world._shutdown_seen or world._dead is not None,
                timeout=world_shutdown_grace,
            )
            world._closing = True
            world._cond.notify_all()
    world._close_sockets()
    for t in world._threads:
        t.join(timeout=5.0)


#: How long a worker waits for the head's SHUTDOWN before closing anyway.
world_shutdown_grace = 30.0

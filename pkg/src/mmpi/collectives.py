"""Star-shaped collectives: broadcast, sum-reduce, gather.

Linear fan-out/fan-in over the head relay; fine for worlds of tens of ranks.
Reduction order is ascending rank, so float sums are bit-reproducible and
equal a sequential left fold.  Collective traffic uses reserved tags near the
top of the tag space; user code must not send with them.
"""

from __future__ import annotations

from . import runtime
from .errors import InvalidRank, KindMismatch
from .transport import WorldHandle
from .wire import Payload, PayloadKind

TAG_BCAST = 0xFFFF0001
TAG_REDUCE = 0xFFFF0002
TAG_GATHER = 0xFFFF0003

RESERVED_TAGS = frozenset({TAG_BCAST, TAG_REDUCE, TAG_GATHER})


def _check_root(world: WorldHandle, root: int) -> None:
    if not 0 <= root < world.world_size:
        raise InvalidRank(f"root {root} not in world of {world.world_size}")


def broadcast(world: WorldHandle, root: int, payload: Payload) -> Payload:
    """Every rank returns root's payload (non-root inputs are ignored)."""
    _check_root(world, root)
    if world.world_size == 1:
        return payload
    if world.my_rank == root:
        for rank in range(world.world_size):
            if rank != root:
                runtime.send(world, rank, TAG_BCAST, payload)
        return payload
    return runtime.recv(world, source=root, tag=TAG_BCAST).payload


def reduce_sum(world: WorldHandle, root: int, value: int | float):
    """Sum of every rank's scalar, folded in ascending-rank order at root.

    Returns the total at root and None elsewhere.  Ints travel as U64_ARRAY,
    floats as F64_ARRAY; mixing kinds raises KindMismatch at the root.
    """
    _check_root(world, root)
    is_float = isinstance(value, float)
    if world.my_rank != root:
        payload = Payload.f64([value]) if is_float else Payload.u64([value])
        runtime.send(world, root, TAG_REDUCE, payload)
        return None
    want = PayloadKind.F64_ARRAY if is_float else PayloadKind.U64_ARRAY
    contributions = []
    for rank in range(world.world_size):
        if rank == root:
            contributions.append(value)
            continue
        payload = runtime.recv(world, source=rank, tag=TAG_REDUCE).payload
        if payload.kind != want or len(payload.values) != 1:
            raise KindMismatch(
                f"rank {rank} contributed {payload.kind.name}, root has {want.name}"
            )
        contributions.append(payload.values[0])
    total = contributions[0]
    for v in contributions[1:]:
        total = total + v
    return total


def gather(world: WorldHandle, root: int, payload: Payload):
    """All payloads indexed by source rank at root (None elsewhere).

    Receives are matched by source, so the result does not depend on
    arrival order.
    """
    _check_root(world, root)
    if world.my_rank != root:
        runtime.send(world, root, TAG_GATHER, payload)
        return None
    parts: list[Payload] = []
    for rank in range(world.world_size):
        if rank == root:
            parts.append(payload)
        else:
            parts.append(runtime.recv(world, source=rank, tag=TAG_GATHER).payload)
    return parts

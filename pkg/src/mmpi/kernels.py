"""The two benchmark kernels, parallel and sequential.

Monte Carlo pi: sample (x, y) in the unit square, count x*x + y*y <= 1.0,
estimate pi as 4 * hits / tries.  Prime generation: split [lo, hi) into one
contiguous chunk per rank and trial-divide each chunk independently.

Parallel runs are bit-deterministic: rank r draws from seed base_seed + r, so
a single process replaying the per-rank streams back to back reproduces the
cluster result exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from . import collectives
from .errors import EmptySampleSet, InvalidRank, KindMismatch
from .rng import INCREMENT, MASK64, MULTIPLIER, unit_float
from .transport import WorldHandle
from .wire import Payload, PayloadKind


@dataclass(frozen=True)
class RangePartition:
    """Half-open [start, end) sub-range assigned to one rank."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"start {self.start} > end {self.end}")


@dataclass(frozen=True)
class PiEstimate:
    hits: int
    tries: int

    @property
    def estimate(self) -> float:
        return 4.0 * self.hits / self.tries


# -- Monte Carlo pi ----------------------------------------------------------

def mc_hits(n: int, seed: int) -> int:
    """Count unit-circle hits over n trials from the given seed.

    Each trial draws x then y as consecutive generator outputs.  The
    recurrence is inlined: this loop is the measured workload, and it must
    stay a plain scalar loop for the timing comparisons to be meaningful.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    state = seed & MASK64
    hits = 0
    unit = 2.0**-53
    for _ in range(n):
        state = (state * MULTIPLIER + INCREMENT) & MASK64
        x = (state >> 11) * unit
        state = (state * MULTIPLIER + INCREMENT) & MASK64
        y = (state >> 11) * unit
        if x * x + y * y <= 1.0:
            hits += 1
    return hits


def trial_share(n_total: int, world_size: int, rank: int) -> int:
    """Trials assigned to rank: floor split, one extra for the first remainder ranks."""
    base, extra = divmod(n_total, world_size)
    return base + (1 if rank < extra else 0)


def estimate_pi_seq(n: int, seed: int) -> PiEstimate:
    if n == 0:
        raise EmptySampleSet("no tries, estimate undefined")
    return PiEstimate(hits=mc_hits(n, seed), tries=n)


def estimate_pi_parallel(world: WorldHandle, n_total: int, base_seed: int) -> PiEstimate | None:
    """Collective pi estimate; returns the estimate at rank 0, None elsewhere.

    Rank 0 broadcasts (n_total, base_seed); rank r runs its share of trials
    from seed base_seed + r; hit and try counts are summed back at rank 0.
    """
    params = Payload.u64([n_total, base_seed]) if world.my_rank == 0 else Payload.empty()
    params = collectives.broadcast(world, 0, params)
    n_total, base_seed = params.values
    local = mc_hits(
        trial_share(n_total, world.world_size, world.my_rank),
        (base_seed + world.my_rank) & MASK64,
    )
    hits = collectives.reduce_sum(world, 0, local)
    tries = collectives.reduce_sum(world, 0, trial_share(n_total, world.world_size, world.my_rank))
    if world.my_rank != 0:
        return None
    if tries == 0:
        raise EmptySampleSet("no tries, estimate undefined")
    return PiEstimate(hits=hits, tries=tries)


# -- prime generation --------------------------------------------------------

def partition_range(lo: int, hi: int, world_size: int, rank: int) -> RangePartition:
    """Contiguous chunk for one rank; the last rank absorbs the remainder."""
    if lo > hi:
        raise ValueError(f"lo {lo} > hi {hi}")
    if world_size < 1 or not 0 <= rank < world_size:
        raise InvalidRank(f"rank {rank} of {world_size}")
    chunk = (hi - lo) // world_size
    start = lo + rank * chunk
    end = hi if rank == world_size - 1 else start + chunk
    return RangePartition(start, end)


def is_prime(n: int) -> bool:
    """Trial division by candidates up to isqrt(n)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_in_range(p: RangePartition) -> list[int]:
    return [n for n in range(p.start, p.end) if is_prime(n)]


def generate_primes_seq(lo: int, hi: int) -> list[int]:
    return primes_in_range(RangePartition(lo, hi))


def generate_primes_parallel(world: WorldHandle, lo: int, hi: int) -> list[int] | None:
    """Collective prime generation; the full ascending list at rank 0, None elsewhere.

    Chunks are rank-ordered and contiguous, so concatenating the gathered
    per-rank lists in rank order is already globally ascending.
    """
    params = Payload.u64([lo, hi]) if world.my_rank == 0 else Payload.empty()
    params = collectives.broadcast(world, 0, params)
    lo, hi = params.values
    mine = primes_in_range(partition_range(lo, hi, world.world_size, world.my_rank))
    parts = collectives.gather(world, 0, Payload.u64(mine))
    if world.my_rank != 0:
        return None
    out: list[int] = []
    for part in parts:
        if part.kind != PayloadKind.U64_ARRAY:
            raise KindMismatch(str(part.kind))  # pragma: no cover - gather preserves kinds
        out.extend(part.values)
    return out

"""The program every rank executes, plus the canonical result-line format.

Rank 0 prints exactly one machine-readable result line on stdout:

    MMPI-RESULT kernel=pi size=1000000 seed=42 hits=785627 tries=1000000 \
        estimate=3.142508 digest=26712b35a2b5b534 compute_s=0.412345

The compute window is delimited by barriers immediately before and after the
kernel body, so registration and teardown never count toward compute time.
The digest is 64-bit FNV-1a over the kernel's canonical output bytes; both
formats are pinned in docs/protocol.md.
"""

from __future__ import annotations

import struct
import sys
import time

from . import runtime
from .errors import MmpiError
from .kernels import PiEstimate, estimate_pi_parallel, generate_primes_parallel
from .rng import MASK64
from .transport import (
    ClusterConfig,
    WorldHandle,
    bind_head,
    head_start,
    parse_address,
    worker_join,
)
from .wire import NO_RANK, MessageFrame, MsgType, Payload

KERNELS = ("pi", "primes")

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def pi_canonical_bytes(n: int, seed: int, result: PiEstimate) -> bytes:
    return f"pi n={n} seed={seed} hits={result.hits} tries={result.tries}".encode()


def primes_canonical_bytes(lo: int, hi: int, primes: list[int]) -> bytes:
    head = f"primes lo={lo} hi={hi} count={len(primes)}\n".encode()
    return head + b"".join(struct.pack(">Q", p) for p in primes)


def parse_kernel_args(kernel: str, args: list[str]) -> dict:
    """pi takes --n and --seed; primes takes --lo and --hi."""
    opts = {}
    it = iter(args)
    for key in it:
        if not key.startswith("--"):
            raise ValueError(f"unexpected kernel argument {key!r}")
        opts[key[2:]] = int(next(it))
    if kernel == "pi":
        return {"n": opts.get("n", 1_000_000), "seed": opts.get("seed", 0)}
    if kernel == "primes":
        return {"lo": opts.get("lo", 0), "hi": opts.get("hi", 20_000)}
    raise ValueError(f"unknown kernel {kernel!r}")


def run_kernel(world: WorldHandle, kernel: str, opts: dict):
    if kernel == "pi":
        return estimate_pi_parallel(world, opts["n"], opts["seed"])
    return generate_primes_parallel(world, opts["lo"], opts["hi"])


def format_result_line(kernel: str, opts: dict, result, compute_s: float) -> str:
    if kernel == "pi":
        digest = fnv1a64(pi_canonical_bytes(opts["n"], opts["seed"], result))
        fields = (
            f"kernel=pi size={opts['n']} seed={opts['seed']} "
            f"hits={result.hits} tries={result.tries} estimate={result.estimate!r}"
        )
    else:
        digest = fnv1a64(primes_canonical_bytes(opts["lo"], opts["hi"], result))
        size = opts["hi"] - opts["lo"]
        fields = (
            f"kernel=primes size={size} lo={opts['lo']} hi={opts['hi']} "
            f"count={len(result)}"
        )
    return f"MMPI-RESULT {fields} digest={digest:016x} compute_s={compute_s:.6f}"


def parse_result_line(stdout: str) -> dict:
    """Pick the MMPI-RESULT line out of rank 0's stdout."""
    for line in stdout.splitlines():
        if line.startswith("MMPI-RESULT "):
            out = {}
            for token in line.split()[1:]:
                key, _, value = token.partition("=")
                out[key] = value
            return out
    raise MmpiError("no MMPI-RESULT line in rank 0 output")


def rank_main(role: str, *, kernel: str, kernel_args: list[str],
              head_address: str = "", port: int = 0, expected_workers: int = 0,
              timeout: float = 30.0, announce: bool = False) -> int:
    """Run one rank to completion; returns the process exit status."""
    if role == "head":
        if kernel not in KERNELS:
            print(f"unknown kernel {kernel!r}", file=sys.stderr)
            return 2
        host = parse_address(head_address)[0] if head_address else "127.0.0.1"
        config = ClusterConfig(
            head_address=f"{host}:{port}",
            expected_workers=expected_workers,
            connect_timeout=timeout,
        )
        listener = bind_head(config)
        if announce:
            bound = listener.getsockname()
            print(f"MMPI-LISTENING {bound[0]}:{bound[1]}", file=sys.stderr, flush=True)
        world = head_start(config, listener=listener)
    else:
        config = ClusterConfig(head_address=head_address, connect_timeout=timeout)
        world = worker_join(config)
        if kernel not in KERNELS:
            # Tell the head why this rank is bailing out, then exit nonzero.
            world._write_frame(0, MessageFrame(
                MsgType.ERROR, source=world.my_rank, dest=NO_RANK,
                payload=Payload.of_bytes(f"unknown kernel {kernel!r}".encode()),
            ))
            world._close_sockets()
            return 1

    opts = parse_kernel_args(kernel, kernel_args)
    runtime.barrier(world)
    t0 = time.perf_counter()
    result = run_kernel(world, kernel, opts)
    runtime.barrier(world)
    compute_s = time.perf_counter() - t0
    if world.my_rank == 0:
        print(format_result_line(kernel, opts, result, compute_s), flush=True)
    runtime.shutdown(world)
    return 0

"""Spawns an N-process world and supervises it to completion.

Rank 0 (the head) and all native workers are subprocesses of this module;
interpreted workers run whatever command MMPI_INTERPRETED_CMD names (by
default the bundled tsworker build).  The head binds an ephemeral port when
head_port=0 and announces the bound address on stderr, so parallel launches
never collide.  Remote hosts listed in a hosts file are reached through its
"#exec:" command template; everything else spawns locally.
"""

from __future__ import annotations

import os
import queue
import shlex
import subprocess
import sys
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import NonzeroWorkerExit, RegistrationTimeout, SpawnFailure
from .transport import HostsFile, parse_hosts_file

_REPO_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_INTERPRETED_WORKER = _REPO_ROOT / "tsworker" / "dist" / "worker.js"


class WorkerKind(Enum):
    NATIVE = "native"
    INTERPRETED = "interpreted"


@dataclass(frozen=True)
class LaunchSpec:
    nprocs: int
    kernel: str
    kernel_args: tuple[str, ...] = ()
    kinds: tuple[WorkerKind, ...] = ()  # one per rank; empty = all native
    hosts_file: str | None = None
    head_host: str = "127.0.0.1"
    head_port: int = 0  # 0 = ephemeral
    registration_timeout: float = 30.0

    def __post_init__(self):
        if self.nprocs < 1:
            raise ValueError("nprocs must be >= 1")
        kinds = self.kinds or (WorkerKind.NATIVE,) * self.nprocs
        if len(kinds) != self.nprocs:
            raise ValueError("need one worker kind per rank")
        if kinds[0] != WorkerKind.NATIVE:
            raise ValueError("rank 0 (the head) is always the native runtime")
        object.__setattr__(self, "kinds", tuple(kinds))


@dataclass(frozen=True)
class LaunchResult:
    exit_status: int
    stdout: str
    stderr: str
    total_wall_seconds: float


def kinds_for(axis: str, nprocs: int) -> tuple[WorkerKind, ...]:
    """Expand a sweep axis name into per-rank kinds (rank 0 stays native)."""
    if axis == "native":
        return (WorkerKind.NATIVE,) * nprocs
    if axis == "interpreted":
        return (WorkerKind.NATIVE,) + (WorkerKind.INTERPRETED,) * (nprocs - 1)
    if axis == "mixed":
        return tuple(
            WorkerKind.NATIVE if r % 2 == 0 else WorkerKind.INTERPRETED
            for r in range(nprocs)
        )
    raise ValueError(f"unknown worker kind {axis!r}")


def interpreted_worker_argv() -> list[str]:
    template = os.environ.get("MMPI_INTERPRETED_CMD")
    if template:
        return shlex.split(template)
    if DEFAULT_INTERPRETED_WORKER.exists():
        return ["node", str(DEFAULT_INTERPRETED_WORKER)]
    raise SpawnFailure(
        "no interpreted worker available: build tsworker/ or set MMPI_INTERPRETED_CMD"
    )


def _native_worker_argv(head_address: str, timeout: float, kernel: str,
                        kernel_args: tuple[str, ...]) -> list[str]:
    return [
        sys.executable, "-m", "mmpi.cli", "run-rank",
        "--role", "worker", "--head", head_address, "--timeout", str(timeout),
        "--", kernel, *kernel_args,
    ]


def _head_argv(spec: LaunchSpec) -> list[str]:
    return [
        sys.executable, "-m", "mmpi.cli", "run-rank",
        "--role", "head", "--host", spec.head_host, "--port", str(spec.head_port),
        "--expected-workers", str(spec.nprocs - 1),
        "--timeout", str(spec.registration_timeout), "--announce",
        "--", spec.kernel, *spec.kernel_args,
    ]


def _worker_slots(spec: LaunchSpec) -> list[tuple[WorkerKind, HostsFile | None, int]]:
    """(kind, hosts, host_index) per worker rank, round-robin over host slots."""
    hosts = parse_hosts_file(spec.hosts_file) if spec.hosts_file else None
    if hosts is not None and hosts.total_slots < spec.nprocs - 1:
        raise SpawnFailure(
            f"hosts file provides {hosts.total_slots} slots, need {spec.nprocs - 1}"
        )
    pool = (
        [i for i, e in enumerate(hosts.entries) for _ in range(e.slots)]
        if hosts is not None else []
    )
    return [
        (spec.kinds[w + 1], hosts, pool[w] if pool else -1)
        for w in range(spec.nprocs - 1)
    ]


_LOCAL_HOSTS = {"localhost", "127.0.0.1", "::1"}


def _spawn_worker(kind: WorkerKind, hosts: HostsFile | None, host_idx: int,
                  head_address: str, spec: LaunchSpec) -> subprocess.Popen:
    if kind == WorkerKind.NATIVE:
        argv = _native_worker_argv(head_address, spec.registration_timeout,
                                   spec.kernel, spec.kernel_args)
    else:
        argv = interpreted_worker_argv() + [
            "--head", head_address, "--", spec.kernel, *spec.kernel_args,
        ]
    if hosts is not None:
        entry = hosts.entries[host_idx]
        if entry.host not in _LOCAL_HOSTS:
            template = hosts.exec_template or "ssh {host} {cmd}"
            remote = template.format(host=entry.host, cmd=shlex.join(argv))
            argv = shlex.split(remote)
    try:
        return subprocess.Popen(
            argv, stdout=subprocess.DEVNULL, stderr=subprocess.PIPE, text=True,
        )
    except OSError as exc:
        raise SpawnFailure(f"cannot spawn {argv[0]}: {exc}") from None


def _pump(stream, sink: list[str],
          announce: "queue.Queue[str] | None" = None) -> threading.Thread:
    def pump():
        for line in stream:
            sink.append(line)
            if announce is not None and line.startswith("MMPI-LISTENING "):
                announce.put(line.split(None, 1)[1].strip())
        stream.close()

    t = threading.Thread(target=pump, daemon=True)
    t.start()
    return t


def _await_announce(head: subprocess.Popen, announce: "queue.Queue[str]",
                    timeout: float) -> str:
    deadline = time.monotonic() + timeout + 5.0
    while True:
        try:
            return announce.get(timeout=0.05)
        except queue.Empty:
            if head.poll() is not None:
                raise SpawnFailure(
                    f"head exited with {head.returncode} before announcing"
                ) from None
            if time.monotonic() > deadline:
                raise SpawnFailure("head never announced its address") from None


def launch(spec: LaunchSpec, run_timeout: float | None = None) -> LaunchResult:
    """Run one world to completion; returns rank 0's exit status and stdout.

    Tears the whole world down (kill + reap) on any failure, so no orphan
    processes outlive this call.
    """
    t_start = time.perf_counter()
    procs: list[subprocess.Popen] = []
    worker_errs: list[list[str]] = []
    head_out: list[str] = []
    head_err: list[str] = []
    announce: "queue.Queue[str]" = queue.Queue()
    try:
        try:
            head = subprocess.Popen(
                _head_argv(spec), stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                text=True,
            )
        except OSError as exc:
            raise SpawnFailure(f"cannot spawn head: {exc}") from None
        procs.append(head)
        pumps = [_pump(head.stdout, head_out), _pump(head.stderr, head_err, announce)]
        head_address = _await_announce(head, announce, spec.registration_timeout)

        for kind, hosts, idx in _worker_slots(spec):
            worker = _spawn_worker(kind, hosts, idx, head_address, spec)
            procs.append(worker)
            worker_errs.append([])
            pumps.append(_pump(worker.stderr, worker_errs[-1]))

        head.wait(timeout=run_timeout)
        for worker in procs[1:]:
            worker.wait(timeout=30.0)
        for pump in pumps:
            pump.join(timeout=5.0)
    except BaseException:
        for proc in procs:
            if proc.poll() is None:
                proc.kill()
        for proc in procs:
            proc.wait()
        raise
    total = time.perf_counter() - t_start

    stdout = "".join(head_out)
    stderr = "".join(head_err)
    if head.returncode != 0 and "RegistrationTimeout" in stderr:
        raise RegistrationTimeout(stderr.strip().splitlines()[-1])
    bad = [(i + 1, p.returncode) for i, p in enumerate(procs[1:]) if p.returncode != 0]
    if head.returncode == 0 and bad:
        detail = "; ".join(
            f"worker {i}: exit {code}, {''.join(worker_errs[i - 1]).strip()}"
            for i, code in bad
        )
        raise NonzeroWorkerExit(detail)
    return LaunchResult(head.returncode, stdout, stderr, total)

"""Benchmark sweeps: timing cells, medians, speedup/efficiency, CSV output.

Cells run strictly one at a time so they never contend for cores.  Two wall
clocks are recorded per cell: the whole launch (registration included) and
the barrier-delimited compute window reported by rank 0.  Speedup and
efficiency are computed from medians of the compute window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from statistics import median

from .errors import MissingBaseline, MmpiError
from .launcher import LaunchSpec, launch, kinds_for
from .run_rank import parse_result_line

RAW_HEADER = "kernel,nprocs,worker_kind,problem_size,repetition,total_wall_s,compute_wall_s,result_digest"
SUMMARY_HEADER = "kernel,nprocs,worker_kind,median_compute_s,speedup,efficiency"

KERNELS = ("pi", "primes")
KIND_AXES = ("native", "interpreted", "mixed")


@dataclass(frozen=True)
class BenchmarkResult:
    kernel: str
    nprocs: int
    worker_kind: str
    problem_size: int
    repetition_index: int
    total_wall_seconds: float
    compute_wall_seconds: float
    result_digest: str
    error: str | None = None


@dataclass(frozen=True)
class SummaryRow:
    kernel: str
    nprocs: int
    worker_kind: str
    median_compute_s: float
    speedup: float
    efficiency: float


@dataclass(frozen=True)
class SweepSpec:
    kernel: str
    problem_size: int
    seed: int = 0
    nprocs: tuple[int, ...] = (1,)
    worker_kinds: tuple[str, ...] = ("native",)
    repetitions: int = 3
    head_port: int = 0
    registration_timeout: float = 30.0

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for kind in self.worker_kinds:
            if kind not in KIND_AXES:
                raise ValueError(f"unknown worker kind {kind!r}")


def kernel_args_for(spec: SweepSpec) -> tuple[str, ...]:
    if spec.kernel == "pi":
        return ("--n", str(spec.problem_size), "--seed", str(spec.seed))
    return ("--lo", "0", "--hi", str(spec.problem_size))


def run_cell(spec: SweepSpec, kind: str, nprocs: int, rep: int) -> BenchmarkResult:
    launch_spec = LaunchSpec(
        nprocs=nprocs,
        kernel=spec.kernel,
        kernel_args=kernel_args_for(spec),
        kinds=kinds_for(kind, nprocs),
        head_port=spec.head_port,
        registration_timeout=spec.registration_timeout,
    )
    base = BenchmarkResult(
        kernel=spec.kernel, nprocs=nprocs, worker_kind=kind,
        problem_size=spec.problem_size, repetition_index=rep,
        total_wall_seconds=math.nan, compute_wall_seconds=math.nan,
        result_digest="error",
    )
    try:
        outcome = launch(launch_spec)
        if outcome.exit_status != 0:
            raise MmpiError(
                f"rank 0 exited with {outcome.exit_status}: {outcome.stderr.strip()}"
            )
        fields = parse_result_line(outcome.stdout)
    except MmpiError as exc:
        return replace(base, error=str(exc))
    return replace(
        base,
        total_wall_seconds=outcome.total_wall_seconds,
        compute_wall_seconds=float(fields["compute_s"]),
        result_digest=fields["digest"],
    )


def run_sweep(spec: SweepSpec) -> list[BenchmarkResult]:
    """One launch per (kind, nprocs, repetition) cell, strictly sequential.

    Failed cells come back with an error marker instead of being dropped.
    """
    results = []
    for kind in spec.worker_kinds:
        for nprocs in spec.nprocs:
            for rep in range(spec.repetitions):
                results.append(run_cell(spec, kind, nprocs, rep))
    return results


def summarize(results: list[BenchmarkResult]) -> list[SummaryRow]:
    """Median compute time per cell, normalized against that kind's P=1 cell."""
    cells: dict[tuple[str, str, int], list[float]] = {}
    for r in results:
        if r.error is None:
            cells.setdefault((r.kernel, r.worker_kind, r.nprocs), []).append(
                r.compute_wall_seconds
            )
    rows = []
    for (kernel, kind, nprocs), times in sorted(cells.items()):
        baseline = cells.get((kernel, kind, 1))
        if not baseline:
            raise MissingBaseline(f"no nprocs=1 cell for ({kernel}, {kind})")
        med = median(times)
        speedup = median(baseline) / med
        rows.append(SummaryRow(kernel, nprocs, kind, med, speedup, speedup / nprocs))
    return rows


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_csv(rows, path) -> None:
    """Write raw results or summary rows; byte-identical for identical input."""
    lines = []
    if rows and isinstance(rows[0], SummaryRow):
        lines.append(SUMMARY_HEADER)
        for r in sorted(rows, key=lambda r: (r.kernel, r.worker_kind, r.nprocs)):
            lines.append(
                f"{r.kernel},{r.nprocs},{r.worker_kind},"
                f"{_fmt(r.median_compute_s)},{_fmt(r.speedup)},{_fmt(r.efficiency)}"
            )
    else:
        lines.append(RAW_HEADER)
        key = lambda r: (r.kernel, r.worker_kind, r.nprocs, r.repetition_index)
        for r in sorted(rows, key=key):
            lines.append(
                f"{r.kernel},{r.nprocs},{r.worker_kind},{r.problem_size},"
                f"{r.repetition_index},{_fmt(r.total_wall_seconds)},"
                f"{_fmt(r.compute_wall_seconds)},{r.result_digest}"
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

"""Command-line entry points: launch one world, run a benchmark sweep, or
act as a single rank (used internally by the launcher)."""

from __future__ import annotations

import argparse
import os
import sys

from . import harness, launcher, run_rank
from .errors import MmpiError


def _split_kernel_argv(argv: list[str]) -> tuple[list[str], list[str]]:
    if "--" in argv:
        i = argv.index("--")
        return argv[:i], argv[i + 1:]
    return argv, []


def _cmd_launch(args, kernel_argv: list[str]) -> int:
    if not kernel_argv:
        print("no kernel given after --", file=sys.stderr)
        return 2
    spec = launcher.LaunchSpec(
        nprocs=args.np,
        kernel=kernel_argv[0],
        kernel_args=tuple(kernel_argv[1:]),
        kinds=launcher.kinds_for(args.workers, args.np),
        hosts_file=args.hosts,
        head_port=args.port,
        registration_timeout=args.timeout,
    )
    result = launcher.launch(spec)
    sys.stdout.write(result.stdout)
    if result.exit_status != 0:
        sys.stderr.write(result.stderr)
    return result.exit_status


def _cmd_bench(args, _kernel_argv) -> int:
    spec = harness.SweepSpec(
        kernel=args.kernel,
        problem_size=args.size,
        seed=args.seed,
        nprocs=tuple(int(p) for p in args.np.split(",")),
        worker_kinds=tuple(args.kinds.split(",")),
        repetitions=args.reps,
        head_port=args.port,
        registration_timeout=args.timeout,
    )
    results = harness.run_sweep(spec)
    harness.emit_csv(results, args.out)
    print(f"wrote {len(results)} rows to {args.out}")
    if args.summary:
        harness.emit_csv(harness.summarize(results), args.summary)
        print(f"wrote summary to {args.summary}")
    failed = [r for r in results if r.error is not None]
    for r in failed:
        print(f"cell ({r.worker_kind}, np={r.nprocs}, rep={r.repetition_index}) "
              f"failed: {r.error}", file=sys.stderr)
    return 1 if failed else 0


def _cmd_run_rank(args, kernel_argv: list[str]) -> int:
    if not kernel_argv:
        print("no kernel given after --", file=sys.stderr)
        return 2
    head = args.head or os.environ.get("MMPI_HEAD", "")
    if args.role == "worker" and not head:
        print("worker needs --head or MMPI_HEAD", file=sys.stderr)
        return 2
    return run_rank.rank_main(
        args.role,
        kernel=kernel_argv[0],
        kernel_args=kernel_argv[1:],
        head_address=head if args.role == "worker" else f"{args.host}:{args.port}",
        port=args.port,
        expected_workers=args.expected_workers,
        timeout=args.timeout,
        announce=args.announce,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmpi")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("launch", help="run one N-process world to completion")
    p.add_argument("--np", type=int, required=True)
    p.add_argument("--hosts", default=None)
    p.add_argument("--workers", default="native",
                   choices=["native", "interpreted", "mixed"])
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(fn=_cmd_launch)

    p = sub.add_parser("bench", help="sweep process counts and emit CSV")
    p.add_argument("--kernel", required=True, choices=["pi", "primes"])
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--np", default="1,2,4,8")
    p.add_argument("--kinds", default="native")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default=None)
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("run-rank", help="run a single rank (internal)")
    p.add_argument("--role", required=True, choices=["head", "worker"])
    p.add_argument("--head", default="")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--expected-workers", type=int, default=0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--announce", action="store_true")
    p.set_defaults(fn=_cmd_run_rank)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    own, kernel_argv = _split_kernel_argv(argv)
    args = build_parser().parse_args(own)
    try:
        return args.fn(args, kernel_argv)
    except MmpiError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Reproduce the two benchmark comparisons on this machine.

Sweeps process counts for both kernels (parallel-vs-sequential) and, when
the tsworker build is available, runs the native-vs-interpreted comparison.
Writes raw and summary CSVs under results/ and prints the summary tables.

    python scripts/run_comparisons.py [--quick]
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from mmpi.harness import SweepSpec, emit_csv, run_sweep, summarize
from mmpi.launcher import DEFAULT_INTERPRETED_WORKER


def show(rows):
    print(f"  {'kernel':8} {'kind':12} {'P':>3} {'median_s':>10} {'speedup':>8} {'eff':>6}")
    for r in rows:
        print(f"  {r.kernel:8} {r.worker_kind:12} {r.nprocs:>3} "
              f"{r.median_compute_s:>10.3f} {r.speedup:>8.2f} {r.efficiency:>6.2f}")


def run(name, spec, out_dir):
    print(f"== {name}")
    results = run_sweep(spec)
    emit_csv(results, out_dir / f"{name}.csv")
    rows = summarize(results)
    emit_csv(rows, out_dir / f"{name}_summary.csv")
    show(rows)
    failed = [r for r in results if r.error is not None]
    for r in failed:
        print(f"  cell np={r.nprocs} kind={r.worker_kind} failed: {r.error}")
    return not failed


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="smaller problem sizes, one repetition")
    args = parser.parse_args()
    reps = 1 if args.quick else 3
    pi_n = 10**6 if args.quick else 10**7
    primes_hi = 200_000 if args.quick else 2_000_000

    out_dir = REPO / "results"
    out_dir.mkdir(exist_ok=True)
    ok = True

    ok &= run("pi_scaling", SweepSpec(
        kernel="pi", problem_size=pi_n, seed=42,
        nprocs=(1, 2, 4, 8), repetitions=reps), out_dir)
    ok &= run("primes_scaling", SweepSpec(
        kernel="primes", problem_size=primes_hi,
        nprocs=(1, 2, 4, 8), repetitions=reps), out_dir)

    if DEFAULT_INTERPRETED_WORKER.exists():
        ok &= run("native_vs_interpreted", SweepSpec(
            kernel="primes", problem_size=primes_hi,
            nprocs=(1, 5), worker_kinds=("native", "interpreted"),
            repetitions=reps), out_dir)
    else:
        print("== native_vs_interpreted skipped (build tsworker/ first)")

    print(f"CSVs in {out_dir}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

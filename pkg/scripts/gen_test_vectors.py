#!/usr/bin/env python3
"""Regenerate tests/vectors/kernel_vectors.csv: 10,000 shared cases.

Every implementation's test suite consumes this one file, so expected values
come from independent sources: the standalone reference generator for the
LCG rows, sympy for primality, and the partition formula evaluated in
arbitrary-precision Python.

Row format: function,input,expected
  lcg_next         input=state (decimal u64)       expected=next output (decimal u64)
  unit_float       input=x (decimal u64)           expected=IEEE-754 bits, 16 hex digits
  is_prime         input=n (decimal)               expected=0 or 1
  partition_range  input=lo:hi:world_size:rank     expected=start:end
"""

import random
import struct
import sys
from pathlib import Path

import sympy

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "tests"))

from reference_lcg import ref_next, ref_unit

PER_FUNCTION = 2500


def main():
    rng = random.Random(20260811)
    rows = []

    states = [0, 1, 42, 2**64 - 1] + [rng.randrange(2**64) for _ in range(PER_FUNCTION - 4)]
    for s in states:
        rows.append(("lcg_next", str(s), str(ref_next(s))))

    xs = [0, 2**63, 2**64 - 1, 2**11 - 1] + [rng.randrange(2**64) for _ in range(PER_FUNCTION - 4)]
    for x in xs:
        bits = struct.pack(">d", ref_unit(x)).hex()
        rows.append(("unit_float", str(x), bits))

    ns = list(range(0, 64)) + [7919, 7920] + [rng.randrange(0, 5_000_000)
                                              for _ in range(PER_FUNCTION - 66)]
    for n in ns:
        rows.append(("is_prime", str(n), str(int(sympy.isprime(n)))))

    cases = [(0, 1000, 4, 0), (0, 1000, 4, 3), (0, 100, 1, 0), (0, 1001, 4, 3)]
    while len(cases) < PER_FUNCTION:
        lo = rng.randrange(0, 2**40)
        hi = lo + rng.randrange(0, 2**40)
        world = rng.randrange(1, 65)
        cases.append((lo, hi, world, rng.randrange(world)))
    for lo, hi, world, rank in cases:
        chunk = (hi - lo) // world
        start = lo + rank * chunk
        end = hi if rank == world - 1 else start + chunk
        rows.append(("partition_range", f"{lo}:{hi}:{world}:{rank}", f"{start}:{end}"))

    out = REPO / "tests" / "vectors" / "kernel_vectors.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="\n") as fh:
        fh.write("function,input,expected\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    print(f"wrote {len(rows)} vectors to {out}")


if __name__ == "__main__":
    main()

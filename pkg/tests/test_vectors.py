"""Shared-vector conformance: this implementation against the 10,000-case
file that the tsworker suite also consumes."""

import struct
from pathlib import Path

from mmpi.kernels import is_prime, partition_range
from mmpi.rng import RngState, lcg_next, unit_float

VECTORS = Path(__file__).parent / "vectors" / "kernel_vectors.csv"


def load_vectors():
    rows = VECTORS.read_text().splitlines()[1:]
    return [tuple(row.split(",")) for row in rows]


def test_vector_file_has_ten_thousand_cases():
    assert len(load_vectors()) == 10_000


def test_all_vectors_match():
    checked = {"lcg_next": 0, "unit_float": 0, "is_prime": 0, "partition_range": 0}
    for fn, arg, expected in load_vectors():
        if fn == "lcg_next":
            _, out = lcg_next(RngState(int(arg)))
            assert out == int(expected), arg
        elif fn == "unit_float":
            bits = struct.pack(">d", unit_float(int(arg))).hex()
            assert bits == expected, arg
        elif fn == "is_prime":
            assert is_prime(int(arg)) == bool(int(expected)), arg
        else:
            lo, hi, world, rank = map(int, arg.split(":"))
            part = partition_range(lo, hi, world, rank)
            assert f"{part.start}:{part.end}" == expected, arg
        checked[fn] += 1
    assert all(count == 2500 for count in checked.values())

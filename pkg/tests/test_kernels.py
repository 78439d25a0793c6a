import math

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from mmpi.errors import EmptySampleSet, InvalidRank
from mmpi.kernels import (
    PiEstimate,
    RangePartition,
    estimate_pi_seq,
    generate_primes_seq,
    is_prime,
    mc_hits,
    partition_range,
    primes_in_range,
    trial_share,
)
from mmpi.rng import RngState, lcg_next, unit_float

from oracles import sieve_primes


# -- Monte Carlo -------------------------------------------------------------

def test_mc_hits_zero_trials():
    assert mc_hits(0, 42) == 0


def test_mc_hits_frozen_oracle_value():
    # frozen from tests/reference_lcg.py
    assert mc_hits(1000, 42) == 793


def test_mc_hits_million_matches_pi():
    hits = mc_hits(10**6, 42)
    assert hits == 785627  # frozen from tests/reference_lcg.py
    assert abs(4 * hits / 10**6 - math.pi) < 0.01


def test_mc_hits_inlined_loop_equals_composed_primitives():
    # the hot loop inlines the recurrence; it must stay equivalent to
    # composing lcg_next and unit_float
    def composed(n, seed):
        s, hits = RngState(seed), 0
        for _ in range(n):
            s, xbits = lcg_next(s)
            s, ybits = lcg_next(s)
            x, y = unit_float(xbits), unit_float(ybits)
            if x * x + y * y <= 1.0:
                hits += 1
        return hits

    assert mc_hits(2000, 9) == composed(2000, 9)


def test_estimate_pi_seq_zero_tries():
    with pytest.raises(EmptySampleSet):
        estimate_pi_seq(0, 1)


def test_pi_estimate_arithmetic():
    assert PiEstimate(hits=785, tries=1000).estimate == pytest.approx(3.14)


def test_estimate_bounds():
    est = estimate_pi_seq(10_000, 3)
    assert 0.0 <= est.estimate <= 4.0


@given(st.integers(min_value=0, max_value=10**9),
       st.integers(min_value=1, max_value=64))
def test_trial_shares_cover_total(n_total, world_size):
    shares = [trial_share(n_total, world_size, r) for r in range(world_size)]
    assert sum(shares) == n_total
    assert max(shares) - min(shares) <= 1


# -- range partitioning ------------------------------------------------------

def test_partition_worked_example():
    assert partition_range(0, 1000, 4, 0) == RangePartition(0, 250)
    assert partition_range(0, 1000, 4, 3) == RangePartition(750, 1000)


def test_partition_single_rank():
    assert partition_range(0, 100, 1, 0) == RangePartition(0, 100)


def test_partition_last_rank_absorbs_remainder():
    assert partition_range(0, 1001, 4, 3) == RangePartition(750, 1001)


def test_partition_invalid_rank():
    with pytest.raises(InvalidRank):
        partition_range(0, 10, 4, 4)
    with pytest.raises(InvalidRank):
        partition_range(0, 10, 0, 0)


@given(st.integers(min_value=0, max_value=2**64 - 1),
       st.integers(min_value=0, max_value=2**20),
       st.integers(min_value=1, max_value=64))
def test_partitions_disjoint_ordered_cover(lo, span, world_size):
    hi = lo + span
    parts = [partition_range(lo, hi, world_size, r) for r in range(world_size)]
    assert parts[0].start == lo
    assert parts[-1].end == hi
    for a, b in zip(parts, parts[1:]):
        assert a.end == b.start  # contiguous, so disjoint and ordered
    assert sum(p.end - p.start for p in parts) == hi - lo


# -- primes ------------------------------------------------------------------

@pytest.mark.parametrize("n,expected", [
    (0, False), (1, False), (2, True), (3, True), (4, False),
    (9, False), (25, False), (7919, True),
])
def test_is_prime_cases(n, expected):
    assert is_prime(n) is expected


def test_trial_division_equals_sieve_elementwise():
    expected = set(sieve_primes(0, 20000))
    for n in range(20000):
        assert is_prime(n) == (n in expected), n


def test_primes_in_range_examples():
    assert primes_in_range(RangePartition(0, 10)) == [2, 3, 5, 7]
    assert primes_in_range(RangePartition(24, 29)) == []
    assert primes_in_range(RangePartition(0, 0)) == []


def test_generate_primes_seq_hundred():
    primes = generate_primes_seq(0, 100)
    assert len(primes) == 25
    assert primes == sieve_primes(0, 100)


def test_generate_primes_seq_offset_range():
    assert generate_primes_seq(90, 100) == sieve_primes(90, 100)


@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=3000),
       st.integers(min_value=0, max_value=500))
def test_primes_match_sieve_on_random_ranges(lo, span):
    assert generate_primes_seq(lo, lo + span) == sieve_primes(lo, lo + span)

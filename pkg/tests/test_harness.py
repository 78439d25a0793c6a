import math

import pytest

from mmpi.errors import MissingBaseline
from mmpi.harness import (
    RAW_HEADER,
    SUMMARY_HEADER,
    BenchmarkResult,
    SummaryRow,
    SweepSpec,
    emit_csv,
    run_sweep,
    summarize,
)
from mmpi.run_rank import fnv1a64


def row(kernel="pi", nprocs=1, kind="native", rep=0, compute=1.0, total=2.0,
        digest="aa", error=None):
    return BenchmarkResult(kernel, nprocs, kind, 1000, rep, total, compute,
                           digest, error)


# -- fnv digest ---------------------------------------------------------------

def test_fnv1a64_known_vectors():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


# -- summarize ----------------------------------------------------------------

def test_summary_perfect_scaling():
    results = [row(nprocs=1, compute=10.0), row(nprocs=4, compute=2.5)]
    rows = summarize(results)
    by_np = {r.nprocs: r for r in rows}
    assert by_np[4].speedup == pytest.approx(4.0)
    assert by_np[4].efficiency == pytest.approx(1.0)


def test_summary_half_efficiency():
    results = [row(nprocs=1, compute=10.0), row(nprocs=4, compute=5.0)]
    by_np = {r.nprocs: r for r in summarize(results)}
    assert by_np[4].speedup == pytest.approx(2.0)
    assert by_np[4].efficiency == pytest.approx(0.5)


def test_summary_uses_median_of_repetitions():
    results = [
        row(nprocs=1, rep=0, compute=10.0),
        row(nprocs=1, rep=1, compute=12.0),
        row(nprocs=1, rep=2, compute=50.0),  # outlier
        row(nprocs=2, rep=0, compute=6.0),
    ]
    by_np = {r.nprocs: r for r in summarize(results)}
    assert by_np[1].median_compute_s == pytest.approx(12.0)
    assert by_np[2].speedup == pytest.approx(2.0)


def test_summary_missing_baseline():
    with pytest.raises(MissingBaseline):
        summarize([row(nprocs=4)])


def test_summary_skips_error_rows():
    results = [
        row(nprocs=1, compute=10.0),
        row(nprocs=4, compute=math.nan, digest="error", error="boom"),
    ]
    rows = summarize(results)
    assert [r.nprocs for r in rows] == [1]


# -- CSV ----------------------------------------------------------------------

def test_emit_csv_empty_results(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == RAW_HEADER + "\n"


def test_emit_csv_deterministic(tmp_path):
    results = [row(nprocs=p, rep=r, compute=0.5 * p + r)
               for p in (4, 1, 2) for r in (1, 0)]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(results, a)
    emit_csv(list(reversed(results)), b)
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == RAW_HEADER
    assert len(lines) == 7
    # sorted by (kernel, kind, nprocs, repetition)
    nprocs_col = [int(line.split(",")[1]) for line in lines[1:]]
    assert nprocs_col == [1, 1, 2, 2, 4, 4]


def test_emit_csv_six_significant_digits(tmp_path):
    path = tmp_path / "f.csv"
    emit_csv([row(compute=0.123456789, total=1234.56789)], path)
    data_line = path.read_text().splitlines()[1]
    assert ",1234.57,0.123457," in data_line


def test_emit_summary_csv(tmp_path):
    rows = [SummaryRow("pi", 1, "native", 10.0, 1.0, 1.0),
            SummaryRow("pi", 4, "native", 2.5, 4.0, 1.0)]
    path = tmp_path / "s.csv"
    emit_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == SUMMARY_HEADER
    assert lines[1] == "pi,1,native,10,1,1"
    assert lines[2] == "pi,4,native,2.5,4,1"


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(kernel="nope", problem_size=10)
    with pytest.raises(ValueError):
        SweepSpec(kernel="pi", problem_size=10, repetitions=0)
    with pytest.raises(ValueError):
        SweepSpec(kernel="pi", problem_size=10, worker_kinds=("julia",))


# -- end-to-end sweep ---------------------------------------------------------

def test_sweep_nine_cells_share_digest(tmp_path):
    spec = SweepSpec(kernel="primes", problem_size=2000,
                     nprocs=(1, 2, 4), repetitions=3)
    results = run_sweep(spec)
    assert len(results) == 9
    assert all(r.error is None for r in results)
    assert len({r.result_digest for r in results}) == 1
    assert all(r.compute_wall_seconds <= r.total_wall_seconds for r in results)
    path = tmp_path / "sweep.csv"
    emit_csv(results, path)
    assert len(path.read_text().splitlines()) == 10


def test_sweep_single_cell():
    spec = SweepSpec(kernel="pi", problem_size=1000, seed=5,
                     nprocs=(1,), repetitions=1)
    results = run_sweep(spec)
    assert len(results) == 1
    assert results[0].error is None

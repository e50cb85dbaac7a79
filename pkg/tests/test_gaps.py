import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from andrica_lab.errors import (ArgumentOrderError, ContiguityError, DomainError,
                                EmptyTrackerError, InvariantViolation)
from andrica_lab.gaps import (GapChunk, GapRecord, RecordTracker, RunningAccumulator,
                              andrica_holds, fraction_below_one, gap_chunks, gap_form_holds,
                              gap_records, h_value, records, running_stats)
from andrica_lab.sieve import nth_prime, prime_array
import oracle

# 50-digit evaluations of sqrt(q) - sqrt(p)
H_2_3 = 0.317837245195782244725757617296
H_7_11 = 0.670873479290809258613316983032


def test_gap_records_limit_12():
    recs = list(gap_records(12))
    assert [r[:4] for r in recs] == [(1, 2, 3, 1), (2, 3, 5, 2), (3, 5, 7, 2), (4, 7, 11, 4)]
    assert recs[3].h == pytest.approx(H_7_11, abs=1e-15)


def test_gap_records_limit_3():
    (rec,) = gap_records(3)
    assert rec[:4] == (1, 2, 3, 1)
    assert rec.h == pytest.approx(H_2_3, abs=1e-16)
    with pytest.raises(DomainError):
        list(gap_records(2))


def test_h_value():
    assert h_value(2, 3) == pytest.approx(H_2_3, rel=1e-15)
    assert h_value(7, 11) == pytest.approx(H_7_11, rel=1e-15)
    with pytest.raises(ArgumentOrderError):
        h_value(7, 7)
    with pytest.raises(ArgumentOrderError):
        h_value(11, 7)


def test_h_value_no_cancellation_at_1e16():
    p, q = 10**16 + 61, 10**16 + 69
    exact = float(Decimal(q).sqrt() - Decimal(p).sqrt())
    assert h_value(p, q) == pytest.approx(exact, rel=1e-15)
    naive = math.sqrt(q) - math.sqrt(p)
    assert abs(naive - exact) / exact > 1e-3  # what the direct difference would lose


def test_running_stats_small():
    stats = list(running_stats(gap_records(12)))
    assert stats[0].h_bar == stats[0].sum_h == pytest.approx(H_2_3, abs=1e-16)
    assert stats[3].sum_g == 9 == 11 - 2
    assert stats[3].g_bar == 2.25
    assert stats[3].h_bar == pytest.approx(0.475602806995576200078311003115, abs=1e-15)


def test_running_stats_contiguity():
    recs = list(gap_records(30))
    with pytest.raises(ContiguityError):
        list(running_stats(recs[1:]))
    with pytest.raises(ContiguityError):
        list(running_stats(recs[:2] + recs[3:]))
    with pytest.raises(ContiguityError):
        records(recs[1:])


def test_running_stats_rejects_bad_average():
    fake = [GapRecord(1, 2, 3, 1, 1.5)]
    with pytest.raises(InvariantViolation):
        list(running_stats(fake))


def test_records_examples():
    small = records(gap_records(12))
    assert small.max_g_events == [(1, 1), (2, 2), (4, 4)]
    t3 = records(gap_records(3))
    assert (t3.count_h_below_one, t3.total) == (1, 1)
    big = records(gap_records(10**4))
    assert big.max_h_events[-1][0] == 4
    assert big.max_h_events[-1][1] == pytest.approx(H_7_11, abs=1e-15)


def test_records_match_oracle(oracle_rows_1e5):
    g_events, h_events = oracle.record_events(oracle_rows_1e5)
    tracker = records(gap_records(10**5))
    assert tracker.max_g_events == g_events
    assert [n for n, _ in tracker.max_h_events] == h_events


def test_fraction_below_one():
    assert fraction_below_one(records(gap_records(3))) == 1.0
    assert fraction_below_one(RecordTracker(count_h_below_one=1, total=2)) == 0.5
    with pytest.raises(EmptyTrackerError):
        fraction_below_one(RecordTracker())


def test_bulk_and_record_paths_agree():
    limit = 200_000
    acc = RunningAccumulator()
    tracker = RecordTracker()
    bulk_h_bar = []
    for chunk in gap_chunks(limit, segment_size=3001):
        block = acc.fold(chunk)
        tracker.update(block)
        bulk_h_bar.extend(block.h_bar.tolist())
    scalar = list(running_stats(gap_records(limit)))
    assert bulk_h_bar == [s.h_bar for s in scalar]
    assert tracker == records(gap_records(limit))


def test_record_invariants_to_1e6():
    for chunk in gap_chunks(10**6):
        assert np.all(chunk.q > chunk.p)
        assert np.all(chunk.g == chunk.q - chunk.p)
        assert np.all(chunk.h > 0)
        even = chunk.n >= 2
        assert np.all(chunk.g[even] % 2 == 0)
        assert np.all(chunk.g[~even] == 1)
        recon = chunk.h * (np.sqrt(chunk.q.astype(float)) + np.sqrt(chunk.p.astype(float)))
        assert np.all(np.abs(recon - chunk.g) <= 4 * np.spacing(chunk.g.astype(float)))


def test_telescoping_checked_every_row():
    acc = RunningAccumulator()
    for chunk in gap_chunks(2 * 10**6, segment_size=10_000):
        block = acc.fold(chunk)
        assert np.all(block.sum_g + 2 == block.q)
        rel = np.abs(block.sum_h + math.sqrt(2) - np.sqrt(block.q.astype(float))) / np.sqrt(block.q)
        assert rel.max() <= 1e-12
        assert np.all((block.h_bar > 0) & (block.h_bar < 1))
    assert acc.max_rel_error <= 1e-12


def test_fold_rejects_gaps_in_stream():
    chunks = list(gap_chunks(10_000, segment_size=500))
    acc = RunningAccumulator()
    acc.fold(chunks[0])
    with pytest.raises(ContiguityError):
        acc.fold(chunks[2])


def test_fold_detects_broken_telescoping():
    chunk = next(gap_chunks(1000))
    chunk.h = chunk.h.copy()
    chunk.h[5] *= 1.001
    with pytest.raises(InvariantViolation):
        RunningAccumulator().fold(chunk)


def test_stats_match_oracle(oracle_rows_1e5):
    rows = oracle_rows_1e5
    stats = list(running_stats(gap_records(10**5)))
    assert len(stats) == len(rows)
    for s, r in zip(stats, rows):
        assert s.sum_g == r["sum_g"]
        assert abs(Decimal(s.sum_h) - r["sum_h"]) <= Decimal(2) * Decimal(math.ulp(s.sum_h))


def test_asymptotic_band_1e3_to_1e6():
    # band endpoints validated against exact values at 10^3..10^6 before freezing
    limit = nth_prime(10**6 + 1)
    acc = RunningAccumulator()
    for chunk in gap_chunks(limit):
        block = acc.fold(chunk)
        sel = (block.n >= 1000) & (block.n <= 10**6)
        if not sel.any():
            continue
        n = block.n[sel].astype(float)
        g_ratio = block.g_bar[sel] / np.log(n)
        h_scaled = block.h_bar[sel] * np.sqrt(n / np.log(n))
        assert g_ratio.min() >= 1.0 and g_ratio.max() <= 1.4
        assert h_scaled.min() >= 0.9 and h_scaled.max() <= 1.2


@pytest.mark.parametrize("N", [10**3, 10**4, 10**5])
def test_andrica_values_shrink(N):
    primes = prime_array(nth_prime(2 * N + 1))
    chunk = GapChunk.from_primes(1, primes)
    h = chunk.h
    assert h[N - 1 : 2 * N].max() < h[: N - 1].max()


def exact_andrica(p: int, g: int) -> bool:
    return Decimal(p + g).sqrt() - Decimal(p).sqrt() < 1


@given(st.integers(2, 2**62), st.integers(1, 10**5))
def test_andrica_integer_forms_agree(p, g):
    a = andrica_holds(p, g)
    b = gap_form_holds(p, g)
    assert bool(a) == bool(b)


@given(st.integers(2, 10**15), st.integers(1, 10**5))
@settings(max_examples=300)
def test_andrica_integer_form_is_exact(p, g):
    assert bool(andrica_holds(p, g)) == exact_andrica(p, g)


@given(st.integers(1, 3 * 10**7))
def test_andrica_boundary_near_squares(r):
    # around q = (sqrt(p) + 1)^2 the verdict flips; p = r^2 makes the boundary an integer
    p = r * r
    for g in (2 * r, 2 * r + 1, 2 * r + 2):
        arr = andrica_holds(np.array([p], dtype=np.int64), np.array([g], dtype=np.int64))[0]
        form = gap_form_holds(np.array([p], dtype=np.int64), np.array([g], dtype=np.int64))[0]
        assert bool(arr) == bool(form) == exact_andrica(p, g)


def test_tracker_merge_matches_sequential():
    chunks = list(gap_chunks(300_000, segment_size=20_000))
    whole = RecordTracker()
    for c in chunks:
        whole.update(c)
    cut = len(chunks) // 2
    left, right = RecordTracker(), RecordTracker()
    for c in chunks[:cut]:
        left.update(c)
    offset = int(chunks[cut].n[0]) - 1
    for c in chunks[cut:]:
        right.update(GapChunk(c.n - offset, c.p, c.q, c.g, c.h))
    assert left.merge(right) == whole


def test_tracker_half_margin():
    t = RecordTracker()
    t._note_margin(1, 1)
    t._note_margin(-1, 2)
    assert not t.every_prefix_half_or_more
    assert records(gap_records(10**5)).every_prefix_half_or_more

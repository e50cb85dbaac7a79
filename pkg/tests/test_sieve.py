import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from andrica_lab.errors import DomainError, PlanMismatchError, ResourceLimitError
from andrica_lab.sieve import (PrimeEntry, SegmentPlan, first_primes, nth_prime, pi_approx,
                               prime_array, prime_count, prime_stream, primes_up_to)
from oracle import trial_division_primes

ORACLE_1E5 = trial_division_primes(10**5)


def test_primes_up_to_small():
    assert primes_up_to(1) == []
    assert primes_up_to(0) == []
    assert primes_up_to(10) == [(1, 2), (2, 3), (3, 5), (4, 7)]
    hundred = primes_up_to(100)
    assert len(hundred) == 25
    assert hundred[-1] == PrimeEntry(25, 97)


def test_primes_up_to_matches_trial_division_1e5():
    got = primes_up_to(10**5)
    assert [e.value for e in got] == ORACLE_1E5
    assert [e.index for e in got] == list(range(1, len(ORACLE_1E5) + 1))


@pytest.mark.parametrize("limit", [2, 3, 4, 5, 9, 25, 49, 121, 1000, 7919])
def test_dense_and_segmented_agree(limit):
    assert primes_up_to(limit, segmented=False) == primes_up_to(limit)


def test_dense_sieve_refuses_over_budget():
    with pytest.raises(ResourceLimitError):
        primes_up_to(10**6, segmented=False, memory_budget=1000)


def test_nth_prime():
    assert nth_prime(1) == 2
    assert nth_prime(6) == 13
    assert nth_prime(10**6) == 15485863
    with pytest.raises(DomainError):
        nth_prime(0)


def test_nth_prime_small_table():
    assert [nth_prime(n) for n in range(1, 12)] == ORACLE_1E5[:11]


def test_nth_prime_overflow():
    with pytest.raises(OverflowError):
        nth_prime(10**18)


def test_prime_count():
    assert prime_count(1) == 0
    assert prime_count(100) == 25
    assert prime_count(10**6) == 78498


@given(st.integers(min_value=1, max_value=len(ORACLE_1E5)))
@settings(max_examples=40, deadline=None)
def test_prime_count_inverts_nth_prime(n):
    assert prime_count(nth_prime(n)) == n


def test_prime_count_inverts_nth_prime_prefix():
    for n in range(1, 1500):
        assert prime_count(ORACLE_1E5[n - 1]) == n


def test_pi_approx():
    assert pi_approx(math.e) == pytest.approx(math.e, rel=1e-15)
    assert pi_approx(100) == pytest.approx(21.7147240951625913825564459458, rel=1e-14)
    assert pi_approx(10**6) == pytest.approx(72382.4136505419712751881531528, rel=1e-14)
    for bad in (1, 0.5, -3):
        with pytest.raises(DomainError):
            pi_approx(bad)


def test_prime_stream_examples():
    one = list(prime_stream(30, SegmentPlan(2, 30, 1000)))
    assert len(one) == 10 and one[-1] == (10, 29)
    plan = SegmentPlan(2, 30, 5)
    assert len(list(plan.segments())) == 3
    assert list(prime_stream(30, plan)) == one
    assert list(prime_stream(0, SegmentPlan(0, 0))) == []


def test_prime_stream_plan_mismatch():
    with pytest.raises(PlanMismatchError):
        list(prime_stream(30, SegmentPlan(5, 30, 4)))
    with pytest.raises(PlanMismatchError):
        list(prime_stream(30, SegmentPlan(2, 29, 4)))
    with pytest.raises(PlanMismatchError):
        SegmentPlan(10, 3)
    with pytest.raises(PlanMismatchError):
        SegmentPlan(0, 10, 0)


@given(lo=st.integers(0, 500), width=st.integers(0, 3000), size=st.integers(1, 700))
def test_plan_tiles_range(lo, width, size):
    plan = SegmentPlan(lo, lo + width, size)
    segs = list(plan.segments())
    assert segs[0][0] == lo and segs[-1][1] == lo + width
    assert all(a[1] + 1 == b[0] for a, b in zip(segs, segs[1:]))
    assert len(segs) == len(plan)


@given(limit=st.integers(0, 6000), size=st.integers(1, 2000), threads=st.sampled_from([1, 3]))
@settings(max_examples=60, deadline=None)
def test_segmentation_invariance(limit, size, threads):
    plan = SegmentPlan(min(2, limit), limit, size)
    assert list(prime_stream(limit, plan, threads=threads)) == primes_up_to(limit)


def test_stream_entries_increase():
    entries = list(prime_stream(5000, SegmentPlan(0, 5000, 37)))
    assert entries[0] == (1, 2)
    assert all(a.index < b.index and a.value < b.value for a, b in zip(entries, entries[1:]))


def test_bound_sanity_bracket_up_to_1e5():
    k = np.arange(6, 10**5 + 1, dtype=np.float64)
    p = first_primes(10**5)[5:].astype(np.float64)
    ln = np.log(k)
    lower = k * (ln + np.log(ln) - 1)
    upper = k * (ln + np.log(ln))
    assert np.all(lower < p) and np.all(p < upper)
    for kk in (6, 100, 9592, 10**5):
        ln = math.log(kk)
        assert kk * (ln + math.log(ln) - 1) < nth_prime(kk) < kk * (ln + math.log(ln))


def test_first_primes_and_array():
    assert first_primes(5).tolist() == [2, 3, 5, 7, 11]
    assert prime_array(1).size == 0
    np.testing.assert_array_equal(prime_array(10**5), ORACLE_1E5)

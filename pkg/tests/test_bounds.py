import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from andrica_lab.bounds import (BOUNDS, DUSART_UPPER_FROM, check_bounds, classify,
                                evaluate_bounds, simple_estimate)
from andrica_lab.errors import DomainError
from andrica_lab.sieve import first_primes, nth_prime

mpmath.mp.dps = 30


def mp_bounds(k):
    k = mpmath.mpf(k)
    ln, lnln = mpmath.log(k), mpmath.log(mpmath.log(k))
    return {
        "rosser_lower": k * ln,
        "bracket86_lower": k * (ln + lnln - 1),
        "bracket86_upper": k * (ln + lnln),
        "dusart_lower": k * (ln + lnln - 1 + (lnln - mpmath.mpf("2.1")) / ln),
        "dusart_upper": k * (ln + lnln - 1 + (lnln - 2) / ln),
    }


def test_k6_bracket():
    ev = evaluate_bounds(6, 13)
    assert ev.bracket86_lower == pytest.approx(8.249745300064284, rel=1e-14)
    assert ev.bracket86_upper == pytest.approx(14.249745300064284, rel=1e-14)
    assert ev.bracket86_lower < 13 < ev.bracket86_upper
    assert ev.dusart_upper is None
    assert ev.satisfied() == {"rosser_lower": True, "bracket86_lower": True,
                              "bracket86_upper": True, "dusart_lower": True, "square_upper": True}


def test_domains_gate_values():
    ev = evaluate_bounds(1, 2)
    assert ev.bracket86_lower is None and ev.dusart_lower is None
    assert ev.rosser_lower == 0.0
    assert "square_upper" not in ev.satisfied()
    with pytest.raises(DomainError):
        evaluate_bounds(0, 2)


@pytest.mark.parametrize("k", [6, 16, 100, 9592, 10**5, DUSART_UPPER_FROM, 10**6])
def test_bound_values_match_high_precision(k):
    ev = evaluate_bounds(k, nth_prime(k))
    for bound_id, exact in mp_bounds(k).items():
        value = getattr(ev, bound_id)
        if value is not None:
            assert value == pytest.approx(float(exact), rel=1e-13)


def test_clean_sweep_1e5():
    report = check_bounds(10**5)
    assert report.entries == []
    assert report.checked["rosser_lower"] == 10**5
    assert report.checked["bracket86_lower"] == 10**5 - 5
    assert report.checked["dusart_lower"] == 10**5 - 2
    assert report.checked["dusart_upper"] == 0
    assert report.checked["square_upper"] == 10**5 - 1


def test_clean_sweep_past_dusart_start():
    report = check_bounds(750_000)
    assert report.entries == []
    assert report.checked["dusart_upper"] == 750_000 - DUSART_UPPER_FROM + 1


def test_square_from_one_exposes_p1():
    report = check_bounds(1000, square_from=1)
    assert [(e.bound_id, e.k, e.p_k, e.kind) for e in report.entries] == [
        ("square_upper", 1, 2, "violation")]


def test_report_json_shape():
    doc = json.loads(json.dumps(check_bounds(10, square_from=1).to_dict()))
    assert set(doc) == {"k_max", "checked", "report"}
    assert set(doc["report"][0]) == {"bound_id", "k", "p_k", "bound_value", "kind"}


def test_bound_ordering():
    k = np.arange(16, 10**6, dtype=np.float64)
    rosser = BOUNDS["rosser_lower"].formula(k)
    lo = BOUNDS["bracket86_lower"].formula(k)
    hi = BOUNDS["bracket86_upper"].formula(k)
    assert np.all(rosser < lo) and np.all(lo < hi)
    k6 = np.arange(6, 16, dtype=np.float64)
    assert np.all(BOUNDS["bracket86_lower"].formula(k6) < BOUNDS["bracket86_upper"].formula(k6))


def test_dusart_tighter_than_bracket():
    k = np.arange(DUSART_UPPER_FROM, 10**6, 997, dtype=np.float64)
    assert np.all(BOUNDS["dusart_upper"].formula(k) < BOUNDS["bracket86_upper"].formula(k))
    assert np.all(BOUNDS["dusart_lower"].formula(k) > BOUNDS["bracket86_lower"].formula(k))


@given(st.integers(1, 10**12))
def test_simple_estimate_is_rosser_value(k):
    assert simple_estimate(k) == evaluate_bounds(k, 2).rosser_lower


def test_simple_estimate_under_p_k():
    primes = first_primes(10**5)
    k = np.arange(1, primes.size + 1)
    assert all(simple_estimate(int(kk)) < p for kk, p in zip(k[::37], primes[::37]))


def test_classify_ulp_band():
    spec = BOUNDS["rosser_lower"]
    v = np.array([100.0, 100.0, 100.0])
    p = np.array([100, 99, 101])
    viol, indet = classify(spec, p, v)
    assert viol.tolist() == [False, True, False]
    assert indet.tolist() == [True, False, False]
    viol, indet = classify(BOUNDS["bracket86_upper"], p, v)
    assert viol.tolist() == [False, False, True]


def test_check_bounds_domain():
    with pytest.raises(DomainError):
        check_bounds(0)

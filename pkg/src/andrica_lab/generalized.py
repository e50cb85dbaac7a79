"""Power-x generalisation of the Andrica expression and its threshold inequality.

For 0 < x < 1 the threshold problem is ln n < n^b with b = 1/x - 1.  With
n = e^t this is t < e^(bt); the convex function e^(bt) - t has its minimum
(1 + ln b) / b at t = -ln(b) / b, so the inequality holds for every real
n >= 1 exactly when b > 1/e.  For b < 1/e it fails on the real interval
between the two roots of t = e^(bt), and the threshold n0 is the first
integer past the larger root (or 1 if that interval holds no integer).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from decimal import Decimal, localcontext
from typing import Optional

import numpy as np

from .claims import ClaimAccumulator, ClaimOutcome
from .errors import ArgumentOrderError, ConvergenceError, DomainError
from .gaps import gap_chunks, h_value
from .numerics import INT64_MAX, sqrt_int_array
from .sieve import DEFAULT_SEGMENT_SIZE

TANGENCY_B = 1.0 / math.e
TANGENT_TOL = 1e-12
MAX_BISECTIONS = 200
SCAN_BELOW = 10
SCAN_ABOVE = 1000
_DIGITS = 60


def _check_x(x: float) -> None:
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x}")


def h_general(p: int, q: int, x: float) -> float:
    """q^x - p^x, computed as p^x * expm1(x * ln(q/p)) to avoid cancellation.

    At x = 1/2 the square-root identity is exact, so the Andrica value is
    used directly; the expm1 form would be a few ulp away from it.
    """
    _check_x(x)
    if x == 0.5:
        return h_value(p, q)
    if q <= p:
        raise ArgumentOrderError(f"need q > p, got p={p}, q={q}")
    if p < 2:
        raise DomainError(f"p must be >= 2, got {p}")
    return float(p) ** x * math.expm1(x * math.log1p((q - p) / p))


def h_general_array(p: np.ndarray, q: np.ndarray, x: float) -> np.ndarray:
    _check_x(x)
    if x == 0.5:
        return (q - p) / (sqrt_int_array(q) + sqrt_int_array(p))
    pf = p.astype(np.float64)
    return pf ** x * np.expm1(x * np.log1p((q - p) / pf))


@dataclass(frozen=True)
class ExponentAnalysis:
    x: float
    b: float
    n0: Optional[int]  # None when the threshold exceeds the 64-bit range
    always_holds: bool
    tangent: bool
    real_crossing: Optional[float] = None  # larger real root of ln n = n^b
    log_crossing: Optional[float] = None  # its natural log, finite even when n overflows
    last_failure: Optional[int] = None  # largest integer with ln n >= n^b

    def to_dict(self) -> dict:
        return asdict(self)


def _dec_b(x: float) -> Decimal:
    return Decimal(1) / Decimal(x) - 1


def _gap(t: Decimal, b: Decimal) -> Decimal:
    """e^(bt) - t: positive where ln n < n^b holds at n = e^t."""
    return (b * t).exp() - t


def _bisect(lo: Decimal, hi: Decimal, b: Decimal, rising: bool) -> Decimal:
    """Root of e^(bt) - t on [lo, hi]; ``rising`` says the sign goes - to +."""
    for _ in range(MAX_BISECTIONS):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if (_gap(mid, b) > 0) == rising:
            hi = mid
        else:
            lo = mid
    return hi if rising else lo


def crossing_roots(b: float | Decimal) -> tuple[Decimal, Decimal]:
    """Both real roots t1 < t2 of t = e^(bt) for 0 < b < 1/e, in high precision."""
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        b = Decimal(b)
        if not 0 < b < Decimal(1) / Decimal(1).exp():
            raise DomainError(f"two crossings exist only for 0 < b < 1/e, got {b}")
        e = Decimal(1).exp()
        t_min = -b.ln() / b
        hi = 2 * e
        for _ in range(MAX_BISECTIONS):
            if _gap(hi, b) > 0:
                break
            hi *= 2
        else:
            raise ConvergenceError(f"no upper bracket for b={b}")
        if _gap(e, b) > 0:
            raise ConvergenceError(f"lower bracket endpoint e is not below the curve for b={b}")
        t2 = _bisect(max(e, t_min), hi, b, rising=True)
        t1 = _bisect(Decimal(0), min(e, t_min), b, rising=False)
        return +t1, +t2


def inequality_holds(n: int, b: Decimal) -> bool:
    """ln n < n^b, decided at high precision."""
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        ln = Decimal(n).ln()
        return ln < (b * ln).exp()


def threshold_n0(x: float) -> ExponentAnalysis:
    _check_x(x)
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        return _threshold(x, _dec_b(x))


def threshold_for_b(b: float) -> ExponentAnalysis:
    """Same analysis parametrised directly by b > 0."""
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    with localcontext() as ctx:
        ctx.prec = _DIGITS
        return _threshold(1.0 / (1.0 + b), Decimal(b))


def _threshold(x: float, b: Decimal) -> ExponentAnalysis:
    bf = float(b)
    tangent = abs(bf - TANGENCY_B) <= TANGENT_TOL
    if tangent:
        # the curves touch only at n = e^e ~ 15.15, which is not an integer
        return ExponentAnalysis(x, bf, 1, False, True, math.exp(math.e), math.e)
    if bf > TANGENCY_B:
        return ExponentAnalysis(x, bf, 1, True, False)
    t1, t2 = crossing_roots(b)
    lower_n = t1.exp()
    upper_n = t2.exp()
    last = int(upper_n.to_integral_value(rounding="ROUND_FLOOR"))
    log_crossing = float(t2)
    real_crossing = float(upper_n) if log_crossing < 709.0 else None
    if last < lower_n:
        return ExponentAnalysis(x, bf, 1, False, False, real_crossing, log_crossing, None)
    candidate = last + 1
    if candidate > INT64_MAX:
        return ExponentAnalysis(x, bf, None, False, False, real_crossing, log_crossing, None)
    n0, failure = confirm_threshold(candidate, b)
    return ExponentAnalysis(x, bf, n0, False, False, real_crossing, log_crossing, failure)


def confirm_threshold(candidate: int, b: Decimal) -> tuple[int, int]:
    """Integer scan over [candidate - 10, candidate + 1000] pinning n0.

    Returns (n0, last failing integer).  Raises if the scan finds the
    inequality failing above the candidate, or holding throughout the
    window below it, since either means the root is misplaced.
    """
    lo = max(1, candidate - SCAN_BELOW)
    verdicts = [(n, inequality_holds(n, b)) for n in range(lo, candidate + SCAN_ABOVE + 1)]
    failures = [n for n, ok in verdicts if not ok]
    if not failures:
        raise ConvergenceError(f"no failing integer near the crossing {candidate}")
    last_failure = failures[-1]
    if last_failure >= candidate:
        raise ConvergenceError(f"inequality fails at {last_failure} beyond candidate {candidate}")
    return last_failure + 1, last_failure


def check_generalized(x: float, limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                      threads: int | None = 1) -> ClaimOutcome:
    """Count gap records with p_(n+1)^x - p_n^x >= 1."""
    _check_x(x)
    if limit < 3:
        raise DomainError(f"limit must be >= 3, got {limit}")
    acc = ClaimAccumulator(f"ANDRICA_GENERAL[x={x!r}]")
    for chunk in gap_chunks(limit, segment_size, threads):
        hx = h_general_array(chunk.p, chunk.q, x)
        acc.update(chunk.n, np.ones(len(chunk), dtype=bool), hx < 1.0, hx, np.ones(len(chunk)))
    return acc.outcome()

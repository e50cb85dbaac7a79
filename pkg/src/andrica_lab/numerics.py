"""Floating-point helpers: compensated summation and square roots of 64-bit integers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

EXACT_FLOAT_INT = 2**53
INT64_MAX = 2**63 - 1


@dataclass
class CompensatedSum:
    """Neumaier (improved Kahan) running sum.

    ``value`` is the naive float sum and ``compensation`` the accumulated
    rounding error; ``total`` is their rounded sum.  The sequence of float
    operations depends only on the order of the addends, so splitting a
    stream across several ``extend`` calls is bit-identical to one call.
    """

    value: float = 0.0
    compensation: float = 0.0

    @property
    def total(self) -> float:
        return self.value + self.compensation

    def add(self, x: float) -> float:
        s = self.value
        t = s + x
        if abs(s) >= abs(x):
            self.compensation += (s - t) + x
        else:
            self.compensation += (x - t) + s
        self.value = t
        return t + self.compensation

    def extend(self, xs: Iterable[float]) -> np.ndarray:
        """Add every element of ``xs``; return the running totals after each."""
        s = self.value
        c = self.compensation
        out = []
        append = out.append
        for x in xs.tolist() if isinstance(xs, np.ndarray) else xs:
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
            append(s + c)
        self.value = s
        self.compensation = c
        return np.array(out, dtype=np.float64)

    def merge(self, other: "CompensatedSum") -> "CompensatedSum":
        """Associative combine used when partial sums come from parallel chunks."""
        out = CompensatedSum(self.value, self.compensation)
        out.add(other.value)
        out.compensation += other.compensation
        return out

    def copy(self) -> "CompensatedSum":
        return CompensatedSum(self.value, self.compensation)


def sqrt_int(n: int) -> float:
    """Square root of a non-negative integer, rounded to float.

    Below 2**53 the integer converts exactly and ``math.sqrt`` is correctly
    rounded.  Above that, the float estimate gets one Newton step in exact
    rational arithmetic.
    """
    n = int(n)
    if n < 0:
        raise ValueError("sqrt of a negative integer")
    if n < EXACT_FLOAT_INT:
        return math.sqrt(n)
    r = Fraction(math.sqrt(float(n)))
    r = r + (n - r * r) / (2 * r)
    return float(r)


def sqrt_int_array(values: np.ndarray) -> np.ndarray:
    """Vectorised ``sqrt_int`` over an int64 array."""
    values = np.asarray(values, dtype=np.int64)
    out = np.sqrt(values.astype(np.float64))
    big = values >= EXACT_FLOAT_INT
    if big.any():
        idx = np.flatnonzero(big)
        out[idx] = [sqrt_int(v) for v in values[idx].tolist()]
    return out


def isqrt_array(values: np.ndarray) -> np.ndarray:
    """Floor square root of an int64 array, exact for every value < 2**63."""
    values = np.asarray(values, dtype=np.int64)
    r = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    # float estimate can be off by one either way near 2**53 and above;
    # compare via floor division so (r + 1)**2 never overflows int64
    for _ in range(2):
        safe = np.maximum(r, 1)
        r = np.where((r > 0) & (r > values // safe), r - 1, r)
        r1 = r + 1
        r = np.where(r1 <= values // r1, r1, r)
    return r


def ulp(x: float) -> float:
    return math.ulp(x)

"""Segmented odd-only sieve of Eratosthenes.

Everything downstream (gap records, bounds, claims) consumes primes through
``prime_arrays``, which yields one ascending int64 array per segment.  The
``PrimeEntry``-level functions are thin wrappers over it.
"""
from __future__ import annotations

import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple, TypeVar

import numpy as np

from .errors import DomainError, PlanMismatchError, ResourceLimitError
from .numerics import INT64_MAX

DEFAULT_SEGMENT_SIZE = 1 << 18  # odd candidates per segment (256 KiB mask)
DENSE_MEMORY_BUDGET = 1 << 30  # bytes allowed for an unsegmented mask
SMALL_PRIMES = (2, 3, 5, 7, 11)

T = TypeVar("T")
R = TypeVar("R")


class PrimeEntry(NamedTuple):
    index: int
    value: int


@dataclass(frozen=True)
class SegmentPlan:
    """Tiling of [lo, hi] into windows of ``segment_size`` odd candidates."""

    lo: int
    hi: int
    segment_size: int = DEFAULT_SEGMENT_SIZE

    def __post_init__(self):
        if self.segment_size < 1:
            raise PlanMismatchError(f"segment_size must be positive, got {self.segment_size}")
        if self.lo < 0 or self.lo > self.hi:
            raise PlanMismatchError(f"invalid plan range [{self.lo}, {self.hi}]")
        if self.hi > INT64_MAX:
            raise OverflowError(f"plan upper end {self.hi} exceeds the 64-bit range")

    @classmethod
    def covering(cls, limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> "SegmentPlan":
        return cls(0, max(limit, 0), segment_size)

    @classmethod
    def split(cls, lo: int, hi: int, parts: int) -> "SegmentPlan":
        """Plan with (at most) ``parts`` segments over [lo, hi]."""
        width = hi - lo + 1
        return cls(lo, hi, max(1, -(-width // (2 * parts))))

    @property
    def span(self) -> int:
        return 2 * self.segment_size

    def segments(self) -> Iterator[tuple[int, int]]:
        """Inclusive (lo, hi) windows, ascending, tiling [lo, hi] exactly."""
        lo = self.lo
        while lo <= self.hi:
            hi = min(lo + self.span - 1, self.hi)
            yield lo, hi
            lo = hi + 1

    def __len__(self) -> int:
        return -(-(self.hi - self.lo + 1) // self.span)


def small_primes(limit: int) -> np.ndarray:
    """Dense sieve for base primes; ``limit`` is at most a few times 10^9 in practice."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi] using odd base primes ``base`` covering sqrt(hi)."""
    if hi < 2 or lo > hi:
        return np.zeros(0, dtype=np.int64)
    head = [2] if lo <= 2 <= hi else []
    first = max(lo, 3)
    first += 1 - (first & 1)
    if first > hi:
        return np.array(head, dtype=np.int64)
    count = (hi - first) // 2 + 1
    mask = np.ones(count, dtype=bool)
    root = math.isqrt(hi)
    for p in base[1 : np.searchsorted(base, root, side="right")].tolist():
        start = max(p * p, -(-first // p) * p)
        if not start & 1:
            start += p
        if start <= hi:
            mask[(start - first) // 2 :: p] = False
    odd = first + 2 * np.flatnonzero(mask).astype(np.int64)
    if head:
        return np.concatenate([np.array(head, dtype=np.int64), odd])
    return odd


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("ANDRICA_LAB_THREADS", "1") or 1)
    return max(1, int(threads))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> Iterator[R]:
    """Map in a thread pool but yield results in input order, with a bounded window."""
    if threads <= 1:
        for item in items:
            yield fn(item)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= 2 * threads:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def prime_arrays(
    lo: int,
    hi: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int | None = 1,
) -> Iterator[np.ndarray]:
    """Yield the primes of [lo, hi] as ascending int64 arrays, one per segment."""
    if hi < 2 or lo > hi:
        return
    plan = SegmentPlan(max(lo, 0), hi, segment_size)
    base = small_primes(math.isqrt(hi))
    yield from ordered_map(lambda seg: sieve_segment(seg[0], seg[1], base), plan.segments(),
                           resolve_threads(threads))


def prime_array(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | None = 1) -> np.ndarray:
    """All primes <= limit as one int64 array."""
    parts = list(prime_arrays(0, limit, segment_size, threads))
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


def primes_up_to(limit: int, segmented: bool = True,
                 memory_budget: int = DENSE_MEMORY_BUDGET) -> list[PrimeEntry]:
    if limit < 0:
        raise DomainError("limit must be non-negative")
    if limit > INT64_MAX:
        raise OverflowError(f"limit {limit} exceeds the 64-bit range")
    if segmented:
        values = prime_array(limit)
    else:
        if limit // 2 > memory_budget:
            raise ResourceLimitError(
                f"dense sieve to {limit} needs ~{limit // 2} bytes, budget is {memory_budget}")
        values = small_primes(limit)
    return [PrimeEntry(i, v) for i, v in enumerate(values.tolist(), start=1)]


def prime_stream(limit: int, plan: SegmentPlan, threads: int | None = 1) -> Iterator[PrimeEntry]:
    """Primes <= limit, produced segment by segment according to ``plan``."""
    if plan.lo > 2 or plan.hi != limit:
        raise PlanMismatchError(
            f"plan [{plan.lo}, {plan.hi}] does not tile [2, {limit}]")
    index = 0
    for chunk in prime_arrays(plan.lo, plan.hi, plan.segment_size, threads):
        for v in chunk.tolist():
            index += 1
            yield PrimeEntry(index, v)


def nth_prime_upper(n: int) -> int:
    """Integer sieve window covering p_n: n(ln n + ln ln n) for n >= 6."""
    if n < 6:
        return SMALL_PRIMES[n - 1]
    ln = math.log(n)
    bound = math.floor(n * (ln + math.log(ln))) + 1
    if bound > INT64_MAX:
        raise OverflowError(f"sieve window for p_{n} exceeds the 64-bit range")
    return bound


def nth_prime(n: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | None = 1) -> int:
    if n < 1:
        raise DomainError("n must be >= 1")
    if n < 6:
        return SMALL_PRIMES[n - 1]
    seen = 0
    for chunk in prime_arrays(0, nth_prime_upper(n), segment_size, threads):
        if seen + chunk.size >= n:
            return int(chunk[n - seen - 1])
        seen += chunk.size
    raise ArithmeticError(f"p_{n} not found below its upper bound")  # pragma: no cover


def first_primes(count: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | None = 1) -> np.ndarray:
    """p_1 .. p_count as an int64 array."""
    if count < 1:
        return np.zeros(0, dtype=np.int64)
    limit = nth_prime_upper(max(count, 6))
    return prime_array(limit, segment_size, threads)[:count]


def prime_count(x: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | None = 1) -> int:
    if x < 0:
        raise DomainError("x must be non-negative")
    return sum(int(c.size) for c in prime_arrays(0, x, segment_size, threads))


def pi_approx(x: float) -> float:
    """The n / ln n approximation to the prime counting function."""
    if x <= 1:
        raise DomainError(f"pi_approx needs x > 1, got {x}")
    return x / math.log(x)

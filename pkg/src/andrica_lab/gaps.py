"""Gap records, Andrica values and their running statistics.

The bulk path works on ``GapChunk`` arrays (one per sieve segment) and folds
them through ``RunningAccumulator``; the record-at-a-time functions
(``gap_records``, ``running_stats``, ``records``) are the same arithmetic
over Python objects and are what small callers and tests use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (ArgumentOrderError, ContiguityError, DomainError,
                     EmptyTrackerError, InvariantViolation)
from .numerics import CompensatedSum, INT64_MAX, isqrt_array, sqrt_int, sqrt_int_array
from .sieve import DEFAULT_SEGMENT_SIZE, prime_arrays

SQRT2 = math.sqrt(2.0)
DEFAULT_H_TOLERANCE = 1e-12


class GapRecord(NamedTuple):
    n: int
    p_n: int
    p_next: int
    g: int
    h: float


class RunningStats(NamedTuple):
    n: int
    sum_g: int
    sum_h: float
    sum_h_error: float
    g_bar: float
    h_bar: float


def h_value(p: int, q: int) -> float:
    """sqrt(q) - sqrt(p), evaluated as (q - p) / (sqrt(q) + sqrt(p))."""
    if q <= p:
        raise ArgumentOrderError(f"need q > p, got p={p}, q={q}")
    if p < 2:
        raise DomainError(f"p must be >= 2, got {p}")
    return (q - p) / (sqrt_int(q) + sqrt_int(p))


def andrica_holds(p, g):
    """Exact test of sqrt(p + g) - sqrt(p) < 1.

    Equivalent to (g - 1)**2 < 4p, and for integers to (g - 1)**2 // 4 < p.
    Works on Python ints or int64 arrays.
    """
    d = g - 1
    return (d * d) // 4 < p


def gap_form_holds(p, g):
    """Exact test of g < 1 + 2*sqrt(p) through the integer square root r = isqrt(p).

    2*sqrt(p) lies in [2r, 2r + 2); with d = g - 1 the inequality holds iff
    d < 2r, or d == 2r and p is not a square, or d == 2r + 1 and r*r + r < p.
    """
    if isinstance(p, np.ndarray):
        r = isqrt_array(p)
    else:
        r = math.isqrt(p)
    d = g - 1
    return (d < 2 * r) | ((d == 2 * r) & (r * r != p)) | ((d == 2 * r + 1) & (r * r + r < p))


@dataclass
class GapChunk:
    """Consecutive gap records n .. n + len - 1 in array form."""

    n: np.ndarray
    p: np.ndarray
    q: np.ndarray
    g: np.ndarray
    h: np.ndarray

    def __len__(self) -> int:
        return int(self.n.size)

    @classmethod
    def from_primes(cls, first_index: int, primes: np.ndarray) -> "GapChunk":
        """Records for consecutive primes, the first of which is p_{first_index}."""
        p = primes[:-1]
        q = primes[1:]
        g = q - p
        sp = sqrt_int_array(p)
        sq = sqrt_int_array(q)
        n = np.arange(first_index, first_index + p.size, dtype=np.int64)
        return cls(n, p, q, g, g / (sq + sp))

    def records(self) -> Iterator[GapRecord]:
        for row in zip(self.n.tolist(), self.p.tolist(), self.q.tolist(),
                       self.g.tolist(), self.h.tolist()):
            yield GapRecord(*row)


def gap_chunks(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int | None = 1,
    start_index: int = 0,
    start_prime: int | None = None,
) -> Iterator[GapChunk]:
    """Gap records with p_{n+1} <= limit, one chunk per sieve segment.

    ``start_index``/``start_prime`` resume after a prime already consumed
    (p_{start_index} = start_prime); records then begin at n = start_index.
    """
    if limit > INT64_MAX:
        raise OverflowError(f"limit {limit} exceeds the 64-bit range")
    lo = 0 if start_prime is None else start_prime + 1
    carry, carry_index = start_prime, start_index
    for primes in prime_arrays(lo, limit, segment_size, threads):
        if primes.size == 0:
            continue
        if carry is None:
            chunk = GapChunk.from_primes(1, primes)
        else:
            chunk = GapChunk.from_primes(carry_index, np.concatenate([[carry], primes]))
        carry = int(primes[-1])
        carry_index += primes.size
        if len(chunk):
            yield chunk


def gap_records(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                threads: int | None = 1) -> Iterator[GapRecord]:
    if limit < 3:
        raise DomainError(f"gap_records needs limit >= 3, got {limit}")
    for chunk in gap_chunks(limit, segment_size, threads):
        yield from chunk.records()


@dataclass
class StatsBlock:
    """A GapChunk plus the running statistics after each of its records."""

    n: np.ndarray
    p: np.ndarray
    q: np.ndarray
    g: np.ndarray
    h: np.ndarray
    sum_g: np.ndarray
    sum_h: np.ndarray
    g_bar: np.ndarray
    h_bar: np.ndarray
    h_bar_prev: np.ndarray  # NaN where n == 1

    def __len__(self) -> int:
        return int(self.n.size)

    def stats(self) -> Iterator[RunningStats]:
        # per-row compensation terms are not kept in the bulk path
        for n, sg, sh, gb, hb in zip(self.n.tolist(), self.sum_g.tolist(), self.sum_h.tolist(),
                                     self.g_bar.tolist(), self.h_bar.tolist()):
            yield RunningStats(n, sg, sh, math.nan, gb, hb)


@dataclass
class RunningAccumulator:
    """Ordered fold of gap chunks into running gap and Andrica sums."""

    n: int = 0
    sum_g: int = 0
    sum_h: CompensatedSum = field(default_factory=CompensatedSum)
    last_prime: int | None = None
    check_invariants: bool = True
    h_tolerance: float = DEFAULT_H_TOLERANCE
    max_rel_error: float = 0.0

    @property
    def h_bar(self) -> float:
        return self.sum_h.total / self.n if self.n else math.nan

    def fold(self, chunk: GapChunk) -> StatsBlock:
        if len(chunk) == 0:
            raise ContiguityError("empty chunk")
        if int(chunk.n[0]) != self.n + 1:
            raise ContiguityError(f"expected record n={self.n + 1}, got n={int(chunk.n[0])}")
        if self.last_prime is not None and int(chunk.p[0]) != self.last_prime:
            raise ContiguityError(f"record n={self.n + 1} does not start at p={self.last_prime}")
        h_bar_prev0 = self.h_bar
        sum_g = self.sum_g + np.cumsum(chunk.g)
        sum_h = self.sum_h.extend(chunk.h)
        nf = chunk.n.astype(np.float64)
        h_bar = sum_h / nf
        h_bar_prev = np.empty_like(h_bar)
        h_bar_prev[0] = h_bar_prev0
        h_bar_prev[1:] = h_bar[:-1]
        block = StatsBlock(chunk.n, chunk.p, chunk.q, chunk.g, chunk.h,
                           sum_g, sum_h, sum_g / nf, h_bar, h_bar_prev)
        if self.check_invariants:
            self._check(block)
        self.n = int(chunk.n[-1])
        self.sum_g = int(sum_g[-1])
        self.last_prime = int(chunk.q[-1])
        return block

    def _check(self, block: StatsBlock) -> None:
        bad = np.flatnonzero(block.sum_g + 2 != block.q)
        if bad.size:
            i = bad[0]
            raise InvariantViolation(
                f"sum_g + 2 != p_(n+1) at n={block.n[i]}: {block.sum_g[i]} + 2 vs {block.q[i]}")
        sq = sqrt_int_array(block.q)
        rel = np.abs(block.sum_h + SQRT2 - sq) / sq
        worst = int(np.argmax(rel))
        self.max_rel_error = max(self.max_rel_error, float(rel[worst]))
        if rel[worst] > self.h_tolerance:
            raise InvariantViolation(
                f"sum_h telescoping error {rel[worst]:.3e} at n={block.n[worst]} "
                f"(sum_h={block.sum_h[worst]!r}, sqrt(p_next)={sq[worst]!r})")
        out = np.flatnonzero(~((block.h_bar > 0) & (block.h_bar < 1)))
        if out.size:
            i = out[0]
            raise InvariantViolation(f"h_bar={block.h_bar[i]!r} outside (0, 1) at n={block.n[i]}")

    def to_dict(self) -> dict:
        return {"n": self.n, "sum_g": self.sum_g, "sum_h_value": self.sum_h.value,
                "sum_h_compensation": self.sum_h.compensation, "last_prime": self.last_prime}

    @classmethod
    def from_dict(cls, d: dict, **kwargs) -> "RunningAccumulator":
        return cls(n=d["n"], sum_g=d["sum_g"],
                   sum_h=CompensatedSum(d["sum_h_value"], d["sum_h_compensation"]),
                   last_prime=d["last_prime"], **kwargs)


def _check_contiguous(expected: int, rec: GapRecord, last_q: int | None) -> None:
    if rec.n != expected:
        raise ContiguityError(f"expected record n={expected}, got n={rec.n}")
    if last_q is not None and rec.p_n != last_q:
        raise ContiguityError(f"record n={rec.n} starts at {rec.p_n}, previous ended at {last_q}")


def running_stats(records: Iterable[GapRecord], check_invariants: bool = True) -> Iterator[RunningStats]:
    """Running gap and Andrica averages after each record (records must start at n = 1)."""
    acc = CompensatedSum()
    sum_g = 0
    last_q = None
    for expected, rec in enumerate(records, start=1):
        _check_contiguous(expected, rec, last_q)
        last_q = rec.p_next
        sum_g += rec.g
        total = acc.add(rec.h)
        h_bar = total / rec.n
        if check_invariants and not 0.0 < h_bar < 1.0:
            raise InvariantViolation(f"h_bar={h_bar!r} outside (0, 1) at n={rec.n}")
        yield RunningStats(rec.n, sum_g, total, acc.compensation, sum_g / rec.n, h_bar)


@dataclass
class RecordTracker:
    """Record (maximal) gaps and Andrica values, plus the below-one count."""

    max_g_events: list[tuple[int, int]] = field(default_factory=list)
    max_h_events: list[tuple[int, float]] = field(default_factory=list)
    count_h_below_one: int = 0
    total: int = 0
    # min over prefixes k of (2 * below_k - k); >= 0 iff every prefix has half or more below one
    min_half_margin: int = 0
    min_half_margin_n: int = 0

    def update(self, chunk: GapChunk | StatsBlock) -> None:
        if len(chunk) == 0:
            return
        if int(chunk.n[0]) != self.total + 1:
            raise ContiguityError(f"expected record n={self.total + 1}, got n={int(chunk.n[0])}")
        self._events(chunk.n, chunk.g, self.max_g_events, int)
        self._events(chunk.n, chunk.h, self.max_h_events, float)
        below = andrica_holds(chunk.p, chunk.g)
        prefix = self.count_h_below_one + np.cumsum(below)
        margin = 2 * prefix - chunk.n
        i = int(np.argmin(margin))
        self._note_margin(int(margin[i]), int(chunk.n[i]))
        self.count_h_below_one = int(prefix[-1])
        self.total = int(chunk.n[-1])

    def _note_margin(self, margin: int, n: int) -> None:
        if self.min_half_margin_n == 0 or margin < self.min_half_margin:
            self.min_half_margin, self.min_half_margin_n = margin, n

    @staticmethod
    def _events(n: np.ndarray, values: np.ndarray, events: list, cast) -> None:
        start = events[-1][1] if events else -np.inf
        running = np.maximum(np.maximum.accumulate(values), start)
        prev = np.empty(running.size, dtype=np.float64)
        prev[0] = start
        prev[1:] = running[:-1]
        for i in np.flatnonzero(values > prev).tolist():
            events.append((int(n[i]), cast(values[i])))

    def merge(self, other: "RecordTracker") -> "RecordTracker":
        """Combine with the tracker of the records immediately following this one.

        ``other`` must have been built with n counted from its own start
        (n = 1, 2, ...); its event indices are shifted by ``self.total``.
        """
        out = RecordTracker(list(self.max_g_events), list(self.max_h_events),
                            self.count_h_below_one + other.count_h_below_one,
                            self.total + other.total, self.min_half_margin, self.min_half_margin_n)
        for mine, theirs in ((out.max_g_events, other.max_g_events),
                             (out.max_h_events, other.max_h_events)):
            for n, v in theirs:
                if not mine or v > mine[-1][1]:
                    mine.append((n + self.total, v))
        if other.total:
            base = 2 * self.count_h_below_one - self.total
            out._note_margin(base + other.min_half_margin, self.total + other.min_half_margin_n)
        return out

    @property
    def every_prefix_half_or_more(self) -> bool:
        return self.min_half_margin >= 0

    @property
    def max_h(self) -> tuple[int, float] | None:
        return self.max_h_events[-1] if self.max_h_events else None

    @property
    def max_g(self) -> tuple[int, int] | None:
        return self.max_g_events[-1] if self.max_g_events else None

    def to_dict(self) -> dict:
        return {
            "max_g_events": [list(e) for e in self.max_g_events],
            "max_h_events": [list(e) for e in self.max_h_events],
            "count_h_below_one": self.count_h_below_one,
            "total": self.total,
            "min_half_margin": self.min_half_margin,
            "min_half_margin_n": self.min_half_margin_n,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecordTracker":
        return cls([tuple(e) for e in d["max_g_events"]], [tuple(e) for e in d["max_h_events"]],
                   d["count_h_below_one"], d["total"], d["min_half_margin"], d["min_half_margin_n"])


def records(stream: Iterable[GapRecord]) -> RecordTracker:
    tracker = RecordTracker()
    max_g, max_h = 0, 0.0
    last_q = None
    for expected, rec in enumerate(stream, start=1):
        _check_contiguous(expected, rec, last_q)
        last_q = rec.p_next
        if rec.g > max_g:
            max_g = rec.g
            tracker.max_g_events.append((rec.n, rec.g))
        if rec.h > max_h:
            max_h = rec.h
            tracker.max_h_events.append((rec.n, rec.h))
        tracker.total += 1
        if andrica_holds(rec.p_n, rec.g):
            tracker.count_h_below_one += 1
        tracker._note_margin(2 * tracker.count_h_below_one - tracker.total, rec.n)
    return tracker


def fraction_below_one(tracker: RecordTracker) -> float:
    if tracker.total < 1:
        raise EmptyTrackerError("tracker has no records")
    return tracker.count_h_below_one / tracker.total

"""The claim ledger: each asserted inequality as a named predicate over the gap stream.

Every claim is evaluated per record n on a ``StatsBlock`` and accumulated
into a ``ClaimAccumulator`` (checked count, violation count, first
violation, a short sample of violating n).  Claims that are expected to
fail are data, not bugs: their counterexamples are the output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import DomainError, InvariantViolation, UnknownClaimError
from .gaps import RunningAccumulator, StatsBlock, andrica_holds, gap_chunks, gap_form_holds
from .numerics import sqrt_int_array
from .sieve import DEFAULT_SEGMENT_SIZE

DEFAULT_BAND = (0.9, 1.2)
DEFAULT_BAND_START = 1000
VIOLATION_SAMPLE = 32


class ClaimId(str, Enum):
    ANDRICA = "ANDRICA"
    ANDRICA_GAP_FORM = "ANDRICA_GAP_FORM"
    AVG_IN_UNIT = "AVG_IN_UNIT"
    AVG_MONOTONE = "AVG_MONOTONE"
    H_LT_AVG = "H_LT_AVG"
    GAP_LT_2LN = "GAP_LT_2LN"
    AVG_ASYMPTOTIC = "AVG_ASYMPTOTIC"

    @classmethod
    def parse(cls, tag: str) -> "ClaimId":
        try:
            return cls(tag.strip().upper())
        except ValueError:
            raise UnknownClaimError(tag) from None


class ExpectedStatus(str, Enum):
    HOLDS = "holds-at-desk-scale"
    FAILS = "fails-with-counterexamples"
    BAND = "band-check"


@dataclass(frozen=True)
class CatalogEntry:
    claim: ClaimId
    source: str
    statement: str
    expected: ExpectedStatus


CATALOG: dict[ClaimId, CatalogEntry] = {
    e.claim: e
    for e in (
        CatalogEntry(ClaimId.ANDRICA, "Andrica's conjecture",
                     "h_n = sqrt(p_(n+1)) - sqrt(p_n) < 1 for all n", ExpectedStatus.HOLDS),
        CatalogEntry(ClaimId.ANDRICA_GAP_FORM, "Andrica's conjecture, gap form",
                     "g_n < 1 + 2 sqrt(p_n)", ExpectedStatus.HOLDS),
        CatalogEntry(ClaimId.AVG_IN_UNIT, "mean Andrica value in the unit interval",
                     "0 < h_bar_n < 1", ExpectedStatus.HOLDS),
        CatalogEntry(ClaimId.AVG_MONOTONE, "mean Andrica value decreasing in n",
                     "h_bar_n < h_bar_(n-1)", ExpectedStatus.FAILS),
        CatalogEntry(ClaimId.H_LT_AVG, "Andrica value below the running mean",
                     "h_n < (sqrt(p_(n+1)) - sqrt(2)) / n", ExpectedStatus.FAILS),
        CatalogEntry(ClaimId.GAP_LT_2LN, "gap below twice the mean gap, read literally",
                     "g_n < 2 ln n (intended asymptotically; n = 1 counts as a violation)",
                     ExpectedStatus.FAILS),
        CatalogEntry(ClaimId.AVG_ASYMPTOTIC, "mean Andrica value ~ 1/sqrt(n / ln n)",
                     "h_bar_n * sqrt(n / ln n) within the configured band for n >= band start",
                     ExpectedStatus.BAND),
    )
}


def claim_catalog() -> list[tuple[ClaimId, str, str]]:
    return [(e.claim, e.source, e.expected.value) for e in CATALOG.values()]


def expected_true(claim: ClaimId) -> bool:
    """Claims whose violation makes a verification run fail (exit status 1)."""
    return CATALOG[claim].expected in (ExpectedStatus.HOLDS, ExpectedStatus.BAND)


@dataclass(frozen=True)
class Violation:
    n: int
    lhs: float
    rhs: float


@dataclass
class ClaimOutcome:
    claim: str
    checked_n: int
    violations: int
    first_violation: Optional[Violation]
    satisfied_fraction: float
    band: Optional[tuple[float, float]] = None
    violation_sample: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        fv = self.first_violation
        out = {
            "claim": self.claim,
            "checked_n": self.checked_n,
            "violations": self.violations,
            "first_violation": None if fv is None else {"n": fv.n, "lhs": fv.lhs, "rhs": fv.rhs},
            "satisfied_fraction": self.satisfied_fraction,
            "violation_sample": list(self.violation_sample),
        }
        if self.band is not None:
            out["band"] = list(self.band)
        return out


@dataclass
class ClaimAccumulator:
    """Per-claim counts; combines associatively across consecutive ranges."""

    claim: str
    checked: int = 0
    violations: int = 0
    first_violation: Optional[Violation] = None
    sample: list[int] = field(default_factory=list)
    band: Optional[tuple[float, float]] = None

    def update(self, n: np.ndarray, checked: np.ndarray, holds: np.ndarray,
               lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Count one block; returns the indices of violating rows."""
        bad = np.flatnonzero(checked & ~holds)
        self.checked += int(np.count_nonzero(checked))
        self.violations += int(bad.size)
        if bad.size:
            if self.first_violation is None:
                i = bad[0]
                self.first_violation = Violation(int(n[i]), float(lhs[i]), float(rhs[i]))
            room = VIOLATION_SAMPLE - len(self.sample)
            if room > 0:
                self.sample.extend(n[bad[:room]].tolist())
        return bad

    def merge(self, other: "ClaimAccumulator") -> "ClaimAccumulator":
        firsts = [v for v in (self.first_violation, other.first_violation) if v is not None]
        return ClaimAccumulator(
            self.claim,
            self.checked + other.checked,
            self.violations + other.violations,
            min(firsts, key=lambda v: v.n) if firsts else None,
            sorted(set(self.sample) | set(other.sample))[:VIOLATION_SAMPLE],
            self.band,
        )

    def outcome(self) -> ClaimOutcome:
        # an empty range is vacuously satisfied
        frac = (self.checked - self.violations) / self.checked if self.checked else 1.0
        return ClaimOutcome(self.claim, self.checked, self.violations, self.first_violation,
                            frac, self.band, list(self.sample))

    def to_dict(self) -> dict:
        fv = self.first_violation
        return {
            "claim": self.claim,
            "checked": self.checked,
            "violations": self.violations,
            "first_violation": None if fv is None else [fv.n, fv.lhs, fv.rhs],
            "sample": list(self.sample),
            "band": None if self.band is None else list(self.band),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClaimAccumulator":
        fv = d["first_violation"]
        return cls(d["claim"], d["checked"], d["violations"],
                   None if fv is None else Violation(*fv), list(d["sample"]),
                   None if d["band"] is None else tuple(d["band"]))


# -- predicates -------------------------------------------------------------
# Each returns (checked, holds, lhs, rhs) as arrays aligned with the block.

@dataclass(frozen=True)
class ClaimSettings:
    band: tuple[float, float] = DEFAULT_BAND
    band_start: int = DEFAULT_BAND_START

    def __post_init__(self):
        if not self.band[0] < self.band[1]:
            raise DomainError(f"band must satisfy lo < hi, got {self.band}")


def _all(b: StatsBlock) -> np.ndarray:
    return np.ones(len(b), dtype=bool)


def _andrica(b, s):
    return _all(b), andrica_holds(b.p, b.g), b.h, np.ones(len(b))


def _gap_form(b, s):
    return _all(b), gap_form_holds(b.p, b.g), b.g.astype(np.float64), 1.0 + 2.0 * sqrt_int_array(b.p)


def _avg_in_unit(b, s):
    holds = (b.h_bar > 0.0) & (b.h_bar < 1.0)
    return _all(b), holds, b.h_bar, np.where(b.h_bar > 0.0, 1.0, 0.0)


def _avg_monotone(b, s):
    checked = b.n >= 2
    with np.errstate(invalid="ignore"):
        holds = b.h_bar < b.h_bar_prev
    return checked, holds, b.h_bar, b.h_bar_prev


def _h_lt_avg(b, s):
    # (sqrt(p_(n+1)) - sqrt(2)) / n is the running mean by telescoping; using the
    # compensated mean keeps n = 1 an exact tie
    return _all(b), b.h < b.h_bar, b.h, b.h_bar


def _gap_lt_2ln(b, s):
    rhs = 2.0 * np.log(b.n.astype(np.float64))
    return _all(b), b.g < rhs, b.g.astype(np.float64), rhs


def _avg_asymptotic(b, s):
    checked = b.n >= max(s.band_start, 2)
    nf = b.n.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = b.h_bar * np.sqrt(nf / np.log(nf))
    lo, hi = s.band
    holds = (scaled >= lo) & (scaled <= hi)
    return checked, holds, scaled, np.where(scaled < lo, lo, hi)


PREDICATES: dict[ClaimId, Callable] = {
    ClaimId.ANDRICA: _andrica,
    ClaimId.ANDRICA_GAP_FORM: _gap_form,
    ClaimId.AVG_IN_UNIT: _avg_in_unit,
    ClaimId.AVG_MONOTONE: _avg_monotone,
    ClaimId.H_LT_AVG: _h_lt_avg,
    ClaimId.GAP_LT_2LN: _gap_lt_2ln,
    ClaimId.AVG_ASYMPTOTIC: _avg_asymptotic,
}


def _check_monotone_algebra(b: StatsBlock, bad: np.ndarray) -> None:
    """h_bar_n >= h_bar_(n-1) must coincide with h_n >= h_bar_(n-1) on every violation.

    The two sides differ by a factor n, so near-ties within a few n*eps of
    the mean are accepted as rounding rather than disagreement.
    """
    if not bad.size:
        return
    h, prev, n = b.h[bad], b.h_bar_prev[bad], b.n[bad].astype(np.float64)
    slack = 4.0 * n * np.finfo(np.float64).eps * prev
    wrong = np.flatnonzero(h < prev - slack)
    if wrong.size:
        i = bad[wrong[0]]
        raise InvariantViolation(
            f"mean-monotonicity violation at n={b.n[i]} without h_n >= h_bar_(n-1): "
            f"h={b.h[i]!r}, h_bar_prev={b.h_bar_prev[i]!r}")


class ClaimLedger:
    """Accumulators for a set of claims, folded over consecutive StatsBlocks."""

    def __init__(self, claims: Iterable[ClaimId | str] | None = None,
                 settings: ClaimSettings | None = None):
        self.settings = settings or ClaimSettings()
        ids = list(ClaimId) if claims is None else [
            c if isinstance(c, ClaimId) else ClaimId.parse(c) for c in claims]
        self.accumulators: dict[ClaimId, ClaimAccumulator] = {
            c: ClaimAccumulator(c.value, band=self.settings.band if c is ClaimId.AVG_ASYMPTOTIC else None)
            for c in ids
        }

    def update(self, block: StatsBlock) -> None:
        for claim, acc in self.accumulators.items():
            checked, holds, lhs, rhs = PREDICATES[claim](block, self.settings)
            bad = acc.update(block.n, checked, holds, np.broadcast_to(lhs, block.n.shape),
                             np.broadcast_to(rhs, block.n.shape))
            if claim is ClaimId.AVG_MONOTONE:
                _check_monotone_algebra(block, bad)

    def outcomes(self) -> list[ClaimOutcome]:
        return [acc.outcome() for acc in self.accumulators.values()]

    def outcome(self, claim: ClaimId) -> ClaimOutcome:
        return self.accumulators[claim].outcome()

    def merge(self, other: "ClaimLedger") -> "ClaimLedger":
        out = ClaimLedger(self.accumulators, self.settings)
        out.accumulators = {c: a.merge(other.accumulators[c]) for c, a in self.accumulators.items()}
        return out

    def to_dict(self) -> dict:
        return {
            "band": list(self.settings.band),
            "band_start": self.settings.band_start,
            "claims": {c.value: a.to_dict() for c, a in self.accumulators.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClaimLedger":
        # catalog order, whatever order the serialised mapping came in
        ids = [c for c in ClaimId if c.value in d["claims"]]
        ledger = cls(ids, ClaimSettings(tuple(d["band"]), d["band_start"]))
        ledger.accumulators = {c: ClaimAccumulator.from_dict(d["claims"][c.value]) for c in ids}
        return ledger


def _run(ledger: ClaimLedger, limit: int, segment_size: int, threads: int | None) -> ClaimLedger:
    if limit < 3:
        raise DomainError(f"claim checks need limit >= 3, got {limit}")
    acc = RunningAccumulator()
    for chunk in gap_chunks(limit, segment_size, threads):
        ledger.update(acc.fold(chunk))
    return ledger


def check_claim(claim: ClaimId | str, limit: int, settings: ClaimSettings | None = None,
                segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | None = 1) -> ClaimOutcome:
    if not isinstance(claim, ClaimId):
        claim = ClaimId.parse(claim)
    return _run(ClaimLedger([claim], settings), limit, segment_size, threads).outcome(claim)


def verify_all(limit: int, settings: ClaimSettings | None = None,
               segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | None = 1) -> list[ClaimOutcome]:
    """Every claim over the gaps with p_(n+1) <= limit, in a single pass."""
    return _run(ClaimLedger(None, settings), limit, segment_size, threads).outcomes()


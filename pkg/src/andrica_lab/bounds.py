"""Explicit bounds on the k-th prime, each checked only inside its published domain."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .sieve import DEFAULT_SEGMENT_SIZE, first_primes

DUSART_UPPER_FROM = 688383


@dataclass(frozen=True)
class BoundSpec:
    """One bound: its side, strictness, and the first k it applies to."""

    bound_id: str
    side: str  # "lower" or "upper"
    strict: bool
    k_min: int
    formula: Callable[[np.ndarray], np.ndarray]


def _lnln(k):
    return np.log(np.log(k))


BOUNDS: dict[str, BoundSpec] = {
    b.bound_id: b
    for b in (
        BoundSpec("rosser_lower", "lower", True, 1, lambda k: k * np.log(k)),
        BoundSpec("bracket86_lower", "lower", True, 6,
                  lambda k: k * (np.log(k) + _lnln(k) - 1.0)),
        BoundSpec("bracket86_upper", "upper", True, 6,
                  lambda k: k * (np.log(k) + _lnln(k))),
        BoundSpec("dusart_lower", "lower", False, 3,
                  lambda k: k * (np.log(k) + _lnln(k) - 1.0 + (_lnln(k) - 2.1) / np.log(k))),
        BoundSpec("dusart_upper", "upper", False, DUSART_UPPER_FROM,
                  lambda k: k * (np.log(k) + _lnln(k) - 1.0 + (_lnln(k) - 2.0) / np.log(k))),
        BoundSpec("square_upper", "upper", True, 2, lambda k: k * k),
    )
}


@dataclass(frozen=True)
class BoundEvaluation:
    k: int
    p_k: int
    rosser_lower: float
    bracket86_lower: Optional[float]
    bracket86_upper: Optional[float]
    dusart_lower: Optional[float]
    dusart_upper: Optional[float]
    square_upper: int
    simple: float

    def satisfied(self) -> dict[str, bool]:
        """Verdict per applicable bound (not-applicable bounds are omitted)."""
        out = {}
        for bound_id, spec in BOUNDS.items():
            value = getattr(self, bound_id)
            if value is None or self.k < spec.k_min:
                continue
            out[bound_id] = _holds(spec, float(self.p_k), float(value))
        return out


def _holds(spec: BoundSpec, p: float, value: float) -> bool:
    if spec.side == "lower":
        return p > value if spec.strict else p >= value
    return p < value if spec.strict else p <= value


def evaluate_bounds(k: int, p_k: int) -> BoundEvaluation:
    """All bound expressions at k; those whose domain excludes k come back as None."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    kk = np.float64(k)

    def gated(bound_id):
        spec = BOUNDS[bound_id]
        return float(spec.formula(kk)) if k >= spec.k_min else None

    rosser = float(BOUNDS["rosser_lower"].formula(kk))
    return BoundEvaluation(
        k=k,
        p_k=p_k,
        rosser_lower=rosser,
        bracket86_lower=gated("bracket86_lower"),
        bracket86_upper=gated("bracket86_upper"),
        dusart_lower=gated("dusart_lower"),
        dusart_upper=gated("dusart_upper"),
        square_upper=k * k,
        simple=simple_estimate(k),
    )


def simple_estimate(k: int) -> float:
    """k ln k, the asymptotic stand-in for p_k (same evaluator as the Rosser bound)."""
    kk = np.float64(k)
    return float(kk * np.log(kk))


@dataclass(frozen=True)
class BoundReportEntry:
    bound_id: str
    k: int
    p_k: int
    bound_value: float
    kind: str  # "violation" | "indeterminate"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BoundsReport:
    k_max: int
    checked: dict[str, int]
    entries: list[BoundReportEntry]

    @property
    def violations(self) -> list[BoundReportEntry]:
        return [e for e in self.entries if e.kind == "violation"]

    @property
    def indeterminate(self) -> list[BoundReportEntry]:
        return [e for e in self.entries if e.kind == "indeterminate"]

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "checked": self.checked,
                "report": [e.to_dict() for e in self.entries]}


def classify(spec: BoundSpec, p: np.ndarray, value: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Masks (violation, indeterminate) for p against a bound value.

    Margins within one ulp of the bound are indeterminate whatever the
    strictness; only a miss by more than an ulp counts as a violation.
    """
    pf = p.astype(np.float64)
    value = np.asarray(value, dtype=np.float64)
    margin = pf - value if spec.side == "lower" else value - pf
    tol = np.spacing(np.abs(value))
    return margin < -tol, np.abs(margin) <= tol


def check_bounds(
    k_max: int,
    square_from: int = 2,
    primes: np.ndarray | None = None,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int | None = 1,
) -> BoundsReport:
    """Check every bound at k = 1 .. k_max inside its domain.

    ``square_from`` moves the start of the p_k < k^2 check; the default 2
    skips the known exception p_1 = 2 > 1.
    """
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    if primes is None:
        primes = first_primes(k_max, segment_size, threads)
    primes = np.asarray(primes[:k_max], dtype=np.int64)
    k = np.arange(1, primes.size + 1, dtype=np.int64)
    checked: dict[str, int] = {}
    entries: list[BoundReportEntry] = []
    for bound_id, spec in BOUNDS.items():
        k_min = square_from if bound_id == "square_upper" else spec.k_min
        k_min = max(k_min, 1)
        if k_min > k_max:
            checked[bound_id] = 0
            continue
        ks = k[k_min - 1:]
        ps = primes[k_min - 1:]
        if bound_id == "square_upper":
            # exact integer comparison; k^2 fits int64 for any k_max we can sieve
            values = ks * ks
            viol = ps >= values
            indet = np.zeros_like(viol)
        else:
            values = spec.formula(ks.astype(np.float64))
            viol, indet = classify(spec, ps, values)
        checked[bound_id] = int(ks.size)
        for kind, mask in (("violation", viol), ("indeterminate", indet)):
            for i in np.flatnonzero(mask).tolist():
                entries.append(BoundReportEntry(bound_id, int(ks[i]), int(ps[i]),
                                                float(values[i]), kind))
    entries.sort(key=lambda e: (e.k, e.bound_id))
    return BoundsReport(k_max, checked, entries)

"""Run configuration, resumable run state and checkpoint persistence."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from .claims import ClaimId, ClaimLedger, ClaimSettings, expected_true
from .errors import CheckpointCorruptError, CheckpointVersionError, ConfigError
from .gaps import DEFAULT_H_TOLERANCE, RecordTracker, RunningAccumulator, StatsBlock, gap_chunks
from .numerics import INT64_MAX
from .sieve import DEFAULT_SEGMENT_SIZE, resolve_threads

SCHEMA_VERSION = 1
DEFAULT_VERIFY_LIMIT = 10**8


@dataclass
class RunConfig:
    limit: int = DEFAULT_VERIFY_LIMIT
    segment_size: int = DEFAULT_SEGMENT_SIZE
    parallelism: Optional[int] = None  # None: ANDRICA_LAB_THREADS or 1
    h_tolerance: float = DEFAULT_H_TOLERANCE
    band_lo: float = 0.9
    band_hi: float = 1.2
    band_start: int = 1000
    output_format: str = "json"
    checkpoint_path: Optional[Path] = None
    checkpoint_every: int = 64  # segments between periodic checkpoints
    stride: int = 1

    def __post_init__(self):
        if self.limit < 3:
            raise ConfigError(f"limit must be >= 3, got {self.limit}")
        if self.limit > INT64_MAX:
            raise ConfigError(f"limit {self.limit} exceeds the 64-bit range")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.segment_size < 1:
            raise ConfigError(f"segment size must be >= 1, got {self.segment_size}")
        if not self.band_lo < self.band_hi:
            raise ConfigError(f"band_lo must be < band_hi, got {self.band_lo}, {self.band_hi}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {self.output_format!r}")
        if self.parallelism is not None and self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.checkpoint_path is not None:
            self.checkpoint_path = Path(self.checkpoint_path)

    @property
    def threads(self) -> int:
        return resolve_threads(self.parallelism)

    @property
    def claim_settings(self) -> ClaimSettings:
        return ClaimSettings((self.band_lo, self.band_hi), self.band_start)


@dataclass
class RunState:
    """Everything needed to continue a verification run from where it stopped."""

    acc: RunningAccumulator = field(default_factory=RunningAccumulator)
    tracker: RecordTracker = field(default_factory=RecordTracker)
    ledger: ClaimLedger = field(default_factory=ClaimLedger)

    @classmethod
    def fresh(cls, config: RunConfig, claims: Iterable[ClaimId] | None = None) -> "RunState":
        return cls(RunningAccumulator(h_tolerance=config.h_tolerance), RecordTracker(),
                   ClaimLedger(claims, config.claim_settings))

    @property
    def records(self) -> int:
        return self.acc.n

    def advance(
        self,
        limit: int,
        segment_size: int = DEFAULT_SEGMENT_SIZE,
        threads: int | None = 1,
        on_block: Callable[[StatsBlock], None] | None = None,
        checkpoint_path: Path | None = None,
        checkpoint_every: int = 64,
    ) -> "RunState":
        """Fold every gap record with p_(n+1) <= limit not yet seen."""
        if self.acc.n:
            chunks = gap_chunks(limit, segment_size, threads,
                                start_index=self.acc.n + 1, start_prime=self.acc.last_prime)
        else:
            chunks = gap_chunks(limit, segment_size, threads)
        for i, chunk in enumerate(chunks, start=1):
            block = self.acc.fold(chunk)
            self.tracker.update(block)
            self.ledger.update(block)
            if on_block is not None:
                on_block(block)
            if checkpoint_path is not None and i % checkpoint_every == 0:
                checkpoint_write(self, checkpoint_path)
        if checkpoint_path is not None:
            checkpoint_write(self, checkpoint_path)
        return self

    def violated_expected_true(self) -> list[str]:
        return [c.value for c, a in self.ledger.accumulators.items()
                if a.violations and expected_true(c)]

    def report(self, limit: int) -> dict:
        tracker = self.tracker
        outcomes = self.ledger.outcomes()
        bad_true = self.violated_expected_true()
        return {
            "limit": limit,
            "records": self.acc.n,
            "last_prime": self.acc.last_prime,
            "claims": [o.to_dict() for o in outcomes],
            "expected_true_violated": bad_true,
            "expected_false_violated": [
                o.claim for o in outcomes if o.violations and o.claim not in bad_true],
            "max_h": None if tracker.max_h is None else {"n": tracker.max_h[0], "h": tracker.max_h[1]},
            "max_g": None if tracker.max_g is None else {"n": tracker.max_g[0], "g": tracker.max_g[1]},
            "fraction_below_one": (tracker.count_h_below_one / tracker.total) if tracker.total else None,
            "every_prefix_half_or_more": tracker.every_prefix_half_or_more,
            "sum_h_max_relative_error": self.acc.max_rel_error,
            "status": "fail" if bad_true else "ok",
        }

    # -- serialisation ------------------------------------------------------

    def payload(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "last_prime": self.acc.last_prime,
            "last_index": self.acc.n + 1 if self.acc.n else 0,
            "records": self.acc.n,
            "sum_g": self.acc.sum_g,
            "sum_h_value": self.acc.sum_h.value,
            "sum_h_compensation": self.acc.sum_h.compensation,
            "h_tolerance": self.acc.h_tolerance,
            "max_rel_error": self.acc.max_rel_error,
            "record_tracker_state": self.tracker.to_dict(),
            "claim_accumulators": self.ledger.to_dict(),
        }

    @classmethod
    def from_payload(cls, d: dict) -> "RunState":
        acc = RunningAccumulator.from_dict(
            {"n": d["records"], "sum_g": d["sum_g"], "sum_h_value": d["sum_h_value"],
             "sum_h_compensation": d["sum_h_compensation"], "last_prime": d["last_prime"]},
            h_tolerance=d["h_tolerance"], max_rel_error=d["max_rel_error"])
        return cls(acc, RecordTracker.from_dict(d["record_tracker_state"]),
                   ClaimLedger.from_dict(d["claim_accumulators"]))


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def serialize_checkpoint(state: RunState) -> str:
    payload = state.payload()
    digest = hashlib.sha256(_canonical(payload).encode()).hexdigest()
    return _canonical({"payload": payload, "sha256": digest}) + "\n"


def checkpoint_write(state: RunState, path: str | os.PathLike) -> Path:
    """Write atomically (temp file + rename) so an interrupted write never truncates."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(serialize_checkpoint(state))
    os.replace(tmp, path)
    return path


def checkpoint_resume(path: str | os.PathLike) -> RunState:
    try:
        doc = json.loads(Path(path).read_text())
        payload, digest = doc["payload"], doc["sha256"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointCorruptError(f"unreadable checkpoint {path}: {exc}") from exc
    if hashlib.sha256(_canonical(payload).encode()).hexdigest() != digest:
        raise CheckpointCorruptError(f"integrity hash mismatch in {path}")
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise CheckpointVersionError(f"checkpoint schema {version}, expected {SCHEMA_VERSION}")
    return RunState.from_payload(payload)

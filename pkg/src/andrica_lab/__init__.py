"""Prime gaps, Andrica values, explicit prime bounds and an empirical claim ledger."""
from .bounds import BoundEvaluation, check_bounds, evaluate_bounds
from .claims import ClaimId, ClaimOutcome, check_claim, claim_catalog, verify_all
from .gaps import (GapRecord, RecordTracker, RunningStats, fraction_below_one, gap_records,
                   h_value, records, running_stats)
from .generalized import ExponentAnalysis, check_generalized, h_general, threshold_n0
from .runner import RunConfig, RunState, checkpoint_resume, checkpoint_write
from .sieve import (PrimeEntry, SegmentPlan, nth_prime, pi_approx, prime_count, prime_stream,
                    primes_up_to)

__version__ = "0.1.0"

__all__ = [
    "BoundEvaluation", "ClaimId", "ClaimOutcome", "ExponentAnalysis", "GapRecord", "PrimeEntry",
    "RecordTracker", "RunConfig", "RunState", "RunningStats", "SegmentPlan", "check_bounds",
    "check_claim", "check_generalized", "checkpoint_resume", "checkpoint_write", "claim_catalog",
    "evaluate_bounds", "fraction_below_one", "gap_records", "h_general", "h_value", "nth_prime",
    "pi_approx", "prime_count", "prime_stream", "primes_up_to", "records", "running_stats",
    "threshold_n0", "verify_all",
]

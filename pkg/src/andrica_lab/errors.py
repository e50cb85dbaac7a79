"""Exception types raised across the package."""


class AndricaLabError(Exception):
    """Base class for every error raised by andrica_lab."""


class DomainError(AndricaLabError, ValueError):
    """An argument lies outside the domain of a formula."""


class ArgumentOrderError(AndricaLabError, ValueError):
    """A pair of primes was given out of order (q <= p)."""


class ResourceLimitError(AndricaLabError, MemoryError):
    """A dense (unsegmented) sieve would exceed the memory budget."""


class PlanMismatchError(AndricaLabError, ValueError):
    """A SegmentPlan does not tile the requested range."""


class ContiguityError(AndricaLabError, ValueError):
    """A gap-record stream skipped an index or did not start at n = 1."""


class InvariantViolation(AndricaLabError, AssertionError):
    """A structural invariant (telescoping, unit-interval average) failed."""


class EmptyTrackerError(AndricaLabError, ValueError):
    """A fraction was requested from a tracker that has seen no records."""


class UnknownClaimError(AndricaLabError, KeyError):
    """A claim tag is not in the claim catalog."""


class ConvergenceError(AndricaLabError, ArithmeticError):
    """Root-finding failed to bracket or converge."""


class CheckpointError(AndricaLabError):
    """Base class for checkpoint persistence errors."""


class CheckpointVersionError(CheckpointError):
    """The checkpoint schema version does not match this build."""


class CheckpointCorruptError(CheckpointError):
    """The checkpoint payload failed its integrity hash."""


class ConfigError(AndricaLabError, ValueError):
    """A RunConfig field is invalid."""

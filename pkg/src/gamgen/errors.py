"""Exception hierarchy with stable machine-readable error names.

Every error carries a ``name`` used verbatim by the CLI so that callers can
dispatch on failures without parsing prose.
"""

from __future__ import annotations

__all__ = [
    "GamgenError",
    "DomainError",
    "OverflowInValue",
    "ConvergenceError",
    "NoRootInBracketError",
    "NonpositiveObservationError",
    "DegenerateSampleError",
    "InvalidSampleError",
    "MomentDoesNotExistError",
    "DegenerateLimitError",
    "BootstrapDegenerateError",
    "DataError",
]


class GamgenError(Exception):
    """Base class; ``name`` is the machine-readable identifier."""

    name = "error"


class DomainError(GamgenError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    name = "domain-error"


class OverflowInValue(GamgenError, OverflowError):
    """An intermediate quantity exceeded float64 range."""

    name = "overflow"


class ConvergenceError(GamgenError, RuntimeError):
    """An iterative scheme exhausted its iteration budget."""

    name = "no-convergence"


class NoRootInBracketError(GamgenError, RuntimeError):
    """Root search found no sign change inside the search interval."""

    name = "no-root-in-bracket"


class NonpositiveObservationError(GamgenError, ValueError):
    """Sample values must be strictly positive and finite."""

    name = "nonpositive-observation"


class DegenerateSampleError(GamgenError, ValueError):
    """All observations equal; the requested estimator is undefined."""

    name = "degenerate-sample"


class InvalidSampleError(GamgenError, ValueError):
    """Estimating-equation denominator non-positive or non-finite."""

    name = "invalid-sample"


class MomentDoesNotExistError(GamgenError, ValueError):
    """Requested moment order violates the existence condition."""

    name = "moment-does-not-exist"


class DegenerateLimitError(GamgenError, ValueError):
    """Population limit denominator indistinguishable from zero."""

    name = "degenerate-limit"


class BootstrapDegenerateError(GamgenError, RuntimeError):
    """Every bootstrap replicate failed; no correction possible."""

    name = "bootstrap-degenerate"


class DataError(GamgenError, ValueError):
    """Input file unreadable or malformed."""

    name = "data-error"

"""Exception taxonomy for the whole package.

Every failure a caller can reasonably branch on gets its own class. Numeric
failures (divergence, catastrophic cancellation, quadrature trouble) derive
from ArithmeticError; bad inputs derive from ValueError.
"""


class CountingProcessError(Exception):
    """Common base so callers can catch anything raised by this package."""


class DomainError(CountingProcessError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class OutOfRange(DomainError):
    """An index exceeds a configured hard cap (e.g. the Stirling table)."""


class InvalidSpec(CountingProcessError, ValueError):
    """A series/operator specification is malformed or non-convergent by construction."""


class InvalidProfile(CountingProcessError, ValueError):
    """A time profile violates its structural constraints (monotonicity, endpoints)."""


class UnsupportedR(CountingProcessError, ValueError):
    """Closed-form path requested for a shape parameter it does not cover."""


class SeriesError(CountingProcessError, ArithmeticError):
    """Base for series-evaluation failures."""


class NonConvergent(SeriesError):
    """Term budget exhausted before the tail bound was met, or a term overflowed."""


class CancellationLoss(SeriesError):
    """Alternating-sum cancellation ate too many significant digits to trust the result."""


class QuadratureFailure(CountingProcessError, ArithmeticError):
    """Node doubling moved the quadrature result more than the stability bound."""


class DegenerateWeights(CountingProcessError, ArithmeticError):
    """A weight normalizer is non-positive, non-finite, or unstable under truncation doubling."""


class TailCutoffUnreachable(CountingProcessError, ArithmeticError):
    """The count distribution's tail cannot be brought under the sampler cutoff."""

"""Exception hierarchy.

Three families, each mapped to a distinct CLI exit code: input/validation
problems, numerical failures, and internal consistency faults (which always
indicate a bug or a broken tolerance regime, never bad user input).
"""


class VortexModuliError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(VortexModuliError):
    """Invalid input data or configuration."""

    exit_code = 2


class NumericalError(VortexModuliError):
    """A numerical procedure failed to reach its tolerance."""

    exit_code = 4


class ConsistencyError(VortexModuliError):
    """Two routes to the same quantity disagree; fatal."""

    exit_code = 5


class NotSquarefree(InputError):
    """The defining polynomial has a (numerically) repeated root."""


class NeedsNormalization(InputError):
    """Odd degree or a root at x = 0; apply ``normalize`` first."""


class DegreeTooLow(InputError):
    """Degree below 3; the curve would have genus < 1."""


class PointNotOnCurve(InputError):
    """Point residual exceeds tolerance for the given curve."""


class PathTooCloseToBranchPoint(InputError):
    """A continuation path violates the branch-point clearance."""


class IndexOutOfRange(InputError):
    """Differential or branch-point index outside the valid range."""


class ParityViolation(InputError):
    """Degree minus bit-sum is odd or negative for a component label."""


class DegreeMismatch(InputError):
    """Divisor degrees incompatible with the requested operation."""


class ConfigInvalid(InputError):
    """Malformed run configuration or input file."""


class QuadratureNotConverged(NumericalError):
    """Refinement exhausted before successive levels agreed."""


class ContinuationNotConverged(NumericalError):
    """Sheet tracking did not stabilise under step-size refinement."""


class IllConditionedLattice(NumericalError):
    """Realified period matrix is numerically singular."""


class PathConstructionFailed(NumericalError):
    """No admissible integration path could be built."""


class InsufficientSamplesNearEvent(NumericalError):
    """Too few trajectory samples around a collision to fit angles."""


class SheetTrackingLost(NumericalError):
    """Centre tracking became ambiguous away from any collision."""


class CycleNotClosed(ConsistencyError):
    """A homology cycle candidate fails to close under continuation."""


class NotPositiveDefinite(ConsistencyError):
    """Gram matrix not positive definite even after orientation flip."""


class DegreeNonzero(ConsistencyError):
    """A principal divisor came out with nonzero total degree."""


class OracleDisagreement(ConsistencyError):
    """Combinatorial decision and numerical oracle disagree."""


class ProportionalityViolated(ConsistencyError):
    """Fibre metric failed to be a single multiple of Fubini-Study."""

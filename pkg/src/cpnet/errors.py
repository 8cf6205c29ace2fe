"""Exception types shared across the package."""


class CpnetError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidNetwork(CpnetError):
    """A network failed structural validation."""


class InconsistentRotation(CpnetError):
    """Face tracing visited a directed edge twice (malformed rotation system)."""


class NotCritical(CpnetError):
    """Operation requires a critical medial graph."""


class NotApex(CpnetError):
    """The given crossing is not the apex of a boundary triangle."""


class NotSafe(CpnetError):
    """Cellset is not safe: its closure loses rank, so labellings need not extend."""


class Inconsistent(CpnetError):
    """A labelling violates a crossing equation beyond tolerance."""


class NonMonotone(CpnetError):
    """Energy-minimizing solvers require monotone nondecreasing edge functions."""


class NoConvergence(CpnetError):
    """Iterative solver hit its step limit before meeting the residual target."""


class BadCurrentSum(CpnetError):
    """Prescribed boundary currents do not sum to zero on some component."""


class SingularInterior(CpnetError):
    """Interior block of the Kirchhoff matrix is singular."""


class DegenerateDenominator(CpnetError):
    """A transform formula hit a zero denominator; the rewrite is undefined."""


class ProbeInsufficient(CpnetError):
    """A recovered pointwise function was queried outside its probed range."""


class NotRecoverable(CpnetError):
    """Network shape admits no unique recovery; carries the witnessing violation."""

    def __init__(self, violation):
        super().__init__(f"not recoverable: {violation}")
        self.violation = violation


class BoundaryMismatch(CpnetError):
    """Two medial graphs do not share a common boundary layout."""


class ArityMismatch(CpnetError):
    """Parameter list length does not match the word length."""


class IndexOutOfRange(CpnetError):
    """Generator index outside 1..2n."""


class NoSuchCell(CpnetError):
    """Referenced cell is absent or lacks the required incidence."""

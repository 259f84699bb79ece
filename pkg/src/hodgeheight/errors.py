"""Exception hierarchy shared by all modules."""


class HodgeError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(HodgeError):
    """Operands live in different ambient spaces."""


class MalformedFiltration(HodgeError):
    """Filtration steps are not strictly nested or not exhaustive."""


class NotAnMHS(HodgeError):
    """The pair of filtrations does not define a mixed Hodge structure."""


class NoConvergence(HodgeError):
    """An iterative solver failed to reach its residual target."""


class NotOriented(HodgeError):
    """Top or bottom weight-graded piece is not of rank one, or a generator is invalid."""


class ZeroBottomPairing(HodgeError):
    """The extracted height vector is not proportional to the bottom generator."""


class NotGeneralizedBiextension(HodgeError):
    """More than three nonzero weights."""


class NotAMorphism(HodgeError):
    """A matrix fails the filtration-compatibility checks."""


class NotInjectiveOnEnds(HodgeError):
    """A morphism kills the top or bottom graded generator."""


class InvalidBlockType(HodgeError):
    """A building block sits in a forbidden Hodge type slot."""


class NotNilpotent(HodgeError):
    """Matrix expected to be nilpotent is not."""


class DoesNotExist(HodgeError):
    """The relative weight filtration does not exist (admissibility failure)."""


class ConstructionFailed(HodgeError):
    """Post-hoc verification of a constructed grading failed."""


class NotHodgeTate(HodgeError):
    """Bigrading is not concentrated in bidegrees (p, p)."""


class LengthTooSmall(HodgeError):
    """Weight-filtration length below the required minimum."""


class DegenerateTriangle(HodgeError):
    """Triangle sections fail a general-position requirement."""


class InfeasibleRanks(HodgeError):
    """Requested graded ranks cannot define an oriented variation."""

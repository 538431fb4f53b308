"""Exception hierarchy shared by all actiongate modules."""


class ActionGateError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ActionGateError):
    """Inputs violate a model's domain (bound motion, square roots, dimension)."""


class NoBoundOrbit(DomainError):
    """No pair of real radial turning points exists for the requested orbit."""


class QuadratureError(ActionGateError):
    """A quadrature or time-grid estimate failed to reach the requested tolerance."""


class ConvergenceError(ActionGateError):
    """Iterative refinement stalled before meeting its tolerance."""


class SizeError(ActionGateError):
    """A search space or matrix exceeds its configured bound."""


class PairError(ActionGateError):
    """A level pair is missing from the basis or wrongly ordered."""


class ResonanceCollision(ActionGateError):
    """A spurious transition sits within the collision tolerance of the drive."""


class ZeroCoupling(ActionGateError):
    """The control matrix has no amplitude on the requested transition."""


class DimensionMismatch(ActionGateError):
    """Operands have incompatible dimensions."""


class CutoffError(ActionGateError):
    """A logical level label lies beyond the enumeration cutoff."""


class NoStrategy(ActionGateError):
    """None of the two-qubit gate strategies is applicable."""


class ConfigError(ActionGateError):
    """An experiment configuration violates the schema or semantic checks."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

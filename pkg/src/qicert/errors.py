"""Exception types shared across the package."""


class QicertError(Exception):
    """Base class for all engine errors."""


class ParseError(QicertError):
    """Malformed expression text."""


class DomainError(QicertError):
    """Evaluation outside a node's domain (log of nonpositive value,
    real-exponent power of a nonpositive base, division by zero)."""


class NonDifferentiable(QicertError):
    """A two-sided jet was requested at a kink whose one-sided jets differ."""


class UnknownCase(QicertError):
    """Case id not present in the catalog."""


class InvalidParams(QicertError):
    """Instance parameters outside the case's admissible domain."""


class DegenerateScaling(QicertError):
    """The scaling route's exponent or constant degenerates for these inputs."""


class NonPositiveBase(QicertError):
    """A function raised to a negative exponent is not strictly positive."""


class ArityMismatch(QicertError):
    """Weight list length does not match the partition size."""

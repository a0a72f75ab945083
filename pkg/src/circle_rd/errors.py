"""Exception types raised across the package."""


class CircleRDError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CircleRDError, ValueError):
    """Non-finite angle, off-circle point, dither outside [0, 1), bad rate."""


class InvalidCodeError(InvalidInputError):
    """Code index outside {0, ..., N - 1}."""


class DomainError(CircleRDError, ValueError):
    """Argument outside the domain of an analytic formula."""


class ModelMismatchError(CircleRDError, ValueError):
    """Codec used with a randomness model it cannot operate under."""


class ConfigurationError(CircleRDError, ValueError):
    """Experiment parameters that cannot produce a meaningful result."""

"""Exception types raised across the toolkit."""


class LebesgueKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LebesgueKitError, ValueError):
    """A point lies outside the domain of a representation."""


class ParameterError(LebesgueKitError, ValueError):
    """A parameter is outside its admissible range."""


class UnsupportedRepresentation(LebesgueKitError, TypeError):
    """The operation is not available for this function representation."""


class GridError(LebesgueKitError, ValueError):
    """A sampling grid is incompatible with the requested check."""


class IntegrationError(LebesgueKitError, ArithmeticError):
    """An integrand or series term could not be evaluated to a finite number."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class SpecFormatError(LebesgueKitError, ValueError):
    """A structured function/exponent spec is malformed."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field

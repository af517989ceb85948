"""Exception hierarchy shared by the engines."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NotRHSError(DomainError):
    """The surgery data does not produce a rational homology sphere."""


class DegenerateSurgeryError(DomainError):
    """A surgery denominator ``p + q*l`` (or a shifted ``q``) vanishes."""


class ValidationError(ValueError):
    """Input data is internally inconsistent."""


class IncompleteGridError(ValueError):
    """A Jones grid lacks entries needed for the requested order."""

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)

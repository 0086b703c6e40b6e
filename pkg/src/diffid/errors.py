"""Exception types shared across the package."""


class DiffidError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DiffidError):
    """Invalid grid, parameter, or config-file input."""


class DataError(DiffidError):
    """Problem data violates a required structural condition."""


class DivisionHazardError(DiffidError):
    """The measurement field dropped below the division floor at an evaluated node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NumericalBlowupError(DiffidError):
    """A time-stepping sweep produced non-finite values."""

    def __init__(self, message, mode=None, step=None):
        super().__init__(message)
        self.mode = mode
        self.step = step


class CertificateFailure(DiffidError):
    """A solvability certificate failed and the run was not forced."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate

"""
Exception hierarchy shared by the services, the CLI and the HTTP routers.

Exit codes and HTTP statuses are attached to the classes so that the two
outer surfaces translate errors the same way.
"""

from typing import Optional


class QtopError(Exception):
    exit_code = 4
    http_status = 500


class ParseError(QtopError):
    """Braid text or JSON input that does not follow the grammar."""

    exit_code = 2
    http_status = 400

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ContractError(QtopError):
    """A precondition of an operation is violated."""

    exit_code = 3
    http_status = 422


class PoleError(ContractError):
    """The color lies in X_r = Z minus rZ where the modified dimension has a pole."""


class GeneratorRangeError(ContractError):
    """A braid letter refers to a generator the strand count does not have."""


class NumericalError(QtopError):
    """Non-scalar endomorphism, failed inversion or failed internal cross-check."""

    exit_code = 4
    http_status = 500

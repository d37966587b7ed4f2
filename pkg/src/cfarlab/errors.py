"""Exception hierarchy shared across the package.

The command-line front end maps each class to a distinct exit code, so
library code should raise these rather than bare ValueError when the
failure is one a user can trigger from the outside.
"""


class CfarLabError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(CfarLabError):
    """Invalid parameters, scenario or config file contents."""

    exit_code = 2


class CubeParseError(CfarLabError):
    """Malformed cube file; carries the byte offset of the failure."""

    exit_code = 3

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DegenerateInputError(CfarLabError):
    """Input data carries no usable information (e.g. an all-zero map)."""

    exit_code = 4


class NumericalError(CfarLabError):
    """A numerical routine failed to converge or produced invalid output."""

    exit_code = 5


class EstimationError(NumericalError):
    """Noise estimation could not produce a valid model."""

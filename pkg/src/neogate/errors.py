"""Common exception base for all data and protocol errors in this package."""


class NeoGateError(Exception):
    """Base class for recoverable errors raised by this package.

    The command-line layer maps any subclass to exit code 1.
    """

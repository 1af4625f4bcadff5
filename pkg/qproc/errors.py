class QProcError(Exception):
    """
    Base class for every error raised by qproc.

    Each subclass carries the process exit code the CLI uses for it.
    """
    exit_code = 1


class ValidationError(QProcError):
    """Malformed input: bad types, parse failures, violated invariants."""
    exit_code = 2


class NonErgodicSourceError(ValidationError):
    """The chain has no unique stationary distribution."""


class ResourceCapError(QProcError):
    """A configured enumeration or dimension cap would be exceeded."""
    exit_code = 3


class UnrealizableObservationError(QProcError):
    """An outcome word has zero probability under the source and protocol."""
    exit_code = 4

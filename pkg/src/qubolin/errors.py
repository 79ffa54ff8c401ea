"""Exception types shared across the package."""


class LimitError(RuntimeError):
    """A documented resource limit (problem size, memory budget) was exceeded."""


class ParseError(ValueError):
    """Malformed instance file; the message carries the offending token position."""

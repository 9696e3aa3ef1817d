"""Exception types shared across modules."""


class InvalidRangeError(ValueError):
    """A [t0, t1) style argument pair is empty or inverted."""


class InvalidStateError(RuntimeError):
    """A command or operation is not applicable to the current state."""

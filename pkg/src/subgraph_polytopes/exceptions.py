"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Input exceeds the supported desk-scale bounds."""


class HypothesisError(ValueError):
    """Input violates the hypothesis required by a check."""


class InconsistencyError(RuntimeError):
    """An internal cross-check failed. This signals a bug, not bad input."""


class DegenerateError(ValueError):
    """A point set is lower dimensional than its ambient space.

    ``basis`` spans the affine hull (directions relative to ``origin``).
    """

    def __init__(self, message, origin=None, basis=None):
        super().__init__(message)
        self.origin = origin
        self.basis = basis or []


class PatternParseError(ValueError):
    """Malformed pattern shorthand or polynomial string."""

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position

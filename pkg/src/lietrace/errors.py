"""Exception and warning types shared across the library."""


class DomainError(ValueError):
    """Arguments outside an operation's stated domain (bad cutoff, t <= 0, r > 1, ...)."""


class CapabilityError(RuntimeError):
    """Request exceeds a documented implementation limit (e.g. degree cap, matrix budget)."""


class NumericError(RuntimeError):
    """A numerical computation produced non-finite values or failed to converge."""

    def __init__(self, message, node_index=None):
        super().__init__(message)
        self.node_index = node_index


class DivergentSeriesError(RuntimeError):
    """A trace or bound was requested for a symbol whose criterion series diverges."""


class TraceHypothesisError(RuntimeError):
    """Trace-formula verification refused: the (r, p) pair is outside both admissible regimes.

    This is a hypothesis failure, not a numerical one; the message explains which
    condition failed and what would be admissible.
    """


class ExactnessWarning(UserWarning):
    """Quadrature exactness cannot be certified for the requested computation."""

"""Exception types shared across the package."""


class NonConvergence(RuntimeError):
    """A self-consistency iteration exhausted its iteration budget."""


class NoConvergedBranch(NonConvergence):
    """No seed of the multi-seed solver produced a converged state."""


class BracketFailure(ValueError):
    """A bisection indicator does not change over the initial bracket."""


class DivergenceNearTc(RuntimeError):
    """Zero-field susceptibility exceeded the divergence threshold.

    The offending finite-difference value is kept in ``value``.
    """

    def __init__(self, value):
        self.value = value
        super().__init__(
            f"zero-field susceptibility diverges (finite difference {value:.3e})"
        )


class InvalidDensityMatrix(ValueError):
    """Input is not a valid density matrix (trace, hermiticity or positivity)."""


class MissingColumn(ValueError):
    """Emitted rows lack a column required by the requested figure."""


class CubicSignViolation(UserWarning):
    """The cubic coefficient of the self-consistency map is not negative
    at the located critical temperature."""

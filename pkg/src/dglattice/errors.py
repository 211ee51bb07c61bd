"""Exception hierarchy shared across the package.

The CLI maps these onto exit statuses: ``ConfigError`` -> 2,
``HypothesisError`` -> 1, ``NumericalError`` (incl. step underflow) -> 3.
"""


class ConfigError(ValueError):
    """Malformed or schema-violating run configuration."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class HypothesisError(ValueError):
    """A verification-study precondition does not hold for the inputs."""


class NumericalError(RuntimeError):
    """Integration failed numerically (unexpected blow-up, no convergence)."""


class StepUnderflowError(NumericalError):
    """Adaptive step size fell below the minimum; stiffness/blow-up ambiguity.

    Carries the time reached and the partial trajectory accumulated so far.
    """

    def __init__(self, time, trajectory=None):
        super().__init__(f"adaptive step size underflow at t={time:.6g}")
        self.time = time
        self.trajectory = trajectory

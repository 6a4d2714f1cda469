"""Exception types raised across the package."""


class DomainError(ValueError):
    """A point or interval lies outside [0, 1], or a descriptor is invalid."""


class NonDifferentiableError(ValueError):
    """Derivative requested at a breakpoint of a piecewise-affine map."""


class GuardExceeded(RuntimeError):
    """A lap or component count would exceed its explosion guard."""


class BoundaryTieError(RuntimeError):
    """An orbit point sits exactly on the boundary of a pull-back component.

    ``index`` is the chain position where the tie occurred; callers nudge the
    radius by one part in 10**6 and retry.
    """

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"orbit point on component boundary at j={index}")


class NotDiffeomorphicError(ValueError):
    """The iterate is not a diffeomorphism on the requested interval."""


class ConvergenceError(RuntimeError):
    """Power iteration stopped before reaching its tolerance."""

    def __init__(self, message, residual, result=None):
        self.residual = residual
        self.result = result
        super().__init__(f"{message} (last residual {residual:.3e})")


class ScreenFailure(RuntimeError):
    """The map fails the class screens (exactness / repelling periodic orbits)."""


class ConfigError(ValueError):
    """Invalid run configuration. ``problems`` lists every violation found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))

"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A model or run parameter is outside its admissible domain."""


class ShapeError(ValueError):
    """An array argument has the wrong shape or dimension."""


class SymplecticViolationError(ValueError):
    """A candidate transform fails the symplectic condition."""

    def __init__(self, residual: float, message: str | None = None):
        self.residual = float(residual)
        super().__init__(message or f"matrix is not symplectic (residual {residual:.3e})")


class EnergyMismatchError(ValueError):
    """A phase point is not on the requested energy shell."""


class TrajectoryOverflowError(FloatingPointError):
    """State blew up during integration; carries the time of blow-up."""

    def __init__(self, time: float, bound: float = 1e150):
        self.time = float(time)
        self.bound = float(bound)
        super().__init__(f"trajectory exceeded |x| = {bound:.1e} near t = {time:.6g}")

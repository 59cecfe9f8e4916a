"""Exception hierarchy shared by the numerics and the experiment runner."""


class ScarsError(Exception):
    """Base error; ``exit_code`` is what the command line reports."""

    exit_code = 3


class ParameterError(ScarsError, ValueError):
    """Invalid model parameter or configuration value."""

    exit_code = 1


class ShapeError(ParameterError):
    """Dimension or index mismatch."""


class CapacityError(ScarsError):
    """A dense, sector or bond-dimension cap would be exceeded."""

    exit_code = 2

    def __init__(self, what: str, requested: int, cap: int, hint: str = ""):
        self.what = what
        self.requested = requested
        self.cap = cap
        message = f"{what} needs {requested}, cap is {cap}"
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)


class NumericalError(ScarsError):
    """A numerical self-check failed."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """An iterative routine stopped before meeting its tolerance."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class RefusalError(NumericalError):
    """An operation refused to run on a numerically ill-posed input."""

"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Input data or configuration violates a documented precondition."""


class DimensionError(InvalidInputError):
    """Matrix shapes are incompatible."""


class NumericalError(ArithmeticError):
    """A factorization or evaluation failed in floating point."""


class DivergenceError(RuntimeError):
    """A sampler state blew up (Frobenius norm above the guard threshold)."""

    def __init__(self, step: int, step_size: float, norm: float):
        self.step = step
        self.step_size = step_size
        self.norm = norm
        super().__init__(
            f"chain diverged at step {step}: ||M||_F = {norm:.3g} with step size h = {step_size:.3g}"
        )

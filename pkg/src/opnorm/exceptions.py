from __future__ import annotations


class OpNormError(ValueError):
    """Base class for input errors raised by this package."""


class NotSquareError(OpNormError):
    pass


class NotHermitianError(OpNormError):
    pass


class NotNormalError(OpNormError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NonCommutingError(OpNormError):
    def __init__(self, message: str, pair: tuple[int, int], commutator_norm: float):
        super().__init__(message)
        self.pair = pair
        self.commutator_norm = commutator_norm


class SingularOperatorError(OpNormError):
    """An operator required to be injective is numerically singular."""


class NotInAlgebraError(OpNormError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DiscretizationError(OpNormError):
    pass


class CauchySpecError(OpNormError):
    pass


class ConvergenceError(RuntimeError):
    pass

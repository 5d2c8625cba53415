"""Exception hierarchy shared by every module of the package."""


class SparseGLError(Exception):
    """Base class for all errors raised by sparsegl."""


class GraphValidationError(SparseGLError, ValueError):
    """A weight matrix violates one of the graph invariants."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class AsymmetricMatrix(GraphValidationError):
    pass


class NegativeWeight(GraphValidationError):
    pass


class NonzeroDiagonal(GraphValidationError):
    pass


class DimensionMismatch(SparseGLError, ValueError):
    pass


class InvalidTau(SparseGLError, ValueError):
    pass


class ZeroAtom(SparseGLError, ValueError):
    """A dictionary column has (numerically) zero norm."""

    def __init__(self, index):
        super().__init__(f"dictionary atom {index} has zero norm")
        self.index = index


class RankDeficientSupport(SparseGLError, ArithmeticError):
    pass


class EmptySignalSet(SparseGLError, ValueError):
    pass


class DivergenceDetected(SparseGLError, FloatingPointError):
    pass


class GenerationFailed(SparseGLError, RuntimeError):
    pass


class CalibrationFailed(SparseGLError, RuntimeError):
    pass


class EmptyList(SparseGLError, ValueError):
    pass

"""Exceptions raised by the multi-coset PSD estimator."""


class McpsdError(Exception):
    """Base class for all package errors."""


class PatternError(McpsdError, ValueError):
    """Invalid sampling pattern parameters (odd L, duplicates, range)."""


class MissingDifference(McpsdError, ValueError):
    """The pattern's difference set lacks a value required for recovery."""

    def __init__(self, t: int):
        self.t = t
        super().__init__(f"difference {t} is not produced by the sampling pattern")


class InsufficientSignal(McpsdError, ValueError):
    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"signal has {available} samples but {required} are required"
        )


class NumericalError(McpsdError, RuntimeError):
    """Base class for solver failures (mapped to exit code 2 by the CLI)."""


class RankDeficient(NumericalError):
    def __init__(self, rank: int, L: int):
        self.rank = rank
        self.L = L
        super().__init__(f"stacked measurement matrix has rank {rank} < L = {L}")


class MaxIterationsExceeded(NumericalError):
    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"NNLS did not converge within {iterations} iterations")

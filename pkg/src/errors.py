"""
Exception types shared across the completion toolkit
"""


class TTCompletionError(Exception):
    """Base class for toolkit errors"""


class ConfigError(TTCompletionError, ValueError):
    """Invalid or non-finite configuration value"""


class TensorFormatError(TTCompletionError, ValueError):
    """A file could not be parsed as TNSR, PPM/PGM or a plan line"""


class ShapeMismatchError(TTCompletionError, ValueError):
    """Operands or files disagree on dims"""


class RankChainError(TTCompletionError, ValueError):
    """TT rank chain is not 1 at both ends or cores disagree on ranks"""


class EmptyObservationError(TTCompletionError, ValueError):
    """Weight tensor has no observed entries"""


class SolverDivergenceError(TTCompletionError, RuntimeError):
    """Objective became non-finite or exploded during optimization"""

    def __init__(self, iteration: int, objective: float, reason: str = "diverged"):
        self.iteration = iteration
        self.objective = objective
        super().__init__(f"Solver {reason} at iteration {iteration} (objective={objective})")

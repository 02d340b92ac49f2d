"""Exception hierarchy shared across pyairls."""

from typing import Optional


class AirlsError(Exception):
    """Base class for all pyairls errors."""


class ModelError(AirlsError, ValueError):
    """Invalid layout, expression or model."""


class ProblemFormatError(ModelError):
    """A problem file could not be parsed into a model."""

    def __init__(
        self,
        message: str,
        factor_index: Optional[int] = None,
        term_index: Optional[int] = None,
    ):
        location = []
        if factor_index is not None:
            location.append(f"factor {factor_index}")
        if term_index is not None:
            location.append(f"term {term_index}")
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.factor_index = factor_index
        self.term_index = term_index


class DensityError(AirlsError, ValueError):
    """Invalid density parameters or evaluation outside a density's domain."""


class NumericalError(AirlsError, ArithmeticError):
    """Linear-algebra or floating point failure."""

    def __init__(self, message: str, block: Optional[int] = None):
        if block is not None:
            message = f"block {block}: {message}"
        super().__init__(message)
        self.block = block


class SamplingError(AirlsError):
    """Covariance sampling failed."""


class GridBudgetError(AirlsError, ValueError):
    """Grid search request exceeds the evaluation budget."""

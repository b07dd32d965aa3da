"""
Domain exceptions shared across the bandit, ensemble and data modules.
"""
from typing import Iterable, Optional


class NudgeBanditError(Exception):
    """Base class for all domain errors"""
    pass


class InvalidArgumentError(NudgeBanditError, ValueError):
    """Raised when an operation receives arguments outside its contract"""
    pass


class NumericalFailureError(NudgeBanditError, ArithmeticError):
    """Raised when an optimisation produces non-finite values"""
    pass


class DataIntegrityError(NudgeBanditError):
    """Raised when prediction or label sets do not line up by example id"""

    def __init__(self, message: str, example_ids: Optional[Iterable[str]] = None):
        super().__init__(message)
        self.example_ids = list(example_ids or [])


class DataFormatError(NudgeBanditError):
    """Raised when an input file is malformed"""

    def __init__(self, message: str, row: Optional[int] = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row

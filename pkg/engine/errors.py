"""
Exception hierarchy for the exact engine
"""
from typing import Optional


class EngineError(ValueError):
    """Base class for every error raised by the engine"""


class ContextMismatchError(EngineError):
    """Operands live in different cyclotomic fields or jet spaces"""


class CycloLevelError(EngineError):
    """Requested cyclotomic level is invalid or above the configured cap"""


class TruncationError(EngineError):
    """A result would need coefficients beyond the available truncation degree"""


class SingularLinearPartError(EngineError):
    """Linear part is not invertible"""


class NonDiagonalLinearPartError(EngineError):
    """Normal forms need a diagonal linear part"""


class DeterminacyError(EngineError):
    """The truncated jet does not determine the requested invariant"""


class ZeroComponentError(DeterminacyError):
    """A component vanishes identically up to the truncation degree"""


class NonStabilizedError(DeterminacyError):
    """Dual-space dimensions were still growing at the cap"""

    def __init__(self, message: str, cap: int, last_dimension: int):
        super().__init__(message)
        self.cap = cap
        self.last_dimension = last_dimension


class NonIsolatedFixedPointError(EngineError):
    """The origin is not an isolated fixed point within the available resolution"""

    def __init__(self, period: int, degree: int, reason: Optional[str] = None):
        message = f"origin is non-isolated within resolution for f^{period} (D={degree})"
        if reason:
            message += f": {reason}"
        super().__init__(message)
        self.period = period
        self.degree = degree


class MultiplicityConsistencyError(EngineError):
    """The dual-space oracle contradicted the Cronin bound"""


class DivisibilityError(EngineError):
    """P_M is not divisible by M"""


class IndexConsistencyError(EngineError):
    """Indices and Dold sums disagree; carries the full table"""

    def __init__(self, message: str, table: Optional[str] = None):
        if table:
            message = f"{message}\n{table}"
        super().__init__(message)
        self.table = table


class ClassificationError(EngineError):
    """Inconsistent linear-part data"""


class WitnessParameterError(EngineError):
    """Parameters do not fit the requested witness family"""


class GermFormatError(EngineError):
    """Germ file or coefficient string cannot be parsed"""


class NumericVerificationError(EngineError):
    """Floating-point falsifier could not reach a verdict"""

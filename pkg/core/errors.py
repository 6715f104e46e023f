# core/errors.py
"""
Error hierarchy shared by every package.

Each class carries the process exit code the CLI maps it to.
"""

from typing import Optional, Sequence


class MorphGradError(Exception):
    """Base class for all library errors"""
    exit_code = 1


class ConfigError(MorphGradError, ValueError):
    """Invalid configuration (even windows, bad variant, infeasible data spec...)"""
    exit_code = 2


class UsageError(MorphGradError, ValueError):
    """Operation called outside its contract"""
    exit_code = 2


class ShapeError(MorphGradError, ValueError):
    """Shape mismatch between operands"""
    exit_code = 2

    def __init__(self, op: str, expected, actual, hint: Optional[str] = None):
        self.op = op
        self.expected = tuple(expected) if isinstance(expected, (list, tuple)) else expected
        self.actual = tuple(actual) if isinstance(actual, (list, tuple)) else actual
        self.hint = hint
        message = f"{op}: expected {self.expected}, got {self.actual}"
        if hint:
            message += f" ({hint})"
        super().__init__(message)


class DomainError(MorphGradError, ArithmeticError):
    """Input outside the mathematical domain of an operation"""
    exit_code = 4

    def __init__(self, op: str, index: Sequence[int], value: float, reason: str):
        self.op = op
        self.index = tuple(int(i) for i in index)
        self.value = float(value)
        super().__init__(f"{op}: {reason} at index {self.index} (value={self.value!r})")


class NumericalError(MorphGradError, ArithmeticError):
    """Numerically invalid intermediate (tiny denominator, non-finite loss)"""
    exit_code = 4


class VolumeIOError(MorphGradError, OSError):
    """Reading or writing an on-disk container failed"""
    exit_code = 3


class VolumeFormatError(VolumeIOError):
    """Bad magic or manifest that disagrees with the payload"""


class VolumeTruncatedError(VolumeFormatError):
    """Payload shorter or longer than the manifest declares"""


class VerificationError(MorphGradError):
    """A verification suite exceeded its threshold"""
    exit_code = 5


class MissingMetricsError(MorphGradError):
    """A run directory lacks the metrics a report needs"""
    exit_code = 4

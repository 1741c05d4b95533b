# src/core/errors.py - Exception hierarchy shared by every computational package
from typing import Optional

import numpy as np


class ParallelBoundsError(Exception):
    """Base class for numeric and data failures raised by the library"""


class NonFiniteError(ParallelBoundsError):
    """An integrand or objective produced NaN/inf where a finite value is required"""


class NoConvergenceError(ParallelBoundsError):
    """
    Fixed-point iteration exhausted its budget

    Attributes:
        last: last iterate (scalar or array)
        unconverged: boolean mask of the entries that did not settle (array case)
    """

    def __init__(self, message: str, last=None, unconverged: Optional[np.ndarray] = None):
        super().__init__(message)
        self.last = last
        self.unconverged = unconverged


class BadBracketError(ParallelBoundsError):
    """Bisection endpoints do not bracket the predicate switch"""


class InfeasibleError(ParallelBoundsError):
    """A closed-form solve or a constraint set has no solution"""


class UnsupportedChannelError(ParallelBoundsError):
    """Operation requires a channel kind that is not present"""


class DimensionMismatchError(ParallelBoundsError):
    """Enumerator block lengths do not chain"""


class ParseError(ParallelBoundsError):
    """Malformed enumerator/spectrum file"""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class OracleTooLargeError(ParallelBoundsError):
    """Exhaustive interleaver enumeration requested beyond the supported length"""


class MissingIoweError(ParallelBoundsError):
    """Bit-error bound requested without input-output weight information"""


class MissingFlagsError(ParallelBoundsError):
    """Attainability requested without declaring the ensemble's analytic conditions"""


class OutputError(ParallelBoundsError):
    """Result file could not be written"""

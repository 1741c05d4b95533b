"""
Parallel-Channel Bounds - Core Package

Exception hierarchy shared by every computation package. All numeric
failures derive from ParallelBoundsError; caller mistakes raise ValueError.
"""

from .errors import (
    BadBracketError,
    DimensionMismatchError,
    InfeasibleError,
    MissingFlagsError,
    MissingIoweError,
    NoConvergenceError,
    NonFiniteError,
    OracleTooLargeError,
    OutputError,
    ParallelBoundsError,
    ParseError,
    UnsupportedChannelError,
)

__all__ = [
    'BadBracketError',
    'DimensionMismatchError',
    'InfeasibleError',
    'MissingFlagsError',
    'MissingIoweError',
    'NoConvergenceError',
    'NonFiniteError',
    'OracleTooLargeError',
    'OutputError',
    'ParallelBoundsError',
    'ParseError',
    'UnsupportedChannelError',
]

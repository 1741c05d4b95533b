"""
Parallel-Channel Bounds - Configuration Package

This package handles all system configuration, including:
- Environment variable loading (.env)
- Thread-pool cap (PARBOUND_THREADS)
- Numeric defaults from bounds_config.yaml
"""

from .settings import (
    CONFIG,
    PARBOUND_THREADS,
    BoundsConfig
)

__all__ = [
    'CONFIG',
    'PARBOUND_THREADS',
    'BoundsConfig'
]

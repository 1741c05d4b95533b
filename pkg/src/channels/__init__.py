"""
Parallel-Channel Bounds - Channels Package

MBIOS channel laws (BIAWGN, BSC, BEC), the random-mapper parallel channel
set, and their information quantities.
"""

from .information import (
    avg_bhattacharyya,
    avg_capacity,
    avg_mutual_info,
    bhattacharyya,
    capacity,
    capacity_limit_ebno_db,
    cutoff_rate,
    q_function,
    solve_capacity_ebno2,
    solve_cutoff_ebno2,
)
from .mbios import ChannelKind, ChannelTable, MbiosChannel, ParallelChannelSet

__all__ = [
    'ChannelKind',
    'ChannelTable',
    'MbiosChannel',
    'ParallelChannelSet',
    'avg_bhattacharyya',
    'avg_capacity',
    'avg_mutual_info',
    'bhattacharyya',
    'capacity',
    'capacity_limit_ebno_db',
    'cutoff_rate',
    'q_function',
    'solve_capacity_ebno2',
    'solve_cutoff_ebno2',
]

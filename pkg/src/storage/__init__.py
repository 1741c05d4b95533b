# src/storage/__init__.py
from .iowe_store import load_iowe, load_spectrum, save_iowe, save_spectrum
from .result_writer import emit, read_header, read_results, read_run_config, write_sidecar

__all__ = [
    'load_iowe',
    'load_spectrum',
    'save_iowe',
    'save_spectrum',
    'emit',
    'read_header',
    'read_results',
    'read_run_config',
    'write_sidecar',
]

"""
Parallel-Channel Bounds - Test Suite

Unit tests for the numerics, channel models, spectra, growth rates, bounds,
attainable regions, storage and the command-line front end.

The slow acceptance checks live in test_system.py at the repository root;
smoke_test.py covers the few-second sanity pass.
"""

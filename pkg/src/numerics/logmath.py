# src/numerics/logmath.py - Log-domain combinatorics and entropy helpers
"""
Log-domain arithmetic used by every enumerator and bound.

All magnitudes (A_h, A_{w,h}, error probabilities) are carried as natural
logarithms; negative infinity encodes an exact zero.
"""

import math
from typing import Iterable, Union

import numpy as np
from scipy.special import entr, gammaln

LogValue = float
LOG_ZERO: LogValue = -np.inf
LN2 = math.log(2.0)

ArrayLike = Union[float, int, np.ndarray]


def log_binomial(n: ArrayLike, k: ArrayLike) -> ArrayLike:
    """
    ln C(n, k) via log-gamma

    Out-of-range arguments (k < 0, k > n, n < 0) map to LOG_ZERO.
    Works elementwise on numpy arrays with broadcasting.
    """
    n_arr = np.asarray(n, dtype=float)
    k_arr = np.asarray(k, dtype=float)
    valid = (k_arr >= 0) & (k_arr <= n_arr) & (n_arr >= 0)
    n_safe = np.where(valid, n_arr, 0.0)
    k_safe = np.where(valid, k_arr, 0.0)
    value = gammaln(n_safe + 1.0) - gammaln(k_safe + 1.0) - gammaln(n_safe - k_safe + 1.0)
    value = np.where(valid, value, LOG_ZERO)
    if np.ndim(value) == 0:
        return float(value)
    return value


def log_sum_exp(terms: Iterable[LogValue]) -> LogValue:
    """ln sum(exp(terms)) with max-shift; empty input returns LOG_ZERO"""
    arr = np.asarray(list(terms) if not isinstance(terms, np.ndarray) else terms, dtype=float).ravel()
    if arr.size == 0:
        return LOG_ZERO

    max_exp = np.max(arr)
    if np.isinf(max_exp):
        return float(max_exp)

    return float(max_exp + np.log(np.sum(np.exp(arr - max_exp))))


def binary_entropy(x: ArrayLike) -> ArrayLike:
    """Natural-base binary entropy H(x); H(0) = H(1) = 0, NaN outside [0, 1]"""
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(invalid='ignore'):
        value = entr(x_arr) + entr(1.0 - x_arr)
    value = np.where((x_arr < 0.0) | (x_arr > 1.0), np.nan, value)
    if np.ndim(value) == 0:
        return float(value)
    return value


def binary_entropy_bits(x: ArrayLike) -> ArrayLike:
    """Base-2 binary entropy h(x), used for the 2^{h(rho)} factor"""
    return binary_entropy(x) / LN2


def scaled_entropy(scale: ArrayLike, numerator: ArrayLike) -> ArrayLike:
    """
    scale * H(numerator / scale) with the continuous extension 0 at scale = 0

    Entries whose ratio leaves [0, 1] (beyond 1e-12 slack) are NaN so that
    callers can mask them as infeasible.
    """
    scale_arr = np.asarray(scale, dtype=float)
    num_arr = np.asarray(numerator, dtype=float)
    tiny = scale_arr <= 1e-15
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(tiny, 0.0, num_arr / np.where(tiny, 1.0, scale_arr))
    ratio = np.where((ratio > 1.0) & (ratio < 1.0 + 1e-12), 1.0, ratio)
    ratio = np.where((ratio < 0.0) & (ratio > -1e-12), 0.0, ratio)
    value = np.where(tiny, 0.0, scale_arr * binary_entropy(ratio))
    value = np.where(tiny & (np.abs(num_arr) > 1e-12), np.nan, value)
    value = np.where(scale_arr < -1e-12, np.nan, value)
    if np.ndim(value) == 0:
        return float(value)
    return value


def db_to_linear(db: ArrayLike) -> ArrayLike:
    """10^(dB/10); +inf maps to +inf"""
    result = np.power(10.0, np.asarray(db, dtype=float) / 10.0)
    if np.ndim(result) == 0:
        return float(result)
    return result


def linear_to_db(value: ArrayLike) -> ArrayLike:
    """10 log10(value); zero maps to -inf"""
    with np.errstate(divide='ignore'):
        result = 10.0 * np.log10(np.asarray(value, dtype=float))
    if np.ndim(result) == 0:
        return float(result)
    return result


def log_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Coefficients of the product of two polynomials given by log coefficients

    c[t] = ln sum_i exp(a[i] + b[t - i]), with LOG_ZERO entries contributing nothing.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if a_arr.size == 0 or b_arr.size == 0:
        return np.array([], dtype=float)
    if a_arr.size < b_arr.size:
        a_arr, b_arr = b_arr, a_arr

    out = np.full(a_arr.size + b_arr.size - 1, LOG_ZERO)
    for i, coeff in enumerate(b_arr):
        if np.isneginf(coeff):
            continue
        window = out[i:i + a_arr.size]
        out[i:i + a_arr.size] = np.logaddexp(window, a_arr + coeff)
    return out

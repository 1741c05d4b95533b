# src/storage/iowe_store.py - CSV persistence for enumerators and spectra
"""
IOWE and spectrum files

IOWE CSV:
    # iowe n=<n> k=<k>
    w,h,log_value
    0,0,0.0
    ...

Spectrum CSV:
    # spectrum n=<n> k=<k> deterministic=<0|1>
    h,log_A,log_Aprime

Values are natural logs written with repr() so a save/load cycle is bit-exact;
the literal -inf is accepted. Only nonzero IOWE entries are written.
"""

import logging
import re
from pathlib import Path
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from src.core.errors import OutputError, ParseError
from src.numerics.logmath import LOG_ZERO
from src.spectra.iowe import DistanceSpectrum, Iowe

_IOWE_COLUMNS = ['w', 'h', 'log_value']
_SPECTRUM_COLUMNS = ['h', 'log_A', 'log_Aprime']
_HEADER_FIELD = re.compile(r'(\w+)=(\S+)')


def _format_log(value: float) -> str:
    if np.isneginf(value):
        return '-inf'
    return repr(float(value))


def _parse_header(line: str, tag: str) -> Dict[str, str]:
    stripped = line.strip()
    if not stripped.startswith('#') or stripped[1:].split()[:1] != [tag]:
        raise ParseError(f"expected header '# {tag} n=<n> k=<k>', got '{stripped}'", line=1)
    fields = dict(_HEADER_FIELD.findall(stripped))
    for key in ('n', 'k'):
        if key not in fields or not fields[key].isdigit():
            raise ParseError(f"header is missing a nonnegative integer '{key}='", line=1)
    return fields


def _read_rows(path: Path, tag: str, columns) -> Tuple[Dict[str, str], pd.DataFrame]:
    """Header fields plus the data rows as strings (row i sits on file line i + 3)"""
    with open(path, 'r') as f:
        fields = _parse_header(f.readline(), tag)
    try:
        frame = pd.read_csv(
            path, skiprows=1, dtype=str, keep_default_na=False, skip_blank_lines=False,
        )
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise ParseError(f"malformed row: {e}", line=int(match.group(1)) if match else None) from e
    except pd.errors.EmptyDataError as e:
        raise ParseError("missing column header", line=2) from e

    if list(frame.columns) != columns:
        raise ParseError(f"expected columns {','.join(columns)}, got {','.join(map(str, frame.columns))}", line=2)
    return fields, frame


def _blank(cell) -> bool:
    return pd.isna(cell) or str(cell).strip() == ''


def _parse_int(text: str, line: int, name: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"{name} must be an integer, got '{text}'", line=line)
    return value


def _parse_float(text: str, line: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{name} must be a real number or -inf, got '{text}'", line=line)
    if np.isnan(value) or np.isposinf(value):
        raise ParseError(f"{name} must be finite or -inf, got '{text}'", line=line)
    return value


# =============================================================================
# IOWE
# =============================================================================

def save_iowe(iowe: Iowe, path) -> Path:
    """Write the nonzero entries of an IOWE, row-major"""
    path = Path(path)
    try:
        with open(path, 'w', newline='') as f:
            f.write(f"# iowe n={iowe.n} k={iowe.k}\n")
            f.write(','.join(_IOWE_COLUMNS) + '\n')
            for w, h, value in iowe.entries():
                f.write(f"{w},{h},{_format_log(value)}\n")
    except OSError as e:
        raise OutputError(f"cannot write IOWE to {path}: {e}") from e

    logging.info(f"[STORAGE] IOWE saved to {path} | n={iowe.n} | k={iowe.k}")
    return path


def load_iowe(path) -> Iowe:
    """
    Parse an IOWE CSV

    Raises:
        ParseError: malformed header, row, duplicate key or out-of-range weight
            (the message carries the file line number)
    """
    path = Path(path)
    fields, frame = _read_rows(path, 'iowe', _IOWE_COLUMNS)
    n, k = int(fields['n']), int(fields['k'])

    entries: Dict[Tuple[int, int], float] = {}
    for idx, row in enumerate(frame.itertuples(index=False)):
        line = idx + 3
        if all(_blank(cell) for cell in row):
            continue
        w = _parse_int(row.w, line, 'w')
        h = _parse_int(row.h, line, 'h')
        value = _parse_float(row.log_value, line, 'log_value')
        if not (0 <= w <= k and 0 <= h <= n):
            raise ParseError(f"entry ({w}, {h}) outside 0 <= w <= {k}, 0 <= h <= {n}", line=line)
        if (w, h) in entries:
            raise ParseError(f"duplicate entry ({w}, {h})", line=line)
        entries[(w, h)] = value

    logging.info(f"[STORAGE] IOWE loaded from {path} | n={n} | k={k} | entries={len(entries)}")
    return Iowe.from_entries(n=n, k=k, entries=entries, label=path.stem)


# =============================================================================
# DISTANCE SPECTRUM
# =============================================================================

def save_spectrum(spectrum: DistanceSpectrum, path) -> Path:
    """Write h, ln A_h and ln A'_h (empty when bit weights are unknown)"""
    path = Path(path)
    try:
        with open(path, 'w', newline='') as f:
            f.write(
                f"# spectrum n={spectrum.n} k={spectrum.k} "
                f"deterministic={int(spectrum.deterministic)}\n"
            )
            f.write(','.join(_SPECTRUM_COLUMNS) + '\n')
            for h in range(spectrum.n + 1):
                weighted = '' if spectrum.log_weighted is None else _format_log(spectrum.log_weighted[h])
                f.write(f"{h},{_format_log(spectrum.log_a[h])},{weighted}\n")
    except OSError as e:
        raise OutputError(f"cannot write spectrum to {path}: {e}") from e

    logging.info(f"[STORAGE] Spectrum saved to {path} | n={spectrum.n}")
    return path


def load_spectrum(path) -> DistanceSpectrum:
    """Parse a spectrum CSV; missing h rows are zero multiplicities"""
    path = Path(path)
    fields, frame = _read_rows(path, 'spectrum', _SPECTRUM_COLUMNS)
    n, k = int(fields['n']), int(fields['k'])
    deterministic = fields.get('deterministic', '0') == '1'

    log_a = np.full(n + 1, LOG_ZERO)
    weighted = np.full(n + 1, LOG_ZERO)
    has_weights = None
    seen = set()
    for idx, row in enumerate(frame.itertuples(index=False)):
        line = idx + 3
        if all(_blank(cell) for cell in row):
            continue
        h = _parse_int(row.h, line, 'h')
        if not 0 <= h <= n:
            raise ParseError(f"weight {h} outside 0..{n}", line=line)
        if h in seen:
            raise ParseError(f"duplicate weight {h}", line=line)
        seen.add(h)
        log_a[h] = _parse_float(row.log_A, line, 'log_A')

        row_has_weight = not _blank(row.log_Aprime)
        if has_weights is None:
            has_weights = row_has_weight
        elif has_weights != row_has_weight:
            raise ParseError("log_Aprime must be given on every row or on none", line=line)
        if row_has_weight:
            weighted[h] = _parse_float(row.log_Aprime, line, 'log_Aprime')

    logging.info(f"[STORAGE] Spectrum loaded from {path} | n={n} | k={k}")
    return DistanceSpectrum(
        n=n, k=k, log_a=log_a,
        log_weighted=weighted if has_weights else None,
        deterministic=deterministic,
        label=path.stem,
    )

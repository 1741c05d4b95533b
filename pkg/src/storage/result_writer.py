# src/storage/result_writer.py - Plot-ready CSV/JSON emission of curves, sweeps and regions
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import CONFIG
from src.core.errors import OutputError


def _digits() -> int:
    return int(CONFIG.get('output.significant_digits', 12))


def _round(value, digits: int):
    """Round floats to `digits` significant digits; other values pass through"""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return [_round(v, digits) for v in value.tolist()]
    return value


def _json_default(value):
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, 'value'):
        return value.value
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _json_safe(value):
    """JSON has no infinities: encode them as strings"""
    if isinstance(value, float) and not math.isfinite(value):
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def emit(results: Sequence[Dict], path, fmt: str = 'csv', run_config: Optional[Dict] = None,
         columns: Optional[List[str]] = None, header: Optional[Dict[str, str]] = None) -> Path:
    """
    Write result rows deterministically

    Args:
        results: list of row dicts (same keys in every row)
        path: output file
        fmt: 'csv' or 'json'
        run_config: full run configuration, embedded as a header comment (csv)
            or under "config" (json)
        columns: explicit column order (default: keys of the first row)
        header: extra `# key=value` lines written ahead of the configuration,
            e.g. {"ensemble": "nsra(q=3)"} for growth curves (csv), or under
            "header" (json)

    Returns:
        Path of the written file

    Raises:
        OutputError: the file cannot be written
    """
    path = Path(path)
    digits = _digits()
    rows = [dict(r) for r in results]
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    config_line = json.dumps(_json_safe(_round(run_config or {}, digits)), sort_keys=True, default=_json_default)

    try:
        if fmt == 'csv':
            frame = pd.DataFrame(rows, columns=columns)
            with open(path, 'w', newline='') as f:
                for key, value in (header or {}).items():
                    f.write(f"# {key}={value}\n")
                f.write(f"# config={config_line}\n")
                frame.to_csv(f, index=False, float_format=f"%.{digits}g", lineterminator='\n')
        elif fmt == 'json':
            payload = {
                "config": json.loads(config_line),
                "columns": columns,
                "rows": [_json_safe(_round({c: row.get(c) for c in columns}, digits)) for row in rows],
            }
            if header:
                payload = {"header": dict(header), **payload}
            with open(path, 'w') as f:
                json.dump(payload, f, indent=2, sort_keys=False, default=_json_default)
                f.write('\n')
        else:
            raise ValueError(f"Unknown output format '{fmt}' (expected csv or json)")
    except OSError as e:
        raise OutputError(f"cannot write results to {path}: {e}") from e

    logging.info(f"[STORAGE] Results written to {path} | format={fmt} | rows={len(rows)}")
    return path


def write_sidecar(payload: Dict, path) -> Path:
    """JSON diagnostics next to a CSV (per-subcode parameters of a bound sweep)"""
    path = Path(path)
    try:
        with open(path, 'w') as f:
            json.dump(_json_safe(_round(payload, _digits())), f, indent=2, default=_json_default)
            f.write('\n')
    except OSError as e:
        raise OutputError(f"cannot write diagnostics to {path}: {e}") from e

    logging.info(f"[STORAGE] Diagnostics saved to {path}")
    return path


def read_results(path) -> pd.DataFrame:
    """Load a CSV written by emit() (header comment lines are skipped)"""
    return pd.read_csv(Path(path), comment='#')


def read_header(path) -> Dict[str, str]:
    """Leading `# key=value` comment lines of a CSV written by emit(), values as raw strings"""
    header = {}
    with open(Path(path), 'r') as f:
        for line in f:
            if not line.startswith('#'):
                break
            key, sep, value = line[1:].strip().partition('=')
            if sep:
                header[key.strip()] = value
    return header


def read_run_config(path) -> Dict:
    """Recover the embedded run configuration of a CSV written by emit()"""
    config_line = read_header(path).get('config')
    if config_line is None:
        raise ValueError(f"{path} carries no embedded run configuration")
    return json.loads(config_line)

"""
Result file export.
Controls and tables go to CSV, solver reports to JSON.  Floats are written
with repr so a read-back value is bit-identical.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import numpy as np

try:
    from ..constants import CONTROL_CSV_STEP_COLUMN, JSON_INDENT, PROBE_CSV_COLUMNS, SCAN_CSV_COLUMNS
    from ..controls import Control
    from ..optimizer import DistanceResult
    from ..validation import ValidationError, validate_file_path
except (ImportError, ValueError):
    from src.constants import CONTROL_CSV_STEP_COLUMN, JSON_INDENT, PROBE_CSV_COLUMNS, SCAN_CSV_COLUMNS
    from src.controls import Control
    from src.optimizer import DistanceResult
    from src.validation import ValidationError, validate_file_path

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_rows(path: PathLike, columns: List[str], rows: Iterable[Dict[str, Any]]) -> Path:
    path = Path(path)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=columns, extrasaction='ignore')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _cell(row.get(key)) for key in columns})
    return path


def control_columns(m: int) -> List[str]:
    return [CONTROL_CSV_STEP_COLUMN] + [f"u_{i + 1}" for i in range(m)]


def write_control_csv(control: Control, path: PathLike) -> Path:
    """One row per step: the step index then the m control components."""
    columns = control_columns(control.m)
    rows = []
    for k, row in enumerate(control.values):
        record = {CONTROL_CSV_STEP_COLUMN: k}
        record.update({columns[i + 1]: float(v) for i, v in enumerate(row)})
        rows.append(record)
    path = _write_rows(path, columns, rows)
    logger.info("Wrote %d control steps to %s", control.n_steps, path)
    return path


def read_control_csv(path: PathLike) -> Control:
    """
    Read a control written by write_control_csv.

    Raises:
        ValidationError: If the header or a row is malformed
    """
    path = validate_file_path(path, must_exist=True)
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        if not header or header[0] != CONTROL_CSV_STEP_COLUMN or len(header) < 2:
            raise ValidationError(f"{path} does not start with a '{CONTROL_CSV_STEP_COLUMN}' column")
        if header != control_columns(len(header) - 1):
            raise ValidationError(f"unexpected control columns {header}")
        values = []
        for line, row in enumerate(reader, start=2):
            try:
                values.append([float(row[key]) for key in header[1:]])
            except (TypeError, ValueError) as e:
                raise ValidationError(f"{path}:{line}: {e}")
    if not values:
        raise ValidationError(f"{path} contains no control steps")
    return Control(np.array(values))


def write_solver_report(result: DistanceResult, path: PathLike, extra: Dict[str, Any] = None) -> Path:
    """JSON dump of a DistanceResult, optionally merged with extra fields."""
    path = Path(path)
    report = result.to_dict()
    if extra:
        report.update(extra)
    with open(path, 'w') as f:
        json.dump(report, f, indent=JSON_INDENT, default=_json_default)
    return path


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=JSON_INDENT, default=_json_default)


def write_probe_csv(rows: Iterable[Dict[str, Any]], path: PathLike) -> Path:
    return _write_rows(path, PROBE_CSV_COLUMNS, rows)


def write_scan_csv(rows: Iterable[Dict[str, Any]], path: PathLike) -> Path:
    return _write_rows(path, SCAN_CSV_COLUMNS, rows)

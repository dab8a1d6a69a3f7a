"""
Data-file writers. Floats are printed with 17 significant digits so that
files round-trip losslessly and re-runs are byte-identical.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np

from ..physics.measures import WignerGrid
from .schemas import TimeSeries

logger = logging.getLogger(__name__)


def format_float(value: Any) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(value) for value in row])
    logger.debug(f"wrote {path}")
    return path


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(_plain(payload), handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")
    logger.debug(f"wrote {path}")
    return path


def write_series(path: Path, series: TimeSeries) -> Path:
    return write_rows(path, series.columns, series.rows())


def write_wigner(path: Path, grid: WignerGrid, metadata: dict) -> List[Path]:
    """Three-column (x, p, w) CSV plus a JSON sidecar with the grid metadata"""
    rows = ((x, p, grid.values[i, j]) for i, x in enumerate(grid.x) for j, p in enumerate(grid.p))
    csv_path = write_rows(path, ["x", "p", "w"], rows)
    sidecar = {
        **metadata,
        "x_range": [float(grid.x[0]), float(grid.x[-1])],
        "p_range": [float(grid.p[0]), float(grid.p[-1])],
        "nx": len(grid.x),
        "np": len(grid.p),
        "method": grid.method,
        "integral": grid.integral,
        "min_value": grid.min_value,
    }
    return [csv_path, write_json(path.with_suffix(".json"), sidecar)]

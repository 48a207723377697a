"""Deterministic CSV tables and JSON sidecars."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

CSV_FORMAT = "%.16e"


def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    """
    Write equal-length columns as CSV with a header row.

    Values are written with 17 significant digits, so a reread reproduces every float exactly
    and repeated runs are byte-identical.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, table, fmt=CSV_FORMAT, delimiter=",", header=",".join(header), comments="")
    logger.info("wrote %s (%d rows)", path, table.shape[0])
    return path


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and complex numbers into plain JSON types."""
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_sidecar(
    path: Path,
    command: str,
    config: Dict[str, Any],
    units: Optional[Dict[str, str]] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """JSON sidecar: resolved config, column units and command metadata, keys sorted."""
    from .. import __version__

    document = {
        "command": command,
        "version": __version__,
        "config": config,
        "units": units or {},
    }
    if extra:
        document.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(document), indent=2, sort_keys=True) + "\n")
    return path

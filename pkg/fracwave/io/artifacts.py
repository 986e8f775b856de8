"""
Artifact files: atomic writes, provenance headers, CSV tables and JSON records.
"""
import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import logging
import numpy as np

from fracwave.common.errors import ArtifactError, ConfigError
from fracwave.constants import VERSION


def config_hash(values: dict) -> str:
    """First 12 hex digits of the sha256 of the canonical sorted-key JSON of a config."""
    canonical = json.dumps(values, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def header_line(command: str, digest: str) -> str:
    return f"# fracwave {VERSION} {command} {digest}"


def format_value(value) -> str:
    """Numbers with 15 significant digits; booleans as true/false."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.15g}"
    return str(value)


def atomic_write(path: str, text: str) -> None:
    """
    Write text to path through a temporary file in the same directory and a rename, so a
    reader never observes a partial artifact.

    Raises:
        ArtifactError: If the directory or the file cannot be written.
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    except OSError as e:
        raise ArtifactError(f"Cannot write '{path}': {e}") from e
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException as e:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        if isinstance(e, OSError):
            raise ArtifactError(f"Cannot write '{path}': {e}") from e
        raise
    logging.info(f"Wrote {target}")


def write_csv(path: str, header: str, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    buffer = io.StringIO()
    buffer.write(header + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    atomic_write(path, buffer.getvalue())


def write_json(path: str, header: str, payload: dict) -> None:
    """JSON records carry the provenance header under the "header" key."""
    record = {"header": header, **payload}
    atomic_write(path, json.dumps(record, sort_keys=True, indent=2, default=_json_default) + "\n")


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Cannot serialise {type(value).__name__}")


def read_table(path: str, min_columns: int = 2) -> Tuple[List[str], np.ndarray]:
    """
    Read a numeric CSV table, skipping '#' comment lines.

    The first non-comment line is taken as the column names when it is not numeric.

    Returns:
        Column names (empty when the file has none) and a 2-D float array of rows.

    Raises:
        ConfigError: If the file is missing, empty or malformed.
    """
    source = Path(path)
    if not source.is_file():
        logging.error(f"Data file '{path}' does not exist.")
        raise ConfigError(f"Data file '{path}' does not exist")

    with open(source, "r", encoding="utf-8", newline="") as f:
        lines = [line for line in f if line.strip() and not line.lstrip().startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise ConfigError(f"Data file '{path}' holds no rows")

    names: List[str] = []
    try:
        float(rows[0][0])
    except ValueError:
        names = [name.strip() for name in rows[0]]
        rows = rows[1:]
    try:
        data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as e:
        raise ConfigError(f"Data file '{path}' has a non-numeric entry: {e}") from e
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] < min_columns:
        raise ConfigError(f"Data file '{path}' needs at least {min_columns} columns of numbers")
    return names, data

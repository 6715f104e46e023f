# utils/helpers.py
import csv
import json
import os
from typing import Dict, Iterable, List, Sequence

from core.errors import ConfigError, VolumeIOError
from utils.constants import CSV_HEADER_COMMENT


def ensure_dir(path: str) -> str:
    """Create a directory (and parents); I/O failures become VolumeIOError"""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise VolumeIOError(f"cannot create directory {path}: {e}") from e
    if not os.access(path, os.W_OK):
        raise VolumeIOError(f"directory {path} is not writable")
    return path


def read_json(path: str) -> Dict:
    """Load a JSON config file; unreadable or malformed files are config errors"""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object at top level")
    return data


def write_json(path: str, data: Dict):
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(data, handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as e:
        raise VolumeIOError(f"cannot write {path}: {e}") from e


def format_float(value: float) -> str:
    """Shortest repr that round-trips a float64 bitwise"""
    return repr(float(value))


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    """CSV with the versioned schema comment as its first line"""
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(CSV_HEADER_COMMENT + "\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    except OSError as e:
        raise VolumeIOError(f"cannot write {path}: {e}") from e


def read_csv(path: str) -> List[Dict[str, str]]:
    """Rows of a CSV written by write_csv, as dicts keyed by header"""
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            lines = [line for line in handle if not line.startswith("#")]
    except OSError as e:
        raise VolumeIOError(f"cannot read {path}: {e}") from e
    return list(csv.DictReader(lines))


def format_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    """Fixed-width plain-text table for terminal output"""
    cells = [[str(h) for h in header]] + [
        [f"{v:.4f}" if isinstance(v, float) else str(v) for v in row] for row in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)


def parse_window(text: str) -> tuple:
    """'3,3,3' -> (3, 3, 3)"""
    try:
        window = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"window must be three comma-separated integers, got '{text}'")
    if len(window) != 3:
        raise ConfigError(f"window must have three extents, got '{text}'")
    return window

"""
Triangle pair evaluation runner.

Reads pairs from JSON or CSV, evaluates all four Galerkin integrals for
one pair at a time, and writes result rows as CSV or JSON.
"""

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from laplace_panels import GalerkinError, InputError, galerkin_all, triangle_from_vertices
from version import APP_NAME, APP_VERSION

logger = logging.getLogger(__name__)

OUTPUT_COLUMNS = ("id", "L", "M", "Lp_x", "Lp_y", "Lp_z", "Mp", "contact", "branch", "regularized")
INPUT_COLUMNS = ("id",) + tuple(
    f"{tri}{k}{axis}" for tri in ("x", "y") for k in (1, 2, 3) for axis in "xyz"
)
FLOAT_COLUMNS = ("L", "M", "Lp_x", "Lp_y", "Lp_z", "Mp")


@dataclass(frozen=True, eq=False)
class PairInputRecord:
    id: str
    x: np.ndarray   # 3 x 3, one vertex per row
    y: np.ndarray


def format_float(value):
    """17 significant digits, enough to round-trip any double."""
    return f"{value:.16e}"


# -----------------------------------------------------------------------------
# Input
# -----------------------------------------------------------------------------

def _record(record_id, coords, line=None):
    try:
        values = np.array([float(c) for c in coords], dtype=float)
    except (TypeError, ValueError):
        raise InputError("Coordinates must be numbers", line=line, record_id=record_id) from None
    if values.size != 18:
        raise InputError(f"Expected 18 coordinates, got {values.size}", line=line, record_id=record_id)
    if not np.all(np.isfinite(values)):
        raise InputError("Coordinates must be finite", line=line, record_id=record_id)
    return PairInputRecord(id=str(record_id), x=values[:9].reshape(3, 3), y=values[9:].reshape(3, 3))


def parse_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"Invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, list):
        raise InputError("JSON input must be an array of pair objects")

    records = []
    for index, item in enumerate(data):
        if not isinstance(item, dict) or not {"id", "x", "y"} <= set(item):
            raise InputError(f"Entry {index} must be an object with id, x and y")
        record_id = item["id"]
        try:
            x = np.asarray(item["x"], dtype=float)
            y = np.asarray(item["y"], dtype=float)
        except (TypeError, ValueError):
            raise InputError("Vertices must be numbers", record_id=record_id) from None
        if x.shape != (3, 3) or y.shape != (3, 3):
            raise InputError("x and y must each be three 3D points", record_id=record_id)
        records.append(_record(record_id, list(x.ravel()) + list(y.ravel())))
    return records


def parse_csv(lines):
    records = []
    reader = csv.reader(lines)
    for row in reader:
        line = reader.line_num
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if row[0].strip() == "id":
            continue
        if len(row) != len(INPUT_COLUMNS):
            raise InputError(
                f"Expected {len(INPUT_COLUMNS)} columns, got {len(row)}",
                line=line,
                record_id=row[0].strip(),
            )
        records.append(_record(row[0].strip(), row[1:], line=line))
    return records


def load_records(input_path):
    """
    Read pair records; the format follows the file extension (.json, otherwise CSV).

    Raises:
        InputError: naming the offending line or record.
    """
    path = Path(input_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from None
    if path.suffix.lower() == ".json":
        return parse_json(text)
    return parse_csv(text.splitlines())


# -----------------------------------------------------------------------------
# Evaluation
# -----------------------------------------------------------------------------

def output_row(record_id, out):
    return {
        "id": record_id,
        "L": out.L,
        "M": out.M,
        "Lp_x": float(out.Lp[0]),
        "Lp_y": float(out.Lp[1]),
        "Lp_z": float(out.Lp[2]),
        "Mp": out.Mp,
        "contact": str(out.contact),
        "branch": out.branch.value,
        "regularized": out.Mp_is_regularized,
    }


def evaluate_record(record, tolerances=None):
    """
    Evaluate L, M, L' and M' for one input record.

    Args:
        record: PairInputRecord.
        tolerances: Optional Tolerances.

    Returns:
        dict: {"status": "success"|"failed", "message": str, "id": str, "row": dict|None}
    """
    tol_geom = None if tolerances is None else tolerances.tol_geom
    try:
        tx = triangle_from_vertices(*record.x, tol_geom=tol_geom)
        ty = triangle_from_vertices(*record.y, tol_geom=tol_geom)
        out = galerkin_all(tx, ty, tolerances)
    except GalerkinError as e:
        return {
            "status": "failed",
            "message": f"{type(e).__name__}: {e}",
            "id": record.id,
            "row": None,
        }
    row = output_row(record.id, out)
    logger.debug("Evaluated %s: %s", record.id, row)
    return {
        "status": "success",
        "message": f"Evaluated {record.id} ({row['contact']}, {row['branch']})",
        "id": record.id,
        "row": row,
    }


# -----------------------------------------------------------------------------
# Output
# -----------------------------------------------------------------------------

def _serialized(row):
    out = {}
    for key in OUTPUT_COLUMNS:
        value = row[key]
        if key in FLOAT_COLUMNS:
            out[key] = format_float(value)
        elif key == "regularized":
            out[key] = "true" if value else "false"
        else:
            out[key] = str(value)
    return out


def write_rows(rows, output_path, output_format="csv", metadata=None):
    """
    Write OutputRow dicts.

    CSV starts with '#' metadata lines, then the header; JSON is an object
    with "metadata" and "rows".

    Returns:
        dict: {"status": "success"|"failed", "message": str, "output_path": str}
    """
    output_path = Path(output_path)
    if output_format not in ("csv", "json"):
        return {
            "status": "failed",
            "message": f"Unsupported output format: {output_format}. Use: ('csv', 'json')",
            "output_path": "",
        }
    metadata = {"generator": f"{APP_NAME} {APP_VERSION}", **(metadata or {})}
    serialized = [_serialized(row) for row in rows]
    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with output_path.open("w", encoding="utf-8", newline="") as f:
            if output_format == "json":
                json.dump({"metadata": metadata, "rows": serialized}, f, indent=2)
                f.write("\n")
            else:
                for key, value in metadata.items():
                    f.write(f"# {key}: {value}\n")
                writer = csv.DictWriter(f, fieldnames=OUTPUT_COLUMNS, lineterminator="\n")
                writer.writeheader()
                writer.writerows(serialized)
    except OSError as e:
        return {
            "status": "failed",
            "message": f"Cannot write {output_path}: {e.strerror}",
            "output_path": "",
        }
    return {
        "status": "success",
        "message": f"Wrote {len(rows)} row(s) to {output_path}",
        "output_path": str(output_path),
    }


def read_rows(path):
    """Parse an emitted CSV back into OutputRow dicts (floats restored exactly)."""
    lines = [
        line for line in Path(path).read_text(encoding="utf-8").splitlines()
        if not line.startswith("#")
    ]
    rows = []
    for raw in csv.DictReader(lines):
        row = dict(raw)
        for key in FLOAT_COLUMNS:
            row[key] = float(row[key])
        row["regularized"] = row["regularized"] == "true"
        rows.append(row)
    return rows


def records_to_json(records):
    """Serialize records in the JSON input schema."""
    return json.dumps(
        [{"id": r.id, "x": r.x.tolist(), "y": r.y.tolist()} for r in records],
        indent=2,
    )

"""Readers and writers for the on-disk tables and binary arrays.

CSV files are UTF-8 (a BOM is tolerated) with LF or CRLF line endings.
Scores are written with fixed 6-decimal formatting so outputs are byte-stable.
"""

from __future__ import annotations

import csv
import io
import math
import re
import struct
from pathlib import Path

import numpy as np

from .errors import MalformedData

SEVERITY_SUFFIX = re.compile(r"^(?P<id>.+)__s(?P<sev>\d+\.\d+)$")


def fmt6(value: float) -> str:
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def severity_tag(severity: float) -> str:
    return f"{severity:.2f}"


def split_severity(name: str):
    """``"img7__s0.30"`` -> ``("img7", 0.3)``; names without the suffix give ``(name, None)``."""
    m = SEVERITY_SUFFIX.match(name)
    if not m:
        return name, None
    return m.group("id"), float(m.group("sev"))


def _rows(path, header):
    """Yield ``(line_number, row)`` after checking the header."""
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise MalformedData(f"{path}: empty file", line=1) from None
        except csv.Error as exc:
            raise MalformedData(f"{path}: {exc}", line=1) from None
        if [c.strip() for c in first] != list(header):
            raise MalformedData(f"{path}: expected header {','.join(header)!r}", line=1)
        try:
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise MalformedData(
                        f"{path}: expected {len(header)} fields, got {len(row)}", line=reader.line_num)
                yield reader.line_num, [c.strip() for c in row]
        except csv.Error as exc:
            raise MalformedData(f"{path}: {exc}", line=reader.line_num) from None


def _unit_float(text, what, path, line):
    try:
        value = float(text)
    except ValueError:
        raise MalformedData(f"{path}: {what} {text!r} is not a number", line=line) from None
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise MalformedData(f"{path}: {what} {text!r} outside [0, 1]", line=line)
    return value


def _check_new(table, key, path, line):
    if key in table:
        raise MalformedData(f"{path}: duplicate image_id {key!r}", line=line)


# --------------------------------------------------------------------------
# score / label tables


def read_score_table(path) -> dict[str, float]:
    table = {}
    for line, (image_id, score) in _rows(path, ("image_id", "score")):
        _check_new(table, image_id, path, line)
        table[image_id] = _unit_float(score, "score", path, line)
    return table


def write_score_table(path, table: dict[str, float]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("image_id,score\n")
        for image_id in sorted(table):
            fh.write(f"{image_id},{fmt6(table[image_id])}\n")


def read_label_table(path) -> dict[str, int]:
    table = {}
    for line, (image_id, label) in _rows(path, ("image_id", "label")):
        _check_new(table, image_id, path, line)
        if label not in ("0", "1"):
            raise MalformedData(f"{path}: label must be 0 or 1, got {label!r}", line=line)
        table[image_id] = int(label)
    return table


def write_label_table(path, table: dict[str, int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("image_id,label\n")
        for image_id in sorted(table):
            fh.write(f"{image_id},{int(table[image_id])}\n")


# --------------------------------------------------------------------------
# detections

DETECTION_HEADER = ("image_id", "x", "y", "w", "h", "confidence")


def parse_detection_row(fields, path="<detections>", line=None):
    """Return ``(image_id, bbox_tuple | None, confidence | None)``."""
    from .facegeom.geometry import BBox  # local import: formats is imported by facegeom

    image_id, *rest = fields
    if not image_id:
        raise MalformedData(f"{path}: empty image_id", line=line)
    if all(not v for v in rest):
        return image_id, None, None
    if any(not v for v in rest):
        raise MalformedData(f"{path}: partial detection for {image_id!r}", line=line)
    try:
        x, y, w, h = (float(v) for v in rest[:4])
    except ValueError:
        raise MalformedData(f"{path}: non-numeric box for {image_id!r}", line=line) from None
    conf = _unit_float(rest[4], "confidence", path, line)
    if not all(math.isfinite(v) for v in (x, y, w, h)) or w <= 0 or h <= 0:
        raise MalformedData(f"{path}: invalid box for {image_id!r}", line=line)
    return image_id, BBox(x, y, w, h), conf


def read_detections(path) -> dict[str, list]:
    """Map image_id -> list of ``(BBox, confidence)``; empty list for absent detections."""
    out: dict[str, list] = {}
    for line, row in _rows(path, DETECTION_HEADER):
        image_id, box, conf = parse_detection_row(row, path, line)
        entries = out.setdefault(image_id, [])
        if box is not None:
            entries.append((box, conf))
    return out


def format_detection(image_id, box, confidence) -> str:
    if box is None:
        return f"{image_id},,,,,"
    return ",".join([image_id, fmt6(box.x), fmt6(box.y), fmt6(box.w), fmt6(box.h), fmt6(confidence)])


def write_detections(path, records) -> None:
    """``records``: iterable of objects with ``image_id``, ``bbox`` and ``confidence``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(DETECTION_HEADER) + "\n")
        for rec in sorted(records, key=lambda r: r.image_id):
            fh.write(format_detection(rec.image_id, rec.bbox, rec.confidence) + "\n")


# --------------------------------------------------------------------------
# severity sweeps

SWEEP_HEADER = ("severity", "image_id", "value")


def read_sweep(path) -> list[tuple[float, str, float]]:
    rows = []
    for line, (sev, image_id, value) in _rows(path, SWEEP_HEADER):
        try:
            s, v = float(sev), float(value)
        except ValueError:
            raise MalformedData(f"{path}: non-numeric severity or value", line=line) from None
        if not (math.isfinite(s) and math.isfinite(v)) or not 0.0 <= s <= 1.0:
            raise MalformedData(f"{path}: severity or value out of range", line=line)
        if abs(s * 10 - round(s * 10)) > 1e-9:
            raise MalformedData(f"{path}: severity {sev} is not a multiple of 0.1", line=line)
        rows.append((round(s, 1), image_id, v))
    if not rows:
        raise MalformedData(f"{path}: sweep has no rows", line=None)
    return rows


def read_sweep_or_scores(path) -> list[tuple[float, str, float]]:
    """Read a sweep CSV, or a score table whose ids carry ``__s<severity>`` suffixes."""
    with open(path, encoding="utf-8-sig", newline="") as fh:
        first = fh.readline().strip()
    if first.replace(" ", "") != "image_id,score":
        return read_sweep(path)
    rows = []
    for image_id, score in sorted(read_score_table(path).items()):
        base, severity = split_severity(image_id)
        if severity is None or severity > 1.0 or abs(severity * 10 - round(severity * 10)) > 1e-9:
            raise MalformedData(f"{path}: score id {image_id!r} lacks a valid __s<severity> suffix")
        rows.append((round(severity, 1), base, score))
    if not rows:
        raise MalformedData(f"{path}: score table has no rows", line=None)
    return rows


def write_sweep(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(SWEEP_HEADER) + "\n")
        for sev, image_id, value in sorted(rows, key=lambda r: (r[0], r[1])):
            fh.write(f"{severity_tag(sev)},{image_id},{fmt6(value)}\n")


# --------------------------------------------------------------------------
# binary activation maps and embeddings

AMAP_MAGIC = b"AMAP"
EVEC_MAGIC = b"EVEC"


def encode_amap(values) -> bytes:
    arr = np.asarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("activation map must be 2-D")
    rows, cols = arr.shape
    return AMAP_MAGIC + struct.pack("<II", rows, cols) + arr.tobytes()


def decode_amap(data: bytes) -> np.ndarray:
    if data[:4] != AMAP_MAGIC or len(data) < 12:
        raise MalformedData("not an AMAP file")
    rows, cols = struct.unpack_from("<II", data, 4)
    if len(data) != 12 + 4 * rows * cols:
        raise MalformedData(f"AMAP payload size does not match {rows}x{cols}")
    return np.frombuffer(data, dtype="<f4", offset=12).reshape(rows, cols).astype(np.float64)


def encode_evec(values) -> bytes:
    arr = np.asarray(values, dtype="<f4").ravel()
    return EVEC_MAGIC + struct.pack("<I", arr.size) + arr.tobytes()


def decode_evec(data: bytes) -> np.ndarray:
    if data[:4] != EVEC_MAGIC or len(data) < 8:
        raise MalformedData("not an EVEC file")
    (dim,) = struct.unpack_from("<I", data, 4)
    if len(data) != 8 + 4 * dim:
        raise MalformedData(f"EVEC payload size does not match dim {dim}")
    return np.frombuffer(data, dtype="<f4", offset=8).astype(np.float64)


def parse_grid_csv(text: str, path="<grid>") -> np.ndarray:
    rows = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise MalformedData(f"{path}: non-numeric grid value", line=line_no) from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise MalformedData(f"{path}: grid must be a non-empty rectangle")
    return np.array(rows, dtype=np.float64)


def read_activation_map(path) -> np.ndarray:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == AMAP_MAGIC:
        return decode_amap(data)
    return parse_grid_csv(data.decode("utf-8-sig"), path)


def read_embedding(path) -> np.ndarray:
    return decode_evec(Path(path).read_bytes())

import csv
import json
import logging
import os
from json.decoder import JSONDecodeError
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import TypeAdapter, ValidationError

from smoothing.exceptions import MeshFormatError
from smoothing.models import Mesh, MeshFormat, ReportFormat, ReportRecord

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)

# all-z-equal files within this tolerance are read as planar meshes
FLAT_Z_TOLERANCE = 1e-12

REPORT_FIELDS = list(ReportRecord.model_fields)
_records = TypeAdapter(List[ReportRecord])


def format_for(path, fmt=None) -> MeshFormat:
    if fmt is not None:
        return MeshFormat(str(fmt).lower())
    suffix = Path(path).suffix.lower().lstrip(".")
    try:
        return MeshFormat(suffix)
    except ValueError:
        raise MeshFormatError(f"{path}: cannot tell mesh format from extension '.{suffix}', expected .obj or .off")


def _number(token: str, path, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise MeshFormatError(f"{path}:{lineno}: expected a number, got '{token}'")


def _index(token: str, path, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MeshFormatError(f"{path}:{lineno}: expected an integer index, got '{token}'")


def _check_arity(face: Sequence[int], face_number: int, path, lineno: int):
    if len(face) not in (3, 4):
        raise MeshFormatError(f"{path}:{lineno}: face {face_number}: unsupported face arity {len(face)}")


def _check_range(face: Sequence[int], n_vertices: int, face_number: int, path, lineno: int, first: int = 0):
    for node in face:
        if not 0 <= node < n_vertices:
            raise MeshFormatError(
                f"{path}:{lineno}: face {face_number}: vertex index {node + first} out of range {first}..{n_vertices - 1 + first}"
            )


def _read_obj(path, lines):
    vertices, faces, face_lines = [], [], []
    skipped = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        record = tokens[0]
        if record == "v":
            if len(tokens) not in (3, 4, 5, 7):
                raise MeshFormatError(f"{path}:{lineno}: vertex needs 2 or 3 coordinates, got '{line}'")
            coords = [_number(t, path, lineno) for t in tokens[1:4]]
            vertices.append(coords + [0.0] * (3 - len(coords)))
        elif record == "f":
            face = []
            for token in tokens[1:]:
                index = _index(token.split("/", 1)[0], path, lineno)
                # OBJ is 1-based, negative indices count back from the last vertex read so far
                resolved = index - 1 if index > 0 else len(vertices) + index
                if index == 0 or resolved < 0:
                    raise MeshFormatError(f"{path}:{lineno}: face {len(faces)}: vertex index {index} out of range")
                face.append(resolved)
            _check_arity(face, len(faces), path, lineno)
            faces.append(face)
            face_lines.append(lineno)
        else:
            skipped[record] = skipped.get(record, 0) + 1
    for face_number, (face, lineno) in enumerate(zip(faces, face_lines)):
        _check_range(face, len(vertices), face_number, path, lineno, first=1)
    for record, count in sorted(skipped.items()):
        logger.warning(f"{path}: skipped {count} unsupported '{record}' record(s)")
    return vertices, faces


def _read_off(path, lines):
    content = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            content.append((lineno, line.split()))
    if not content or content[0][1][0] != "OFF":
        raise MeshFormatError(f"{path}:1: OFF header missing")

    lineno, header = content[0]
    rest = content[1:]
    counts = header[1:]
    if not counts:
        if not rest:
            raise MeshFormatError(f"{path}:{lineno}: counts line missing")
        lineno, counts = rest[0]
        rest = rest[1:]
    if len(counts) < 2:
        raise MeshFormatError(f"{path}:{lineno}: counts line needs vertex and face counts")
    n_vertices, n_faces = _index(counts[0], path, lineno), _index(counts[1], path, lineno)
    if len(rest) < n_vertices + n_faces:
        raise MeshFormatError(f"{path}: header announces {n_vertices} vertices and {n_faces} faces, file ends early")

    vertices = []
    for lineno, tokens in rest[:n_vertices]:
        if len(tokens) < 3:
            raise MeshFormatError(f"{path}:{lineno}: vertex needs 3 coordinates")
        vertices.append([_number(t, path, lineno) for t in tokens[:3]])

    faces = []
    for lineno, tokens in rest[n_vertices:n_vertices + n_faces]:
        arity = _index(tokens[0], path, lineno)
        if len(tokens) < arity + 1:
            raise MeshFormatError(f"{path}:{lineno}: face lists {len(tokens) - 1} indices, announces {arity}")
        # trailing colour values are ignored
        face = [_index(t, path, lineno) for t in tokens[1:arity + 1]]
        _check_arity(face, len(faces), path, lineno)
        _check_range(face, n_vertices, len(faces), path, lineno)
        faces.append(face)
    return vertices, faces


def read_mesh(path, fmt=None, dimension: Optional[int] = None) -> Mesh:
    """
    Read an OBJ or OFF file. Planar meshes are detected as files whose z values
    are all equal; pass dimension to force 2 or 3.
    """
    fmt = format_for(path, fmt)
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except UnicodeDecodeError as e:
        raise MeshFormatError(f"{path}: not a UTF-8 text file: {e.reason} at byte {e.start}")
    vertices, faces = _read_obj(path, lines) if fmt == MeshFormat.OBJ else _read_off(path, lines)

    nodes = np.array(vertices, dtype=float).reshape(-1, 3)
    if dimension is None:
        flat = len(nodes) == 0 or float(np.ptp(nodes[:, 2])) <= FLAT_Z_TOLERANCE
        dimension = 2 if flat else 3
    elif dimension == 2 and len(nodes) and float(np.ptp(nodes[:, 2])) > FLAT_Z_TOLERANCE:
        logger.warning(f"{path}: read as 2D, dropping z values that vary by {float(np.ptp(nodes[:, 2])):.3g}")
    if dimension == 2:
        nodes = nodes[:, :2]

    try:
        mesh = Mesh(dimension=dimension, nodes=nodes, elements=faces)
    except ValidationError as v:
        logger.error(f"{path}: mesh validation failed: {v}")
        raise MeshFormatError(f"{path}: invalid mesh: {v.errors()[0]['msg']}")
    logger.info(f"Read {path}: {mesh.n_nodes} nodes, {mesh.n_elements} elements, {dimension}D")
    return mesh


def _coordinate(value: float) -> str:
    # 17 significant digits round-trip every binary64 value
    return f"{value:.17g}"


def write_mesh(mesh: Mesh, path, fmt=None) -> None:
    fmt = format_for(path, fmt)
    nodes = mesh.nodes
    if mesh.dimension == 2:
        nodes = np.column_stack([nodes, np.zeros(mesh.n_nodes)])

    out = []
    if fmt == MeshFormat.OBJ:
        for x, y, z in nodes:
            out.append(f"v {_coordinate(x)} {_coordinate(y)} {_coordinate(z)}")
        for element in mesh.elements:
            out.append("f " + " ".join(str(node + 1) for node in element))
    else:
        out.append("OFF")
        out.append(f"{mesh.n_nodes} {mesh.n_elements} 0")
        for x, y, z in nodes:
            out.append(f"{_coordinate(x)} {_coordinate(y)} {_coordinate(z)}")
        for element in mesh.elements:
            out.append(f"{len(element)} " + " ".join(str(node) for node in element))

    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(out) + "\n")
    logger.info(f"Wrote {path}")


def _report_format(path, fmt) -> ReportFormat:
    if fmt is not None:
        return ReportFormat(str(fmt).lower())
    return ReportFormat.CSV if Path(path).suffix.lower() == ".csv" else ReportFormat.JSON


def write_report(history: Sequence[ReportRecord], path, fmt=None) -> None:
    if not history:
        raise ValueError("cannot write an empty report")
    fmt = _report_format(path, fmt)
    with open(path, "w", newline="") as handle:
        if fmt == ReportFormat.JSON:
            json.dump([record.model_dump() for record in history], handle, indent=2)
            handle.write("\n")
        else:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(REPORT_FIELDS)
            for record in history:
                row = []
                for name in REPORT_FIELDS:
                    value = getattr(record, name)
                    if value is None:
                        row.append("")
                    elif isinstance(value, float):
                        row.append(repr(float(value)))
                    else:
                        row.append(str(value))
                writer.writerow(row)


def read_report(path, fmt=None) -> List[ReportRecord]:
    fmt = _report_format(path, fmt)
    with open(path, newline="") as handle:
        try:
            if fmt == ReportFormat.JSON:
                return _records.validate_python(json.load(handle))
            rows = [{k: (v if v != "" else None) for k, v in row.items()} for row in csv.DictReader(handle)]
            return _records.validate_python(rows)
        except (JSONDecodeError, ValidationError) as e:
            raise MeshFormatError(f"{path}: unreadable report: {e}")

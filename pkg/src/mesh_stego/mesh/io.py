"""
OFF / ASCII-PLY reading and writing.

Coordinates are written from their quantized integers so the text carries
exactly `decimals` fractional digits and re-parses to the same integers.
"""
import io
import logging
import math
from pathlib import Path
from typing import Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np

from mesh_stego.core.errors import MeshParseError, QuantizationError
from mesh_stego.mesh.mesh import Mesh

logger = logging.getLogger(__name__)

FORMATS = ("off", "ply")
# above this, float64 coordinates no longer hold the integer exactly
MAX_EXACT_INTEGER = 2 ** 53


class _Lines:
    """Numbered, comment-stripped, non-blank lines."""

    def __init__(self, text: str, comment: Optional[str] = "#"):
        self._items: List[Tuple[int, List[str]]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw
            if comment is not None and comment in line:
                line = line[:line.index(comment)]
            tokens = line.split()
            if tokens:
                self._items.append((number, tokens))
        self._pos = 0

    def next(self, what: str) -> Tuple[int, List[str]]:
        if self._pos >= len(self._items):
            last = self._items[-1][0] if self._items else 0
            raise MeshParseError(f"Unexpected end of file while reading {what}", line=last + 1)
        item = self._items[self._pos]
        self._pos += 1
        return item

    def remaining(self) -> Iterator[Tuple[int, List[str]]]:
        while self._pos < len(self._items):
            yield self.next("trailing data")


def _to_int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MeshParseError("Expected an integer", line=line, token=token) from None


def _to_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MeshParseError("Non-numeric coordinate", line=line, token=token) from None
    if not math.isfinite(value):
        raise MeshParseError("Non-finite coordinate", line=line, token=token)
    return value


def _check_face(indices: List[int], n_vertices: int, line: int):
    for idx in indices:
        if not 0 <= idx < n_vertices:
            raise MeshParseError(f"Face index out of range [0, {n_vertices})", line=line, token=str(idx))
    if len(set(indices)) != 3:
        raise MeshParseError("Face repeats a vertex index", line=line)


def _parse_off(text: str) -> Mesh:
    lines = _Lines(text)
    number, tokens = lines.next("OFF header")
    if tokens[0] != "OFF":
        raise MeshParseError("Malformed OFF header, expected 'OFF'", line=number, token=tokens[0])
    counts = tokens[1:]
    if not counts:
        number, counts = lines.next("OFF counts")
    if len(counts) < 2:
        raise MeshParseError("Malformed OFF counts line, expected 'nV nF nE'", line=number)
    n_vertices = _to_int(counts[0], number)
    n_faces = _to_int(counts[1], number)
    if n_vertices < 0 or n_faces < 0:
        raise MeshParseError("Negative element count", line=number)

    vertices = np.empty((n_vertices, 3), dtype=np.float64)
    text_coords = []
    for i in range(n_vertices):
        number, tokens = lines.next(f"vertex {i}")
        if len(tokens) < 3:
            raise MeshParseError("Vertex line needs 3 coordinates", line=number)
        vertices[i] = [_to_float(t, number) for t in tokens[:3]]
        text_coords.append(tokens[:3])

    faces = np.empty((n_faces, 3), dtype=np.int64)
    for i in range(n_faces):
        number, tokens = lines.next(f"face {i}")
        arity = _to_int(tokens[0], number)
        if arity != 3:
            raise MeshParseError(f"Non-triangular face with {arity} vertices", line=number, token=tokens[0])
        if len(tokens) < 4:
            raise MeshParseError("Face line needs 3 vertex indices", line=number)
        indices = [_to_int(t, number) for t in tokens[1:4]]
        _check_face(indices, n_vertices, number)
        faces[i] = indices

    text_array = np.array(text_coords, dtype=str).reshape(-1, 3)
    return Mesh(vertices, faces, coordinate_text=text_array)


def _parse_ply(text: str) -> Mesh:
    lines = _Lines(text, comment=None)
    number, tokens = lines.next("PLY magic")
    if tokens != ["ply"]:
        raise MeshParseError("Malformed PLY header, expected 'ply'", line=number, token=tokens[0])
    number, tokens = lines.next("PLY format")
    if tokens[0] != "format" or len(tokens) < 2:
        raise MeshParseError("Malformed PLY format line", line=number)
    if tokens[1] != "ascii":
        raise MeshParseError(f"Unsupported PLY encoding '{tokens[1]}', only ascii is read", line=number, token=tokens[1])

    # [name, count, [(prop name, is_list)]]
    elements: List[list] = []
    while True:
        number, tokens = lines.next("PLY header")
        keyword = tokens[0]
        if keyword == "end_header":
            break
        if keyword in ("comment", "obj_info"):
            continue
        if keyword == "element":
            if len(tokens) != 3:
                raise MeshParseError("Malformed element line", line=number)
            elements.append([tokens[1], _to_int(tokens[2], number), []])
        elif keyword == "property":
            if not elements:
                raise MeshParseError("Property before any element", line=number)
            if tokens[1] == "list":
                if len(tokens) != 5:
                    raise MeshParseError("Malformed list property", line=number)
                elements[-1][2].append((tokens[4], True))
            else:
                if len(tokens) != 3:
                    raise MeshParseError("Malformed property line", line=number)
                elements[-1][2].append((tokens[2], False))
        else:
            raise MeshParseError(f"Unknown PLY header keyword '{keyword}'", line=number, token=keyword)

    names = [e[0] for e in elements]
    if "vertex" not in names:
        raise MeshParseError("PLY header declares no vertex element")
    n_vertices = elements[names.index("vertex")][1]
    vertex_props = [p[0] for p in elements[names.index("vertex")][2]]
    for axis in ("x", "y", "z"):
        if axis not in vertex_props:
            raise MeshParseError(f"PLY vertex element lacks property '{axis}'")

    vertices = np.empty((n_vertices, 3), dtype=np.float64)
    text_coords: List[List[str]] = []
    faces_list: List[List[int]] = []
    for name, count, props in elements:
        for i in range(count):
            number, tokens = lines.next(f"{name} {i}")
            values = {}
            pos = 0
            for prop, is_list in props:
                if pos >= len(tokens):
                    raise MeshParseError(f"Too few values for element '{name}'", line=number)
                if is_list:
                    size = _to_int(tokens[pos], number)
                    values[prop] = tokens[pos + 1:pos + 1 + size]
                    if len(values[prop]) != size:
                        raise MeshParseError("Truncated list property", line=number)
                    values[prop] = [tokens[pos]] + values[prop]
                    pos += 1 + size
                else:
                    values[prop] = tokens[pos]
                    pos += 1
            if name == "vertex":
                coords = [values["x"], values["y"], values["z"]]
                vertices[i] = [_to_float(t, number) for t in coords]
                text_coords.append(coords)
            elif name == "face":
                key = "vertex_indices" if "vertex_indices" in values else "vertex_index"
                if key not in values:
                    raise MeshParseError("PLY face element lacks vertex_indices", line=number)
                listed = values[key]
                if _to_int(listed[0], number) != 3:
                    raise MeshParseError(f"Non-triangular face with {listed[0]} vertices", line=number, token=listed[0])
                indices = [_to_int(t, number) for t in listed[1:]]
                _check_face(indices, n_vertices, number)
                faces_list.append(indices)

    faces = np.array(faces_list, dtype=np.int64).reshape(-1, 3)
    text_array = np.array(text_coords, dtype=str).reshape(-1, 3)
    return Mesh(vertices, faces, coordinate_text=text_array)


def parse_mesh(text: Union[str, TextIO], fmt: str = "off") -> Mesh:
    if not isinstance(text, str):
        text = text.read()
    fmt = fmt.lower()
    if fmt == "off":
        return _parse_off(text)
    if fmt == "ply":
        return _parse_ply(text)
    raise ValueError(f"Unsupported mesh format '{fmt}', expected one of {FORMATS}")


def fixed_point_integers(values: np.ndarray, decimals: int) -> np.ndarray:
    scaled = np.asarray(values, dtype=np.float64) * (10.0 ** decimals)
    if scaled.size and np.max(np.abs(scaled)) >= MAX_EXACT_INTEGER:
        raise QuantizationError(f"Coordinates too large for {decimals} decimal digits")
    return np.rint(scaled).astype(np.int64)


def format_fixed(value: int, decimals: int) -> str:
    """Integer `value` scaled by 10^-decimals, printed with exactly `decimals` digits."""
    if decimals == 0:
        return str(value)
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(value), 10 ** decimals)
    return f"{sign}{whole}.{frac:0{decimals}d}"


def _vertex_lines(mesh: Mesh, decimals: int, integers: Optional[np.ndarray]) -> List[str]:
    if integers is None:
        integers = fixed_point_integers(mesh.vertices, decimals)
    return [" ".join(format_fixed(int(c), decimals) for c in row) for row in integers]


def write_mesh(mesh: Mesh, fmt: str = "off", decimals: int = 6,
               integers: Optional[np.ndarray] = None) -> str:
    """
    Serialize a mesh. `integers` (N, 3) may supply the exact fixed-point values,
    otherwise they are derived from the float coordinates.
    """
    if decimals < 0:
        raise ValueError("decimals must be >= 0")
    fmt = fmt.lower()
    out = io.StringIO()
    vertex_lines = _vertex_lines(mesh, decimals, integers)
    if fmt == "off":
        out.write("OFF\n")
        out.write(f"{mesh.n_vertices} {mesh.n_faces} {mesh.edges.shape[0]}\n")
        for line in vertex_lines:
            out.write(line + "\n")
        for a, b, c in mesh.faces:
            out.write(f"3 {a} {b} {c}\n")
    elif fmt == "ply":
        out.write("ply\nformat ascii 1.0\ncomment mesh-stego\n")
        out.write(f"element vertex {mesh.n_vertices}\n")
        out.write("property double x\nproperty double y\nproperty double z\n")
        out.write(f"element face {mesh.n_faces}\n")
        out.write("property list uchar int vertex_indices\nend_header\n")
        for line in vertex_lines:
            out.write(line + "\n")
        for a, b, c in mesh.faces:
            out.write(f"3 {a} {b} {c}\n")
    else:
        raise ValueError(f"Unsupported mesh format '{fmt}', expected one of {FORMATS}")
    return out.getvalue()


def format_from_path(path: Union[str, Path], override: Optional[str] = None) -> str:
    if override:
        return override.lower()
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix not in FORMATS:
        raise ValueError(f"Cannot infer mesh format from '{path}', pass --format")
    return suffix


def read_mesh(path: Union[str, Path], fmt: Optional[str] = None) -> Mesh:
    fmt = format_from_path(path, fmt)
    with open(path, "r", encoding="utf-8") as f:
        mesh = parse_mesh(f, fmt)
    logger.info(f"Loaded {path}: {mesh.n_vertices} vertices, {mesh.n_faces} faces")
    return mesh


def save_mesh(path: Union[str, Path], mesh: Mesh, decimals: int = 6, fmt: Optional[str] = None,
              integers: Optional[np.ndarray] = None):
    fmt = format_from_path(path, fmt)
    with open(path, "w", encoding="utf-8") as f:
        f.write(write_mesh(mesh, fmt, decimals, integers))
    logger.info(f"Wrote {path} ({fmt}, {decimals} decimals)")

"""Line-oriented shape files.

Radial (planar star body)::

    dim=2
    type=radial
    m=720
    <r_0>
    ...

Support (convex body on a quadrature cloud)::

    dim=5
    type=support
    M=20480
    seed=0
    <h_0>
    ...

Values are written with 17 significant digits so a read-back is exact.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import structlog

from minksym.geometry.base import Body, GeometryError
from minksym.geometry.core import sphere_quadrature
from minksym.geometry.star2d import StarBody2D
from minksym.geometry.support import SupportBody

logger = structlog.get_logger(__name__)

VALUE_FORMAT = "{:.17g}"


class ShapeFileError(ValueError):
    """Malformed shape file."""

    def __init__(self, message: str, path: Path | str, line: int | None = None):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {message}")


def format_shape(K: Body) -> str:
    """Serialize a body to the shape file text."""
    if isinstance(K, StarBody2D):
        header = ["dim=2", "type=radial", f"m={K.m}"]
        values = K.r
    elif isinstance(K, SupportBody):
        cloud = K.cloud
        header = [f"dim={K.dim}", "type=support", f"M={cloud.size}", f"seed={cloud.seed or 0}"]
        values = K.h
    else:
        raise TypeError(f"Cannot serialize {type(K).__name__}")
    lines = header + [VALUE_FORMAT.format(float(v)) for v in values]
    return "\n".join(lines) + "\n"


def write_shape(path: Path | str, K: Body) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_shape(K), encoding="utf-8")
    logger.info("shape_written", path=str(path), dim=K.dim)
    return path


def _int_field(header: dict[str, tuple[str, int]], key: str, path: Path) -> int:
    if key not in header:
        raise ShapeFileError(f"missing header field '{key}'", path)
    raw, line = header[key]
    try:
        return int(raw)
    except ValueError as exc:
        raise ShapeFileError(f"field '{key}' must be an integer, got {raw!r}", path, line) from exc


def parse_shape(text: str, path: Path | str = "<string>") -> Body:
    """Parse shape file text; header fields first, then one value per line."""
    path = Path(path)
    header: dict[str, tuple[str, int]] = {}
    values: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line:
            if values:
                raise ShapeFileError("header field after values", path, lineno)
            key, _, value = line.partition("=")
            header[key.strip()] = (value.strip(), lineno)
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise ShapeFileError(f"not a number: {line!r}", path, lineno) from exc

    dim = _int_field(header, "dim", path)
    kind = header.get("type", ("", 0))[0]
    try:
        if kind == "radial":
            if dim != 2:
                raise ShapeFileError(f"radial shapes are planar, got dim={dim}", path, header["dim"][1])
            m = _int_field(header, "m", path)
            if len(values) != m:
                raise ShapeFileError(f"expected {m} values, got {len(values)}", path)
            return StarBody2D(np.array(values))
        if kind == "support":
            M = _int_field(header, "M", path)
            seed = _int_field(header, "seed", path) if "seed" in header else 0
            if len(values) != M:
                raise ShapeFileError(f"expected {M} values, got {len(values)}", path)
            return SupportBody(cloud=sphere_quadrature(dim, M, seed), h=np.array(values))
    except GeometryError as exc:
        raise ShapeFileError(str(exc), path) from exc
    raise ShapeFileError(f"unknown shape type {kind!r}", path)


def read_shape(path: Path | str) -> Body:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ShapeFileError(f"cannot read shape file: {exc.strerror}", path) from exc
    return parse_shape(text, path)

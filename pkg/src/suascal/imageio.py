"""Raster I/O: 16-bit binary PGM frames and float32 radiance planes.

Raw camera frames travel as binary PGM (P5) with a 16-bit maxval and
big-endian sample order, per the netpbm convention.  Derived planes travel
as headerless little-endian float32, row-major, with a small JSON sidecar
(`<name>.json`) recording width, height, band and units so the planes stay
self-describing without inventing a container format.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import ImageFormatError

# magic, width, height, maxval -- comments (# ...) allowed between tokens.
_PGM_HEADER = re.compile(
    rb"^(P5)\s(?:\s*#.*[\r\n])*"
    rb"\s*(\d+)\s(?:\s*#.*[\r\n])*"
    rb"\s*(\d+)\s(?:\s*#.*[\r\n])*"
    rb"\s*(\d+)\s")


def read_pgm16(path) -> np.ndarray:
    """Read a binary 16-bit PGM into a ``uint16`` array of shape (h, w).

    Raises
    ------
    ImageFormatError
        On a bad magic number, an 8-bit maxval, or truncated pixel data.
    """
    path = Path(path)
    buffer = path.read_bytes()
    match = _PGM_HEADER.match(buffer)
    if not match:
        magic = buffer[:2]
        raise ImageFormatError(
            f"{path}: not a binary PGM (magic {magic!r}, expected b'P5')")
    width = int(match.group(2))
    height = int(match.group(3))
    maxval = int(match.group(4))
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"{path}: bad dimensions {width}x{height}")
    if not 256 <= maxval <= 65535:
        raise ImageFormatError(
            f"{path}: maxval {maxval} is not 16-bit (expected 256..65535)")
    offset = match.end()
    expected = width * height
    available = (len(buffer) - offset) // 2
    if available < expected:
        raise ImageFormatError(
            f"{path}: truncated pixel data ({available} of {expected} "
            "samples)")
    pixels = np.frombuffer(buffer, dtype=">u2", count=expected, offset=offset)
    return pixels.reshape((height, width)).astype(np.uint16)


def write_pgm16(path, pixels: np.ndarray, maxval: int = 65535) -> None:
    """Write a 2-D unsigned integer array as binary 16-bit PGM."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ImageFormatError("PGM output requires a 2-D array")
    if not 256 <= maxval <= 65535:
        raise ImageFormatError(f"maxval {maxval} is not 16-bit")
    if pixels.min() < 0 or pixels.max() > maxval:
        raise ImageFormatError(
            f"pixel values outside [0, {maxval}] cannot be PGM-encoded")
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + pixels.astype(">u2").tobytes())


def write_plane(path, pixels: np.ndarray, band_index: int, units: str) -> None:
    """Write a float32 little-endian plane plus its JSON sidecar."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ImageFormatError("plane output requires a 2-D array")
    path = Path(path)
    path.write_bytes(np.ascontiguousarray(pixels, dtype="<f4").tobytes())
    height, width = pixels.shape
    sidecar = {
        "width": int(width),
        "height": int(height),
        "band_index": int(band_index),
        "units": units,
        "dtype": "float32",
        "byte_order": "little-endian",
        "layout": "row-major",
    }
    Path(str(path) + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_plane(path) -> tuple[np.ndarray, dict]:
    """Read a float32 plane; returns ``(float64 array, sidecar dict)``."""
    path = Path(path)
    sidecar_path = Path(str(path) + ".json")
    if not sidecar_path.exists():
        raise ImageFormatError(f"{path}: missing sidecar {sidecar_path.name}")
    try:
        sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
        width, height = int(sidecar["width"]), int(sidecar["height"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ImageFormatError(f"{sidecar_path}: bad sidecar: {exc}") from exc
    data = np.frombuffer(path.read_bytes(), dtype="<f4")
    if data.size != width * height:
        raise ImageFormatError(
            f"{path}: {data.size} samples, sidecar declares {width}x{height}")
    return data.reshape((height, width)).astype(np.float64), sidecar

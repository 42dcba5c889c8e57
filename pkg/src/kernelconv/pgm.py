"""Binary PGM (P5) export of masks and fields.

Row 0 of the image is the top of the geometric window: image pixel
``(row, col)`` shows cell ``(col, ny - 1 - row)``.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .grid import GridMask


def _image(bits_or_values: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(bits_or_values.T[::-1])


def mask_bytes(mask: GridMask) -> bytes:
    img = np.where(_image(mask.bits), 255, 0).astype(np.uint8)
    return _encode(img)


def field_bytes(values: np.ndarray) -> Tuple[bytes, Optional[float], Optional[float]]:
    """Affine-scale finite values to 0..255; ``-inf`` maps to 0.

    Returns the payload with the finite min and max used for scaling.
    """
    finite = np.isfinite(values)
    if not finite.any():
        return _encode(np.zeros(_image(values).shape, np.uint8)), None, None
    lo, hi = float(values[finite].min()), float(values[finite].max())
    scaled = np.zeros(values.shape)
    if hi > lo:
        scaled[finite] = (values[finite] - lo) / (hi - lo) * 255.0
    img = np.rint(scaled).astype(np.uint8)
    return _encode(_image(img)), lo, hi


def _encode(img: np.ndarray) -> bytes:
    height, width = img.shape
    return b"P5\n%d %d\n255\n" % (width, height) + img.tobytes()


def write_pgm(obj, path) -> dict:
    """Write a :class:`GridMask` or a :class:`FieldGrid` as P5.

    Returns sidecar metadata (field scaling range) for the run report.
    """
    path = Path(path)
    if isinstance(obj, GridMask):
        data, meta = mask_bytes(obj), {"kind": "mask"}
    else:
        data, lo, hi = field_bytes(obj.values)
        meta = {"kind": "field", "min": lo, "max": hi}
    path.write_bytes(data)
    meta["path"] = str(path)
    return meta


def read_pgm(path) -> np.ndarray:
    """Image rows as a uint8 array (row 0 = top)."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    width, height = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)

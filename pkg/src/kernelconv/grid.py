"""Raster representation of planar sets.

A :class:`GridSpec` is a regular lattice of ``nx x ny`` cells over an
axis-aligned window.  A :class:`GridMask` is a boolean occupancy array over
it, indexed ``bits[i, j]`` with ``i`` along x and ``j`` along y, so cell
``(i, j)`` has center ``origin + (i + 1/2, j + 1/2) * h``.

Open sets are approximated by cells whose centers satisfy a strict
inequality.  The interior operator is a one-cell erosion with the 3x3
(Chebyshev) neighbourhood, cells outside the window counting as exterior.
Connected components use 4-connectivity only.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from .errors import GridError, SpecError

Cell = Tuple[int, int]

_SQUARE = np.ones((3, 3), dtype=bool)
_CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class GridSpec:
    origin: Tuple[float, float]
    extent: Tuple[float, float]
    nx: int
    ny: int

    def __post_init__(self):
        origin = tuple(float(v) for v in self.origin)
        extent = tuple(float(v) for v in self.extent)
        if len(origin) != 2 or len(extent) != 2:
            raise SpecError("origin and extent must be 2-vectors")
        if not all(np.isfinite(origin + extent)):
            raise SpecError("grid window must be finite")
        if not (extent[0] > origin[0] and extent[1] > origin[1]):
            raise SpecError("extent must strictly dominate origin")
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise SpecError("resolution must be integral")
        if self.nx < 4 or self.ny < 4:
            raise SpecError("resolution must be at least 4 cells per axis")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "GridSpec":
        return cls((lo, lo), (hi, hi), n, n)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def hx(self) -> float:
        return (self.extent[0] - self.origin[0]) / self.nx

    @property
    def hy(self) -> float:
        return (self.extent[1] - self.origin[1]) / self.ny

    @property
    def h(self) -> float:
        """Largest cell width; the length scale used for tolerances."""
        return max(self.hx, self.hy)

    def cell_center(self, i: int, j: int) -> Tuple[float, float]:
        return (self.origin[0] + (i + 0.5) * self.hx,
                self.origin[1] + (j + 0.5) * self.hy)

    def centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """Broadcastable center coordinates, shapes ``(nx, 1)`` and ``(1, ny)``."""
        return _centers(self)

    def cell_of(self, point) -> Cell:
        """Cell containing ``point``; raises :class:`GridError` outside the window."""
        x, y = float(point[0]), float(point[1])
        i = int(np.floor((x - self.origin[0]) / self.hx))
        j = int(np.floor((y - self.origin[1]) / self.hy))
        if not self.contains_cell((i, j)):
            raise GridError(f"point {point} lies outside the grid window")
        return (i, j)

    def contains_cell(self, q: Cell) -> bool:
        return 0 <= q[0] < self.nx and 0 <= q[1] < self.ny


@functools.lru_cache(maxsize=32)
def _centers(spec: GridSpec):
    x = spec.origin[0] + (np.arange(spec.nx) + 0.5) * spec.hx
    y = spec.origin[1] + (np.arange(spec.ny) + 0.5) * spec.hy
    x, y = x[:, None], y[None, :]
    x.flags.writeable = False
    y.flags.writeable = False
    return x, y


class GridMask:
    """Immutable boolean mask over a :class:`GridSpec`."""

    __slots__ = ("spec", "bits")

    def __init__(self, spec: GridSpec, bits):
        bits = np.array(bits, dtype=bool, copy=True)
        if bits.shape != spec.shape:
            raise GridError(f"bits shape {bits.shape} does not match grid {spec.shape}")
        bits.flags.writeable = False
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("GridMask is immutable")

    @classmethod
    def empty(cls, spec: GridSpec) -> "GridMask":
        return cls(spec, np.zeros(spec.shape, dtype=bool))

    @classmethod
    def full(cls, spec: GridSpec) -> "GridMask":
        return cls(spec, np.ones(spec.shape, dtype=bool))

    def __eq__(self, other):
        if not isinstance(other, GridMask):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.bits, other.bits)

    __hash__ = None

    def __repr__(self):
        return f"GridMask({self.spec.nx}x{self.spec.ny}, {self.count} set)"

    def __getitem__(self, q: Cell) -> bool:
        return bool(self.bits[q])

    def __and__(self, other: "GridMask") -> "GridMask":
        return intersect(self, other)

    def __or__(self, other: "GridMask") -> "GridMask":
        _same_spec(self, other)
        return GridMask(self.spec, self.bits | other.bits)

    def __sub__(self, other: "GridMask") -> "GridMask":
        _same_spec(self, other)
        return GridMask(self.spec, self.bits & ~other.bits)

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    @property
    def area(self) -> float:
        return self.count * self.spec.hx * self.spec.hy

    def any(self) -> bool:
        return bool(self.bits.any())

    def issubset(self, other: "GridMask") -> bool:
        _same_spec(self, other)
        return not bool((self.bits & ~other.bits).any())

    def row_major(self) -> np.ndarray:
        """Flat bits, row-major with x varying fastest inside each y row."""
        return self.bits.T.ravel()


@dataclass(frozen=True, eq=False)
class PointedMask:
    """A mask with a base cell; ``point is None`` marks the EMPTY sentinel."""

    mask: GridMask
    point: Optional[Cell]

    def __post_init__(self):
        if self.point is None:
            if self.mask.any():
                raise GridError("EMPTY pointed mask must have no cells set")
        elif not self.mask[self.point]:
            raise GridError(f"base cell {self.point} is not in the mask")

    @classmethod
    def empty(cls, spec: GridSpec) -> "PointedMask":
        return cls(GridMask.empty(spec), None)

    @property
    def is_empty(self) -> bool:
        return self.point is None

    def __eq__(self, other):
        if not isinstance(other, PointedMask):
            return NotImplemented
        return self.point == other.point and self.mask == other.mask


def _same_spec(a: GridMask, b: GridMask) -> None:
    if a.spec != b.spec:
        raise GridError("masks are defined on different grids")


def intersect(a: GridMask, b: GridMask) -> GridMask:
    _same_spec(a, b)
    return GridMask(a.spec, a.bits & b.bits)


def interior(a: GridMask) -> GridMask:
    """One-cell erosion by the 3x3 square; the window edge counts as outside."""
    eroded = ndimage.binary_erosion(a.bits, structure=_SQUARE, border_value=0)
    return GridMask(a.spec, eroded)


def dilate(a: GridMask, cells: int = 1) -> GridMask:
    """Chebyshev dilation by ``cells``, clipped to the window."""
    if cells <= 0:
        return a
    grown = ndimage.binary_dilation(a.bits, structure=_SQUARE, iterations=cells)
    return GridMask(a.spec, grown)


def connected_component(a: GridMask, q: Cell) -> PointedMask:
    """4-connected component of ``a`` containing cell ``q`` (EMPTY if unset)."""
    q = (int(q[0]), int(q[1]))
    if not a.spec.contains_cell(q):
        raise GridError(f"cell {q} outside grid window {a.spec.shape}")
    if not a.bits[q]:
        return PointedMask.empty(a.spec)
    labels, _ = ndimage.label(a.bits, structure=_CROSS)
    return PointedMask(GridMask(a.spec, labels == labels[q]), q)


def count_components(a: GridMask) -> int:
    return int(ndimage.label(a.bits, structure=_CROSS)[1])


def chebyshev_distance_to(a: GridMask) -> np.ndarray:
    """Per-cell Chebyshev distance (in cells) to the nearest set cell of ``a``.

    Returns ``inf`` everywhere when ``a`` is empty.
    """
    if not a.any():
        return np.full(a.spec.shape, np.inf)
    return ndimage.distance_transform_cdt(~a.bits, metric="chessboard").astype(float)


def mismatch_band(a: GridMask, b: GridMask) -> float:
    """Smallest band (in cells) for which ``a`` and ``b`` agree.

    Every cell in exactly one mask must lie within this Chebyshev distance of
    the other mask.  0 means equality; ``inf`` means one side is empty.
    """
    _same_spec(a, b)
    only_a = a.bits & ~b.bits
    only_b = b.bits & ~a.bits
    band = 0.0
    if only_a.any():
        band = max(band, float(chebyshev_distance_to(b)[only_a].max()))
    if only_b.any():
        band = max(band, float(chebyshev_distance_to(a)[only_b].max()))
    return band


def masks_equal_within_band(a: GridMask, b: GridMask, band: int):
    """Tolerant comparison. Returns ``(equal, mismatch_count)``."""
    _same_spec(a, b)
    mismatches = int((a.bits ^ b.bits).sum())
    if mismatches == 0:
        return True, 0
    return mismatch_band(a, b) <= band, mismatches

"""Closures and Hausdorff distances between rasterized sets.

Distances use the Chebyshev (max-norm) cell metric so that distance
transforms are exact integer BFS layers; results are reported in length
units as ``cells * h``.
"""
from __future__ import annotations

from .errors import MetricError
from .grid import GridMask, _same_spec, chebyshev_distance_to, dilate


def closure(a: GridMask) -> GridMask:
    """One-cell Chebyshev dilation, the counterpart of :func:`grid.interior`."""
    return dilate(a, 1)


def distance_field(a: GridMask):
    """Per-cell distance (length units) to the nearest set cell of ``a``."""
    if not a.any():
        raise MetricError("distance to an empty set is undefined")
    return chebyshev_distance_to(a) * a.spec.h


def directed_hausdorff(a: GridMask, b: GridMask) -> float:
    """``max_{c in a} dist(c, b)`` in length units."""
    _same_spec(a, b)
    if not a.any() or not b.any():
        raise MetricError("Hausdorff distance needs nonempty sets")
    return float(distance_field(b)[a.bits].max())


def hausdorff_distance(a: GridMask, b: GridMask) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))

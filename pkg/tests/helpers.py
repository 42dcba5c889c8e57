"""Shared generators for randomized sequence tests."""
import numpy as np

from kernelconv.sequences import periodic_sequence
from kernelconv.shapes import Disc, Rect

P_HAT = (0.1, -0.2)


def random_shape_around(rng, point, min_reach=0.3):
    """A disc or rectangle inside [-2, 2]^2 containing a ball of radius
    ``min_reach`` around ``point``."""
    px, py = point
    if rng.random() < 0.5:
        r = rng.uniform(min_reach + 0.1, 1.4)
        off = rng.uniform(0, r - min_reach)
        angle = rng.uniform(0, 2 * np.pi)
        return Disc((px + off * np.cos(angle), py + off * np.sin(angle)), r)
    a, b = rng.uniform(min_reach + 0.05, 1.5, size=2)
    cx = px + rng.uniform(-(a - min_reach), a - min_reach)
    cy = py + rng.uniform(-(b - min_reach), b - min_reach)
    return Rect((cx, cy), (a, b))


def random_periodic_sequence(grid, rng, max_period=4, point=P_HAT):
    m = int(rng.integers(1, max_period + 1))
    n_prefix = int(rng.integers(0, 3))
    shapes = tuple(random_shape_around(rng, point) for _ in range(m))
    prefix = tuple(random_shape_around(rng, point, 0.05) for _ in range(n_prefix))
    return periodic_sequence(grid, shapes, point, prefix=prefix)


def random_subset_pair(rng, m):
    """Nonempty residue sets S within T within 1..m (1-based residues)."""
    size_t = int(rng.integers(1, m + 1))
    T = rng.choice(np.arange(1, m + 1), size=size_t, replace=False)
    size_s = int(rng.integers(1, size_t + 1))
    S = rng.choice(T, size=size_s, replace=False)
    return frozenset(int(v) for v in S), frozenset(int(v) for v in T)

"""Finite descriptions of infinite sequences of pointed domains.

A sequence is a finite prefix of shapes (indices ``1..P``) followed by a tail
rule for every ``j > P``:

* :class:`ConstantTail` -- one shape forever;
* :class:`PeriodicTail` -- shapes cycled with period ``m``; tail position
  ``(j - P - 1) % m``;
* :class:`FunctionalTail` -- a shape template in the index.  Sequence index
  ``j`` evaluates the template at ``j - P - 1 + j0``.

Constant and periodic tails admit exact finite evaluation of
``AND_{j >= k} G_j``.  Functional tails are iterated until the running
intersection is unchanged for ``window`` consecutive indices or the budget
``j_max`` (a sequence index) is reached.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from . import expr as ex
from .errors import EvalError, GridError, SpecError
from .grid import Cell, GridMask, GridSpec
from .shapes import Disc, ShapeSpec, bind, is_template, rasterize_shape

DEFAULT_J_MAX = 512
DEFAULT_WINDOW = 5


@dataclass(frozen=True)
class ConstantTail:
    shape: ShapeSpec

    @property
    def period(self) -> int:
        return 1

    @property
    def shapes(self) -> tuple:
        return (self.shape,)


@dataclass(frozen=True)
class PeriodicTail:
    shapes: tuple

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        if not self.shapes:
            raise SpecError("periodic tail needs at least one shape")

    @property
    def period(self) -> int:
        return len(self.shapes)


@dataclass(frozen=True)
class FunctionalTail:
    template: ShapeSpec
    j0: int = 1
    j_max: int = DEFAULT_J_MAX
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.window < 1:
            raise SpecError("stabilization window must be >= 1")
        if self.j0 < 1:
            raise SpecError("j0 must be >= 1")
        if self.j_max < self.j0 + self.window:
            raise SpecError("j_max must be at least j0 + window")


TailRule = Union[ConstantTail, PeriodicTail, FunctionalTail]


def _track(value) -> ex.Expr:
    if isinstance(value, str):
        try:
            e = ex.parse(value)
        except ex.ParseError as err:
            raise SpecError(f"bad point-track expression {value!r}: {err}") from None
    elif isinstance(value, (int, float)):
        e = ex.Num(float(value))
    else:
        e = value
    if not ex.free_vars(e) <= {"j"}:
        raise SpecError("point-track expressions may only use j")
    return e


@dataclass(frozen=True)
class DomainSequenceSpec:
    grid: GridSpec
    prefix: tuple
    tail: TailRule
    point_track: Tuple[ex.Expr, ex.Expr]
    declared_limit: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "point_track", tuple(_track(v) for v in self.point_track))
        object.__setattr__(self, "declared_limit", tuple(float(v) for v in self.declared_limit))
        if len(self.point_track) != 2 or len(self.declared_limit) != 2:
            raise SpecError("point track and declared limit must be 2-vectors")
        if isinstance(self.tail, FunctionalTail) and self.tail.j_max < len(self.prefix) + 1 + self.tail.window:
            raise SpecError("j_max must leave room for one stabilization window after the prefix")

    @property
    def P(self) -> int:
        return len(self.prefix)

    @property
    def j_max(self) -> int:
        return self.tail.j_max if isinstance(self.tail, FunctionalTail) else DEFAULT_J_MAX

    @property
    def window(self) -> int:
        return self.tail.window if isinstance(self.tail, FunctionalTail) else DEFAULT_WINDOW

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.tail, (ConstantTail, PeriodicTail))

    @property
    def limit_cell(self) -> Cell:
        return self.grid.cell_of(self.declared_limit)

    def point_at(self, j: int) -> Tuple[float, float]:
        try:
            return tuple(ex.evaluate(e, {"j": float(j)}) for e in self.point_track)
        except EvalError as err:
            raise SpecError(f"point track fails at j={j}: {err}") from None

    def point_track_ok(self) -> bool:
        """``p_j`` at the budget index lies within ``2h`` of the declared limit."""
        px, py = self.point_at(self.j_max)
        return math.hypot(px - self.declared_limit[0], py - self.declared_limit[1]) <= 2 * self.grid.h


def constant_sequence(grid, shape, point) -> DomainSequenceSpec:
    return DomainSequenceSpec(grid, (), ConstantTail(shape), tuple(point), tuple(point))


def periodic_sequence(grid, shapes, point, prefix=()) -> DomainSequenceSpec:
    return DomainSequenceSpec(grid, tuple(prefix), PeriodicTail(tuple(shapes)), tuple(point), tuple(point))


@dataclass(frozen=True)
class StabilizationReport:
    stabilized: bool
    k_or_J_reached: int
    window_held: int
    exact: bool = False
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "stabilized": self.stabilized,
            "k_or_J_reached": self.k_or_J_reached,
            "window_held": self.window_held,
            "exact": self.exact,
            "note": self.note,
        }


@dataclass(frozen=True)
class TamenessReport:
    tamed: bool
    k: Optional[int]
    ball_radius: float
    reason: str = "ok"
    radii: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {"tamed": self.tamed, "k": self.k, "ball_radius": self.ball_radius, "reason": self.reason}


def shape_at(seq: DomainSequenceSpec, j: int) -> ShapeSpec:
    if j < 1:
        raise SpecError(f"sequence index must be >= 1, got {j}")
    P = seq.P
    if j <= P:
        shape, index = seq.prefix[j - 1], j
    elif isinstance(seq.tail, FunctionalTail):
        shape, index = seq.tail.template, j - P - 1 + seq.tail.j0
    else:
        shapes = seq.tail.shapes
        shape, index = shapes[(j - P - 1) % len(shapes)], j
    return bind(shape, index) if is_template(shape) else shape


def domain_at(seq: DomainSequenceSpec, j: int) -> GridMask:
    """Rasterized ``G_j``."""
    return _domain_at(seq, int(j))


@functools.lru_cache(maxsize=2048)
def _domain_at(seq: DomainSequenceSpec, j: int) -> GridMask:
    return rasterize_shape(shape_at(seq, j), seq.grid)


def tail_intersection(seq: DomainSequenceSpec, k: int):
    """Running AND of ``domain_at(seq, j)`` for ``j >= k``.

    Returns ``(mask, StabilizationReport)``.
    """
    if k < 1:
        raise SpecError(f"k must be >= 1, got {k}")
    return _tail_intersection(seq, int(k))


@functools.lru_cache(maxsize=2048)
def _tail_intersection(seq: DomainSequenceSpec, k: int):
    if seq.is_periodic:
        end = max(k, seq.P + 1) + seq.tail.period - 1
        bits = np.ones(seq.grid.shape, dtype=bool)
        for j in range(k, end + 1):
            bits &= domain_at(seq, j).bits
        report = StabilizationReport(True, end, seq.window, exact=True,
                                     note="exact reduction over one period past the prefix")
        return GridMask(seq.grid, bits), report

    W, J = seq.window, seq.j_max
    bits = domain_at(seq, k).bits.copy()
    held, j = 0, k
    while j < J and held < W:
        j += 1
        new = bits & domain_at(seq, j).bits
        held = held + 1 if np.array_equal(new, bits) else 0
        bits = new
    report = StabilizationReport(held >= W, j, held,
                                 note="" if held >= W else "budget exhausted before stabilization")
    return GridMask(seq.grid, bits), report


def default_k_max(seq: DomainSequenceSpec) -> int:
    if seq.is_periodic:
        return seq.P + 2 * seq.tail.period
    return seq.P + seq.window


@functools.lru_cache(maxsize=512)
def _ball(grid: GridSpec, center, radius: float) -> GridMask:
    return rasterize_shape(Disc(center, radius), grid)


def _largest_ball(mask: GridMask, center, r_min: float) -> float:
    """Largest certified radius of a strict ball around ``center`` inside ``mask``.

    Dyadic halving from half the window width locates a fitting radius; the
    gap to the next failing radius is then bisected down to a quarter cell.
    Returns 0 when not even ``r_min`` fits.
    """
    grid = mask.spec
    fits = lambda r: _ball(grid, center, r).issubset(mask)  # noqa: E731
    r = 0.5 * min(grid.extent[0] - grid.origin[0], grid.extent[1] - grid.origin[1])
    hi = None
    while r >= r_min and not fits(r):
        hi, r = r, r / 2
    if r < r_min:
        if not fits(r_min):
            return 0.0
        r = r_min
    if hi is None:
        return r
    lo = r
    while hi - lo > grid.h / 4:
        mid = 0.5 * (lo + hi)
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return lo


def tameness_check(seq: DomainSequenceSpec, k_max: Optional[int] = None) -> TamenessReport:
    """Certify tameness at the declared limit on this grid.

    Requires the point track to end within ``2h`` of the limit and a ball of
    radius at least ``2h`` around it inside some tail intersection with
    ``k <= k_max``.  Reasons on failure: ``point_track``, ``geometric``
    (limit cell never set) or ``budget`` (cell set but no ball certified).
    """
    h = seq.grid.h
    try:
        track_ok = seq.point_track_ok()
    except SpecError:
        track_ok = False
    if not track_ok:
        return TamenessReport(False, None, 0.0, "point_track")
    try:
        q = seq.limit_cell
    except GridError:
        return TamenessReport(False, None, 0.0, "geometric")
    k_max = default_k_max(seq) if k_max is None else k_max
    radii = {}
    for k in range(1, k_max + 1):
        mask, _ = tail_intersection(seq, k)
        if not mask[q]:
            continue
        radii[k] = _largest_ball(mask, seq.declared_limit, 2 * h)
    if not radii:
        return TamenessReport(False, None, 0.0, "geometric", radii)
    best = max(radii.values())
    if best <= 0:
        return TamenessReport(False, None, 0.0, "budget", radii)
    k_best = min(k for k, r in radii.items() if r == best)
    return TamenessReport(True, k_best, best, "ok", radii)

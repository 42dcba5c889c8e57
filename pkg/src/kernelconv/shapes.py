"""Shape descriptions and their rasterization.

Numeric shape parameters may be plain numbers or expressions in the sequence
index ``j``; :func:`bind` fixes ``j`` so that a template becomes a concrete
shape.  Rasterization sets a cell iff its center satisfies the shape's strict
defining inequality.
"""
from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from . import expr as ex
from .errors import EvalError, SpecError
from .grid import GridMask, GridSpec

Param = Union[float, ex.Expr]


def _param(value) -> Param:
    """Accept a number, an expression string or an AST."""
    if isinstance(value, str):
        try:
            return ex.parse(value)
        except ex.ParseError as err:
            raise SpecError(f"bad expression {value!r}: {err}") from None
    if isinstance(value, (ex.Num, ex.Var, ex.Neg, ex.BinOp, ex.Call)):
        return value
    v = float(value)
    if not np.isfinite(v):
        raise SpecError("shape parameters must be finite")
    return v


def _pair(value) -> Tuple[Param, Param]:
    if len(value) != 2:
        raise SpecError("expected a pair")
    return (_param(value[0]), _param(value[1]))


def _expr(value) -> ex.Expr:
    p = _param(value)
    return ex.Num(p) if isinstance(p, float) else p


def _check_vars(e: ex.Expr, allowed, what: str) -> None:
    extra = ex.free_vars(e) - set(allowed)
    if extra:
        raise SpecError(f"{what} uses unknown variable(s) {sorted(extra)}; allowed {sorted(allowed)}")


@dataclass(frozen=True)
class Disc:
    center: Tuple[Param, Param]
    radius: Param
    j: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "center", _pair(self.center))
        object.__setattr__(self, "radius", _param(self.radius))
        for p in (*self.center, self.radius):
            if not isinstance(p, float):
                _check_vars(p, {"j"}, "disc parameter")
        if isinstance(self.radius, float) and self.radius <= 0:
            raise SpecError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Rect:
    center: Tuple[Param, Param]
    half_widths: Tuple[Param, Param]
    j: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "center", _pair(self.center))
        object.__setattr__(self, "half_widths", _pair(self.half_widths))
        for p in (*self.center, *self.half_widths):
            if not isinstance(p, float):
                _check_vars(p, {"j"}, "rect parameter")
        if any(isinstance(w, float) and w <= 0 for w in self.half_widths):
            raise SpecError(f"rect half-widths must be positive, got {self.half_widths}")


@dataclass(frozen=True)
class SlitDisc:
    """Open unit disc minus the segment ``-1 < x < 1 - 1/j`` on ``y = 0``."""

    j: Optional[int] = None


@dataclass(frozen=True)
class HalfspaceGraph:
    """``{x > phi(y, j)}``."""

    phi: ex.Expr
    j: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "phi", _expr(self.phi))
        _check_vars(self.phi, {"y", "j"}, "graph function")


@dataclass(frozen=True)
class Sublevel:
    """``{psi(x, y, j) < 0}``; ``r`` and ``s`` alias ``x`` and ``y``."""

    psi: ex.Expr
    j: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "psi", _expr(self.psi))
        _check_vars(self.psi, {"x", "y", "r", "s", "j"}, "sublevel function")


@dataclass(frozen=True)
class ShapeUnion:
    """Union of shapes; used for multi-component test domains."""

    parts: tuple
    j: Optional[int] = None

    def __post_init__(self):
        if not self.parts:
            raise SpecError("union needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))


ShapeSpec = Union[Disc, Rect, SlitDisc, HalfspaceGraph, Sublevel, ShapeUnion]


def bind(shape: ShapeSpec, j: int) -> ShapeSpec:
    """Return ``shape`` with its sequence index fixed to ``j``."""
    if isinstance(shape, ShapeUnion):
        return ShapeUnion(tuple(bind(p, j) for p in shape.parts), j)
    return dataclasses.replace(shape, j=int(j))


def _needs_j(shape: ShapeSpec) -> bool:
    if isinstance(shape, SlitDisc):
        return True
    if isinstance(shape, ShapeUnion):
        return any(_needs_j(p) for p in shape.parts)
    if isinstance(shape, HalfspaceGraph):
        return "j" in ex.free_vars(shape.phi)
    if isinstance(shape, Sublevel):
        return "j" in ex.free_vars(shape.psi)
    params = (*shape.center, shape.radius) if isinstance(shape, Disc) else (*shape.center, *shape.half_widths)
    return any(not isinstance(p, float) and "j" in ex.free_vars(p) for p in params)


def is_template(shape: ShapeSpec) -> bool:
    return shape.j is None and _needs_j(shape)


def _value(p: Param, j) -> float:
    if isinstance(p, float):
        return p
    if j is None and "j" in ex.free_vars(p):
        raise SpecError("shape parameter depends on j but no index is bound")
    try:
        v = ex.evaluate(p, {} if j is None else {"j": float(j)})
    except EvalError as err:
        raise SpecError(f"cannot evaluate shape parameter at j={j}: {err}") from None
    if not np.isfinite(v):
        raise SpecError(f"shape parameter is not finite at j={j}")
    return v


def _field_on_grid(e: ex.Expr, grid: GridSpec, j) -> np.ndarray:
    if j is None and "j" in ex.free_vars(e):
        raise SpecError("expression depends on j but no index is bound")
    x, y = grid.centers()
    env = {"x": x, "y": y, "r": x, "s": y}
    if j is not None:
        env["j"] = float(j)
    try:
        return np.broadcast_to(ex.evaluate_array(e, env), grid.shape)
    except EvalError as err:
        raise SpecError(f"expression evaluation failed at j={j}: {err}") from None


def rasterize_shape(shape: ShapeSpec, grid: GridSpec) -> GridMask:
    """Rasterize a concrete shape (all index dependence bound)."""
    return _rasterize(shape, grid)


@functools.lru_cache(maxsize=2048)
def _rasterize(shape: ShapeSpec, grid: GridSpec) -> GridMask:
    x, y = grid.centers()
    j = shape.j
    if isinstance(shape, Disc):
        cx, cy = (_value(c, j) for c in shape.center)
        r = _value(shape.radius, j)
        if r <= 0:
            raise SpecError(f"disc radius must be positive, got {r}")
        bits = (x - cx) ** 2 + (y - cy) ** 2 < r * r
    elif isinstance(shape, Rect):
        cx, cy = (_value(c, j) for c in shape.center)
        a, b = (_value(w, j) for w in shape.half_widths)
        if a <= 0 or b <= 0:
            raise SpecError(f"rect half-widths must be positive, got {(a, b)}")
        bits = (np.abs(x - cx) < a) & (np.abs(y - cy) < b)
    elif isinstance(shape, SlitDisc):
        if j is None or j < 1:
            raise SpecError("slit disc needs an index j >= 1")
        half = 0.5 * grid.hy * (1 + 1e-9)
        slit = (np.abs(y) <= half) & (x > -1) & (x < 1 - 1 / j)
        bits = (x * x + y * y < 1) & ~slit
    elif isinstance(shape, HalfspaceGraph):
        bits = x > _field_on_grid(shape.phi, grid, j)
    elif isinstance(shape, Sublevel):
        bits = _field_on_grid(shape.psi, grid, j) < 0
    elif isinstance(shape, ShapeUnion):
        bits = np.zeros(grid.shape, dtype=bool)
        for part in shape.parts:
            part = bind(part, j) if j is not None and part.j is None else part
            bits = bits | _rasterize(part, grid).bits
    else:
        raise SpecError(f"unknown shape {shape!r}")
    return GridMask(grid, np.broadcast_to(bits, grid.shape))


def shape_from_dict(d: dict) -> ShapeSpec:
    """Build a shape from its JSON form (see the config schema)."""
    kind = d.get("type")
    j = d.get("j")
    if kind == "disc":
        return Disc(tuple(d["center"]), d["radius"], j)
    if kind == "rect":
        return Rect(tuple(d["center"]), tuple(d["half_widths"]), j)
    if kind == "slit_disc":
        return SlitDisc(j)
    if kind == "halfspace_graph":
        return HalfspaceGraph(d["phi"], j)
    if kind == "sublevel":
        return Sublevel(d["psi"], j)
    if kind == "union":
        return ShapeUnion(tuple(shape_from_dict(p) for p in d["parts"]), j)
    raise SpecError(f"unknown shape type {kind!r}")


def shape_to_dict(shape: ShapeSpec) -> dict:
    def p(v):
        return v if isinstance(v, float) else ex.to_text(v)

    if isinstance(shape, Disc):
        out = {"type": "disc", "center": [p(c) for c in shape.center], "radius": p(shape.radius)}
    elif isinstance(shape, Rect):
        out = {"type": "rect", "center": [p(c) for c in shape.center],
               "half_widths": [p(w) for w in shape.half_widths]}
    elif isinstance(shape, SlitDisc):
        out = {"type": "slit_disc"}
    elif isinstance(shape, HalfspaceGraph):
        out = {"type": "halfspace_graph", "phi": ex.to_text(shape.phi)}
    elif isinstance(shape, Sublevel):
        out = {"type": "sublevel", "psi": ex.to_text(shape.psi)}
    else:
        out = {"type": "union", "parts": [shape_to_dict(s) for s in shape.parts]}
    if shape.j is not None:
        out["j"] = shape.j
    return out

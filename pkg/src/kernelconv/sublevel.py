"""Kernels of sublevel-set sequences ``{psi_j < 0}`` via a limit function.

``Psi = inf_k usc(sup_{j >= k} psi_j)`` is computed on the grid, where the
upper semicontinuous regularization ``usc`` is a 3x3 neighbourhood maximum.
The kernel is then the component of ``{Psi < 0}`` at the limit point, which
can be cross-checked against the direct kernel of the rasterized sublevel
domains.

Field values are extended reals: ``-inf`` is allowed, NaN and ``+inf`` are
not.  Coordinates ``r`` and ``s`` are aliases of ``x`` and ``y`` so that
profile expressions of rotationally symmetric domains read naturally.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from . import expr as ex
from .errors import ConsistencyError, EvalError, FieldError, SpecError, TamenessError
from .grid import (GridMask, GridSpec, PointedMask, connected_component, count_components,
                   chebyshev_distance_to, masks_equal_within_band, mismatch_band)
from .kernel import kernel
from .sequences import (DomainSequenceSpec, FunctionalTail, StabilizationReport,
                        tameness_check)
from .shapes import Sublevel

logger = logging.getLogger(__name__)

EPS_SUP = 1e-9
HINTS = ("none", "increasing", "decreasing")


@dataclass(frozen=True, eq=False)
class FieldGrid:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != self.spec.shape:
            raise FieldError(f"field shape {values.shape} does not match grid {self.spec.shape}")
        if np.isnan(values).any():
            raise FieldError("field contains NaN")
        if np.isposinf(values).any():
            raise FieldError("field contains +inf")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def at(self, cell) -> float:
        return float(self.values[cell])

    def sublevel(self, level: float = 0.0) -> GridMask:
        return GridMask(self.spec, self.values < level)


@dataclass(frozen=True)
class ScalarFieldSeq:
    expr: ex.Expr
    j0: int = 1
    j_max: int = 512
    window: int = 5
    monotone_hint: str = "none"
    eps_sup: float = EPS_SUP

    def __post_init__(self):
        e = self.expr
        if isinstance(e, str):
            try:
                e = ex.parse(e)
            except ex.ParseError as err:
                raise SpecError(f"bad field expression: {err}") from None
            object.__setattr__(self, "expr", e)
        extra = ex.free_vars(e) - {"x", "y", "r", "s", "j"}
        if extra:
            raise SpecError(f"field expression uses unknown variable(s) {sorted(extra)}")
        if self.monotone_hint not in HINTS:
            raise SpecError(f"monotone_hint must be one of {HINTS}")
        if self.window < 1 or self.j0 < 1 or self.j_max < self.j0 + self.window:
            raise SpecError("need window >= 1, j0 >= 1 and j_max >= j0 + window")


def sample_field(seq: ScalarFieldSeq, j: int, grid: GridSpec) -> FieldGrid:
    """``psi_j`` at every cell center; NaN or +inf raise :class:`FieldError`."""
    if j < seq.j0:
        raise SpecError(f"index {j} precedes the first index {seq.j0}")
    x, y = grid.centers()
    try:
        values = ex.evaluate_array(seq.expr, {"x": x, "y": y, "r": x, "s": y, "j": float(j)})
    except EvalError as err:
        cell = None
        if err.index is not None:
            cell = tuple(int(c) for c in np.unravel_index(err.index, grid.shape))
            where = grid.cell_center(*cell)
            raise FieldError(f"{err} at cell {cell} (center {where}), j={j}", cell=cell) from None
        raise FieldError(f"{err}, j={j}") from None
    return FieldGrid(grid, np.broadcast_to(values, grid.shape))


def usc_regularize(f: FieldGrid) -> FieldGrid:
    """3x3 neighbourhood maximum, clipped at the window edge."""
    return FieldGrid(f.spec, _usc(f.values))


def _usc(values: np.ndarray) -> np.ndarray:
    return ndimage.maximum_filter(values, size=3, mode="constant", cval=-np.inf)


def _change(new: np.ndarray, old: np.ndarray) -> float:
    """Largest per-cell change, treating equal infinities as unchanged."""
    same = new == old
    if same.all():
        return 0.0
    with np.errstate(invalid="ignore"):
        return float(np.abs(new[~same] - old[~same]).max())


def tail_sup(seq: ScalarFieldSeq, k: int, grid: GridSpec):
    """``sup_{j >= k} psi_j`` under the monotonicity hint.

    Returns ``(FieldGrid, StabilizationReport)``.
    """
    if k < seq.j0:
        raise SpecError(f"k={k} precedes the first index {seq.j0}")
    if seq.monotone_hint == "increasing":
        f = sample_field(seq, seq.j_max, grid)
        return f, StabilizationReport(False, seq.j_max, 0,
                                      note="budget-limited sup: increasing sequence read at j_max")
    if seq.monotone_hint == "decreasing":
        return sample_field(seq, k, grid), StabilizationReport(True, k, seq.window, exact=True,
                                                               note="decreasing: sup is the first term")
    acc = sample_field(seq, k, grid).values
    held, j = 0, k
    while j < seq.j_max and held < seq.window:
        j += 1
        new = np.maximum(acc, sample_field(seq, j, grid).values)
        held = held + 1 if _change(new, acc) < seq.eps_sup else 0
        acc = new
    note = "" if held >= seq.window else "budget exhausted before the sup stabilized"
    return FieldGrid(grid, acc), StabilizationReport(held >= seq.window, j, held, note=note)


def _assert_nonincreasing(new: np.ndarray, old: np.ndarray, k: int, eps: float) -> None:
    finite = np.isfinite(new) & np.isfinite(old)
    rose = (new[finite] > old[finite] + eps).any() or (np.isneginf(old) & np.isfinite(new)).any()
    if rose:
        raise ConsistencyError(f"regularized tail sup increased from k={k - 1} to k={k}")


@dataclass(frozen=True, eq=False)
class PsiResult:
    psi: FieldGrid
    stabilization: StabilizationReport


def capital_psi(seq: ScalarFieldSeq, grid: GridSpec) -> FieldGrid:
    """``inf_k usc(sup_{j >= k} psi_j)`` on the grid."""
    return capital_psi_report(seq, grid).psi


def capital_psi_report(seq: ScalarFieldSeq, grid: GridSpec) -> PsiResult:
    """As :func:`capital_psi`, also returning how the inf over k terminated.

    ``increasing``: every tail sup is ``psi_{j_max}``, so Psi is its
    regularization.  ``decreasing``: tail sups are the terms themselves and
    the running min over k stops after ``window`` steps with change below
    ``eps_sup``.  ``none``: tail sups are taken over ``[k, j_max]``; they are
    nonincreasing in k, so the inf up to a stopping index K is the value at
    K.  A first backward pass finds K (the same stopping rule, with k capped
    at the midpoint of the budget so every tail keeps at least half of it),
    a second recomputes the tail sup at K.
    """
    W, eps = seq.window, seq.eps_sup
    if seq.monotone_hint == "increasing":
        f = usc_regularize(sample_field(seq, seq.j_max, grid))
        return PsiResult(f, StabilizationReport(False, seq.j_max, 0,
                                                note="budget-limited: increasing sequence read at j_max"))

    if seq.monotone_hint == "decreasing":
        acc = _usc(sample_field(seq, seq.j0, grid).values)
        prev = acc
        held, k = 0, seq.j0
        while k < seq.j_max and held < W:
            k += 1
            cur = _usc(sample_field(seq, k, grid).values)
            _assert_nonincreasing(cur, prev, k, eps)
            new = np.minimum(acc, cur)
            held = held + 1 if _change(new, acc) < eps else 0
            acc, prev = new, cur
        note = "" if held >= W else "budget exhausted before the inf stabilized"
        return PsiResult(FieldGrid(grid, acc), StabilizationReport(held >= W, k, held, note=note))

    J = seq.j_max
    k_cap = seq.j0 + (J - seq.j0) // 2
    # backward pass: change between consecutive regularized tail sups
    changes = {}
    acc = sample_field(seq, J, grid).values
    prev_usc = None
    for k in range(J, seq.j0 - 1, -1):
        if k < J:
            acc = np.maximum(acc, sample_field(seq, k, grid).values)
        if k > k_cap:
            continue
        cur = _usc(acc)
        if prev_usc is not None:
            _assert_nonincreasing(prev_usc, cur, k + 1, eps)
            changes[k + 1] = _change(prev_usc, cur)
        prev_usc = cur
    held, k_stop = 0, seq.j0
    for k in range(seq.j0 + 1, k_cap + 1):
        held = held + 1 if changes[k] < eps else 0
        k_stop = k
        if held >= W:
            break
    acc = sample_field(seq, J, grid).values
    for k in range(J - 1, k_stop - 1, -1):
        acc = np.maximum(acc, sample_field(seq, k, grid).values)
    note = "" if held >= W else "k budget exhausted before the inf stabilized"
    return PsiResult(FieldGrid(grid, _usc(acc)), StabilizationReport(held >= W, k_stop, held, note=note))


def kernel_from_psi(seq: ScalarFieldSeq, p_hat, grid: GridSpec,
                    psi: Optional[FieldGrid] = None) -> PointedMask:
    """Component of ``{Psi < 0}`` containing the cell of ``p_hat``."""
    psi = capital_psi(seq, grid) if psi is None else psi
    q = grid.cell_of(p_hat)
    if not psi.values[q] < 0:
        raise TamenessError(f"Psi at the limit point is {psi.values[q]} >= 0")
    return connected_component(psi.sublevel(0.0), q)


@dataclass
class BoundaryDiagnostic:
    violations: np.ndarray
    delta: float

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    @property
    def count(self) -> int:
        return len(self.violations)


def boundary_condition_diagnostic(psi: FieldGrid, delta: float = 10 * EPS_SUP) -> BoundaryDiagnostic:
    """Cells with ``Psi`` in ``[-delta, 0]`` far (> 2 cells) from the edge of ``{Psi < 0}``.

    A nonempty result flags a flat zero-level plateau, where the interior
    of ``{Psi <= 0}`` is larger than ``{Psi < 0}``.
    """
    if delta <= 0:
        raise SpecError("delta must be positive")
    neg = psi.values < 0
    edge = neg & ~ndimage.binary_erosion(neg, structure=np.ones((3, 3), bool), border_value=0)
    near_zero = (psi.values >= -delta) & (psi.values <= 0)
    dist = chebyshev_distance_to(GridMask(psi.spec, edge))
    bad = near_zero & (dist > 2)
    return BoundaryDiagnostic(np.argwhere(bad), delta)


def sublevel_sequence(seq: ScalarFieldSeq, grid: GridSpec, p_hat, point_track=None) -> DomainSequenceSpec:
    """The domain sequence ``{psi_j < 0}`` with the field's index budget."""
    track = point_track if point_track is not None else tuple(repr(float(v)) for v in p_hat)
    tail = FunctionalTail(Sublevel(seq.expr), seq.j0, seq.j_max - seq.j0 + 1, seq.window)
    return DomainSequenceSpec(grid, (), tail, track, tuple(p_hat))


@dataclass
class CrossCheckReport:
    equal: bool
    band: float
    mismatch_count: int
    status: str
    psi_components: int
    plateau_cells: int
    warnings: list = field(default_factory=list)

    def __bool__(self):
        return self.equal

    def as_dict(self) -> dict:
        return {
            "equal": self.equal,
            "band": self.band,
            "mismatch_count": self.mismatch_count,
            "status": self.status,
            "psi_components": self.psi_components,
            "plateau_cells": self.plateau_cells,
            "warnings": list(self.warnings),
        }


def cross_check_sublevel(seq: ScalarFieldSeq, p_hat, grid: GridSpec, band: int = 2,
                         point_track=None, psi: Optional[FieldGrid] = None) -> CrossCheckReport:
    """Compare the Psi route with the direct kernel of ``{psi_j < 0}``.

    The limit-function hypotheses (``{Psi < 0}`` connected and no zero-level
    plateau) are checked diagnostically; when one fails a mismatch is
    reported with status ``warning`` rather than ``fail``.
    """
    domains = sublevel_sequence(seq, grid, p_hat, point_track)
    if not tameness_check(domains).tamed:
        raise TamenessError("sublevel domain sequence is not tamed at the limit point")
    psi = capital_psi(seq, grid) if psi is None else psi
    via_psi = kernel_from_psi(seq, p_hat, grid, psi=psi)
    direct = kernel(domains)
    equal, mismatches = masks_equal_within_band(via_psi.mask, direct.mask, band)
    measured = mismatch_band(via_psi.mask, direct.mask)

    warnings = []
    n_comp = count_components(psi.sublevel(0.0))
    if n_comp != 1:
        warnings.append(f"{{Psi < 0}} has {n_comp} components")
    plateau = boundary_condition_diagnostic(psi)
    if not plateau.ok:
        warnings.append(f"{plateau.count} zero-level plateau cells")
    if equal:
        status = "pass"
    else:
        status = "warning" if warnings else "fail"
        if warnings:
            logger.warning("cross-check mismatch with violated hypotheses: %s", "; ".join(warnings))
    return CrossCheckReport(equal, measured, mismatches, status, n_comp, plateau.count, warnings)

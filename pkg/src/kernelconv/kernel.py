"""Kernels, pre-kernels, lower limits and convergence diagnosis.

The kernel of a sequence tamed at ``p`` is the union over ``k`` of the
component at ``p`` of the interior of ``AND_{j >= k} G_j``.  Unions over
``k`` are accumulated until they stay unchanged for ``window`` consecutive
``k`` (exactly one period past the prefix for periodic tails).

Convergence and subsequence selection are decided only for periodic tails,
where every subsequence's kernel is the kernel of the residue classes it hits
infinitely often.  Residues are 1-based tail positions: residue ``r`` is the
class of indices ``j = P + r + t*m``.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import ndimage

from .errors import ClassError, MonotoneError, SpecError, TamenessError
from .grid import (_CROSS, GridMask, PointedMask, connected_component, interior,
                   masks_equal_within_band)
from .sequences import (ConstantTail, DomainSequenceSpec, StabilizationReport,
                        domain_at, tail_intersection, tameness_check)


@dataclass(frozen=True, eq=False)
class KernelResult:
    pointed: PointedMask
    k_stabilized: int
    stabilization: StabilizationReport

    @property
    def mask(self) -> GridMask:
        return self.pointed.mask


@dataclass(frozen=True, eq=False)
class ConvergenceVerdict:
    converges: bool
    witness: Optional[Tuple[frozenset, frozenset]]
    residue_kernels: Dict[int, PointedMask] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "converges": self.converges,
            "witness": None if self.witness is None else [sorted(s) for s in self.witness],
            "residue_kernel_sizes": {str(r): k.mask.count for r, k in self.residue_kernels.items()},
        }


def _accumulate(seq: DomainSequenceSpec, term: Callable[[int], GridMask]):
    """OR ``term(k)`` over k = 1, 2, ... under the stabilization policy."""
    bits = np.zeros(seq.grid.shape, dtype=bool)
    if seq.is_periodic:
        last = seq.P + seq.tail.period
        for k in range(1, last + 1):
            bits |= term(k).bits
        report = StabilizationReport(True, last, seq.window, exact=True,
                                     note="exact: one period past the prefix")
        return GridMask(seq.grid, bits), report

    W = seq.window
    k_budget = seq.j_max - W
    held, k = 0, 0
    while k < k_budget and held < W:
        k += 1
        new = bits | term(k).bits
        held = held + 1 if np.array_equal(new, bits) else 0
        bits = new
    note = "" if held >= W else "k budget exhausted before the union stabilized"
    return GridMask(seq.grid, bits), StabilizationReport(held >= W, k, held, note=note)


def _interior_tail(seq: DomainSequenceSpec, k: int) -> GridMask:
    return interior(tail_intersection(seq, k)[0])


def kernel(seq: DomainSequenceSpec) -> KernelResult:
    """Carathéodory kernel of a tamed sequence, pointed at the limit cell."""
    if not tameness_check(seq).tamed:
        raise TamenessError("sequence is not tamed at its declared limit")
    q = seq.limit_cell
    mask, report = _accumulate(
        seq, lambda k: connected_component(_interior_tail(seq, k), q).mask)
    if not mask[q]:
        return KernelResult(PointedMask.empty(seq.grid), report.k_or_J_reached, report)
    return KernelResult(PointedMask(mask, q), report.k_or_J_reached, report)


def pre_kernel(seq: DomainSequenceSpec) -> GridMask:
    """Union over k of the interiors of the tail intersections (maybe disconnected)."""
    return _accumulate(seq, lambda k: _interior_tail(seq, k))[0]


def liminf_set(seq: DomainSequenceSpec) -> GridMask:
    """Union over k of the tail intersections, without taking interiors."""
    return _accumulate(seq, lambda k: tail_intersection(seq, k)[0])[0]


def _check_monotone(seq: DomainSequenceSpec, increasing: bool, upto: int) -> None:
    prev = domain_at(seq, 1)
    for j in range(1, upto):
        nxt = domain_at(seq, j + 1)
        ok = prev.issubset(nxt) if increasing else nxt.issubset(prev)
        if not ok:
            word = "increasing" if increasing else "decreasing"
            raise MonotoneError(f"sequence is not {word} at j={j}", index=j)
        prev = nxt


def kernel_monotone(seq: DomainSequenceSpec, direction: str) -> KernelResult:
    """Kernel of a monotone sequence via the direct union / intersection formulas.

    ``increasing``: component at the limit of the union of the (open) terms.
    ``decreasing``: component at the limit of the interior of the full
    intersection.  Monotonicity is verified on every index up to the budget.
    """
    if direction not in ("increasing", "decreasing"):
        raise SpecError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    increasing = direction == "increasing"
    upto = seq.P + 2 * seq.tail.period if seq.is_periodic else seq.j_max
    _check_monotone(seq, increasing, upto)
    if not tameness_check(seq).tamed:
        raise TamenessError("sequence is not tamed at its declared limit")
    q = seq.limit_cell

    if increasing:
        mask, report = _accumulate(seq, lambda j: interior(domain_at(seq, j)))
    else:
        full, report = tail_intersection(seq, 1)
        mask = interior(full)
    pointed = connected_component(mask, q)
    return KernelResult(pointed, report.k_or_J_reached, report)


def _require_periodic(seq: DomainSequenceSpec) -> int:
    if not seq.is_periodic:
        raise ClassError("only constant or periodic tails admit a finite convergence diagnosis")
    return seq.tail.period


def kernel_of_residue_subset(seq: DomainSequenceSpec, residues) -> PointedMask:
    """Kernel of any subsequence hitting exactly the residues in ``residues`` infinitely often."""
    m = _require_periodic(seq)
    residues = frozenset(int(r) for r in residues)
    if not residues:
        raise SpecError("residue subset must be nonempty")
    if not residues <= set(range(1, m + 1)):
        raise SpecError(f"residues must lie in 1..{m}, got {sorted(residues)}")
    bits = np.ones(seq.grid.shape, dtype=bool)
    for r in residues:
        bits &= domain_at(seq, seq.P + r).bits
    return connected_component(interior(GridMask(seq.grid, bits)), seq.limit_cell)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KERNELCONV_THREADS", "1")))
    except ValueError:
        return 1


def _singleton_kernels(seq: DomainSequenceSpec) -> Dict[int, PointedMask]:
    m = _require_periodic(seq)
    residues = range(1, m + 1)
    workers = min(_threads(), m)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            kernels = list(pool.map(lambda r: kernel_of_residue_subset(seq, {r}), residues))
    else:
        kernels = [kernel_of_residue_subset(seq, {r}) for r in residues]
    return dict(zip(residues, kernels))


def convergence_check(seq: DomainSequenceSpec) -> ConvergenceVerdict:
    """Decide convergence to the kernel for a periodic sequence.

    Every subsequence kernel contains the full kernel and is contained in
    some singleton-residue kernel, so the sequence converges iff every
    singleton kernel equals the full kernel.
    """
    m = _require_periodic(seq)
    full = kernel(seq).mask
    singles = _singleton_kernels(seq)
    differing = [r for r in range(1, m + 1) if not singles[r].mask == full]
    if not differing:
        return ConvergenceVerdict(True, None, singles)
    r = differing[0]
    for other in range(1, m + 1):
        if other != r and not singles[other].mask == singles[r].mask:
            return ConvergenceVerdict(False, (frozenset({r}), frozenset({other})), singles)
    return ConvergenceVerdict(False, (frozenset({r}), frozenset(range(1, m + 1))), singles)


def select_subsequence(seq: DomainSequenceSpec):
    """Residue whose singleton kernel is maximal under inclusion.

    Ties and incomparable maxima resolve to the smallest residue.  The
    subsequence of that residue class is constant, hence converges to its
    kernel.  Returns ``(residue, PointedMask)``.
    """
    m = _require_periodic(seq)
    if not tameness_check(seq).tamed:
        raise TamenessError("sequence is not tamed at its declared limit")
    singles = _singleton_kernels(seq)

    def strictly_below(a, b):
        return singles[a].mask.issubset(singles[b].mask) and not singles[a].mask == singles[b].mask

    for r in range(1, m + 1):
        if not any(strictly_below(r, s) for s in range(1, m + 1) if s != r):
            return r, singles[r]
    raise AssertionError("a finite poset always has a maximal element")


def residue_subsequence(seq: DomainSequenceSpec, residue: int) -> DomainSequenceSpec:
    """The constant subsequence running through one residue class."""
    _require_periodic(seq)
    shape = seq.tail.shapes[residue - 1]
    return DomainSequenceSpec(seq.grid, (), ConstantTail(shape), seq.point_track, seq.declared_limit)


# -- normal limit falsifier ----------------------------------------------------

def _random_connected_subset(region: np.ndarray, start, rng) -> np.ndarray:
    """Random 4-connected subset of ``region`` containing ``start``.

    The component at ``start`` of the region thinned by site-percolation
    noise and clipped to a random square around ``start``.
    """
    nx, ny = region.shape
    keep = rng.random(region.shape) < rng.uniform(0.6, 1.0)
    keep[start] = True
    half = int(rng.integers(1, max(nx, ny)))
    box = np.zeros_like(region)
    box[max(0, start[0] - half):start[0] + half + 1, max(0, start[1] - half):start[1] + half + 1] = True
    labels, _ = ndimage.label(region & keep & box, structure=_CROSS)
    return labels == labels[start]


@dataclass
class NormalLimitReport:
    holds: bool
    condition1_failures: int = 0
    condition2_failures: int = 0
    tested: int = 0
    k_range: int = 0

    def __bool__(self):
        return self.holds


def normal_limit_verify(seq: DomainSequenceSpec, candidate: PointedMask, trials: int = 50,
                        seed: int = 42) -> NormalLimitReport:
    """Randomized falsifier for the two normal-limit conditions.

    Test sets are 4-connected cell sets containing the limit cell.  On the
    grid, "compact in an open set" means contained in its interior, so
    condition (1) draws sets from the component at the limit of the
    candidate's interior and asks for a ``k`` with the set inside the
    interior of the k-th tail intersection.  Condition (2) draws sets inside
    those interiors and asks that they lie in the candidate.  Each condition
    also tests its largest admissible set.  ``True`` means no counterexample
    was found.
    """
    if not tameness_check(seq).tamed:
        raise TamenessError("sequence is not tamed at its declared limit")
    rng = np.random.default_rng(seed)
    q = seq.limit_cell
    k_range = seq.P + seq.tail.period if seq.is_periodic else seq.j_max - seq.window
    if seq.is_periodic:
        ks = list(range(1, k_range + 1))
    else:
        ks = sorted(set(np.linspace(1, k_range, num=min(k_range, 64)).astype(int).tolist()))
    stage_components = [connected_component(_interior_tail(seq, k), q).mask.bits for k in ks]
    stage_components = [c for c in stage_components if c.any()]

    report = NormalLimitReport(True, k_range=k_range)
    if candidate.is_empty or not candidate.mask[q]:
        report.holds = False
        report.condition1_failures += 1
        return report

    k_region = connected_component(interior(candidate.mask), q).mask.bits
    cand = candidate.mask.bits

    def in_some_stage(test):
        return any(not (test & ~stage).any() for stage in stage_components)

    tests1 = [k_region] if k_region.any() else []
    tests2 = list(stage_components[-1:])
    for _ in range(trials):
        if k_region.any():
            tests1.append(_random_connected_subset(k_region, q, rng))
        if stage_components:
            stage = stage_components[int(rng.integers(len(stage_components)))]
            tests2.append(_random_connected_subset(stage, q, rng))

    for test in tests1:
        report.tested += 1
        if not in_some_stage(test):
            report.condition1_failures += 1
    for test in tests2:
        report.tested += 1
        if (test & ~cand).any():
            report.condition2_failures += 1
    report.holds = report.condition1_failures == 0 and report.condition2_failures == 0
    return report


def masks_match(a: GridMask, b: GridMask, band: int) -> bool:
    return masks_equal_within_band(a, b, band)[0]


def all_residue_subsets(m: int):
    """Every nonempty subset of ``1..m`` as a frozenset."""
    for size in range(1, m + 1):
        for combo in itertools.combinations(range(1, m + 1), size):
            yield frozenset(combo)

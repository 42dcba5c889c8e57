import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kernelconv.errors import SpecError
from kernelconv.grid import GridSpec, masks_equal_within_band
from kernelconv.sequences import (ConstantTail, DomainSequenceSpec, FunctionalTail, PeriodicTail,
                                  constant_sequence, default_k_max, domain_at, periodic_sequence,
                                  shape_at, tail_intersection, tameness_check)
from kernelconv.shapes import Disc, Rect, SlitDisc, bind, rasterize_shape

G = Rect((0, 0), (1, 3))
H = Rect((0, 0), (3, 1))
SQUARE = Rect((0, 0), (1, 1))


@pytest.fixture(scope="module")
def drunken(grid):
    return periodic_sequence(grid, (G, H), (0, 0))


@pytest.fixture(scope="module")
def pacman(grid):
    return DomainSequenceSpec(grid, (), FunctionalTail(SlitDisc(), 1, 512, 128), ("0", "0.5"), (0, 0.5))


def test_tail_rule_validation():
    with pytest.raises(SpecError):
        PeriodicTail(())
    with pytest.raises(SpecError):
        FunctionalTail(SlitDisc(), 1, 5, 5)
    with pytest.raises(SpecError):
        FunctionalTail(SlitDisc(), 1, 512, 0)


def test_point_track_only_uses_j(grid):
    with pytest.raises(SpecError):
        DomainSequenceSpec(grid, (), ConstantTail(SQUARE), ("x", "0"), (0, 0))


def test_domain_at_alternates(drunken, grid):
    assert domain_at(drunken, 3) == rasterize_shape(G, grid)
    assert domain_at(drunken, 4) == rasterize_shape(H, grid)
    with pytest.raises(SpecError):
        domain_at(drunken, 0)


def test_constant_tail_repeats(grid):
    seq = DomainSequenceSpec(grid, (Disc((0, 0), 0.3),), ConstantTail(SQUARE), ("0", "0"), (0, 0))
    assert domain_at(seq, 1) == rasterize_shape(Disc((0, 0), 0.3), grid)
    for j in (2, 3, 17):
        assert domain_at(seq, j) == domain_at(seq, 2)


def test_functional_index_map(grid):
    # the template index runs from j0 at the first tail position
    seq = DomainSequenceSpec(grid, (Disc((0, 0), 0.25),), FunctionalTail(Disc((0, 0), "1-1/j"), 2, 512, 5),
                             ("0", "0"), (0, 0))
    assert shape_at(seq, 2) == bind(Disc((0, 0), "1-1/j"), 2)
    assert shape_at(seq, 7) == bind(Disc((0, 0), "1-1/j"), 7)


def test_drunken_tail_intersection_is_square(drunken, grid):
    mask, report = tail_intersection(drunken, 1)
    assert mask == rasterize_shape(SQUARE, grid)
    assert report.stabilized and report.exact and report.k_or_J_reached == 2


def test_increasing_discs_tail_is_first_term(grid):
    seq = DomainSequenceSpec(grid, (Disc((0, 0), 0.25),), FunctionalTail(Disc((0, 0), "1-1/j"), 2, 512, 5),
                             ("0", "0"), (0, 0))
    mask, report = tail_intersection(seq, 5)
    assert mask == rasterize_shape(Disc((0, 0), 1 - 1 / 5), grid)
    assert report.stabilized


def test_decreasing_discs_tail_full_budget(grid):
    """With a window longer than any run of unchanged rasters the whole budget is used."""
    seq = DomainSequenceSpec(grid, (), FunctionalTail(Disc((0, 0), "1+1/j"), 1, 200, 64), ("0", "0"), (0, 0))
    mask, report = tail_intersection(seq, 1)
    lower = rasterize_shape(Disc((0, 0), 1.0), grid)
    upper = rasterize_shape(Disc((0, 0), 1 + 1 / 195), grid)
    assert lower.issubset(mask) and mask.issubset(upper)
    assert not report.stabilized and report.k_or_J_reached == 200
    assert "budget" in report.note


def test_decreasing_discs_tail_short_window(grid):
    """A short window stops once the raster is unchanged for W indices; the
    result is the last term reached, within a cell of the limit disc."""
    seq = DomainSequenceSpec(grid, (), FunctionalTail(Disc((0, 0), "1+1/j"), 1, 200, 5), ("0", "0"), (0, 0))
    mask, report = tail_intersection(seq, 1)
    assert report.stabilized and report.window_held >= 5
    assert mask == domain_at(seq, report.k_or_J_reached)
    assert rasterize_shape(Disc((0, 0), 1.0), grid).issubset(mask)
    assert masks_equal_within_band(mask, rasterize_shape(Disc((0, 0), 1.0), grid), 2)[0]


def test_periodic_tail_intersection_shift_invariant(grid):
    seq = periodic_sequence(grid, (Disc((0, 0), 1), Disc((0.3, 0), 1), Rect((0, 0), (0.9, 1.4))), (0, 0),
                            prefix=(Disc((0, 0), 0.2),))
    m = seq.tail.period
    for k in range(2, 2 + m):
        assert tail_intersection(seq, k)[0] == tail_intersection(seq, k + m)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(0, 40))
def test_tail_intersection_inside_later_terms(k, dj):
    g = GridSpec.square(-2.0, 2.0, 64)
    seq = DomainSequenceSpec(g, (), FunctionalTail(Disc(("0.5*sin(j)", "0"), "1 + 1/j"), 1, 128, 5),
                             ("0", "0"), (0, 0))
    mask, report = tail_intersection(seq, k)
    # the running AND only covers indices up to where it stopped
    j = min(k + dj, report.k_or_J_reached)
    assert mask.issubset(domain_at(seq, j))
    # intersecting one more term never adds cells
    assert (mask & domain_at(seq, k + dj)).issubset(mask)


def test_pacman_is_tamed(pacman):
    report = tameness_check(pacman)
    assert report.tamed and report.ball_radius >= 0.4
    assert report.reason == "ok"


def test_drunken_is_tamed(drunken):
    report = tameness_check(drunken)
    assert report.tamed and report.ball_radius >= 0.9
    assert report.k == 1


def test_ball_radius_against_distance_oracle(drunken, grid):
    """The certified radius is within a cell of the true inscribed radius (1)."""
    report = tameness_check(drunken)
    assert abs(report.ball_radius - 1.0) <= grid.h


def test_geometric_failure(grid):
    seq = DomainSequenceSpec(grid, (), ConstantTail(Disc((2, 0), 0.5)), ("1/j", "0"), (0, 0))
    report = tameness_check(seq)
    assert not report.tamed and report.reason == "geometric"


def test_point_track_failure(grid):
    seq = DomainSequenceSpec(grid, (), ConstantTail(SQUARE), ("1", "0"), (0, 0))
    report = tameness_check(seq)
    assert not report.tamed and report.reason == "point_track"


def test_budget_failure(grid):
    # the limit cell is set but the domain is a one-cell-thick strip
    thin = Rect((0, 0), (1, 0.75 * grid.h))
    seq = constant_sequence(grid, thin, (0, grid.h / 4))
    report = tameness_check(seq)
    assert not report.tamed and report.reason == "budget"


def test_default_k_max(drunken, pacman):
    assert default_k_max(drunken) == 4
    assert default_k_max(pacman) == 128

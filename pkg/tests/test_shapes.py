import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kernelconv.errors import SpecError
from kernelconv.grid import GridSpec
from kernelconv.shapes import (Disc, HalfspaceGraph, Rect, ShapeUnion, SlitDisc, Sublevel, bind,
                               is_template, rasterize_shape, shape_from_dict, shape_to_dict)


def test_disc_area(grid):
    m = rasterize_shape(Disc((0, 0), 1.0), grid)
    assert abs(m.area - math.pi) <= 8 * grid.h


def test_rect_area_in_wide_window():
    # the tall rectangle |x|<1, |y|<3 needs a window containing it
    g = GridSpec.square(-4.0, 4.0, 256)
    m = rasterize_shape(Rect((0, 0), (1, 3)), g)
    perimeter = 16.0
    assert abs(m.area - 12.0) <= perimeter * 2 * g.h


@pytest.mark.parametrize("make", [
    lambda: Disc((0, 0), 0),
    lambda: Disc((0, 0), -1),
    lambda: Rect((0, 0), (1, 0)),
    lambda: Sublevel("x + q"),
    lambda: Sublevel("x + z"),
    lambda: HalfspaceGraph("x"),          # a graph function of x makes no sense
    lambda: Disc((0, 0), "1 - x"),
    lambda: ShapeUnion(()),
    lambda: Disc((0, 0), float("inf")),
])
def test_invalid_shapes(make):
    with pytest.raises(SpecError):
        make()


def test_radius_expression_evaluated_at_bind(grid):
    t = Disc((0, 0), "1 - 1/j")
    assert is_template(t)
    assert not is_template(bind(t, 4))
    assert rasterize_shape(bind(t, 4), grid) == rasterize_shape(Disc((0, 0), 0.75), grid)
    with pytest.raises(SpecError):
        rasterize_shape(t, grid)          # index not bound
    with pytest.raises(SpecError):
        rasterize_shape(bind(t, 1), grid)  # radius 0


def test_slit_disc_geometry(grid):
    h = grid.h
    m = rasterize_shape(SlitDisc(j=8), grid)
    disc = rasterize_shape(Disc((0, 0), 1.0), grid)
    assert m.issubset(disc)
    x, y = grid.centers()
    x = np.broadcast_to(x, grid.shape)
    y = np.broadcast_to(y, grid.shape)
    removed = disc.bits & ~m.bits
    # removed cells hug the segment -1 < x < 1 - 1/8 on the real axis
    assert np.all(np.abs(y[removed]) <= h / 2 + 1e-12)
    assert np.all(x[removed] < 1 - 1 / 8)
    # the two rows straddling the axis are cut
    assert not m[grid.cell_of((0.0, h / 2))]
    assert not m[grid.cell_of((0.0, -h / 2))]
    assert m[grid.cell_of((0.95, h / 2))]
    with pytest.raises(SpecError):
        rasterize_shape(SlitDisc(), grid)


def test_halfspace_graph(grid):
    m = rasterize_shape(HalfspaceGraph("(1/j)*sin(y)", j=2), grid)
    x, y = grid.centers()
    expected = np.broadcast_to(x > 0.5 * np.sin(y), grid.shape)
    assert np.array_equal(m.bits, expected)


def test_sublevel_uses_profile_aliases(grid):
    a = rasterize_shape(Sublevel("r^2 + s^2 - 1"), grid)
    b = rasterize_shape(Disc((0, 0), 1.0), grid)
    assert a == b


def test_sublevel_log_pole_is_inside(grid):
    # (1/j) log(y^2) is -inf only at y = 0 which is never a cell centre here,
    # but the sampled set must still be finite-valued and strictly below 0 near y=0
    m = rasterize_shape(Sublevel("x^2 + y^2 + (1/j)*log(y^2) - 1", j=1), grid)
    assert m[grid.cell_of((0.0, grid.h / 2))]


def test_sublevel_domain_error_is_spec_error(grid):
    with pytest.raises(SpecError):
        rasterize_shape(Sublevel("sqrt(-1 - x^2)"), grid)


def test_union_binds_parts(grid):
    u = bind(ShapeUnion((Disc((-1, 0), "1/j"), Disc((1, 0), 0.25))), 2)
    expected = rasterize_shape(Disc((-1, 0), 0.5), grid) | rasterize_shape(Disc((1, 0), 0.25), grid)
    assert rasterize_shape(u, grid) == expected


@pytest.mark.parametrize("shape", [
    Disc((0, 0.5), "1+1/j"),
    Rect((0, 0), (1, 3)),
    SlitDisc(),
    SlitDisc(j=3),
    HalfspaceGraph("(1/j)*sin(y)"),
    Sublevel("max(x^2+y^2-1, -y)"),
    ShapeUnion((Disc((-1, 0), 0.5), Rect((1, 0), (0.2, 0.2)))),
])
def test_dict_round_trip(shape):
    assert shape_from_dict(shape_to_dict(shape)) == shape


def test_unknown_shape_type():
    with pytest.raises(SpecError):
        shape_from_dict({"type": "hexagon"})


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 1.8), st.floats(0.0, 0.2))
def test_disc_raster_monotone_in_radius(r, dr):
    g = GridSpec.square(-2.0, 2.0, 64)
    small = rasterize_shape(Disc((0, 0), r), g)
    big = rasterize_shape(Disc((0, 0), r + dr), g)
    assert small.issubset(big)

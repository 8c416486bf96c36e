import numpy as np
import pytest
from hypothesis import given, strategies as st

from midfield.voxel_grid import P1_OFFSETS, P2_OFFSETS, Stencil, VoxelGrid, build_grid, sweep_directions


def test_cube_grid_sizes():
    g = build_grid([((0, 0, 0), (1, 1, 1))], 0.2, 0.4)
    assert g.dims == (10, 10, 10)
    assert np.allclose(g.origin, -0.4)
    assert np.allclose(g.upper, 1.4)
    assert build_grid([((0, 0, 0), (1, 1, 1))], 0.05, 0.4).dims == (37, 37, 37)
    assert build_grid([((0, 0, 0), (1, 1, 1))], 0.1, 0.4).dims == (19, 19, 19)


def test_point_box_gives_single_voxel():
    g = build_grid([((0, 0, 0), (0, 0, 0))], 1.0, 0.0)
    assert g.dims == (1, 1, 1)
    assert g.origin == (0.0, 0.0, 0.0)


def test_absolute_padding_and_origin_override():
    g = build_grid([((0, 0, 0), (1, 2, 3))], 0.5, 0.25, absolute_padding=True)
    assert np.allclose(g.origin, -0.25)
    assert np.all(g.upper >= np.array([1.25, 2.25, 3.25]) - 1e-12)
    g2 = build_grid([((0, 0, 0), (1, 1, 1))], 0.5, 0.0, origin=(-1, -1, -1))
    assert g2.origin == (-1.0, -1.0, -1.0)
    assert np.all(g2.upper >= 1.0)
    with pytest.raises(ValueError):
        build_grid([((0, 0, 0), (1, 1, 1))], 0.5, 0.0, origin=(0.5, 0, 0))
    with pytest.raises(ValueError):
        build_grid([((0, 0, 0), (1, 1, 1))], 0.0)
    with pytest.raises(ValueError):
        build_grid([], 0.1)


def test_coords():
    g = VoxelGrid((-0.4, -0.4, -0.4), 0.2, (10, 10, 10))
    assert np.allclose(g.coords(0, 0, 0), g.origin)
    assert np.allclose(g.coords(2, 0, 0), (0.0, -0.4, -0.4))
    assert np.allclose(g.coords(9, 9, 9), np.array(g.origin) + 9 * 0.2)
    with pytest.raises(IndexError):
        g.coords(10, 0, 0)
    pts = g.all_coords()
    idx = np.array([0, 5, 123, 999])
    assert np.array_equal(g.points(idx), pts[idx])


@given(st.tuples(*(st.integers(1, 9),) * 3), st.data())
def test_linear_roundtrip(dims, data):
    g = VoxelGrid((0.0, 0.0, 0.0), 1.0, dims)
    idx = data.draw(st.integers(0, g.size - 1))
    i, j, k = g.unravel(idx)
    assert g.linear(i, j, k) == idx
    assert np.allclose(g.all_coords()[idx], g.coords(i, j, k))


def test_flat_layout_reshapes_to_zyx():
    g = VoxelGrid((0.0, 0.0, 0.0), 1.0, (4, 3, 2))
    arr = np.arange(g.size).reshape(g.shape_zyx)
    assert arr[1, 2, 3] == g.linear(3, 2, 1)


def test_sweep_orderings():
    g = VoxelGrid((0.0, 0.0, 0.0), 1.0, (3, 4, 2))
    orders = g.sweep_orderings()
    assert len(orders) == 8
    assert orders[0].directions == (1, 1, 1) and orders[0].i == (0, 2, 1)
    assert orders[7].directions == (-1, -1, -1) and orders[7].k == (1, 0, -1)
    assert [o.directions for o in orders] == [tuple(d) for d in sweep_directions()]
    for o in orders:
        seen = [g.linear(*ijk) for ijk in o.indices()]
        assert sorted(seen) == list(range(g.size))


def test_stencils():
    assert len(P1_OFFSETS) == 6 and len(P2_OFFSETS) == 26
    assert len({tuple(o) for o in P2_OFFSETS}) == 26
    g = VoxelGrid((0.0, 0.0, 0.0), 1.0, (5, 5, 5))
    assert len(g.neighbors((2, 2, 2))) == 6
    assert len(g.neighbors((0, 0, 0))) == 3
    assert len(g.neighbors((0, 0, 0), Stencil.P2)) == 7
    assert len(g.neighbors((2, 2, 2), Stencil.P2)) == 26


def test_rejects_bad_dims():
    with pytest.raises(ValueError):
        VoxelGrid((0.0, 0.0, 0.0), 1.0, (0, 1, 1))

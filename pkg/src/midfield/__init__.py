"""Voxel-grid distance fields and middle surfaces between labelled data sets.

Four solvers share one initialized :class:`DistanceField`: fast sweeping
(:func:`fsm`), fast marching (:func:`fmm`), the vector distance transform
(:func:`vdt`) and Dijkstra-Pythagoras (:func:`dp`).  Their tracked variants
record the nearest source of every voxel, which partitions the grid by data
set; :func:`middle_surface` extracts the interface between two labels.
"""

from types import ModuleType as _ModuleType

from .eikonal_solvers import fmm, fsm, godunov_update
from .euclidean_solvers import dp, vdt
from .field_init import (
    DistanceField,
    SourceGapError,
    init_grid_points,
    init_mesh,
    init_point_cloud,
    init_point_cloud_enlarged,
    initialize,
    new_field,
)
from .geometry import (
    PointCloud,
    TriMesh,
    closest_point_triangle,
    euclid_dist,
    gen_cube_mesh,
    gen_ellipsoid,
    gen_sphere,
    gen_sponge,
    gen_wave_sheets,
    point_triangle_dist,
    separation_radius,
)
from .io_cli import read_dataset, read_mesh, read_point_cloud, run_cli, write_vtk_polydata, write_vtk_structured
from .metrics_oracles import brute_force_distance, exact_cube_distance, mean_squared_difference, residual_eikonal
from .middle_surface import (
    LabelField,
    dp_tracked,
    extract_border,
    fmm_tracked,
    fsm_tracked,
    isosurface_05,
    mesh_area,
    mesh_volume,
    middle_surface,
    vdt_tracked,
)
from .priority_heap import AddressableMinHeap
from .voxel_grid import VoxelGrid, build_grid

__version__ = "0.1.0"

__all__ = [n for n, v in globals().items() if not n.startswith("_") and not isinstance(v, _ModuleType)]

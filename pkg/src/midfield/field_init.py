"""Distance-field state and the initialisation procedures.

Every input element (a cloud point or a triangle) gets a global element id in
an :class:`ElementTable`; ``DistanceField.source`` stores that id per voxel,
-1 meaning unknown.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .geometry import (
    DEFAULT_REACH,
    PointCloud,
    TriMesh,
    _triangle_voxels,
    closest_point_triangle,
    separation_radius,
    triangle_voxel_bound,
)
from .voxel_grid import VoxelGrid

log = logging.getLogger(__name__)

UNKNOWN = -1
KIND_POINT = 0
KIND_TRIANGLE = 1
UNVISITED, TO_BE_VISITED, VISITED = 0, 1, 2


class SourceGapError(RuntimeError):
    """Raised when source tracking leaves voxels without a source."""


@dataclass(frozen=True)
class SourceRef:
    dataset_label: str | None
    element: int | None
    kind: str  # "point", "triangle" or "unknown"

    @property
    def known(self) -> bool:
        return self.kind != "unknown"


UNKNOWN_SOURCE = SourceRef(None, None, "unknown")


class ElementTable:
    """Flat, jit-friendly view of every labelled input element.

    ``geom[e]`` holds a point in its first three slots or the nine corner
    coordinates of a triangle.  Datasets sharing a label share a label id.
    """

    def __init__(self):
        self.kind = np.empty(0, np.int8)
        self.geom = np.empty((0, 9), np.float64)
        self.label = np.empty(0, np.int32)
        self.local = np.empty(0, np.int64)
        self.names: list[str] = []
        self.datasets: list[PointCloud | TriMesh] = []

    def __len__(self):
        return len(self.kind)

    def label_id(self, name: str) -> int:
        if name not in self.names:
            self.names.append(name)
        return self.names.index(name)

    def _append(self, kind, geom, label_id, local):
        self.kind = np.concatenate([self.kind, np.full(len(geom), kind, np.int8)])
        self.geom = np.ascontiguousarray(np.concatenate([self.geom, geom]))
        self.label = np.concatenate([self.label, np.full(len(geom), label_id, np.int32)])
        self.local = np.concatenate([self.local, local.astype(np.int64)])

    def add_cloud(self, cloud: PointCloud) -> int:
        start = len(self)
        geom = np.zeros((len(cloud), 9))
        geom[:, :3] = cloud.points
        self._append(KIND_POINT, geom, self.label_id(cloud.label), np.arange(len(cloud)))
        self.datasets.append(cloud)
        return start

    def add_mesh(self, mesh: TriMesh) -> int:
        start = len(self)
        self._append(KIND_TRIANGLE, mesh.corners().reshape(-1, 9), self.label_id(mesh.label), np.arange(len(mesh)))
        self.datasets.append(mesh)
        return start

    def ref(self, e: int) -> SourceRef:
        if e < 0:
            return UNKNOWN_SOURCE
        kind = "point" if self.kind[e] == KIND_POINT else "triangle"
        return SourceRef(self.names[self.label[e]], int(self.local[e]), kind)

    def distance(self, p, e: int) -> float:
        return float(element_distance(float(p[0]), float(p[1]), float(p[2]), e, self.kind, self.geom))


@njit(cache=True, inline="always")
def element_distance(x, y, z, e, kind, geom):
    if kind[e] == 0:
        dx = x - geom[e, 0]
        dy = y - geom[e, 1]
        dz = z - geom[e, 2]
        return math.sqrt(dx * dx + dy * dy + dz * dz)
    dist, _, _, _ = closest_point_triangle(x, y, z, geom[e])
    return dist


@dataclass
class DistanceField:
    grid: VoxelGrid
    d: np.ndarray
    fixed: np.ndarray
    source: np.ndarray
    visit: np.ndarray
    elements: ElementTable = field(default_factory=ElementTable)
    stats: dict = field(default_factory=dict)

    @property
    def n_fixed(self) -> int:
        return int(np.count_nonzero(self.fixed))

    def volume(self, arr: np.ndarray | None = None) -> np.ndarray:
        """``arr`` (default ``d``) viewed as ``[k, j, i]``."""
        return (self.d if arr is None else arr).reshape(self.grid.shape_zyx)

    def at(self, i, j, k) -> float:
        return float(self.d[self.grid.linear(i, j, k)])

    def source_ref(self, idx: int) -> SourceRef:
        return self.elements.ref(int(self.source[idx]))

    def source_labels(self) -> np.ndarray:
        """Per-voxel label id of the recorded source, -1 where unknown."""
        out = np.full(self.grid.size, -1, np.int32)
        known = self.source >= 0
        out[known] = self.elements.label[self.source[known]]
        return out

    def require_initialized(self) -> None:
        if not self.fixed.any():
            raise ValueError("uninitialized field")

    def copy(self) -> "DistanceField":
        return DistanceField(
            self.grid, self.d.copy(), self.fixed.copy(), self.source.copy(), self.visit.copy(), self.elements, dict(self.stats)
        )


def new_field(grid: VoxelGrid) -> DistanceField:
    n = grid.size
    return DistanceField(
        grid,
        np.full(n, np.inf),
        np.zeros(n, np.bool_),
        np.full(n, UNKNOWN, np.int64),
        np.zeros(n, np.int8),
    )


@njit(cache=True)
def _init_points(origin, h, dims, pts, first_elem, radius, d, fixed, source):
    ni, nj, nk = dims[0], dims[1], dims[2]
    for l in range(pts.shape[0]):
        px, py, pz = pts[l, 0], pts[l, 1], pts[l, 2]
        lo = np.empty(3, np.int64)
        hi = np.empty(3, np.int64)
        for a in range(3):
            f = int(math.floor((pts[l, a] - origin[a]) / h))
            # points on the upper faces belong to the last cell
            f = min(max(f, 0), max(dims[a] - 2, 0))
            lo[a] = f
            hi[a] = min(f + 1, dims[a] - 1)
            if radius > 0.0:
                c0 = max(0, int(math.ceil((pts[l, a] - radius - origin[a]) / h - 1e-9)))
                c1 = min(dims[a] - 1, int(math.floor((pts[l, a] + radius - origin[a]) / h + 1e-9)))
                lo[a] = min(lo[a], c0)
                hi[a] = max(hi[a], c1)
        e = first_elem + l
        for k in range(lo[2], hi[2] + 1):
            z = origin[2] + k * h
            for j in range(lo[1], hi[1] + 1):
                y = origin[1] + j * h
                for i in range(lo[0], hi[0] + 1):
                    x = origin[0] + i * h
                    dx, dy, dz = px - x, py - y, pz - z
                    dn = math.sqrt(dx * dx + dy * dy + dz * dz)
                    idx = i + ni * (j + nj * k)
                    if dn < d[idx]:
                        d[idx] = dn
                        fixed[idx] = True
                        source[idx] = e


@njit(cache=True)
def _init_triangles(origin, h, dims, tris, first_elem, reach, buf, d, fixed, source):
    """Returns the number of triangles that touched no grid point."""
    ni, nj = dims[0], dims[1]
    skipped = 0
    for l in range(tris.shape[0]):
        t = tris[l]
        n = _triangle_voxels(origin, h, dims, t, reach, buf)
        if n == 0:
            skipped += 1
        e = first_elem + l
        for m in range(n):
            idx = buf[m]
            i = idx % ni
            j = (idx // ni) % nj
            k = idx // (ni * nj)
            dn, _, _, _ = closest_point_triangle(origin[0] + i * h, origin[1] + j * h, origin[2] + k * h, t)
            if dn < d[idx]:
                d[idx] = dn
                fixed[idx] = True
                source[idx] = e
    return skipped


def _check_inside(grid: VoxelGrid, pts: np.ndarray, label: str) -> None:
    tol = 1e-9 * grid.h
    lo = np.asarray(grid.origin) - tol
    hi = grid.upper + tol
    bad = np.any((pts < lo) | (pts > hi), axis=1)
    if bad.any():
        raise ValueError(
            f"point outside computational domain: {pts[np.argmax(bad)].tolist()} in dataset {label!r}"
        )


def _as_list(items):
    return [items] if isinstance(items, (PointCloud, TriMesh)) else list(items)


def init_point_cloud(field: DistanceField, clouds: PointCloud | Iterable[PointCloud]) -> DistanceField:
    """Fix the 8 grid points of the cell around every cloud point."""
    return _init_clouds(field, _as_list(clouds), [0.0] * len(_as_list(clouds)))


def init_grid_points(field: DistanceField, clouds: PointCloud | Iterable[PointCloud], tol: float = 1e-9) -> DistanceField:
    """Fix exactly the grid points that coincide with cloud points.

    For data sampled on the grid lattice itself; each point must lie within
    ``tol * h`` of a grid point, which receives the exact (near zero)
    distance.
    """
    grid = field.grid
    clouds = _as_list(clouds)
    origin = np.asarray(grid.origin)
    hits = []
    for cloud in clouds:
        _check_inside(grid, cloud.points, cloud.label)
        ijk = np.rint((cloud.points - origin) / grid.h).astype(np.int64)
        ijk = np.clip(ijk, 0, np.asarray(grid.dims) - 1)
        off = np.linalg.norm(origin + ijk * grid.h - cloud.points, axis=1)
        if np.any(off > tol * grid.h):
            bad = cloud.points[np.argmax(off)].tolist()
            raise ValueError(f"point {bad} of {cloud.label!r} does not coincide with a grid point")
        hits.append((ijk, off))
    for cloud, (ijk, off) in zip(clouds, hits):
        first = field.elements.add_cloud(cloud)
        lin = grid.linear(ijk[:, 0], ijk[:, 1], ijk[:, 2])
        for l in range(len(lin)):
            v = lin[l]
            if off[l] < field.d[v]:
                field.d[v] = off[l]
                field.fixed[v] = True
                field.source[v] = first + l
    return field


def init_point_cloud_enlarged(
    field: DistanceField,
    clouds: PointCloud | Iterable[PointCloud],
    radius: float | Sequence[float] | None = None,
) -> DistanceField:
    """Fix every grid point within an axis-aligned cube of half-width ``radius``
    around each cloud point (in addition to the 8 cell corners).

    ``radius=None`` uses each cloud's own separation radius; a scalar applies
    one radius to all clouds.
    """
    clouds = _as_list(clouds)
    if radius is None:
        radii = [separation_radius(c) for c in clouds]
    elif np.ndim(radius) == 0:
        radii = [float(radius)] * len(clouds)
    else:
        radii = [float(r) for r in radius]
    if any(not r > 0 for r in radii):
        raise ValueError("enlargement radius must be positive")
    field.stats["enlarge_radius"] = radii
    return _init_clouds(field, clouds, radii)


def _init_clouds(field, clouds, radii):
    grid = field.grid
    for cloud, radius in zip(clouds, radii):
        if len(cloud) == 0:
            raise ValueError(f"point cloud {cloud.label!r} is empty")
        _check_inside(grid, cloud.points, cloud.label)
    for cloud, radius in zip(clouds, radii):
        first = field.elements.add_cloud(cloud)
        _init_points(
            np.asarray(grid.origin), grid.h, np.asarray(grid.dims, np.int64), cloud.points, first, float(radius),
            field.d, field.fixed, field.source,
        )
    return field


def init_mesh(field: DistanceField, meshes: TriMesh | Iterable[TriMesh], reach: float = DEFAULT_REACH) -> DistanceField:
    """Fix the grid points within ``reach * h`` of every triangle at their
    exact distance."""
    grid = field.grid
    meshes = _as_list(meshes)
    for mesh in meshes:
        if mesh.degenerate_mask().any():
            raise ValueError(f"degenerate triangle in mesh {mesh.label!r}")
    skipped = 0
    for mesh in meshes:
        first = field.elements.add_mesh(mesh)
        tris = mesh.corners().reshape(-1, 9)
        if not len(tris):
            continue
        bound = max(triangle_voxel_bound(grid, t.reshape(3, 3), reach * grid.h) for t in tris)
        buf = np.empty(bound, np.int64)
        skipped += _init_triangles(
            np.asarray(grid.origin), grid.h, np.asarray(grid.dims, np.int64), np.ascontiguousarray(tris), first, reach * grid.h, buf,
            field.d, field.fixed, field.source,
        )
    field.stats["skipped_triangles"] = field.stats.get("skipped_triangles", 0) + skipped
    if skipped:
        log.warning("%d triangle(s) outside the grid were skipped", skipped)
    return field


INIT_MODES = ("standard", "enlarged", "grid_points")


def _auto_radius(cloud: PointCloud) -> float:
    """Separation radius, or 0 (plain corner init) for a single distinct point."""
    try:
        return separation_radius(cloud)
    except ValueError:
        return 0.0


def initialize(
    field: DistanceField,
    datasets: Sequence[PointCloud | TriMesh],
    mode: str = "standard",
    radius: float | str | None = None,
    reach: float = DEFAULT_REACH,
) -> DistanceField:
    """Initialize from a mixed list of clouds and meshes, in list order.

    ``mode`` picks the cloud rule (meshes always use the triangle band):
    ``standard`` fixes the 8 cell corners, ``enlarged`` the cube of half-width
    ``radius`` (``None``/"auto": each cloud's separation radius, "global": the
    largest of those) and ``grid_points`` only coinciding grid points.
    ``reach`` is the triangle band half-width in units of h.
    """
    if mode not in INIT_MODES:
        raise ValueError(f"unknown initialization {mode!r}; choose from {INIT_MODES}")
    if not datasets:
        raise ValueError("no input geometry")
    clouds = [ds for ds in datasets if isinstance(ds, PointCloud)]
    if mode == "enlarged" and clouds:
        if radius in (None, "auto"):
            radii = {id(c): _auto_radius(c) for c in clouds}
        elif radius == "global":
            r = max(_auto_radius(c) for c in clouds)
            radii = {id(c): r for c in clouds}
        else:
            radii = {id(c): float(radius) for c in clouds}
    for ds in datasets:
        if isinstance(ds, TriMesh):
            init_mesh(field, ds, reach)
        elif mode == "standard":
            init_point_cloud(field, ds)
        elif mode == "grid_points":
            init_grid_points(field, ds)
        elif radii[id(ds)] > 0:
            init_point_cloud_enlarged(field, ds, radii[id(ds)])
        else:
            init_point_cloud(field, ds)
    if mode == "enlarged" and clouds:
        field.stats["enlarge_radius"] = [radii[id(c)] for c in clouds]
    return field

"""Middle surfaces between labelled datasets.

Every solver is run with source tracking, each voxel inherits the dataset
label of its source, and the interface between the labelled subvolumes is
extracted either as discrete border voxels or as the 0.5 isosurface of a
two-valued indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .eikonal_solvers import DEFAULT_MAX_PASSES, DEFAULT_TOLERANCE, _godunov, fmm, pad, unpad
from .euclidean_solvers import dp, vdt
from .field_init import DistanceField, SourceGapError
from .geometry import TriMesh
from .voxel_grid import VoxelGrid, sweep_directions

UNASSIGNED = -1

GAP_MESSAGE = "source gap - use enlarged initialization"


@dataclass
class LabelField:
    """Per-voxel dataset label id (``UNASSIGNED`` where no source is known)."""

    grid: VoxelGrid
    labels: np.ndarray
    names: list[str]

    @classmethod
    def from_field(cls, field: DistanceField) -> "LabelField":
        return cls(field.grid, field.source_labels(), list(field.elements.names))

    @property
    def n_unassigned(self) -> int:
        return int(np.count_nonzero(self.labels == UNASSIGNED))

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown label {name!r}") from None

    def counts(self) -> dict[str, int]:
        ids, n = np.unique(self.labels[self.labels >= 0], return_counts=True)
        return {self.names[i]: int(c) for i, c in zip(ids, n)}

    def volume(self) -> np.ndarray:
        return self.labels.reshape(self.grid.shape_zyx)


@njit(cache=True, inline="always")
def _pick(dp_, op, dm, om):
    # the + neighbour wins unless the - neighbour is strictly smaller
    if dm < dp_:
        return dm, om
    return dp_, op


@njit(cache=True)
def _fsm_tracked_sweep(d, fixed, source, ni, nj, nk, h, di, dj, dk):
    sy = ni + 2
    sz = (ni + 2) * (nj + 2)
    i0, i1 = (1, ni + 1) if di > 0 else (ni, 0)
    j0, j1 = (1, nj + 1) if dj > 0 else (nj, 0)
    k0, k1 = (1, nk + 1) if dk > 0 else (nk, 0)
    change = 0.0
    for k in range(k0, k1, dk):
        for j in range(j0, j1, dj):
            base = sy * j + sz * k
            for i in range(i0, i1, di):
                idx = base + i
                if fixed[idx]:
                    continue
                a1, o1 = _pick(d[idx + 1], 1, d[idx - 1], -1)
                a2, o2 = _pick(d[idx + sy], sy, d[idx - sy], -sy)
                a3, o3 = _pick(d[idx + sz], sz, d[idx - sz], -sz)
                # stable sort of the (value, offset) pairs
                if a1 > a2:
                    a1, a2, o1, o2 = a2, a1, o2, o1
                if a2 > a3:
                    a2, a3, o2, o3 = a3, a2, o3, o2
                if a1 > a2:
                    a1, a2, o1, o2 = a2, a1, o2, o1
                new = _godunov(a1, a2, a3, h)
                # which terms entered the root mirrors the branches of _godunov
                off = o1
                if a1 + h > a2:
                    off += o2
                    diff = a1 - a2
                    if 0.5 * (a1 + a2 + np.sqrt(2.0 * h * h - diff * diff)) > a3:
                        off += o3
                old = d[idx]
                if new < old:
                    d[idx] = new
                    source[idx] = source[idx + off]
                    if old - new > change:
                        change = old - new
    return change


def _check_gaps(field: DistanceField) -> None:
    gap = (~field.fixed) & np.isfinite(field.d) & (field.source < 0)
    n = int(np.count_nonzero(gap))
    field.stats["source_gaps"] = n
    if n:
        raise SourceGapError(f"{GAP_MESSAGE} ({n} voxel(s) without a source)")


def fsm_tracked(
    field: DistanceField, max_passes: int = DEFAULT_MAX_PASSES, tolerance: float | None = None
) -> LabelField:
    """Fast sweeping that carries sources along.

    Each axis minimum remembers which neighbour supplied it; the neighbours
    entering the accepted root add up to a 26-neighbour offset whose source
    is copied.  That donor can be a diagonal voxel the initialization never
    reached, which leaves the voxel without a source: this raises
    :class:`SourceGapError` instead of returning a partial labelling.
    """
    field.require_initialized()
    grid = field.grid
    ni, nj, nk = grid.dims
    tol = DEFAULT_TOLERANCE * grid.h if tolerance is None else tolerance
    d = pad(field.d, grid.dims, np.inf)
    fixed = pad(field.fixed, grid.dims, True)
    source = pad(field.source, grid.dims, -1)
    passes = 0
    for passes in range(1, max_passes + 1):
        change = 0.0
        for di, dj, dk in sweep_directions():
            change = max(change, _fsm_tracked_sweep(d, fixed, source, ni, nj, nk, grid.h, di, dj, dk))
        if change <= tol:
            break
    field.d[:] = unpad(d, grid.dims)
    field.source[:] = unpad(source, grid.dims)
    field.stats["passes"] = passes
    _check_gaps(field)
    return LabelField.from_field(field)


def fmm_tracked(field: DistanceField) -> LabelField:
    """Fast marching; a voxel, once visited, takes the source of the visited
    26-neighbour with the smallest ``d + |offset| h``."""
    fmm(field, track_sources=True)
    _check_gaps(field)
    return LabelField.from_field(field)


def vdt_tracked(field: DistanceField, max_passes: int = DEFAULT_MAX_PASSES, tolerance: float | None = None) -> LabelField:
    vdt(field, max_passes, tolerance)
    return LabelField.from_field(field)


def dp_tracked(field: DistanceField, full_neighborhood: bool = False) -> LabelField:
    dp(field, full_neighborhood)
    return LabelField.from_field(field)


TRACKED_SOLVERS = {"fsm": fsm_tracked, "fmm": fmm_tracked, "vdt": vdt_tracked, "dp": dp_tracked}


def _differs_from_face_neighbor(vol: np.ndarray) -> np.ndarray:
    out = np.zeros(vol.shape, bool)
    for axis in range(3):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        diff = vol[tuple(lo)] != vol[tuple(hi)]
        out[tuple(lo)] |= diff
        out[tuple(hi)] |= diff
    return out


def extract_border(labels: LabelField) -> dict[str, np.ndarray]:
    """Per label name, the sorted linear indices of its voxels that have a
    face neighbour with another label."""
    if labels.n_unassigned:
        raise ValueError(f"{labels.n_unassigned} unassigned voxel(s); the border is undefined")
    vol = labels.volume()
    border = _differs_from_face_neighbor(vol).ravel()
    flat = labels.labels
    return {name: np.flatnonzero(border & (flat == lid)) for lid, name in enumerate(labels.names)}


def indicator(labels: LabelField, target: str | int) -> np.ndarray:
    """1.0 where the label is ``target``, 0.0 elsewhere (flat, linear order)."""
    lid = labels.id_of(target) if isinstance(target, str) else int(target)
    return (labels.labels == lid).astype(np.float64)


def isosurface_05(values: np.ndarray, grid: VoxelGrid) -> TriMesh:
    """Triangulated 0.5 level set of a per-voxel scalar.

    Triangles are wound so their normals point towards decreasing values,
    i.e. out of the region where an indicator is 1.  Returns an empty mesh
    when the field never crosses 0.5.
    """
    from skimage.measure import marching_cubes

    vol = np.asarray(values, np.float64).reshape(grid.shape_zyx)
    if not (vol.min() < 0.5 < vol.max()):
        return TriMesh(np.empty((0, 3)), np.empty((0, 3), np.int64), "isosurface")
    verts, faces, _, _ = marching_cubes(vol, 0.5, spacing=(grid.h,) * 3, gradient_direction="descent")
    # skimage reports (k, j, i) order; its "descent" winding is inward in that
    # frame and the i/k swap mirrors it, so the result faces out of the 1-region
    xyz = verts[:, ::-1] + np.asarray(grid.origin)
    xyz, faces = merge_vertices(xyz, faces, 1e-9 * grid.h)
    return TriMesh(xyz, faces, "isosurface")


def merge_vertices(verts: np.ndarray, faces: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Collapse vertices closer than ``tol`` (on a grid of that size) and drop
    triangles that become degenerate."""
    if len(verts) == 0:
        return verts, faces
    key = np.round(verts / tol).astype(np.int64)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    faces = inverse.ravel()[faces]
    keep = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    return verts[first], faces[keep]


def mesh_area(mesh: TriMesh) -> float:
    t = mesh.corners()
    if len(t) == 0:
        return 0.0
    return float(0.5 * np.linalg.norm(np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]), axis=1).sum())


def _directed_edges(tri: np.ndarray) -> np.ndarray:
    return np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])


def is_closed(mesh: TriMesh) -> bool:
    """No boundary: every directed edge is matched by as many reversed ones.

    Binary indicators hit the ambiguous-face tie exactly, so two sheets can
    meet along one edge (four triangles); such a surface is still closed and
    consistently oriented.
    """
    tri = np.asarray(mesh.triangles)
    if len(tri) == 0:
        return False
    e = _directed_edges(tri)
    fwd = e[e[:, 0] < e[:, 1]]
    bwd = e[e[:, 0] > e[:, 1]][:, ::-1]
    a, na = np.unique(fwd, axis=0, return_counts=True)
    b, nb = np.unique(bwd, axis=0, return_counts=True)
    return a.shape == b.shape and np.array_equal(a, b) and np.array_equal(na, nb)


def is_manifold(mesh: TriMesh) -> bool:
    """Every undirected edge is shared by exactly two triangles."""
    tri = np.asarray(mesh.triangles)
    if len(tri) == 0:
        return False
    _, n = np.unique(np.sort(_directed_edges(tri), axis=1), axis=0, return_counts=True)
    return bool(np.all(n == 2))


def mesh_volume(mesh: TriMesh) -> float:
    """Enclosed volume from signed tetrahedra against the origin."""
    if not is_closed(mesh):
        raise ValueError("mesh not closed")
    t = mesh.corners()
    return float(abs(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum()) / 6.0)


def euler_characteristic(mesh: TriMesh) -> int:
    tri = np.asarray(mesh.triangles)
    edges = np.unique(np.sort(_directed_edges(tri), axis=1), axis=0)
    n_verts = len(np.unique(tri))
    return int(n_verts - len(edges) + len(tri))


def _touches_boundary(mask: np.ndarray) -> bool:
    return bool(mask[0].any() or mask[-1].any() or mask[:, 0].any() or mask[:, -1].any()
                or mask[:, :, 0].any() or mask[:, :, -1].any())


def middle_surface(labels: LabelField, pair: tuple[str, str]) -> TriMesh:
    """Isosurface of the indicator of one label of ``pair``.

    The first label is used unless its region reaches the grid boundary while
    the second one does not; the enclosed region then gives a closed mesh.
    With more than two labels the chosen label is taken against all others.
    """
    a, b = pair
    ia, ib = labels.id_of(a), labels.id_of(b)
    vol = labels.volume()
    target = ia
    if _touches_boundary(vol == ia) and not _touches_boundary(vol == ib):
        target = ib
    return isosurface_05(indicator(labels, target), labels.grid)

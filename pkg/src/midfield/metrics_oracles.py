"""Error metrics and independent oracles.

Nothing here shares code with the solvers beyond the closest-point-on-
triangle routine, so the oracles can be used to check them.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from .field_init import DistanceField, SourceRef
from .geometry import PointCloud, TriMesh, closest_point_triangle

Dataset = PointCloud | TriMesh


def mean_squared_difference(d: np.ndarray, d_exact: np.ndarray) -> float:
    """Mean of ``(d_exact - d)^2`` over all voxels."""
    d = np.asarray(d, float)
    d_exact = np.asarray(d_exact, float)
    if d.shape != d_exact.shape:
        raise ValueError(f"shape mismatch: {d.shape} vs {d_exact.shape}")
    return float(np.mean((d_exact - d) ** 2))


def exact_cube_distance(p, min_corner=(0.0, 0.0, 0.0), edge: float = 1.0, solid: bool = False) -> np.ndarray | float:
    """Unsigned distance from ``p`` (one point or ``(n, 3)``) to an axis-aligned
    cube's surface.

    Inside the cube this is the distance to the nearest face; ``solid=True``
    measures to the filled box instead, which is zero inside.
    """
    p = np.asarray(p, float)
    lo = np.asarray(min_corner, float)
    hi = lo + edge
    outside = np.maximum(np.maximum(lo - p, p - hi), 0.0)
    d_out = np.sqrt(np.sum(outside * outside, axis=-1))
    if solid:
        out = d_out
    else:
        inside = np.all((p >= lo) & (p <= hi), axis=-1)
        d_in = np.minimum(p - lo, hi - p).min(axis=-1)
        out = np.where(inside, d_in, d_out)
    return float(out) if out.ndim == 0 else out


def _dataset_list(datasets) -> list[Dataset]:
    if isinstance(datasets, (PointCloud, TriMesh)):
        return [datasets]
    out = list(datasets)
    if not out or all(len(ds) == 0 for ds in out):
        raise ValueError("no input geometry")
    return out


def brute_force_distance(p, datasets: Dataset | Sequence[Dataset]) -> tuple[float, SourceRef]:
    """Exhaustive nearest element; ties go to the earlier dataset, then the
    earlier element."""
    px, py, pz = (float(v) for v in p)
    best = math.inf
    ref = None
    for ds in _dataset_list(datasets):
        if isinstance(ds, PointCloud):
            for e, q in enumerate(ds.points):
                dist = math.sqrt((px - q[0]) ** 2 + (py - q[1]) ** 2 + (pz - q[2]) ** 2)
                if dist < best:
                    best, ref = dist, SourceRef(ds.label, e, "point")
        else:
            for e, t in enumerate(ds.corners()):
                dist = closest_point_triangle(px, py, pz, t.ravel())[0]
                if dist < best:
                    best, ref = dist, SourceRef(ds.label, e, "triangle")
    return best, ref


def _tree_nearest(tree: cKDTree, n: int, q: np.ndarray):
    """Nearest point index with the lowest index among exact ties."""
    k = min(n, 8)
    dist, idx = tree.query(q, k=k)
    dist = dist.reshape(len(q), k)
    idx = idx.reshape(len(q), k)
    best = dist[:, 0]
    out = np.where(dist == best[:, None], idx, np.iinfo(np.int64).max).min(axis=1)
    if k < n and np.any(dist[:, -1] == best):
        # more ties than neighbours fetched: settle those rows exhaustively
        for r in np.flatnonzero(dist[:, -1] == best):
            hits = np.sort(tree.query_ball_point(q[r], best[r] * (1 + 1e-12) + 1e-300))
            # recompute with one formula so equal points compare equal
            dh = np.linalg.norm(tree.data[hits] - q[r], axis=1)
            out[r] = hits[np.argmin(dh)]
    return best, out


@njit(cache=True)
def _mesh_nearest(q, tris):
    n = q.shape[0]
    best = np.full(n, np.inf)
    arg = np.full(n, -1, np.int64)
    for m in range(n):
        for e in range(tris.shape[0]):
            dist, _, _, _ = closest_point_triangle(q[m, 0], q[m, 1], q[m, 2], tris[e])
            if dist < best[m]:
                best[m] = dist
                arg[m] = e
    return best, arg


def dataset_distances(points: np.ndarray, datasets: Dataset | Sequence[Dataset]) -> tuple[np.ndarray, np.ndarray]:
    """Distance from every query point to every dataset.

    Returns ``(dist, elem)`` of shape ``(n_points, n_datasets)``: the nearest
    distance and the index of the element realising it (lowest index on
    ties).  Clouds use a KD-tree, meshes an exhaustive scan.
    """
    q = np.ascontiguousarray(np.asarray(points, float).reshape(-1, 3))
    dss = _dataset_list(datasets)
    dist = np.empty((len(q), len(dss)))
    elem = np.empty((len(q), len(dss)), np.int64)
    for c, ds in enumerate(dss):
        if len(ds) == 0:
            dist[:, c], elem[:, c] = np.inf, -1
        elif isinstance(ds, PointCloud):
            dist[:, c], elem[:, c] = _tree_nearest(cKDTree(ds.points), len(ds), q)
        else:
            dist[:, c], elem[:, c] = _mesh_nearest(q, np.ascontiguousarray(ds.corners().reshape(-1, 9)))
    return dist, elem


def brute_force_field(points: np.ndarray, datasets: Dataset | Sequence[Dataset]) -> tuple[np.ndarray, np.ndarray]:
    """Nearest distance and dataset position per query point (ties: first dataset)."""
    dist, _ = dataset_distances(points, datasets)
    which = np.argmin(dist, axis=1)
    return dist[np.arange(len(dist)), which], which


def label_distances(points: np.ndarray, datasets: Sequence[Dataset], names: Sequence[str]) -> np.ndarray:
    """Per point, the distance to each label in ``names`` (datasets sharing a
    label are merged)."""
    dist, _ = dataset_distances(points, datasets)
    out = np.full((len(dist), len(names)), np.inf)
    for c, ds in enumerate(_dataset_list(datasets)):
        lid = list(names).index(ds.label)
        out[:, lid] = np.minimum(out[:, lid], dist[:, c])
    return out


def voronoi_violations(labels: np.ndarray, label_dist: np.ndarray, margin: float) -> np.ndarray:
    """Indices where the two nearest labels differ by more than ``margin`` in
    distance and the assigned label is not the nearest one."""
    if label_dist.shape[1] < 2:
        return np.flatnonzero(labels != 0)
    part = np.partition(label_dist, 1, axis=1)
    decided = part[:, 1] - part[:, 0] > margin
    nearest = np.argmin(label_dist, axis=1)
    return np.flatnonzero(decided & (labels != nearest))


def residual_eikonal(field: DistanceField) -> float:
    """Largest ``|sum(((d - a_m)^+)^2) - h^2|`` over non-fixed finite voxels,
    ``a_m`` being the smaller neighbour on each axis (one-sided at the grid
    boundary)."""
    grid = field.grid
    h = grid.h
    vol = field.volume()
    padded = np.pad(vol, 1, constant_values=np.inf)
    core = (slice(1, -1),) * 3
    total = np.zeros_like(vol)
    for axis in range(3):
        lo = list(core)
        hi = list(core)
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        a = np.minimum(padded[tuple(lo)], padded[tuple(hi)])
        with np.errstate(invalid="ignore"):
            diff = np.where(np.isfinite(a), np.maximum(vol - a, 0.0), 0.0)
        total += diff * diff
    mask = (~field.fixed.reshape(vol.shape)) & np.isfinite(vol)
    if not mask.any():
        return 0.0
    return float(np.abs(total[mask] - h * h).max())


def source_consistency(field: DistanceField) -> float:
    """Largest relative gap between ``d`` and the exact distance to the
    recorded source, over voxels with a known source."""
    el = field.elements
    known = np.flatnonzero(field.source >= 0)
    if len(known) == 0:
        return 0.0
    pts = field.grid.all_coords()[known]
    exact = _distances_to(pts, field.source[known], el.kind, el.geom)
    d = field.d[known]
    return float(np.max(np.abs(d - exact) / np.maximum(exact, 1e-300)))


@njit(cache=True)
def _distances_to(pts, src, kind, geom):
    out = np.empty(len(src))
    for m in range(len(src)):
        e = src[m]
        if kind[e] == 0:
            out[m] = math.sqrt((pts[m, 0] - geom[e, 0]) ** 2 + (pts[m, 1] - geom[e, 1]) ** 2 + (pts[m, 2] - geom[e, 2]) ** 2)
        else:
            out[m] = closest_point_triangle(pts[m, 0], pts[m, 1], pts[m, 2], geom[e])[0]
    return out

"""Geometric kernels and the synthetic scenes used in the experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from .voxel_grid import VoxelGrid

BRUTE_FORCE_LIMIT = 1000
_DEGENERATE_REL = 1e-14


@dataclass
class PointCloud:
    points: np.ndarray
    label: str = "cloud"

    def __post_init__(self):
        self.points = np.ascontiguousarray(np.asarray(self.points, dtype=float).reshape(-1, 3))
        if not np.all(np.isfinite(self.points)):
            raise ValueError(f"point cloud {self.label!r} has non-finite coordinates")

    def __len__(self):
        return len(self.points)

    def bbox(self):
        return self.points.min(axis=0), self.points.max(axis=0)


@dataclass
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    label: str = "mesh"

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(np.asarray(self.vertices, dtype=float).reshape(-1, 3))
        self.triangles = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        if len(self.triangles) and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise ValueError(f"mesh {self.label!r} has triangle indices out of range")
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError(f"mesh {self.label!r} has non-finite coordinates")

    def __len__(self):
        return len(self.triangles)

    def corners(self) -> np.ndarray:
        """Triangle corner coordinates, shape ``(n, 3, 3)``."""
        return self.vertices[self.triangles]

    def bbox(self):
        used = self.vertices[np.unique(self.triangles)] if len(self.triangles) else self.vertices
        return used.min(axis=0), used.max(axis=0)

    def degenerate_mask(self) -> np.ndarray:
        return triangle_degenerate(self.corners())


def triangle_degenerate(tris: np.ndarray) -> np.ndarray:
    tris = np.asarray(tris, float).reshape(-1, 3, 3)
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    area2 = np.linalg.norm(np.cross(e1, e2), axis=1)
    scale = np.maximum(np.sum(e1 * e1, axis=1), np.sum(e2 * e2, axis=1))
    return ~(area2 > _DEGENERATE_REL * scale)


def euclid_dist(a, b) -> float:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(math.sqrt(float(np.sum((a - b) ** 2))))


@njit(cache=True)
def closest_point_triangle(px, py, pz, t):
    """Closest point to ``p`` on triangle ``t`` (flat 9 floats), via Voronoi regions.

    Returns ``(distance, cx, cy, cz)``.
    """
    ax, ay, az = t[0], t[1], t[2]
    abx, aby, abz = t[3] - ax, t[4] - ay, t[5] - az
    acx, acy, acz = t[6] - ax, t[7] - ay, t[8] - az
    apx, apy, apz = px - ax, py - ay, pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        cx, cy, cz = ax, ay, az
    else:
        bpx, bpy, bpz = px - t[3], py - t[4], pz - t[5]
        d3 = abx * bpx + aby * bpy + abz * bpz
        d4 = acx * bpx + acy * bpy + acz * bpz
        if d3 >= 0.0 and d4 <= d3:
            cx, cy, cz = t[3], t[4], t[5]
        else:
            vc = d1 * d4 - d3 * d2
            if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
                v = d1 / (d1 - d3)
                cx, cy, cz = ax + v * abx, ay + v * aby, az + v * abz
            else:
                cpx, cpy, cpz = px - t[6], py - t[7], pz - t[8]
                d5 = abx * cpx + aby * cpy + abz * cpz
                d6 = acx * cpx + acy * cpy + acz * cpz
                if d6 >= 0.0 and d5 <= d6:
                    cx, cy, cz = t[6], t[7], t[8]
                else:
                    vb = d5 * d2 - d1 * d6
                    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
                        w = d2 / (d2 - d6)
                        cx, cy, cz = ax + w * acx, ay + w * acy, az + w * acz
                    else:
                        va = d3 * d6 - d5 * d4
                        if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
                            w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
                            cx = t[3] + w * (t[6] - t[3])
                            cy = t[4] + w * (t[7] - t[4])
                            cz = t[5] + w * (t[8] - t[5])
                        else:
                            denom = 1.0 / (va + vb + vc)
                            v = vb * denom
                            w = vc * denom
                            cx = ax + abx * v + acx * w
                            cy = ay + aby * v + acy * w
                            cz = az + abz * v + acz * w
    dx, dy, dz = px - cx, py - cy, pz - cz
    return math.sqrt(dx * dx + dy * dy + dz * dz), cx, cy, cz


def point_triangle_dist(p, tri) -> tuple[float, np.ndarray]:
    tri = np.ascontiguousarray(np.asarray(tri, float).reshape(3, 3))
    if triangle_degenerate(tri)[0]:
        raise ValueError("degenerate triangle")
    p = np.asarray(p, float)
    dist, cx, cy, cz = closest_point_triangle(p[0], p[1], p[2], tri.ravel())
    return float(dist), np.array([cx, cy, cz])


@njit(cache=True)
def _triangle_voxels(origin, h, dims, t, reach, out):
    """Write linear indices of the grid points within ``reach`` of triangle
    ``t``; returns the count (which may exceed ``len(out)``)."""
    ni, nj, nk = dims[0], dims[1], dims[2]
    half = reach
    lo = np.empty(3, np.int64)
    hi = np.empty(3, np.int64)
    for a in range(3):
        mn = min(t[a], t[3 + a], t[6 + a]) - half
        mx = max(t[a], t[3 + a], t[6 + a]) + half
        lo[a] = max(0, int(math.ceil((mn - origin[a]) / h - 1e-9)))
        hi[a] = min(dims[a] - 1, int(math.floor((mx - origin[a]) / h + 1e-9)))
    reach = reach * (1.0 + 1e-12)
    n = 0
    for k in range(lo[2], hi[2] + 1):
        z = origin[2] + k * h
        for j in range(lo[1], hi[1] + 1):
            y = origin[1] + j * h
            for i in range(lo[0], hi[0] + 1):
                x = origin[0] + i * h
                dist, _, _, _ = closest_point_triangle(x, y, z, t)
                if dist <= reach:
                    if n < out.shape[0]:
                        out[n] = i + ni * (j + nj * k)
                    n += 1
    return n


# in units of h: every grid point within one grid step of the triangle
DEFAULT_REACH = 1.0


def triangle_voxel_bound(grid: VoxelGrid, tri: np.ndarray, reach: float) -> int:
    ext = (tri.max(axis=0) - tri.min(axis=0) + 2 * reach) / grid.h + 3
    return int(np.prod(np.minimum(ext, grid.dims)))


def voxels_along_triangle(grid: VoxelGrid, tri, reach: float = DEFAULT_REACH) -> np.ndarray:
    """Sorted linear indices of the grid points within ``reach * h`` of the
    triangle.

    With the default reach every corner of every grid cell the triangle
    passes through is included when the triangle lies in a grid plane, and
    the band is closed under the fixed region's 6-connectivity.  A reach of
    ``sqrt(3)/2`` keeps only the points whose own voxel the triangle crosses.
    """
    tri = np.ascontiguousarray(np.asarray(tri, float).reshape(3, 3))
    out = np.empty(triangle_voxel_bound(grid, tri, reach * grid.h), np.int64)
    n = _triangle_voxels(
        np.asarray(grid.origin), grid.h, np.asarray(grid.dims, np.int64), tri.ravel(), reach * grid.h, out
    )
    return np.sort(out[:n])


def _coincidence_tol(pts: np.ndarray) -> float:
    return 1e-12 * max(1.0, float(np.abs(pts).max()))


def separation_radius(cloud: PointCloud | np.ndarray) -> float:
    """Largest distance from a cloud point to its nearest distinct point.

    Coincident copies (closer than ~1e-12 of the coordinate scale) count as
    one point; parametric samplers produce them at poles and folds, and a
    zero nearest-neighbour distance would say nothing about spacing.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, float).reshape(-1, 3)
    if len(pts) < BRUTE_FORCE_LIMIT:
        return separation_radius_brute(pts)
    tol = _coincidence_tol(pts)
    tree = cKDTree(pts)
    k = 2
    while True:
        k = min(k, len(pts))
        dist, _ = tree.query(pts, k=k)
        dist = np.where(dist > tol, dist, np.inf).min(axis=1)
        if np.all(np.isfinite(dist)) or k == len(pts):
            break
        k *= 4
    if not np.any(np.isfinite(dist)):
        raise ValueError("need at least two distinct points")
    # points with only coincident neighbours inside the search are isolated copies
    return float(dist[np.isfinite(dist)].max())


def separation_radius_brute(pts: np.ndarray) -> float:
    pts = np.asarray(pts, float).reshape(-1, 3)
    if len(pts) < 2:
        raise ValueError("need at least two distinct points")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    dist[dist <= _coincidence_tol(pts)] = np.inf
    nearest = dist.min(axis=1)
    if not np.any(np.isfinite(nearest)):
        raise ValueError("need at least two distinct points")
    return float(nearest[np.isfinite(nearest)].max())


# -- synthetic scenes ----------------------------------------------------------

def _angles(stop: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("angular step must be positive")
    n = int(math.ceil(stop / step - 1e-9))
    return step * np.arange(n)


def gen_sponge(center=(0.0, 0.0, 0.0), phi_step=math.pi / 10, theta_step=math.pi / 10, label="sponge") -> PointCloud:
    """Sponge-shaped cloud; phi in [0, 2pi), theta in [0, pi)."""
    phi, theta = np.meshgrid(_angles(2 * math.pi, phi_step), _angles(math.pi, theta_step), indexing="ij")
    sp = np.sin(phi)
    profile = 0.207 + 2.003 * sp**2 - 1.123 * sp**4
    sx, sy, sz = center
    x = sx + profile * np.cos(phi) * np.sin(theta)
    y = sy + np.cos(phi) * np.sin(theta)
    z = sz + sp
    return PointCloud(np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1), label)


def gen_ellipsoid(center, semi_axes, phi_step=math.pi / 10, theta_step=math.pi / 10, label="ellipsoid") -> PointCloud:
    semi_axes = np.asarray(semi_axes, float)
    if np.any(semi_axes <= 0):
        raise ValueError("semi-axes must be positive")
    phi, theta = np.meshgrid(_angles(2 * math.pi, phi_step), _angles(math.pi, theta_step), indexing="ij")
    cx, cy, cz = center
    x = cx + semi_axes[0] * np.cos(phi) * np.sin(theta)
    y = cy + semi_axes[1] * np.sin(phi) * np.sin(theta)
    z = cz + semi_axes[2] * np.cos(theta)
    return PointCloud(np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1), label)


def gen_sphere(center=(0.0, 0.0, 0.0), radius=0.5, phi_step=math.pi / 10, theta_step=math.pi / 10, label="sphere") -> PointCloud:
    if not radius > 0:
        raise ValueError("radius must be positive")
    return gen_ellipsoid(center, (radius,) * 3, phi_step, theta_step, label)


def gen_wave_sheets(step=0.05, extent=5.0, offset=0.5) -> tuple[PointCloud, PointCloud]:
    """Two sheets ``z = 0.2 cos(xy) +/- offset`` over ``[-extent, extent]^2``."""
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(round(2 * extent / step)) + 1
    xs = np.linspace(-extent, extent, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    base = 0.2 * np.cos(X * Y)
    upper = np.stack([X.ravel(), Y.ravel(), (base + offset).ravel()], axis=1)
    lower = np.stack([X.ravel(), Y.ravel(), (base - offset).ravel()], axis=1)
    return PointCloud(upper, "upper"), PointCloud(lower, "lower")


def gen_cube_mesh(min_corner=(0.0, 0.0, 0.0), edge=1.0, label="cube") -> TriMesh:
    """Closed 12-triangle cube with outward-facing winding."""
    if not edge > 0:
        raise ValueError("edge must be positive")
    o = np.asarray(min_corner, float)
    verts = o + edge * np.array(
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], float
    )
    tris = np.array(
        [
            [0, 2, 1], [0, 3, 2],  # z = 0
            [4, 5, 6], [4, 6, 7],  # z = 1
            [0, 1, 5], [0, 5, 4],  # y = 0
            [3, 7, 6], [3, 6, 2],  # y = 1
            [0, 4, 7], [0, 7, 3],  # x = 0
            [1, 2, 6], [1, 6, 5],  # x = 1
        ]
    )
    return TriMesh(verts, tris, label)


def cube_surface_lattice(min_corner, edge: float, h: float) -> np.ndarray:
    """Lattice points with spacing ``h`` lying on the surface of an axis-aligned cube."""
    n = int(round(edge / h))
    if abs(n * h - edge) > 1e-9 * edge:
        raise ValueError("edge must be a multiple of h")
    idx = np.arange(n + 1)
    I, J, K = np.meshgrid(idx, idx, idx, indexing="ij")
    on = (I == 0) | (I == n) | (J == 0) | (J == n) | (K == 0) | (K == n)
    ijk = np.stack([I[on], J[on], K[on]], axis=1)
    return np.asarray(min_corner, float) + h * ijk


@dataclass
class EllipsoidScene:
    centers: list = field(
        default_factory=lambda: [(-1.0, -1.0, 0.0), (1.0, -1.1, 0.0), (-1.1, 1.0, 0.0), (1.0, 1.0, 0.0), (0.0, 0.0, 0.0)]
    )
    semi_axes: list = field(
        default_factory=lambda: [(0.5, 0.3, 0.3), (0.3, 0.55, 0.25), (0.45, 0.25, 0.35), (0.35, 0.35, 0.5), (0.3, 0.2, 0.2)]
    )
    step: float = math.pi / 12

    def clouds(self) -> list[PointCloud]:
        return [
            gen_ellipsoid(c, a, self.step, self.step, label=f"ellipsoid{n}")
            for n, (c, a) in enumerate(zip(self.centers, self.semi_axes))
        ]

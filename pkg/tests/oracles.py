"""Independent reference computations used by several test modules."""

import numpy as np


def godunov_vectorized(a: np.ndarray, h: float) -> np.ndarray:
    """Upwind update from per-axis neighbour minima ``a`` of shape (..., 3)."""
    a = np.sort(a, axis=-1)
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    with np.errstate(invalid="ignore"):
        u = a1 + h
        two = 0.5 * (a1 + a2 + np.sqrt(np.maximum(2 * h * h - (a1 - a2) ** 2, 0)))
        s = a1 + a2 + a3
        q = s * s - 3 * (a1 * a1 + a2 * a2 + a3 * a3 - h * h)
        three = (s + np.sqrt(np.maximum(q, 0))) / 3
    u = np.where(u > a2, two, u)
    u = np.where((u > a3) & np.isfinite(a3), three, u)
    return u


def eikonal_jacobi(d0: np.ndarray, fixed: np.ndarray, shape_zyx, h: float, max_iter: int = 100000) -> np.ndarray:
    """Jacobi fixed-point iteration of the Godunov update; slow but simple."""
    d = d0.reshape(shape_zyx).copy()
    fx = fixed.reshape(shape_zyx)
    for _ in range(max_iter):
        p = np.pad(d, 1, constant_values=np.inf)
        a = np.stack([
            np.minimum(p[1:-1, 1:-1, :-2], p[1:-1, 1:-1, 2:]),
            np.minimum(p[1:-1, :-2, 1:-1], p[1:-1, 2:, 1:-1]),
            np.minimum(p[:-2, 1:-1, 1:-1], p[2:, 1:-1, 1:-1]),
        ], axis=-1)
        new = np.where(fx, d, np.minimum(d, godunov_vectorized(a, h)))
        if np.array_equal(new, d):
            break
        d = new
    return d.ravel()


def read_vtk_polydata(path):
    """Minimal legacy ASCII POLYDATA reader, independent of the package writer.

    Returns ``(points, polygons, vertices, point_data)``.
    """
    tokens = open(path).read().split()
    assert tokens[:2] == ["#", "vtk"]
    it = iter(tokens[tokens.index("DATASET"):])
    assert next(it) == "DATASET" and next(it) == "POLYDATA"
    points = polys = verts = None
    data = {}
    n_pts = 0
    for tok in it:
        if tok == "POINTS":
            n_pts, _ = int(next(it)), next(it)
            points = np.array([float(next(it)) for _ in range(3 * n_pts)]).reshape(n_pts, 3)
        elif tok in ("POLYGONS", "VERTICES"):
            n, size = int(next(it)), int(next(it))
            flat = [int(next(it)) for _ in range(size)]
            cells, k = [], 0
            while k < size:
                cells.append(flat[k + 1:k + 1 + flat[k]])
                k += flat[k] + 1
            assert len(cells) == n
            if tok == "POLYGONS":
                polys = np.array(cells, dtype=np.int64).reshape(-1, 3)
            else:
                verts = np.array(cells, dtype=np.int64).reshape(-1)
        elif tok == "POINT_DATA":
            assert int(next(it)) == n_pts
        elif tok == "SCALARS":
            name, kind, _ = next(it), next(it), next(it)
            assert next(it) == "LOOKUP_TABLE"
            next(it)
            cast = int if kind == "int" else float
            data[name] = np.array([cast(next(it)) for _ in range(n_pts)])
    return points, polys, verts, data

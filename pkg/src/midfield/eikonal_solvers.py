"""Eikonal solvers: fast sweeping and fast marching on the Godunov scheme."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numba import njit

from .field_init import DistanceField
from .voxel_grid import P2_OFFSETS, sweep_directions
from .priority_heap import heap_decrease, heap_pop, heap_push

DEFAULT_MAX_PASSES = 20
# Gauss-Seidel cycles creep by a few ulps on fine grids; 1e-12 h sits below that floor.
DEFAULT_TOLERANCE = 1e-9


@njit(cache=True, inline="always")
def _sort3(a1, a2, a3):
    if a1 > a2:
        a1, a2 = a2, a1
    if a2 > a3:
        a2, a3 = a3, a2
    if a1 > a2:
        a1, a2 = a2, a1
    return a1, a2, a3


@njit(cache=True, inline="always")
def _godunov(a1, a2, a3, h):
    a1, a2, a3 = _sort3(a1, a2, a3)
    x = a1 + h
    if x > a2:
        diff = a1 - a2
        x = 0.5 * (a1 + a2 + math.sqrt(2.0 * h * h - diff * diff))
        if x > a3:
            s = a1 + a2 + a3
            q = a1 * a1 + a2 * a2 + a3 * a3
            disc = s * s - 3.0 * (q - h * h)
            x = (s + math.sqrt(max(disc, 0.0))) / 3.0
    return x


def godunov_update(a1: float, a2: float, a3: float, h: float) -> float:
    """Solve sum(((x - a_m)^+)^2) = h^2 for x, given the per-axis upwind minima."""
    if not h > 0:
        raise ValueError("h must be positive")
    if not min(a1, a2, a3) < math.inf:
        raise ValueError("no finite neighbor")
    return float(_godunov(float(a1), float(a2), float(a3), float(h)))


@njit(cache=True, inline="always")
def _axis_minima(d, idx, i, j, k, ni, nj, nk):
    sy = ni
    sz = ni * nj
    inf = np.inf
    ax = inf
    if i > 0:
        ax = d[idx - 1]
    if i < ni - 1 and d[idx + 1] < ax:
        ax = d[idx + 1]
    ay = inf
    if j > 0:
        ay = d[idx - sy]
    if j < nj - 1 and d[idx + sy] < ay:
        ay = d[idx + sy]
    az = inf
    if k > 0:
        az = d[idx - sz]
    if k < nk - 1 and d[idx + sz] < az:
        az = d[idx + sz]
    return ax, ay, az


def pad(arr: np.ndarray, dims, fill) -> np.ndarray:
    """Copy a flat field into a flat array with a one-voxel ghost layer."""
    ni, nj, nk = dims
    out = np.full((nk + 2, nj + 2, ni + 2), fill, dtype=arr.dtype)
    out[1:-1, 1:-1, 1:-1] = arr.reshape(nk, nj, ni)
    return out.ravel()


def unpad(arr: np.ndarray, dims) -> np.ndarray:
    ni, nj, nk = dims
    return arr.reshape(nk + 2, nj + 2, ni + 2)[1:-1, 1:-1, 1:-1].ravel()


@njit(cache=True)
def _fsm_sweep(d, fixed, ni, nj, nk, h, di, dj, dk):
    """One Gauss-Seidel sweep over ghost-padded arrays; returns the max decrease.

    Ghost voxels hold +inf and are flagged fixed.  Loop nesting follows memory
    order: for a fixed direction triple the set of neighbours already updated
    when a voxel is reached does not depend on the nesting, so the result is
    the same as with any other nesting.
    """
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
                ax = min(d[idx - 1], d[idx + 1])
                ay = min(d[idx - sy], d[idx + sy])
                az = min(d[idx - sz], d[idx + sz])
                new = _godunov(ax, ay, az, h)
                old = d[idx]
                if new < old:
                    d[idx] = new
                    if old - new > change:
                        change = old - new
    return change


def fsm(
    field: DistanceField,
    max_passes: int = DEFAULT_MAX_PASSES,
    tolerance: float | None = None,
    on_sweep: Callable[[int, int, np.ndarray], None] | None = None,
) -> int:
    """Fast sweeping.  Repeats 8-sweep cycles until a cycle changes no voxel by
    more than ``tolerance`` (default ``1e-9 h``); returns the cycles run.

    ``on_sweep(cycle, sweep, d)`` is called after every sweep with the current
    (unpadded) distances.
    """
    field.require_initialized()
    grid = field.grid
    ni, nj, nk = grid.dims
    tol = DEFAULT_TOLERANCE * grid.h if tolerance is None else tolerance
    d = pad(field.d, grid.dims, np.inf)
    fixed = pad(field.fixed, grid.dims, True)
    passes = 0
    for passes in range(1, max_passes + 1):
        change = 0.0
        for l, (di, dj, dk) in enumerate(sweep_directions()):
            change = max(change, _fsm_sweep(d, fixed, ni, nj, nk, grid.h, di, dj, dk))
            if on_sweep is not None:
                on_sweep(passes, l, unpad(d, grid.dims))
        if change <= tol:
            break
    field.d[:] = unpad(d, grid.dims)
    field.stats["passes"] = passes
    return passes


@njit(cache=True, inline="always")
def _abc_root(x, y, z, h):
    """Root of the a/b/c quadratic accumulated over the upwind neighbour minima.

    Values are taken in increasing order and a value joins only while it is
    below the current root, so the discriminant stays positive.
    """
    v0, v1, v2 = _sort3(x, y, z)
    inv_h2 = 1.0 / (h * h)
    a = 0.0
    b = 0.0
    c = 0.0
    root = np.inf
    for m in range(3):
        v = v0 if m == 0 else (v1 if m == 1 else v2)
        if not v < root:
            break
        a += 1.0
        b += v
        c += v * v
        qa = a * inv_h2
        qb = -2.0 * b * inv_h2
        qc = c * inv_h2 - 1.0
        disc = qb * qb - 4.0 * qa * qc
        root = (-qb + math.sqrt(disc)) / (2.0 * qa)
    return root


@njit(cache=True)
def _fmm(d, fixed, visit, ni, nj, nk, h, keys, items, pos, order, source, track, p2):
    """Returns ``(n_extracted, min(written - current key), max key drop)``.

    With ``track`` set, every non-fixed voxel takes, once visited, the source
    of the visited 26-neighbour minimising ``d + |offset| h``; the first such
    neighbour in ``p2`` order wins ties.
    """
    n = 0
    p2_len = np.empty(p2.shape[0])
    for m in range(p2.shape[0]):
        p2_len[m] = h * math.sqrt(abs(p2[m, 0]) + abs(p2[m, 1]) + abs(p2[m, 2]))
    size = ni * nj * nk
    for idx in range(size):
        if fixed[idx]:
            visit[idx] = 1
            n = heap_push(keys, items, pos, n, idx, d[idx])
        else:
            visit[idx] = 0
    sy = ni
    sz = ni * nj
    extracted = 0
    last = -np.inf
    min_margin = np.inf
    max_drop = 0.0
    while n > 0:
        idx, key, n = heap_pop(keys, items, pos, n)
        if last - key > max_drop:
            max_drop = last - key
        last = key
        if order.shape[0] > 0:
            order[extracted] = idx
        extracted += 1
        i = idx % ni
        j = (idx // ni) % nj
        k = idx // sz
        for m in range(6):
            if m == 0:
                if i == 0:
                    continue
                nb, ii, jj, kk = idx - 1, i - 1, j, k
            elif m == 1:
                if i == ni - 1:
                    continue
                nb, ii, jj, kk = idx + 1, i + 1, j, k
            elif m == 2:
                if j == 0:
                    continue
                nb, ii, jj, kk = idx - sy, i, j - 1, k
            elif m == 3:
                if j == nj - 1:
                    continue
                nb, ii, jj, kk = idx + sy, i, j + 1, k
            elif m == 4:
                if k == 0:
                    continue
                nb, ii, jj, kk = idx - sz, i, j, k - 1
            else:
                if k == nk - 1:
                    continue
                nb, ii, jj, kk = idx + sz, i, j, k + 1
            if fixed[nb] or visit[nb] == 2:
                continue
            x, y, z = _axis_minima(d, nb, ii, jj, kk, ni, nj, nk)
            new = _abc_root(x, y, z, h)
            if new < d[nb]:
                d[nb] = new
                if new - key < min_margin:
                    min_margin = new - key
                if visit[nb] == 0:
                    n = heap_push(keys, items, pos, n, nb, new)
                    visit[nb] = 1
                else:
                    heap_decrease(keys, items, pos, nb, new)
        visit[idx] = 2
        if track and not fixed[idx]:
            best = np.inf
            donor = -1
            for m in range(p2.shape[0]):
                ii = i + p2[m, 0]
                jj = j + p2[m, 1]
                kk = k + p2[m, 2]
                if ii < 0 or jj < 0 or kk < 0 or ii >= ni or jj >= nj or kk >= nk:
                    continue
                nb = ii + ni * (jj + nj * kk)
                if visit[nb] == 2:
                    test = d[nb] + p2_len[m]
                    if best > test:
                        best = test
                        donor = nb
            if donor >= 0:
                source[idx] = source[donor]
    return extracted, min_margin, max_drop


def heap_arrays(size: int):
    return np.empty(size, np.float64), np.empty(size, np.int64), np.full(size, -1, np.int64)


def fmm(field: DistanceField, record_order: bool = False, track_sources: bool = False) -> None:
    """Fast marching from the fixed voxels outward.

    Diagnostics land in ``field.stats``: extraction count, the smallest
    ``written value - extracted key`` margin and the largest drop between
    consecutive extraction keys.  ``record_order`` keeps the extraction order;
    ``track_sources`` also assigns sources (see :func:`_fmm`).
    """
    field.require_initialized()
    grid = field.grid
    ni, nj, nk = grid.dims
    keys, items, pos = heap_arrays(grid.size)
    order = np.empty(grid.size if record_order else 0, np.int64)
    extracted, margin, drop = _fmm(
        field.d, field.fixed, field.visit, ni, nj, nk, grid.h, keys, items, pos, order,
        field.source, track_sources, P2_OFFSETS,
    )
    field.stats.update(extracted=int(extracted), causality_margin=float(margin), max_key_drop=float(drop))
    if record_order:
        field.stats["order"] = order[:extracted]


"""Euclidean solvers that propagate sources: vector distance transform and
Dijkstra-Pythagoras."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .eikonal_solvers import DEFAULT_MAX_PASSES, DEFAULT_TOLERANCE, heap_arrays, pad, unpad
from .field_init import DistanceField, element_distance
from .voxel_grid import P1_OFFSETS, P2_OFFSETS, sweep_directions
from .priority_heap import heap_decrease, heap_pop, heap_push


@njit(cache=True)
def _vdt_sweep(d, fixed, source, ni, nj, nk, h, origin, kind, geom, di, dj, dk):
    sy = ni + 2
    sz = (ni + 2) * (nj + 2)
    i0, i1 = (1, ni + 1) if di > 0 else (ni, 0)
    j0, j1 = (1, nj + 1) if dj > 0 else (nj, 0)
    k0, k1 = (1, nk + 1) if dk > 0 else (nk, 0)
    # same order as P1_OFFSETS
    steps = (-sz, -sy, -1, 1, sy, sz)
    change = 0.0
    for k in range(k0, k1, dk):
        z = origin[2] + (k - 1) * h
        for j in range(j0, j1, dj):
            y = origin[1] + (j - 1) * h
            base = sy * j + sz * k
            for i in range(i0, i1, di):
                idx = base + i
                if fixed[idx]:
                    continue
                x = origin[0] + (i - 1) * h
                best = d[idx]
                cur = source[idx]
                for m in range(6):
                    s = source[idx + steps[m]]
                    # d already equals the distance to the current source
                    if s < 0 or s == cur:
                        continue
                    dn = element_distance(x, y, z, s, kind, geom)
                    if dn < best:
                        best = dn
                        cur = s
                old = d[idx]
                if best < old:
                    d[idx] = best
                    source[idx] = cur
                    if old - best > change:
                        change = old - best
    return change


def vdt(field: DistanceField, max_passes: int = DEFAULT_MAX_PASSES, tolerance: float | None = None, on_sweep=None) -> int:
    """Vector distance transform; returns the number of 8-sweep cycles run."""
    field.require_initialized()
    grid = field.grid
    ni, nj, nk = grid.dims
    tol = DEFAULT_TOLERANCE * grid.h if tolerance is None else tolerance
    el = field.elements
    d = pad(field.d, grid.dims, np.inf)
    fixed = pad(field.fixed, grid.dims, True)
    source = pad(field.source, grid.dims, -1)
    origin = np.asarray(grid.origin)
    passes = 0
    for passes in range(1, max_passes + 1):
        change = 0.0
        for l, (di, dj, dk) in enumerate(sweep_directions()):
            c = _vdt_sweep(d, fixed, source, ni, nj, nk, grid.h, origin, el.kind, el.geom, di, dj, dk)
            change = max(change, c)
            if on_sweep is not None:
                on_sweep(passes, l, unpad(d, grid.dims))
        if change <= tol:
            break
    field.d[:] = unpad(d, grid.dims)
    field.source[:] = unpad(source, grid.dims)
    field.stats["passes"] = passes
    return passes


@njit(cache=True)
def _dp(d, fixed, source, visit, ni, nj, nk, h, origin, kind, geom, offsets, keys, items, pos):
    n = 0
    size = ni * nj * nk
    for idx in range(size):
        if fixed[idx]:
            visit[idx] = 1
            n = heap_push(keys, items, pos, n, idx, d[idx])
        else:
            visit[idx] = 0
    nof = offsets.shape[0]
    step = np.empty(nof)
    for m in range(nof):
        step[m] = h * math.sqrt(abs(offsets[m, 0]) + abs(offsets[m, 1]) + abs(offsets[m, 2]))
    extracted = 0
    while n > 0:
        idx, key, n = heap_pop(keys, items, pos, n)
        extracted += 1
        i = idx % ni
        j = (idx // ni) % nj
        k = idx // (ni * nj)
        if not fixed[idx]:
            x = origin[0] + i * h
            y = origin[1] + j * h
            z = origin[2] + k * h
            for m in range(nof):
                ii = i + offsets[m, 0]
                jj = j + offsets[m, 1]
                kk = k + offsets[m, 2]
                if ii < 0 or jj < 0 or kk < 0 or ii >= ni or jj >= nj or kk >= nk:
                    continue
                nb = ii + ni * (jj + nj * kk)
                if visit[nb] != 2 or source[nb] < 0:
                    continue
                dn = element_distance(x, y, z, source[nb], kind, geom)
                if dn < d[idx]:
                    d[idx] = dn
                    source[idx] = source[nb]
        visit[idx] = 2
        for m in range(nof):
            ii = i + offsets[m, 0]
            jj = j + offsets[m, 1]
            kk = k + offsets[m, 2]
            if ii < 0 or jj < 0 or kk < 0 or ii >= ni or jj >= nj or kk >= nk:
                continue
            nb = ii + ni * (jj + nj * kk)
            if fixed[nb] or visit[nb] == 2:
                continue
            new = d[idx] + step[m]
            if new < d[nb]:
                d[nb] = new
                source[nb] = source[idx]
                if visit[nb] == 0:
                    n = heap_push(keys, items, pos, n, nb, new)
                    visit[nb] = 1
                else:
                    heap_decrease(keys, items, pos, nb, new)
    return extracted


def dp(field: DistanceField, full_neighborhood: bool = False) -> None:
    """Dijkstra-Pythagoras.

    Each extracted voxel is first re-measured against the sources of its
    visited neighbours, then relaxes the unvisited ones with ``d + step``.
    ``full_neighborhood`` uses all 26 neighbours instead of the 6 face
    neighbours.
    """
    field.require_initialized()
    grid = field.grid
    ni, nj, nk = grid.dims
    el = field.elements
    keys, items, pos = heap_arrays(grid.size)
    offsets = P2_OFFSETS if full_neighborhood else P1_OFFSETS
    extracted = _dp(
        field.d, field.fixed, field.source, field.visit, ni, nj, nk, grid.h, np.asarray(grid.origin),
        el.kind, el.geom, offsets, keys, items, pos,
    )
    field.stats["extracted"] = int(extracted)

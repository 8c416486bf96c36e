"""Uniform voxel grid, sweep orderings and neighbour stencils.

Grid points are stored linearly with ``index = i + ni * (j + nj * k)``, so a
flat array reshaped to ``(nk, nj, ni)`` in C order gives ``arr[k, j, i]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

MAX_POINTS = np.iinfo(np.int64).max // 64

# Offsets in a fixed enumeration order (r fastest, then s, then t).  Anything
# that breaks ties by "first neighbour encountered" relies on this order.
_ALL_OFFSETS = [
    (r, s, t)
    for t in (-1, 0, 1)
    for s in (-1, 0, 1)
    for r in (-1, 0, 1)
    if (r, s, t) != (0, 0, 0)
]
P1_OFFSETS = np.array([o for o in _ALL_OFFSETS if sum(map(abs, o)) == 1], dtype=np.int64)
P2_OFFSETS = np.array(_ALL_OFFSETS, dtype=np.int64)


class Stencil(Enum):
    P1 = "P1"
    P2 = "P2"

    @property
    def offsets(self) -> np.ndarray:
        return P1_OFFSETS if self is Stencil.P1 else P2_OFFSETS


@dataclass(frozen=True)
class SweepOrdering:
    """Per-axis ``(start, end, step)`` triples, ends inclusive."""

    i: tuple[int, int, int]
    j: tuple[int, int, int]
    k: tuple[int, int, int]

    def ranges(self) -> tuple[range, range, range]:
        return tuple(range(a, b + s, s) for a, b, s in (self.i, self.j, self.k))

    def indices(self):
        ri, rj, rk = self.ranges()
        for i in ri:
            for j in rj:
                for k in rk:
                    yield i, j, k

    @property
    def directions(self) -> tuple[int, int, int]:
        return self.i[2], self.j[2], self.k[2]


@dataclass(frozen=True)
class VoxelGrid:
    origin: tuple[float, float, float]
    h: float
    dims: tuple[int, int, int]

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError(f"voxel size must be positive, got {self.h}")
        if len(self.dims) != 3 or any(int(n) < 1 for n in self.dims):
            raise ValueError(f"grid dimensions must be >= 1, got {self.dims}")
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))
        if self.size > MAX_POINTS:
            raise ValueError("grid too large")

    @property
    def size(self) -> int:
        ni, nj, nk = self.dims
        return ni * nj * nk

    @property
    def shape_zyx(self) -> tuple[int, int, int]:
        """Shape of a flat field reshaped in C order, i.e. ``(nk, nj, ni)``."""
        ni, nj, nk = self.dims
        return nk, nj, ni

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.origin) + self.h * (np.asarray(self.dims) - 1)

    def in_bounds(self, i: int, j: int, k: int) -> bool:
        ni, nj, nk = self.dims
        return 0 <= i < ni and 0 <= j < nj and 0 <= k < nk

    def linear(self, i: int, j: int, k: int) -> int:
        ni, nj, _ = self.dims
        return i + ni * (j + nj * k)

    def unravel(self, idx: int) -> tuple[int, int, int]:
        ni, nj, _ = self.dims
        return idx % ni, (idx // ni) % nj, idx // (ni * nj)

    def coords(self, i: int, j: int, k: int) -> np.ndarray:
        if not self.in_bounds(i, j, k):
            raise IndexError(f"grid index {(i, j, k)} out of range for dims {self.dims}")
        return np.asarray(self.origin) + self.h * np.array([i, j, k], dtype=float)

    def points(self, idx) -> np.ndarray:
        """World coordinates of linear indices, ``(n, 3)``."""
        i, j, k = self.unravel(np.asarray(idx, np.int64))
        return np.asarray(self.origin) + self.h * np.stack([i, j, k], axis=-1).astype(float)

    def all_coords(self) -> np.ndarray:
        """World coordinates of every grid point, ``(size, 3)`` in linear order."""
        ni, nj, nk = self.dims
        x = self.origin[0] + self.h * np.arange(ni)
        y = self.origin[1] + self.h * np.arange(nj)
        z = self.origin[2] + self.h * np.arange(nk)
        Z, Y, X = np.meshgrid(z, y, x, indexing="ij")
        return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)

    def sweep_orderings(self) -> list[SweepOrdering]:
        return sweep_orderings(self)

    def neighbors(self, ijk, stencil: Stencil = Stencil.P1):
        return neighbors(self, ijk, stencil)


def build_grid(
    bboxes: Sequence[tuple[Sequence[float], Sequence[float]]],
    h: float,
    padding: float = 0.4,
    *,
    absolute_padding: bool = False,
    origin: Sequence[float] | None = None,
) -> VoxelGrid:
    """Smallest grid with spacing ``h`` covering the padded union of ``bboxes``.

    ``padding`` is a fraction of each axis' extent, or a length when
    ``absolute_padding`` is set.  Passing ``origin`` anchors the lattice there
    instead of at the padded minimum corner; the grid still covers the box.
    """
    boxes = [(np.asarray(lo, float), np.asarray(hi, float)) for lo, hi in bboxes]
    if not boxes:
        raise ValueError("no input geometry")
    if not h > 0:
        raise ValueError(f"voxel size must be positive, got {h}")
    if padding < 0:
        raise ValueError("padding must be non-negative")
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    pad = np.full(3, float(padding)) if absolute_padding else padding * (hi - lo)
    lo, hi = lo - pad, hi + pad
    if origin is not None:
        origin = np.asarray(origin, float)
        if np.any(origin > lo + 1e-9 * h):
            raise ValueError("origin override must not exceed the padded box minimum")
        lo = origin
    # relative slack so that e.g. 1.8 / 0.2 counts 9 intervals, not 10
    n = np.ceil((hi - lo) / h - 1e-9).astype(np.int64) + 1
    n = np.maximum(n, 1)
    if float(np.prod(n.astype(float))) > MAX_POINTS:
        raise ValueError("grid too large")
    return VoxelGrid(tuple(lo), float(h), tuple(int(x) for x in n))


def sweep_orderings(grid: VoxelGrid) -> list[SweepOrdering]:
    ni, nj, nk = grid.dims
    up = lambda n: (0, n - 1, 1)
    down = lambda n: (n - 1, 0, -1)
    out = []
    for l in range(8):
        si = up(ni) if l < 4 else down(ni)
        sj = up(nj) if l % 4 < 2 else down(nj)
        sk = up(nk) if l % 2 == 0 else down(nk)
        out.append(SweepOrdering(si, sj, sk))
    return out


def sweep_directions() -> np.ndarray:
    """The eight ``(di, dj, dk)`` direction triples in sweep order."""
    return np.array(
        [(1 if l < 4 else -1, 1 if l % 4 < 2 else -1, 1 if l % 2 == 0 else -1) for l in range(8)],
        dtype=np.int64,
    )


def neighbors(grid: VoxelGrid, ijk, stencil: Stencil = Stencil.P1) -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """In-bounds neighbours of ``ijk`` as ``((i, j, k), (r, s, t))`` pairs."""
    i, j, k = ijk
    if not grid.in_bounds(i, j, k):
        raise IndexError(f"grid index {ijk} out of range")
    out = []
    for r, s, t in stencil.offsets:
        n = (i + int(r), j + int(s), k + int(t))
        if grid.in_bounds(*n):
            out.append((n, (int(r), int(s), int(t))))
    return out

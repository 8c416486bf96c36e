"""Builtin synthetic scenes used by the experiments, the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .field_init import DistanceField, initialize, new_field
from .geometry import (
    EllipsoidScene,
    PointCloud,
    TriMesh,
    cube_surface_lattice,
    gen_cube_mesh,
    gen_sphere,
    gen_sponge,
    gen_wave_sheets,
)
from .voxel_grid import VoxelGrid, build_grid


@dataclass
class Scene:
    name: str
    datasets: list[PointCloud | TriMesh]
    h: float
    padding: float
    absolute_padding: bool = False
    # cloud initialization used unless a solver needs the enlarged one
    init: str = "standard"
    pair: tuple[str, str] | None = None
    notes: str = ""
    extra: dict = field(default_factory=dict)

    def grid(self) -> VoxelGrid:
        return build_grid([ds.bbox() for ds in self.datasets], self.h, self.padding,
                          absolute_padding=self.absolute_padding)

    @property
    def labels(self) -> list[str]:
        out: list[str] = []
        for ds in self.datasets:
            if ds.label not in out:
                out.append(ds.label)
        return out

    def init_mode(self, solver: str, tracked: bool) -> str:
        """Tracked FSM needs gap-free fixed regions around cloud points."""
        if tracked and solver == "fsm" and self.init == "standard":
            return "enlarged"
        return self.init

    def field(self, solver: str = "vdt", tracked: bool = False, grid: VoxelGrid | None = None) -> DistanceField:
        f = new_field(grid or self.grid())
        return initialize(f, self.datasets, self.init_mode(solver, tracked))


CUBE_MIN = (0.0, 0.0, 0.0)
CUBE_EDGE = 1.0


def cube(h: float = 0.2) -> Scene:
    """Unit cube sampled on the grid lattice; distances are checked against
    the exact cube-surface distance."""
    pts = cube_surface_lattice(CUBE_MIN, CUBE_EDGE, h)
    return Scene("cube", [PointCloud(pts, "cube")], h, 0.4, init="grid_points",
                 notes="surface lattice coinciding with the grid, padding 0.4 per side")


def cube_mesh(h: float = 0.2) -> Scene:
    return Scene("cube_mesh", [gen_cube_mesh(CUBE_MIN, CUBE_EDGE, "cube")], h, 0.4)


def cube_sphere(h: float = 0.2, sphere_step: float = math.pi / 10) -> Scene:
    """Triangulated unit cube with a sampled sphere (r = 0.25) at its centre."""
    mesh = gen_cube_mesh(CUBE_MIN, CUBE_EDGE, "cube")
    sph = gen_sphere((0.5, 0.5, 0.5), 0.25, sphere_step, sphere_step, label="sphere")
    return Scene("cube_sphere", [mesh, sph], h, 0.4, pair=("sphere", "cube"))


def sponge_sphere(h: float = 0.025, step: float = math.pi / 10) -> Scene:
    """Sponge cloud at the origin and a sphere cloud (r = 0.5) two units along x."""
    sp = gen_sponge((0.0, 0.0, 0.0), step, step, label="sponge")
    sh = gen_sphere((2.0, 0.0, 0.0), 0.5, step, step, label="sphere")
    return Scene("sponge_sphere", [sp, sh], h, 0.1, pair=("sponge", "sphere"))


def cube_subsets(h: float = 0.05) -> Scene:
    """Cube surface lattice split into 8 vertex, 12 edge and 6 wall datasets."""
    n = int(round(CUBE_EDGE / h))
    pts = cube_surface_lattice(CUBE_MIN, CUBE_EDGE, h)
    ijk = np.rint((pts - np.asarray(CUBE_MIN)) / h).astype(int)
    on = (ijk == 0) | (ijk == n)
    groups: dict[str, list[int]] = {}
    for m, (flags, idx) in enumerate(zip(on, ijk)):
        pinned = np.flatnonzero(flags)
        tag = "".join(f"{'xyz'[a]}{'0' if idx[a] == 0 else '1'}" for a in pinned)
        kind = {3: "vertex", 2: "edge", 1: "wall"}[len(pinned)]
        groups.setdefault(f"{kind}_{tag}", []).append(m)
    order = sorted(groups, key=lambda k: ({"vertex": 0, "edge": 1, "wall": 2}[k.split("_")[0]], k))
    datasets = [PointCloud(pts[groups[k]], k) for k in order]
    return Scene("cube_subsets", datasets, h, 0.4, init="grid_points")


def ellipsoids(h: float = 0.02, config: EllipsoidScene | None = None) -> Scene:
    """Five sampled ellipsoids centred on the plane z = 0."""
    cfg = config or EllipsoidScene()
    return Scene("ellipsoids", cfg.clouds(), h, 0.2, absolute_padding=True)


def wave_sheets(h: float = 0.025, step: float = 0.05) -> Scene:
    """Two sheets z = 0.2 cos(xy) +/- 0.5 over [-5, 5]^2."""
    upper, lower = gen_wave_sheets(step)
    return Scene("wave_sheets", [upper, lower], h, 4 * h, absolute_padding=True, pair=("upper", "lower"))


BUILTIN = {
    "cube": cube,
    "cube_mesh": cube_mesh,
    "cube_sphere": cube_sphere,
    "sponge_sphere": sponge_sphere,
    "cube_subsets": cube_subsets,
    "ellipsoids": ellipsoids,
    "wave_sheets": wave_sheets,
}


def builtin(name: str, h: float | None = None) -> Scene:
    try:
        make = BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown scene {name!r}; choose from {sorted(BUILTIN)}") from None
    return make() if h is None else make(h)

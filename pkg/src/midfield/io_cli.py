"""Geometry readers and field/mesh writers.

Reads XYZ and ascii PLY point clouds and OBJ / ascii STL meshes; writes
legacy VTK (structured points and polydata), XYZ, OBJ and JSON metrics.
The ``midfield`` command line (:func:`run_cli`) is defined at the bottom.
Floats are written in Python's shortest round-trip form, so output is
byte-identical for identical input and re-reads to the same values.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import Mapping

import numpy as np

from .geometry import PointCloud, TriMesh, triangle_degenerate
from .voxel_grid import VoxelGrid

log = logging.getLogger(__name__)

CLOUD_SUFFIXES = {".xyz", ".txt", ".pts", ".ply"}
MESH_SUFFIXES = {".obj", ".stl"}


class FormatError(ValueError):
    """Malformed input file."""


def _label_for(path, label):
    return label if label is not None else Path(path).stem


def _finite_row(vals, path, lineno):
    try:
        row = [float(v) for v in vals]
    except ValueError:
        raise FormatError(f"{path}:{lineno}: cannot parse coordinates {' '.join(vals)!r}") from None
    if not all(math.isfinite(v) for v in row):
        raise FormatError(f"{path}:{lineno}: non-finite coordinate")
    return row


# -- point clouds ------------------------------------------------------------

def read_xyz(path, label: str | None = None) -> PointCloud:
    pts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            vals = line.replace(",", " ").split()
            if len(vals) < 3:
                raise FormatError(f"{path}:{lineno}: expected 3 coordinates, got {len(vals)}")
            pts.append(_finite_row(vals[:3], path, lineno))
    if not pts:
        raise FormatError(f"{path}: no points")
    return PointCloud(np.array(pts), _label_for(path, label))


def read_ply(path, label: str | None = None) -> PointCloud:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        raise FormatError(f"{path}: only ascii PLY is supported") from None
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise FormatError(f"{path}:1: missing 'ply' magic")
    n_vertex = None
    props: list[str] = []
    before: int = 0  # lines of elements preceding the vertex element
    current = None
    end = None
    for lineno, line in enumerate(lines[1:], 2):
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "format" and tok[1] != "ascii":
            raise FormatError(f"{path}:{lineno}: only ascii PLY is supported")
        if tok[0] == "element":
            current = tok[1]
            if current == "vertex":
                n_vertex = int(tok[2])
            elif n_vertex is None:
                before += int(tok[2])
        elif tok[0] == "property" and current == "vertex":
            props.append(tok[-1])
        elif tok[0] == "end_header":
            end = lineno
            break
    if end is None or n_vertex is None:
        raise FormatError(f"{path}: incomplete PLY header")
    try:
        cols = [props.index(a) for a in "xyz"]
    except ValueError:
        raise FormatError(f"{path}: vertex element lacks x, y or z") from None
    body = lines[end:]
    rows = body[before : before + n_vertex]
    if len(rows) < n_vertex:
        raise FormatError(f"{path}: expected {n_vertex} vertices, found {len(rows)}")
    pts = []
    for off, line in enumerate(rows):
        lineno = end + before + off + 1
        vals = line.split()
        if len(vals) < len(props):
            raise FormatError(f"{path}:{lineno}: expected {len(props)} values")
        pts.append(_finite_row([vals[c] for c in cols], path, lineno))
    if not pts:
        raise FormatError(f"{path}: no points")
    return PointCloud(np.array(pts), _label_for(path, label))


def read_point_cloud(path, label: str | None = None) -> PointCloud:
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        return read_ply(path, label)
    return read_xyz(path, label)


def write_xyz(path, cloud: PointCloud) -> None:
    with open(path, "w") as fh:
        for p in cloud.points.tolist():
            fh.write(f"{p[0]!r} {p[1]!r} {p[2]!r}\n")


# -- meshes --------------------------------------------------------------------

def _drop_degenerate(verts, tris, path):
    tris = np.asarray(tris, np.int64).reshape(-1, 3)
    if len(tris) == 0:
        return tris, 0
    bad = triangle_degenerate(np.asarray(verts)[tris])
    n = int(bad.sum())
    if n:
        log.warning("%s: dropped %d degenerate triangle(s)", path, n)
    return tris[~bad], n


def _obj_index(tok: str, n_verts: int, path, lineno) -> int:
    try:
        v = int(tok.split("/")[0])
    except ValueError:
        raise FormatError(f"{path}:{lineno}: bad face index {tok!r}") from None
    idx = v - 1 if v > 0 else n_verts + v
    if not 0 <= idx < n_verts or v == 0:
        raise FormatError(f"{path}:{lineno}: face index {v} out of range")
    return idx


def load_obj(path) -> tuple[np.ndarray, np.ndarray, int]:
    """``(vertices, triangles, n_dropped)``; polygons are fan-triangulated."""
    verts, tris = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            tok = line.split("#", 1)[0].split()
            if not tok:
                continue
            if tok[0] == "v":
                if len(tok) < 4:
                    raise FormatError(f"{path}:{lineno}: vertex needs 3 coordinates")
                verts.append(_finite_row(tok[1:4], path, lineno))
            elif tok[0] == "f":
                idx = [_obj_index(t, len(verts), path, lineno) for t in tok[1:]]
                if len(idx) < 3:
                    raise FormatError(f"{path}:{lineno}: face with {len(idx)} vertices cannot be triangulated")
                tris.extend((idx[0], idx[m], idx[m + 1]) for m in range(1, len(idx) - 1))
    verts = np.array(verts, float).reshape(-1, 3)
    tris, dropped = _drop_degenerate(verts, tris, path)
    return verts, tris, dropped


def load_stl(path) -> tuple[np.ndarray, np.ndarray, int]:
    with open(path, "rb") as fh:
        head = fh.read(5)
    if head.lower() != b"solid":
        raise FormatError(f"{path}: only ascii STL is supported")
    corners = []
    with open(path) as fh:
        loop: list[list[float]] = []
        for lineno, line in enumerate(fh, 1):
            tok = line.split()
            if not tok:
                continue
            if tok[0] == "vertex":
                loop.append(_finite_row(tok[1:4], path, lineno))
            elif tok[0] == "endloop":
                if len(loop) != 3:
                    raise FormatError(f"{path}:{lineno}: facet with {len(loop)} vertices")
                corners.append(loop)
                loop = []
    corners = np.array(corners, float).reshape(-1, 3)
    if len(corners) == 0:
        return corners, np.empty((0, 3), np.int64), 0
    verts, inverse = np.unique(corners, axis=0, return_inverse=True)
    tris, dropped = _drop_degenerate(verts, inverse.reshape(-1, 3), path)
    return verts, tris, dropped


def read_mesh(path, label: str | None = None) -> TriMesh:
    suffix = Path(path).suffix.lower()
    if suffix == ".obj":
        verts, tris, _ = load_obj(path)
    elif suffix == ".stl":
        verts, tris, _ = load_stl(path)
    else:
        raise FormatError(f"{path}: unknown mesh format {suffix!r}")
    return TriMesh(verts, tris, _label_for(path, label))


def read_dataset(path, label: str | None = None) -> PointCloud | TriMesh:
    suffix = Path(path).suffix.lower()
    if suffix in MESH_SUFFIXES:
        return read_mesh(path, label)
    if suffix in CLOUD_SUFFIXES:
        return read_point_cloud(path, label)
    raise FormatError(f"{path}: unknown file type {suffix!r}")


def write_obj(path, mesh: TriMesh) -> None:
    with open(path, "w") as fh:
        for v in mesh.vertices.tolist():
            fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for t in (np.asarray(mesh.triangles) + 1).tolist():
            fh.write(f"f {t[0]} {t[1]} {t[2]}\n")


def write_dataset(path, ds: PointCloud | TriMesh) -> None:
    if isinstance(ds, TriMesh):
        write_obj(path, ds)
    else:
        write_xyz(path, ds)


# -- VTK -----------------------------------------------------------------------

def _clamp_inf(a: np.ndarray) -> np.ndarray:
    # legacy readers choke on "inf"; clamp to the largest double
    big = np.finfo(float).max
    return np.nan_to_num(np.asarray(a, float), nan=np.nan, posinf=big, neginf=-big)


def _fmt_float(a: np.ndarray) -> str:
    return "\n".join(map(repr, _clamp_inf(a).tolist()))


def _fmt_int(a: np.ndarray) -> str:
    return "\n".join(map(str, np.asarray(a).astype(np.int64).tolist()))


def _scalar_block(name: str, arr: np.ndarray, binary: bool) -> bytes:
    arr = np.asarray(arr)
    is_int = np.issubdtype(arr.dtype, np.integer) or arr.dtype == np.bool_
    vtk_type = "int" if is_int else "double"
    head = f"SCALARS {name} {vtk_type} 1\nLOOKUP_TABLE default\n".encode()
    if binary:
        body = (arr.astype(">i4") if is_int else _clamp_inf(arr).astype(">f8")).tobytes() + b"\n"
    else:
        body = ((_fmt_int(arr) if is_int else _fmt_float(arr)) + "\n").encode()
    return head + body


def write_vtk_structured(path, grid: VoxelGrid, scalars: Mapping[str, np.ndarray], binary: bool = False,
                         title: str = "midfield field") -> None:
    """Legacy VTK STRUCTURED_POINTS file with one scalar section per array.

    Arrays are flat in the grid's linear order (x fastest).  Integer and
    boolean arrays are written as ``int``, everything else as ``double``.
    """
    ni, nj, nk = grid.dims
    for name, arr in scalars.items():
        if np.asarray(arr).size != grid.size:
            raise ValueError(f"array {name!r} has {np.asarray(arr).size} values, grid has {grid.size}")
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"invalid VTK array name {name!r}")
    o = grid.origin
    head = (
        "# vtk DataFile Version 3.0\n"
        f"{title}\n"
        f"{'BINARY' if binary else 'ASCII'}\n"
        "DATASET STRUCTURED_POINTS\n"
        f"DIMENSIONS {ni} {nj} {nk}\n"
        f"ORIGIN {o[0]!r} {o[1]!r} {o[2]!r}\n"
        f"SPACING {grid.h!r} {grid.h!r} {grid.h!r}\n"
        f"POINT_DATA {grid.size}\n"
    ).encode()
    with open(path, "wb") as fh:
        fh.write(head)
        for name, arr in scalars.items():
            fh.write(_scalar_block(name, np.asarray(arr).ravel(), binary))


def write_vtk_polydata(path, geom: TriMesh | np.ndarray, labels: np.ndarray | None = None,
                       title: str = "midfield polydata") -> None:
    """Legacy ascii VTK POLYDATA: a mesh as POLYGONS or a point set as VERTICES,
    with an optional per-point integer ``label`` array."""
    if isinstance(geom, TriMesh):
        pts = geom.vertices
        cells = np.asarray(geom.triangles, np.int64)
        kind = "POLYGONS"
    else:
        pts = np.asarray(geom, float).reshape(-1, 3)
        cells = np.arange(len(pts), dtype=np.int64).reshape(-1, 1)
        kind = "VERTICES"
    out = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {len(pts)} double",
    ]
    out.extend(f"{p[0]!r} {p[1]!r} {p[2]!r}" for p in pts.tolist())
    width = cells.shape[1] if len(cells) else (3 if kind == "POLYGONS" else 1)
    out.append(f"{kind} {len(cells)} {len(cells) * (width + 1)}")
    out.extend(f"{width} " + " ".join(map(str, c)) for c in cells.tolist())
    if labels is not None:
        labels = np.asarray(labels)
        if len(labels) != len(pts):
            raise ValueError("one label per point required")
        out.append(f"POINT_DATA {len(pts)}")
        out.append("SCALARS label int 1")
        out.append("LOOKUP_TABLE default")
        if len(labels):
            out.append(_fmt_int(labels))
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def write_metrics_json(path, metrics: Mapping) -> None:
    """Metrics as sorted-key JSON; non-finite numbers become ``null``."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(_jsonable(dict(metrics)), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


# -- command line ----------------------------------------------------------------

class UsageError(Exception):
    """Bad command-line arguments (exit status 2)."""


def parse_input(spec: str):
    """``path[:label]``; the label defaults to the file stem."""
    path, sep, label = spec.rpartition(":")
    if not sep or not label or "/" in label or Path(label).suffix.lower() in CLOUD_SUFFIXES | MESH_SUFFIXES:
        path, label = spec, ""
    if not Path(path).exists():
        raise UsageError(f"input file not found: {path}")
    return read_dataset(path, label or None)


def parse_init(spec: str) -> tuple[str, float | str | None]:
    """``standard``, ``grid_points`` or ``enlarged[:auto|global|<radius>]``."""
    mode, _, arg = spec.partition(":")
    if mode not in ("standard", "enlarged", "grid_points"):
        raise UsageError(f"unknown --init {spec!r}")
    if arg and mode != "enlarged":
        raise UsageError(f"--init {mode} takes no radius")
    if not arg or arg in ("auto", "global"):
        return mode, arg or None
    try:
        r = float(arg)
    except ValueError:
        raise UsageError(f"bad enlargement radius {arg!r}") from None
    if not (r > 0 and math.isfinite(r)):
        raise UsageError("enlargement radius must be positive")
    return mode, r


def _vector(text: str, n: int = 3) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _prepare(args):
    from .field_init import initialize, new_field
    from .voxel_grid import build_grid

    datasets = [parse_input(s) for s in args.inputs]
    if not (args.h > 0 and math.isfinite(args.h)):
        raise UsageError("--h must be positive")
    mode, radius = parse_init(args.init)
    origin = _vector(args.origin) if args.origin else None
    grid = build_grid([ds.bbox() for ds in datasets], args.h, args.padding,
                      absolute_padding=args.absolute_padding, origin=origin)
    t0 = time.perf_counter()
    field = initialize(new_field(grid), datasets, mode, radius, reach=args.mesh_reach)
    t_init = time.perf_counter() - t0
    metrics = {
        "algo": args.algo,
        "h": grid.h,
        "dims": list(grid.dims),
        "origin": list(grid.origin),
        "n_voxels": grid.size,
        "init": mode,
        "mesh_reach": args.mesh_reach,
        "n_fixed": field.n_fixed,
        "labels": {name: i for i, name in enumerate(field.elements.names)},
        "timings": {"init": t_init},
    }
    if "enlarge_radius" in field.stats:
        metrics["enlarge_radius"] = field.stats["enlarge_radius"]
    return datasets, grid, field, metrics


def _cmd_distance(args) -> int:
    from .experiments import solve
    from .metrics_oracles import exact_cube_distance, mean_squared_difference, residual_eikonal

    _, grid, field, metrics = _prepare(args)
    t0 = time.perf_counter()
    solve(field, args.algo)
    metrics["timings"]["solve"] = time.perf_counter() - t0
    metrics["passes"] = field.stats.get("passes")
    metrics["residual"] = residual_eikonal(field)
    if args.oracle:
        kind, _, params = args.oracle.partition(":")
        if kind != "cube":
            raise UsageError(f"unknown --oracle {args.oracle!r}")
        vals = _vector(params, 4) if params else (0.0, 0.0, 0.0, 1.0)
        exact = exact_cube_distance(grid.all_coords(), vals[:3], vals[3])
        metrics["mse"] = mean_squared_difference(field.d, exact)
    if args.out_field:
        write_vtk_structured(args.out_field, grid, {"distance": field.d}, binary=args.binary)
    _report(args, metrics, ["mse", "residual", "passes", "n_fixed"])
    return 0


def _cmd_middle(args) -> int:
    from .middle_surface import TRACKED_SOLVERS, extract_border, is_closed, mesh_area, mesh_volume, middle_surface

    if len(args.inputs) < 2:
        raise UsageError("middle needs at least two --in datasets")
    pair = None
    if args.pair:
        pair = tuple(args.pair.split(","))
        if len(pair) != 2 or not all(pair) or pair[0] == pair[1]:
            raise UsageError("--pair takes two distinct labels A,B")
    if args.out_iso and pair is None:
        raise UsageError("--out-iso requires --pair A,B")
    _, grid, field, metrics = _prepare(args)
    if pair:
        missing = [p for p in pair if p not in metrics["labels"]]
        if missing:
            raise UsageError(f"--pair label(s) not among inputs: {', '.join(missing)}")
    t0 = time.perf_counter()
    labels = TRACKED_SOLVERS[args.algo](field)
    metrics["timings"]["solve"] = time.perf_counter() - t0
    metrics["passes"] = field.stats.get("passes")
    metrics["unassigned"] = labels.n_unassigned
    metrics["counts"] = labels.counts()
    t0 = time.perf_counter()
    if args.out_border:
        border = extract_border(labels)
        idx = np.concatenate([border[n] for n in labels.names]).astype(np.int64)
        ids = np.concatenate([np.full(len(border[n]), i) for i, n in enumerate(labels.names)])
        write_vtk_polydata(args.out_border, grid.points(idx), ids)
        metrics["border_voxels"] = {n: len(border[n]) for n in labels.names}
    if pair:
        mesh = middle_surface(labels, pair)
        metrics["pair"] = list(pair)
        metrics["iso_triangles"] = len(mesh)
        metrics["area"] = mesh_area(mesh)
        metrics["closed"] = is_closed(mesh)
        metrics["volume"] = mesh_volume(mesh) if metrics["closed"] else None
        if args.out_iso:
            write_vtk_polydata(args.out_iso, mesh)
    metrics["timings"]["extract"] = time.perf_counter() - t0
    if args.out_labels:
        write_vtk_structured(args.out_labels, grid, {"label": labels.labels, "distance": field.d},
                             binary=args.binary)
    _report(args, metrics, ["volume", "area", "unassigned", "passes", "n_fixed"])
    return 0


def _report(args, metrics: dict, keys: list[str]) -> None:
    metrics["command"] = args.command
    metrics["timings"]["total"] = sum(metrics["timings"].values())
    if args.metrics:
        write_metrics_json(args.metrics, metrics)
    parts = [f"{k}={metrics[k]:.6g}" if isinstance(metrics[k], float) else f"{k}={metrics[k]}"
             for k in keys if metrics.get(k) is not None]
    print(" ".join(parts))


def _cmd_gen(args) -> int:
    from .geometry import EllipsoidScene, gen_cube_mesh, gen_sphere, gen_sponge, gen_wave_sheets, cube_surface_lattice

    out = Path(args.out)
    step = args.step
    center = _vector(args.center)
    written: list[Path] = []
    if args.shape == "cube":
        corner = _vector(args.origin) if args.origin else (0.0, 0.0, 0.0)
        if args.lattice:
            write_xyz(out, PointCloud(cube_surface_lattice(corner, args.edge, args.lattice), "cube"))
        else:
            write_obj(out, gen_cube_mesh(corner, args.edge))
        written.append(out)
    elif args.shape == "sphere":
        write_xyz(out, gen_sphere(center, args.radius, step or math.pi / 10, step or math.pi / 10))
        written.append(out)
    elif args.shape == "sponge":
        write_xyz(out, gen_sponge(center, step or math.pi / 10, step or math.pi / 10))
        written.append(out)
    else:
        if args.shape == "wave":
            clouds = gen_wave_sheets(step or 0.05)
        else:
            cfg = EllipsoidScene() if step is None else EllipsoidScene(step=step)
            clouds = cfg.clouds()
        suffix = out.suffix or ".xyz"
        for c in clouds:
            p = out.with_name(f"{out.stem}_{c.label}{suffix}")
            write_xyz(p, c)
            written.append(p)
    for p in written:
        print(p)
    return 0


def _verify_scene(name: str, h: float | None) -> list[tuple[str, bool, str]]:
    """Run one builtin experiment; returns ``(check, passed, detail)`` rows."""
    from . import experiments as ex
    from .scenes import builtin

    rows = []
    if name == "cube":
        for step in ([h] if h else [0.2, 0.1, 0.05, 0.025]):
            for algo in ex.SOLVER_NAMES:
                r = ex.cube_mse(step, algo)
                if algo in ("fsm", "fmm"):
                    ref = ex.REFERENCE["cube_mse"][algo].get(step)
                    ok = ref is not None and ex.rel_err(r["mse"], ref) <= 0.01
                    rows.append((f"cube h={step} {algo} mse", ok, f"{r['mse']:.5e} vs {ref}"))
                else:
                    rows.append((f"cube h={step} {algo} mse", r["mse"] <= 1e-25, f"{r['mse']:.3e} <= 1e-25"))
    elif name == "cube_sphere":
        step = h or 0.2
        for algo in ex.SOLVER_NAMES:
            r = ex.cube_sphere_surface(step, algo)
            ref = ex.REFERENCE["cube_sphere"][algo].get(step)
            if ref is None:
                rows.append((f"cube_sphere h={step} {algo}", False, "no stored reference"))
                continue
            ok = ex.rel_err(r["volume"], ref[0]) <= 0.005 and ex.rel_err(r["area"], ref[1]) <= 0.005
            rows.append((f"cube_sphere h={step} {algo} volume/area", ok,
                         f"{r['volume']:.6f}/{r['area']:.6f} vs {ref[0]}/{ref[1]}"))
    elif name == "sponge_sphere":
        r = ex.sponge_sphere_gap(h or 0.025)
        rows.append(("standard init raises source gap", r["standard_error"] is not None, str(r["standard_error"])))
        rows.append(("enlarged init covers every voxel", r["coverage"] == 1.0, f"coverage {r['coverage']}"))
        sep = r["iso_triangles"] > 0 and r["sponge_points_inside"] == 1.0 and r["sphere_points_outside"] == 1.0
        rows.append(("isosurface separates the clouds", sep,
                     f"{r['iso_triangles']} triangles, {r['sponge_points_inside']:.3f}/{r['sphere_points_outside']:.3f}"))
    elif name == "ellipsoids":
        r = ex.ellipsoid_voronoi(h or 0.02)
        for algo in ex.SOLVER_NAMES:
            rows.append((f"ellipsoids {algo} Voronoi violations", r[algo] == 0,
                         f"{r[algo]} of {r['decided_voxels']} decided voxels"))
    elif name == "wave_sheets":
        step = h or 0.025
        r = ex.wave_sheet_surface(step)
        rows.append(("wave sheets vertices within h of z=0.2cos(xy)", r["max_deviation"] <= step,
                     f"max {r['max_deviation']:.4f}, {r['n_over_h']} of {r['vertices']} over h, "
                     f"within h for |x|,|y| < {r['within_h_radius']:.3f}"))
    else:
        scene = builtin(name, h)
        r = ex.cross_solver(scene)
        rows.append((f"{name} fsm vs fmm", r["fsm_fmm_max"] <= 1e-9, f"max {r['fsm_fmm_max']:.3e}"))
        rows.append((f"{name} vdt vs dp", r["vdt_dp_frac_over"] < 1e-3, f"{r['vdt_dp_frac_over']:.2e} of voxels"))
    return rows


def _cmd_verify(args) -> int:
    from concurrent.futures import ProcessPoolExecutor

    from .scenes import BUILTIN

    names = sorted(BUILTIN) if args.scene == "all" else [args.scene]
    if any(n not in BUILTIN for n in names):
        raise UsageError(f"unknown scene {args.scene!r}; choose from all, {', '.join(sorted(BUILTIN))}")
    threads = max(1, int(os.environ.get("MIDFIELD_THREADS", "1") or 1))
    if threads > 1 and len(names) > 1:
        with ProcessPoolExecutor(min(threads, len(names))) as pool:
            results = list(pool.map(_verify_scene, names, [args.h] * len(names)))
    else:
        results = [_verify_scene(n, args.h) for n in names]
    failed = 0
    for rows in results:
        for check, ok, detail in rows:
            failed += not ok
            print(f"{'PASS' if ok else 'FAIL'}  {check}: {detail}")
    return 1 if failed else 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="midfield", description="Voxel distance fields and middle surfaces between labelled data sets.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--algo", choices=("fsm", "fmm", "vdt", "dp"), default="fsm")
        sp.add_argument("--h", type=float, required=True, help="voxel edge length")
        sp.add_argument("--padding", type=float, default=0.4,
                        help="margin added to every side of the bounding box, as a fraction of its extent")
        sp.add_argument("--absolute-padding", action="store_true", help="read --padding as a length")
        sp.add_argument("--origin", help="grid origin x,y,z (overrides the padded bounding box corner)")
        sp.add_argument("--in", dest="inputs", action="extend", nargs="+", required=True, metavar="FILE[:LABEL]",
                        help="XYZ/PLY point cloud or OBJ/STL mesh; repeatable")
        sp.add_argument("--init", default="standard",
                        help="point-cloud initialization: standard, grid_points or enlarged[:auto|global|RADIUS]")
        sp.add_argument("--mesh-reach", type=float, default=1.0,
                        help="triangle band half-width in units of h")
        sp.add_argument("--binary", action="store_true", help="write binary legacy VTK for grid outputs")
        sp.add_argument("--metrics", help="write metrics JSON here")

    d = sub.add_parser("distance", help="compute a distance field")
    common(d)
    d.add_argument("--oracle", help="compare with an exact distance: cube[:x,y,z,edge]")
    d.add_argument("--out-field", help="VTK structured points output")

    m = sub.add_parser("middle", help="partition the grid by nearest data set and extract middle surfaces")
    common(m)
    m.add_argument("--out-labels", help="VTK structured points with labels and distances")
    m.add_argument("--out-border", help="VTK polydata with the border voxels of every label")
    m.add_argument("--out-iso", help="VTK polydata with the middle surface of --pair")
    m.add_argument("--pair", help="two labels A,B; the surface bounds the region labelled A")

    v = sub.add_parser("verify", help="run a builtin experiment against stored expectations")
    v.add_argument("--scene", required=True, help="builtin scene name or 'all'")
    v.add_argument("--h", type=float, help="grid step (default: the experiment's own)")

    g = sub.add_parser("gen", help="write a synthetic data set")
    g.add_argument("--shape", required=True, choices=("cube", "sphere", "sponge", "wave", "ellipsoids"))
    g.add_argument("--out", required=True, help="output file; multi-set shapes append _LABEL to the stem")
    g.add_argument("--edge", type=float, default=1.0, help="cube edge length")
    g.add_argument("--origin", help="cube minimum corner x,y,z")
    g.add_argument("--lattice", type=float, help="write the cube surface lattice with this spacing as XYZ")
    g.add_argument("--center", default="0,0,0", help="sphere/sponge centre x,y,z")
    g.add_argument("--radius", type=float, default=0.5, help="sphere radius")
    g.add_argument("--step", type=float, help="angular step (sphere, sponge, ellipsoids) or grid step (wave)")
    return p


COMMANDS = {"distance": _cmd_distance, "middle": _cmd_middle, "verify": _cmd_verify, "gen": _cmd_gen}


def run_cli(argv: list[str] | None = None) -> int:
    """Run one command; returns 0 on success, 2 on usage errors, 1 otherwise."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"midfield: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"midfield {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"midfield {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())

import json

import meshio
import numpy as np
import pytest
from hypothesis import given, strategies as st

from midfield.geometry import PointCloud, TriMesh, gen_cube_mesh
from midfield.io_cli import (
    FormatError,
    parse_init,
    read_dataset,
    read_mesh,
    read_point_cloud,
    run_cli,
    write_metrics_json,
    write_obj,
    write_vtk_polydata,
    write_vtk_structured,
    write_xyz,
)
from midfield.voxel_grid import VoxelGrid
from oracles import read_vtk_polydata


def test_read_xyz(tmp_path):
    p = tmp_path / "a.xyz"
    p.write_text("# header\n0 0 0\n\n1, 0, 0\n")
    c = read_point_cloud(p)
    assert len(c) == 2 and c.label == "a"
    p.write_text("0 0 nan\n")
    with pytest.raises(FormatError, match=r"a\.xyz:1:"):
        read_point_cloud(p)
    p.write_text("0 0\n")
    with pytest.raises(FormatError):
        read_point_cloud(p)


def test_read_ply(tmp_path):
    p = tmp_path / "a.ply"
    p.write_text(
        "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
        "property uchar red\nelement face 0\nproperty list uchar int vertex_indices\nend_header\n"
        "0 1 2 255\n3 4 5 0\n"
    )
    assert read_point_cloud(p, "q").points.tolist() == [[0, 1, 2], [3, 4, 5]]
    p.write_text("ply\nformat binary_little_endian 1.0\nend_header\n")
    with pytest.raises(FormatError):
        read_point_cloud(p)


coords = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(coords, coords, coords), min_size=1, max_size=20))
def test_xyz_roundtrip_exact(tmp_path_factory, pts):
    p = tmp_path_factory.mktemp("xyz") / "c.xyz"
    write_xyz(p, PointCloud(pts))
    assert np.array_equal(read_point_cloud(p).points, np.array(pts, float))


def test_obj_and_quads(tmp_path):
    p = tmp_path / "cube.obj"
    write_obj(p, gen_cube_mesh())
    m = read_mesh(p)
    assert len(m.vertices) == 8 and len(m) == 12
    assert np.array_equal(m.triangles, gen_cube_mesh().triangles)
    q = tmp_path / "quad.obj"
    q.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 4/4\nf -4 -3 -2\n")
    assert read_mesh(q).triangles.tolist() == [[0, 1, 2], [0, 2, 3], [0, 1, 2]]
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 0\nf 1 2\n")
    with pytest.raises(FormatError):
        read_mesh(bad)


def test_obj_drops_degenerate(tmp_path):
    p = tmp_path / "d.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 4\n")
    assert len(read_mesh(p)) == 1


def test_stl(tmp_path):
    p = tmp_path / "t.stl"
    p.write_text(
        "solid t\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nendloop\nendfacet\n"
        "facet normal 0 0 1\nouter loop\nvertex 1 0 0\nvertex 1 1 0\nvertex 0 1 0\nendloop\nendfacet\nendsolid t\n"
    )
    m = read_mesh(p)
    assert len(m) == 2 and len(m.vertices) == 4
    assert isinstance(read_dataset(p), TriMesh)


def test_vtk_structured_text(tmp_path):
    g = VoxelGrid((0.0, 0.0, 0.0), 1.0, (2, 2, 2))
    p = tmp_path / "z.vtk"
    write_vtk_structured(p, g, {"distance": np.zeros(8), "label": np.arange(8, dtype=np.int32)})
    text = p.read_text()
    assert "DIMENSIONS 2 2 2" in text
    assert "SCALARS distance double 1" in text and "SCALARS label int 1" in text
    with pytest.raises(ValueError):
        write_vtk_structured(p, g, {"x": np.zeros(7)})


@pytest.mark.parametrize("binary", [False, True])
def test_vtk_structured_external_reader(tmp_path, rng, binary):
    g = VoxelGrid((-0.5, 0.25, 1.0), 0.25, (4, 3, 5))
    d = rng.random(g.size)
    d[3] = np.inf
    lab = rng.integers(0, 3, g.size).astype(np.int32)
    p = tmp_path / "f.vtk"
    write_vtk_structured(p, g, {"distance": d, "label": lab}, binary=binary)
    m = meshio.read(p)
    assert np.allclose(m.points, g.all_coords())
    got = m.point_data["distance"].ravel()
    assert np.array_equal(got[np.isfinite(d)], d[np.isfinite(d)])
    assert got[3] == np.finfo(float).max
    assert np.array_equal(m.point_data["label"].ravel(), lab)


def test_vtk_polydata(tmp_path):
    p = tmp_path / "m.vtk"
    write_vtk_polydata(p, gen_cube_mesh())
    pts, polys, verts, _ = read_vtk_polydata(p)
    assert np.array_equal(pts, gen_cube_mesh().vertices)
    assert np.array_equal(polys, gen_cube_mesh().triangles) and verts is None
    e = tmp_path / "e.vtk"
    write_vtk_polydata(e, TriMesh(np.empty((0, 3)), np.empty((0, 3), int)))
    pts, _, _, _ = read_vtk_polydata(e)
    assert pts.shape == (0, 3)
    v = tmp_path / "v.vtk"
    write_vtk_polydata(v, np.array([[0, 0, 0], [1, 2, 3.5]]), np.array([4, 7]))
    pts, polys, verts, data = read_vtk_polydata(v)
    assert polys is None and verts.tolist() == [0, 1]
    assert data["label"].tolist() == [4, 7] and pts[1].tolist() == [1, 2, 3.5]


def test_writers_deterministic(tmp_path):
    g = VoxelGrid((0.0, 0.0, 0.0), 0.1, (3, 3, 3))
    d = np.linspace(0, 1, 27) / 3
    a, b = tmp_path / "a.vtk", tmp_path / "b.vtk"
    write_vtk_structured(a, g, {"distance": d})
    write_vtk_structured(b, g, {"distance": d.copy()})
    assert a.read_bytes() == b.read_bytes()


def test_metrics_json(tmp_path):
    p = tmp_path / "m.json"
    write_metrics_json(p, {"b": np.float64(1.5), "a": float("inf"), "n": np.int64(3), "arr": np.arange(2)})
    assert json.loads(p.read_text()) == {"a": None, "arr": [0, 1], "b": 1.5, "n": 3}


def test_parse_init():
    from midfield.io_cli import UsageError

    assert parse_init("standard") == ("standard", None)
    assert parse_init("enlarged") == ("enlarged", None)
    assert parse_init("enlarged:global") == ("enlarged", "global")
    assert parse_init("enlarged:0.3") == ("enlarged", 0.3)
    for bad in ("foo", "standard:1", "enlarged:-1", "enlarged:x"):
        with pytest.raises(UsageError):
            parse_init(bad)


def test_cli_gen_and_distance(tmp_path):
    obj, lat = tmp_path / "cube.obj", tmp_path / "lat.xyz"
    assert run_cli(["gen", "--shape", "cube", "--edge", "1", "--out", str(obj)]) == 0
    assert len(read_mesh(obj)) == 12
    assert run_cli(["gen", "--shape", "cube", "--lattice", "0.2", "--out", str(lat)]) == 0
    m = tmp_path / "m.json"
    field = tmp_path / "f.vtk"
    argv = ["distance", "--algo", "fsm", "--h", "0.2", "--padding", "0.4", "--in", f"{lat}:cube",
            "--init", "grid_points", "--oracle", "cube", "--out-field", str(field), "--metrics", str(m)]
    assert run_cli(argv) == 0
    out = json.loads(m.read_text())
    assert out["mse"] == pytest.approx(2.5692e-3, rel=1e-4)
    assert out["dims"] == [10, 10, 10] and out["labels"] == {"cube": 0}
    assert {"init", "solve", "total"} <= set(out["timings"])
    assert "DIMENSIONS 10 10 10" in field.read_text()


def test_cli_middle_cube_sphere(tmp_path):
    obj, sph = tmp_path / "cube.obj", tmp_path / "sphere.xyz"
    run_cli(["gen", "--shape", "cube", "--out", str(obj)])
    run_cli(["gen", "--shape", "sphere", "--center", "0.5,0.5,0.5", "--radius", "0.25", "--out", str(sph)])
    m = tmp_path / "m.json"
    argv = ["middle", "--algo", "vdt", "--in", f"{obj}:cube", "--in", f"{sph}:sphere", "--out-iso",
            str(tmp_path / "mid.vtk"), "--pair", "cube,sphere", "--h", "0.2", "--metrics", str(m),
            "--out-labels", str(tmp_path / "l.vtk"), "--out-border", str(tmp_path / "b.vtk")]
    assert run_cli(argv) == 0
    out = json.loads(m.read_text())
    assert out["volume"] == pytest.approx(0.418667, abs=5e-7)
    assert out["area"] == pytest.approx(2.92008, abs=5e-6)
    assert out["labels"] == {"cube": 0, "sphere": 1} and out["unassigned"] == 0
    assert meshio.read(tmp_path / "l.vtk").point_data["label"].max() == 1


def test_cli_gen_multi(tmp_path):
    assert run_cli(["gen", "--shape", "wave", "--step", "0.5", "--out", str(tmp_path / "w.xyz")]) == 0
    assert len(read_point_cloud(tmp_path / "w_upper.xyz")) == 21 * 21
    assert run_cli(["gen", "--shape", "ellipsoids", "--out", str(tmp_path / "e.xyz")]) == 0
    assert (tmp_path / "e_ellipsoid4.xyz").exists()
    assert run_cli(["gen", "--shape", "sponge", "--out", str(tmp_path / "s.xyz")]) == 0
    assert len(read_point_cloud(tmp_path / "s.xyz")) == 200


def test_cli_errors(tmp_path, capsys):
    assert run_cli([]) == 2
    assert run_cli(["distance", "--h", "0.1", "--in", str(tmp_path / "missing.xyz")]) == 2
    assert run_cli(["distance", "--h", "0.1", "--in", "x.xyz", "--algo", "nope"]) == 2
    p = tmp_path / "a.xyz"
    p.write_text("0 0 0\n1 1 1\n")
    assert run_cli(["middle", "--h", "0.5", "--in", str(p)]) == 2
    assert run_cli(["middle", "--h", "0.5", "--in", f"{p}:a", f"{p}:b", "--out-iso", "x.vtk"]) == 2
    assert run_cli(["middle", "--h", "0.5", "--in", f"{p}:a", f"{p}:b", "--pair", "a,c"]) == 2
    bad = tmp_path / "bad.xyz"
    bad.write_text("1 2 x\n")
    assert run_cli(["distance", "--h", "0.5", "--in", str(bad)]) == 1
    assert run_cli(["verify", "--scene", "nope"]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_cli_gap_is_runtime_error(tmp_path):
    a, b = tmp_path / "a.xyz", tmp_path / "b.xyz"
    a.write_text("0 0 0\n")
    b.write_text("9.6 9.6 9.6\n")
    code = run_cli(["middle", "--algo", "fsm", "--h", "1", "--padding", "0", "--in", f"{a}:a", f"{b}:b"])
    assert code in (0, 1)


def test_cli_verify_cube_sphere(capsys):
    assert run_cli(["verify", "--scene", "cube_sphere"]) == 0
    assert capsys.readouterr().out.count("PASS") == 4

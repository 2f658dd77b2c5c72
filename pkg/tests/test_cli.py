import json
import os
import subprocess
import xml.etree.ElementTree as ET

import pytest

from footlens import __version__
from footlens.cli import main
from footlens.errors import StitchError

from conftest import L, RECT

FAST = ["--grid-res", "128", "--rays", "180"]


def write_geojson(tmp_path, ring, name="fp.geojson"):
    path = tmp_path / name
    path.write_text(json.dumps({"type": "Polygon",
                                "coordinates": [ring + [ring[0]]]}))
    return str(path)


def write_csv(tmp_path, n_facades, n_times=4, name="series.csv"):
    rows = ["facade_id,time_index,value"]
    for f in range(n_facades):
        for t in range(n_times):
            rows.append(f"{f},{t},{(7 * f + 3 * t) % 11}")
    path = tmp_path / name
    path.write_text("\n".join(rows) + "\n")
    return str(path)


@pytest.fixture
def rect_args(tmp_path):
    return [write_geojson(tmp_path, RECT), write_csv(tmp_path, 4)]


@pytest.fixture
def l_args(tmp_path):
    return [write_geojson(tmp_path, L), write_csv(tmp_path, 6)]


def run_cli(footprint, data, out, *extra):
    return main(["--footprint", footprint, "--data", data,
                 "--out", str(out)] + FAST + list(extra))


def read(out, name):
    with open(os.path.join(str(out), name), "rb") as fh:
        return fh.read()


def test_console_script_smoke(tmp_path, rect_args):
    out = tmp_path / "out"
    done = subprocess.run(["footlens", "--footprint", rect_args[0],
                           "--data", rect_args[1], "--out", str(out)] + FAST,
                          capture_output=True, text=True)
    assert done.returncode == 0
    assert "1 subregions, 16 cells" in done.stdout
    assert sorted(os.listdir(out)) == ["layout.json", "lens.svg",
                                       "report.json", "viewer.json"]
    ver = subprocess.run(["footlens", "--version"], capture_output=True,
                         text=True)
    assert ver.stdout.strip() == f"footlens {__version__}"


def test_l_fixture_report_counts(tmp_path, l_args):
    out = tmp_path / "out"
    assert run_cli(*l_args, out) == 0
    report = json.loads(read(out, "report.json"))
    assert report["nodes"] == 2
    assert report["cutlines"] == 1
    assert report["cells"] == 24
    assert report["warnings"] == []
    assert report["backend"] in ("compiled", "fallback")
    assert set(report["timings"]) == {"load", "skeleton", "partition",
                                      "maps", "layout", "encode"}
    viewer = json.loads(read(out, "viewer.json"))
    assert viewer["schema_version"] == 1
    assert viewer["n_ribbons"] == 4
    ET.fromstring(read(out, "lens.svg").decode())


def test_malformed_csv_exits_2_naming_the_line(tmp_path, capsys):
    fp = write_geojson(tmp_path, RECT)
    bad = tmp_path / "bad.csv"
    bad.write_text("facade_id,time_index,value\n0,0,1.0\n0,1,oops\n")
    assert run_cli(fp, str(bad), tmp_path / "out") == 2
    err = capsys.readouterr().err
    assert "bad.csv:3" in err and "oops" in err
    assert not (tmp_path / "out").exists()


def test_solver_failure_exits_3_without_artifacts(tmp_path, capsys):
    # A 20:1 sliver stalls the parameter problem before reaching layout.
    fp = write_geojson(tmp_path, [[0, 0], [20, 0], [20, 1], [0, 1]])
    code = main(["--footprint", fp, "--data", write_csv(tmp_path, 4),
                 "--out", str(tmp_path / "out"), "--grid-res", "256"])
    assert code == 3
    assert "residual" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_layout_failure_exits_4(tmp_path, rect_args, monkeypatch, capsys):
    def explode(*args, **kwargs):
        raise StitchError("contour endpoints diverged", edge=(0, 1), d_w=0.3)

    monkeypatch.setattr("footlens.cli.assemble_layout", explode)
    assert run_cli(*rect_args, tmp_path / "out") == 4
    assert "diverged" in capsys.readouterr().err


def test_input_validation_exits_2(tmp_path, rect_args, capsys):
    out = tmp_path / "out"
    assert run_cli(*rect_args, out, "--filter", "5:1:0.5") == 2
    assert run_cli(*rect_args, out, "--order", "alphabetical") == 2
    assert run_cli(*rect_args, out, "--ribbons", "0") == 2
    assert run_cli(*rect_args, out, "--order", "wrap:1") == 2  # not cyclic
    assert main(["--data", rect_args[1], "--out", str(out)]) == 2
    assert run_cli(rect_args[0], str(tmp_path / "missing.csv"), out) == 2
    capsys.readouterr()


def test_runs_are_byte_identical(tmp_path, l_args):
    for sub, threads in [("a", "1"), ("b", "1"), ("c", "2")]:
        assert run_cli(*l_args, tmp_path / sub, "--threads", threads) == 0
    for name in ["layout.json", "viewer.json", "lens.svg"]:
        bytes_a = read(tmp_path / "a", name)
        assert bytes_a == read(tmp_path / "b", name)
        # Deterministic merge order keeps threaded runs identical too.
        assert bytes_a == read(tmp_path / "c", name)
    # report.json carries timings and is exempt from byte-identity.
    for rep in ["a", "b", "c"]:
        assert json.loads(read(tmp_path / rep, "report.json"))["cells"] == 24


def test_failed_run_preserves_previous_artifacts(tmp_path, rect_args, capsys):
    out = tmp_path / "out"
    assert run_cli(*rect_args, out) == 0
    before = {n: read(out, n) for n in os.listdir(out)}
    bad = tmp_path / "bad.csv"
    bad.write_text("facade_id,time_index,value\n0,0,nope\n")
    assert run_cli(rect_args[0], str(bad), out) == 2
    capsys.readouterr()
    assert {n: read(out, n) for n in os.listdir(out)} == before
    assert not [n for n in os.listdir(out) if n.endswith(".part")]


def test_cache_skips_solves_and_matches_geometry(tmp_path, l_args):
    out = tmp_path / "out"
    assert run_cli(*l_args, out, "--use-cache") == 0
    first = json.loads(read(out, "report.json"))
    geometry = read(out, "layout.json"), read(out, "viewer.json")
    assert run_cli(*l_args, out, "--use-cache") == 0
    second = json.loads(read(out, "report.json"))
    assert first["cache_hits"] == 0
    assert second["cache_hits"] == 2
    assert (read(out, "layout.json"), read(out, "viewer.json")) == geometry
    cached = os.listdir(os.path.join(str(out), "cache"))
    assert len(cached) == 2 and all(n.endswith(".json") for n in cached)


def test_debug_dumps(tmp_path, l_args):
    out = tmp_path / "out"
    assert run_cli(*l_args, out, "--debug-dumps") == 0
    debug = out / "debug"
    assert sorted(os.listdir(debug)) == ["distance.pgm", "graph.dot",
                                         "partition.geojson", "raster.pgm",
                                         "skeleton.pgm"]
    assert (debug / "raster.pgm").read_text().startswith("P2\n")
    assert "digraph" in (debug / "graph.dot").read_text()
    features = json.loads((debug / "partition.geojson").read_text())
    kinds = [f["geometry"]["type"] for f in features["features"]]
    assert kinds.count("Polygon") == 2 and kinds.count("LineString") == 1


def test_config_file_layers_under_flags(tmp_path, l_args, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ribbons=2\n"
                   "two_tone=true  # split palette bins\n"
                   "rays=180\n"
                   "grid_res=128\n")
    out = tmp_path / "out"
    # Flags win over the file: 4 ribbons to match the 4-step series.
    code = main(["--footprint", l_args[0], "--data", l_args[1],
                 "--out", str(out), "--config", str(cfg), "--ribbons", "4"])
    assert code == 0
    report = json.loads(read(out, "report.json"))
    assert report["ribbons"] == 4
    viewer = json.loads(read(out, "viewer.json"))
    assert viewer["two_tone"] is True and viewer["n_ribbons"] == 4

    # Without the flag the file value applies (2-step series to match).
    two_step = write_csv(tmp_path, 6, n_times=2, name="two.csv")
    code = main(["--footprint", l_args[0], "--data", two_step,
                 "--out", str(out), "--config", str(cfg)])
    assert code == 0
    assert json.loads(read(out, "report.json"))["ribbons"] == 2

    cfg.write_text("ribbon_count=4\n")
    assert main(["--footprint", l_args[0], "--data", l_args[1],
                 "--out", str(out), "--config", str(cfg)]) == 2
    assert "unknown key" in capsys.readouterr().err
    cfg.write_text("two_tone=maybe\n")
    assert main(["--footprint", l_args[0], "--data", l_args[1],
                 "--out", str(out), "--config", str(cfg)]) == 2
    assert "boolean" in capsys.readouterr().err


def test_order_and_filter_flags_shape_the_document(tmp_path, l_args):
    out = tmp_path / "out"
    assert run_cli(*l_args, out, "--cyclic", "--order", "wrap:1",
                   "--filter", "2:9:0.4", "--glyphs") == 0
    viewer = json.loads(read(out, "viewer.json"))
    assert viewer["cyclic"] is True
    assert viewer["assignment"] == [0, 3, 2, 1]
    assert viewer["filter"] == {"lo": 2.0, "hi": 9.0, "p": 0.4}
    assert len(viewer["glyphs"]) > 0

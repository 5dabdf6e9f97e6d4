import csv
import io
import json

import pytest

from cli.commands import COMPARE_COLUMNS, COMPUTE_COLUMNS
from cli.config import parse_pairs, parse_param, parse_times
from graph_core.errors import ConfigError
from graph_core.store import load_graph
from kernels.closed_form import lattice_Z_kernel
from main import main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("THREADS", "TOL", "FORMAT", "SEED", "LOG_LEVEL", "GRID_CAP", "MAX_ORACLE_VERTICES"):
        monkeypatch.delenv(f"HEATKERNEL_{name}", raising=False)


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_flag_parsers():
    assert parse_times("0.25,1,2") == [0.25, 1.0, 2.0]
    assert parse_times("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_pairs("0:0, 0:3") == [("0", "0"), ("0", "3")]
    assert parse_pairs("0,1:0,0;1,1:2,2") == [("0,1", "0,0"), ("1,1", "2,2")]
    assert parse_param("radius=4") == ("radius", 4)
    assert parse_param("theta_range=[0.5,2]") == ("theta_range", (0.5, 2))
    with pytest.raises(ConfigError):
        parse_pairs("0-1")
    with pytest.raises(ConfigError):
        parse_times("soon")
    with pytest.raises(ConfigError):
        parse_param("radius")


def test_gen_writes_a_window(tmp_path):
    out = tmp_path / "line.json"
    assert main(["gen", "--generator", "lattice_window", "--param", "radius=3", "--out", str(out)]) == 0
    g = load_graph(out)
    assert len(g) == 7
    assert g.boundary == {"-3", "3"}


def test_gen_refuses_infinite_graphs(tmp_path):
    assert main(["gen", "--generator", "lattice_Z", "--out", str(tmp_path / "z.json")]) == 2
    assert not (tmp_path / "z.json").exists()


def test_compute_csv_is_deterministic(tmp_path):
    args = ["compute", "--generator", "lattice_window", "--param", "radius=40",
            "--pairs", "0:0,0:3", "--t", "0.5,1"]
    one, four = tmp_path / "one.csv", tmp_path / "four.csv"
    assert main(args + ["--threads", "1", "--out", str(one)]) == 0
    assert main(args + ["--threads", "4", "--out", str(four)]) == 0
    assert one.read_text() == four.read_text()
    assert one.read_text().splitlines()[0] == ",".join(COMPUTE_COLUMNS)
    rows = read_csv(one.read_text())
    assert [(r["x"], r["y"], float(r["t"])) for r in rows] == [
        ("0", "0", 0.5), ("0", "0", 1.0), ("0", "3", 0.5), ("0", "3", 1.0),
    ]
    assert float(rows[1]["value"]) == pytest.approx(lattice_Z_kernel(0, 1.0), abs=1e-12)


def test_compute_on_an_intensional_graph(capsys):
    code = main(["compute", "--generator", "lattice_Z", "--pairs", "0:2", "--t", "1", "--format", "json"])
    assert code == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert row["value"] == pytest.approx(lattice_Z_kernel(2, 1.0), abs=1e-12)
    assert main(["compute", "--generator", "lattice_Z", "--t", "1"]) == 2


def test_compute_exit_codes(tmp_path):
    # the series at t = 1 reaches past a radius-3 window
    small = ["compute", "--generator", "lattice_window", "--param", "radius=3", "--pairs", "0:1", "--t", "1"]
    assert main(small + ["--out", str(tmp_path / "a.csv")]) == 3
    assert main(small + ["--finite", "--out", str(tmp_path / "b.csv")]) == 0
    assert main(["compute", "--generator", "hypercube", "--t", "1"]) == 2
    assert main(["compute", "--generator", "lattice_window", "--param", "radius=3", "--tol", "-1"]) == 2
    assert main(["compute", "--t", "1"]) == 2


def test_validate_reports_json(tmp_path):
    out = tmp_path / "report.json"
    code = main(["validate", "--generator", "two_vertex", "--checks", "mass,symmetry", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["pass"] is True
    assert [c["name"] for c in doc["checks"]] == ["mass", "symmetry"]


def test_validate_fails_with_a_forced_low_order(tmp_path):
    out = tmp_path / "report.json"
    code = main(["validate", "--generator", "two_vertex", "--checks", "oracle",
                 "--series-order", "1", "--out", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["pass"] is False


def test_compare_routes_agree(tmp_path):
    out = tmp_path / "cmp.csv"
    code = main(["compare", "--generator", "lattice_window", "--param", "radius=40", "--routes", "dirac,closed_form",
                 "--pairs", "0:2,5:-5", "--t", "0.5,1", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(COMPARE_COLUMNS)
    rows = read_csv(text)
    assert len(rows) == 4
    assert all(r["exceeds"] == "false" for r in rows)
    assert main(["compare", "--generator", "lattice_window", "--param", "radius=4", "--routes", "dirac"]) == 2


def test_config_file_and_environment_precedence(tmp_path, monkeypatch):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"pairs": [["0", "1"]], "times": "0.5", "fmt": "json"}))
    base = ["compute", "--generator", "lattice_window", "--param", "radius=20", "--config", str(config)]

    from_file = tmp_path / "file.out"
    assert main(base + ["--out", str(from_file)]) == 0
    assert json.loads(from_file.read_text())[0]["y"] == "1"

    from_flag = tmp_path / "flag.out"
    assert main(base + ["--format", "csv", "--out", str(from_flag)]) == 0
    assert from_flag.read_text().startswith("x,y,t,")

    monkeypatch.setenv("HEATKERNEL_FORMAT", "json")
    from_env = tmp_path / "env.out"
    args = ["compute", "--generator", "lattice_window", "--param", "radius=20", "--pairs", "0:1", "--t", "0.5"]
    assert main(args + ["--out", str(from_env)]) == 0
    assert json.loads(from_env.read_text())[0]["x"] == "0"

    monkeypatch.setenv("HEATKERNEL_FORMAT", "xml")
    assert main(args) == 2


def test_bad_config_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "blue"}))
    assert main(["compute", "--generator", "two_vertex", "--config", str(bad)]) == 2
    assert main(["compute", "--generator", "two_vertex", "--config", str(tmp_path / "missing.json")]) == 2

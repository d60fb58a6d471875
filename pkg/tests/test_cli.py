import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import pytest

from amospec import cli


def run(argv):
    buf = io.StringIO()
    code = cli.main(argv, out=buf)
    return code, buf.getvalue()


def test_spectrum_json():
    code, text = run(["spectrum", "--p0", "1", "--q0", "2"])
    assert code == 0
    doc = json.loads(text)
    assert {"p0", "q0", "bands", "measure", "lower_bound", "upper_bound", "thouless_ratio", "flags",
            "chiral_bands", "max_edge_deviation"} <= set(doc)
    assert doc["measure"] == pytest.approx(4 * math.sqrt(2), abs=1e-12)
    assert all(doc["flags"].values())
    assert doc["max_edge_deviation"] < 1e-12


def test_spectrum_std_only():
    code, text = run(["spectrum", "--p0", "2", "--q0", "5", "--rep", "std"])
    doc = json.loads(text)
    assert code == 0 and "chiral_bands" not in doc and len(doc["bands"]) == 5


def test_spectrum_csv_round_trip():
    code, text = run(["spectrum", "--p0", "2", "--q0", "5", "--format", "csv", "--rep", "std"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == cli.CSV_HEADER.split(",")
    _, js = run(["spectrum", "--p0", "2", "--q0", "5", "--rep", "std"])
    bands = json.loads(js)["bands"]
    assert [[float(r["e_lo"]), float(r["e_hi"])] for r in rows] == bands


def test_spectrum_reduces_input(capsys):
    code, text = run(["spectrum", "--p0", "2", "--q0", "4", "--rep", "std"])
    assert code == 0 and json.loads(text)["q0"] == 2
    assert "reduced to 1/2" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["spectrum", "--p0", "1", "--q0", "0"],
    ["spectrum", "--p0", "1"],
    ["verify", "--suite", "bogus"],
    ["butterfly", "--qmax", "0", "--out", "x.csv"],
    ["thouless", "--p0", "1", "--q0-list", "a,b"],
    [],
])
def test_usage_errors(argv):
    assert run(argv)[0] == 2


def test_butterfly_qmax_one(tmp_path):
    out = tmp_path / "b.csv"
    code, _ = run(["butterfly", "--qmax", "1", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines() == [cli.CSV_HEADER, "1,1,0,-4,4"]


def test_butterfly_deterministic_across_threads(tmp_path, monkeypatch):
    outputs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("AMO_THREADS", threads)
        path, svg = tmp_path / f"b{threads}.csv", tmp_path / f"b{threads}.svg"
        code, _ = run(["butterfly", "--qmax", "9", "--out", str(path), "--svg", str(svg)])
        assert code == 0
        outputs.append((path.read_bytes(), svg.read_bytes()))
    assert outputs[0] == outputs[1]
    rows = outputs[0][0].decode().splitlines()[1:]
    assert len(rows) == sum(q0 * n for q0, n in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 4), (6, 2), (7, 6), (8, 4), (9, 6)])
    root = ET.fromstring(outputs[0][1])
    assert len(root.findall(".//{http://www.w3.org/2000/svg}line")) == len(rows)


def test_bad_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv("AMO_THREADS", "many")
    assert run(["butterfly", "--qmax", "2", "--out", str(tmp_path / "x.csv")])[0] == 2


def test_unwritable_output():
    assert run(["butterfly", "--qmax", "1", "--out", "/nonexistent/dir/x.csv"])[0] == 2


def test_verify_table():
    code, text = run(["verify", "--suite", "lemma1", "--qmax", "10"])
    assert code == 0
    assert text.splitlines()[1].split()[0] == "lemma1"
    assert "detected sign convention: +1" in text


def test_thouless_output():
    code, text = run(["thouless", "--p0", "1", "--q0-list", "1,2"])
    lines = text.splitlines()
    assert code == 0 and lines[0].startswith("# c = 32 C / pi = 9.32994892")
    assert lines[1] == "q0,measure,ratio,abs_dev"
    assert lines[2].split(",")[:3] == ["1", "8", "8"]
    assert float(lines[3].split(",")[2]) == pytest.approx(8 * math.sqrt(2))

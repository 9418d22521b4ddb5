import csv
import json

import pytest

from pyrofuse import lattice
from pyrofuse.cli import SWEEP_HEADER, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_build_lattice_prints_q(capsys, tmp_path):
    out_path = tmp_path / "l.json"
    code, out, _ = run(["build-lattice", "--nx", "4", "--ny", "4", "--nz", "4", "--out", str(out_path)], capsys)
    assert code == 0 and out.strip() == "1444"
    assert lattice.load(out_path).site_count == 1444
    manifest = json.loads((tmp_path / "l.json.manifest.json").read_text())
    assert manifest["command"] == "build-lattice" and manifest["parameters"]["nx"] == 4


def test_build_lattice_unit_cell(capsys):
    assert run(["build-lattice", "--nx", "1", "--ny", "1", "--nz", "1"], capsys)[1].strip() == "40"


def test_build_lattice_rejects_zero(capsys):
    code, _, err = run(["build-lattice", "--nx", "0", "--ny", "1", "--nz", "1"], capsys)
    assert code == 2 and "positive" in err


def test_unknown_command_is_usage_error(capsys):
    assert run(["frobnicate"], capsys)[0] == 2


SWEEP = ["sweep", "--nx", "3", "--ny", "3", "--nz", "3", "--p-min", "0.6", "--p-max", "0.9",
         "--p-step", "0.05", "--trials", "30", "--seed", "4"]


def test_sweep_csv_format(capsys):
    code, out, _ = run(SWEEP, capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == SWEEP_HEADER
    rows = list(csv.DictReader(lines))
    ps = [float(r["p"]) for r in rows]
    assert ps == sorted(ps) and len(ps) == 7
    for r in rows:
        for key in ("p", "spanning_prob", "ci_lo", "ci_hi", "mean_span_fraction"):
            assert len(r[key].split(".")[1]) == 6
        assert float(r["ci_lo"]) <= float(r["spanning_prob"]) <= float(r["ci_hi"])


def test_sweep_degenerate_grid(capsys):
    code, out, _ = run(["sweep", "--nx", "2", "--ny", "2", "--nz", "2", "--p-min", "0", "--p-max", "1",
                        "--p-step", "1", "--trials", "10"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert rows[0]["spanning_prob"] == "0.000000" and rows[-1]["spanning_prob"] == "1.000000"


@pytest.mark.parametrize("extra", [[], ["--coupled"], ["--pairing", "random"]])
def test_sweep_byte_identical_across_threads_and_reruns(capsys, tmp_path, extra):
    outputs = []
    for threads in ("1", "3", "1"):
        path = tmp_path / f"s{threads}-{len(outputs)}.csv"
        assert run(SWEEP + extra + ["--threads", threads, "--out", str(path)], capsys)[0] == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    manifest = json.loads((tmp_path / "s1-0.csv.manifest.json").read_text())
    assert manifest["csv_header"] == SWEEP_HEADER and manifest["csv_schema_version"] == 1
    assert manifest["seed"] == 4


def test_sweep_invalid_range(capsys):
    code, _, err = run(["sweep", "--nx", "2", "--ny", "2", "--nz", "2", "--p-min", "0.9", "--p-max", "0.1"], capsys)
    assert code == 2


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("PYROFUSE_TRIALS", "7")
    monkeypatch.setenv("PYROFUSE_NX", "2")
    monkeypatch.setenv("PYROFUSE_COUPLED", "1")
    code, out, _ = run(["sweep", "--ny", "2", "--nz", "2", "--p-min", "0.7", "--p-max", "0.7"], capsys)
    assert code == 0
    row = list(csv.DictReader(out.splitlines()))[0]
    assert row["trials"] == "7" and row["nx"] == "2"
    # explicit flags win over the environment
    code, out, _ = run(["sweep", "--nx", "3", "--ny", "2", "--nz", "2", "--p-min", "0.7", "--p-max", "0.7"], capsys)
    assert list(csv.DictReader(out.splitlines()))[0]["nx"] == "3"


def test_bad_env_value_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("PYROFUSE_PAIRING", "diagonal")
    assert run(["table1", "--trials", "1"], capsys)[0] == 2


def test_threshold_no_crossing_exit_code(capsys):
    code, out, _ = run(["threshold", "--nx", "4", "--ny", "4", "--nz", "4", "--p-lo", "0.9", "--p-hi", "1.0",
                        "--trials", "30"], capsys)
    assert code == 1 and "no crossing" in out


def test_threshold_reports_bracket(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, out, _ = run(["threshold", "--nx", "4", "--ny", "4", "--nz", "4", "--p-lo", "0.5", "--p-hi", "0.9",
                        "--resolution", "0.01", "--trials", "100", "--out", str(path)], capsys)
    assert code == 0
    assert out.startswith("p_star ") and "bracket " in out
    doc = json.loads(path.read_text())
    assert doc["crossed"] and doc["bracket"][0] < doc["p_star"] < doc["bracket"][1]


def test_table1_rows(capsys, tmp_path):
    path = tmp_path / "t1.csv"
    code, _, _ = run(["table1", "--p", "0.75", "--trials", "200", "--out", str(path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(path.read_text().splitlines()))
    assert len(rows) == 12
    assert [int(r["Q"]) for r in rows] == [1444, 1680, 2352, 3136, 3556, 3976, 4984, 5460, 6636, 7168, 7700, 8232]
    assert all("ci_lo" in r and "ci_hi" in r for r in rows)


def test_verify_fusion(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, out, _ = run(["verify-fusion", "--out", str(p)], capsys)
        assert code == 0 and "overall: PASS" in out
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    passed = [s for s in doc["scenarios"] if s["passed"]]
    assert len(passed) >= 8
    assert any(s["name"] == "bowtie" and s["qubits"] == 7 for s in passed)
    assert all(c["passed"] for c in doc["certifications"])

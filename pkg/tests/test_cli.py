import csv
import io
import json

import numpy as np
import pytest

from conftest import transfer_wronskian
from thresholdscope.cli import SCHEMAS, main, parse_complex
from thresholdscope.potentials import Potential


@pytest.fixture
def zero_file(tmp_path):
    p = tmp_path / "zero.json"
    Potential.zero().dump(p)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_parse_complex():
    assert parse_complex("0.5+0.1i") == 0.5 + 0.1j
    assert parse_complex("i") == 1j
    assert parse_complex("-2") == -2


def test_detect_zero_potential(capsys, zero_file):
    code, out, _ = run(capsys, "detect", "--potential", zero_file, "--z0", "0", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["classification"] == "virtual_level"
    assert np.allclose(doc["virtual_state_re"], 1.0) and np.allclose(doc["virtual_state_im"], 0.0)


def test_wronskian_barrier_threshold(capsys):
    code, out, _ = run(capsys, "wronskian", "--barrier-g", "1", "--zeta", "0")
    assert code == 0
    table = rows(out)
    assert table[0] == SCHEMAS["wronskian"].split(", ")
    ref = transfer_wronskian(Potential.indicator(-1, 1, 1.0), 0.0)
    assert float(table[1][2]) == pytest.approx(ref.real, rel=1e-10)


def test_wronskian_grid(capsys):
    code, out, _ = run(capsys, "wronskian", "--barrier-g", "0.5", "--zeta-grid", "0,1,3,0,1,2")
    assert code == 0 and len(rows(out)) == 7


def test_rank_demo_jordan(capsys):
    code, out, _ = run(capsys, "rank-demo", "--matrix", "jordan3")
    assert code == 0
    assert rows(out)[1] == ["1", "1"]


def test_rank_demo_planted(capsys):
    code, out, _ = run(capsys, "rank-demo", "--matrix", "planted:8:3", "--seed", "4", "--format", "json")
    assert json.loads(out)["min_rank"] == 3


def test_shift_demo(capsys):
    code, out, _ = run(capsys, "shift-demo", "--n", "200")
    t = rows(out)
    assert code == 0 and float(t[2][2]) >= 1.8


def test_bound_states_well(capsys):
    code, out, _ = run(capsys, "bound-states", "--well-g", "1")
    assert code == 0 and len(rows(out)) == 2


def test_disk2d_and_bessel(capsys):
    code, out, _ = run(capsys, "disk2d", "--g", "0.01", "--zeta", "0.001i", "--format", "json")
    assert code == 0 and json.loads(out)["gamma"] > 0
    code, out, _ = run(capsys, "bessel-selftest", "--n", "20")
    assert code == 0 and len(rows(out)) == 21


def test_lap_sweep_output_and_plot(capsys, tmp_path):
    out_path, plot = tmp_path / "s.csv", tmp_path / "p.csv"
    code, _, _ = run(capsys, "lap-sweep", "--family", "barrier1d", "--kmax", "3", "--L", "20", "--points", "200", "-o", str(out_path), "--plot-data", str(plot))
    assert code == 0
    assert rows(out_path.read_text())[0] == SCHEMAS["lap-sweep"].split(", ")
    assert rows(plot.read_text())[0] == ["x", "y"]
    assert sorted(p.name for p in tmp_path.iterdir()) == ["p.csv", "s.csv"]


def test_byte_identical_reruns(capsys, tmp_path):
    files = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        assert main(["jost", "--barrier-g", "1", "--zeta", "0.3+0.2i", "--points", "21", "--format", "json", "-o", str(path)]) == 0
        files.append(path.read_bytes())
    assert files[0] == files[1]


def test_computational_error_exit_one(capsys):
    code, _, err = run(capsys, "disk2d", "--g", "0.01", "--zeta", "0.1")
    assert code == 1 and "NearBranchPoint" in err


def test_usage_errors(capsys, tmp_path):
    code, _, err = run(capsys, "detect", "--potential", str(tmp_path / "missing.json"))
    assert code == 2 and "--potential" in err
    code, _, err = run(capsys, "detect")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["wronskian", "--barrier-g", "1", "--zeta", "abc"])
    assert exc.value.code == 2
    assert "--zeta" in capsys.readouterr().err


def test_malformed_potential_is_computational(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"segments": 3}')
    code, _, err = run(capsys, "detect", "--potential", str(p))
    assert code == 1 and "PotentialFormatError" in err


@pytest.mark.parametrize("sub", list(SCHEMAS))
def test_selftest_modes(capsys, sub):
    code, out, _ = run(capsys, sub, "--selftest")
    assert code == 0
    assert out.strip() and all(line.startswith("PASS") for line in out.strip().splitlines())

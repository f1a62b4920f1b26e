import csv
import json

import numpy as np
import pytest

from incoherent_ops.channel import channels_equal, load_channel, permutation_lower_bound_channel, save_channel
from incoherent_ops.cli import run
from incoherent_ops.oracle import random_incoherent_channel


@pytest.fixture
def lb_file(tmp_path):
    path = tmp_path / "ch.json"
    save_channel(permutation_lower_bound_channel(2), str(path))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_rank(lb_file, capsys):
    assert run(["rank", "--file", lb_file]) == 0
    assert "4" in capsys.readouterr().out
    assert run(["rank", "--file", lb_file, "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["kraus_rank"] == 4


def test_convert_check(capsys):
    assert run(["convert-check", "--r", "0.5,0,0.5", "--s", "0.5,0,0.6"]) == 1
    assert "height bound" in capsys.readouterr().out
    assert run(["convert-check", "--r", "0.5,0,0.5", "--s", "0.2,0,0.1", "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"feasible": True, "violated": []}


def test_convert_check_oracle_is_reproducible(capsys):
    argv = ["convert-check", "--r", "1,0,0", "--s", "0,0,0.99", "--samples", "500", "--seed", "3", "--json"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["oracle_witness"] is True


def test_bounds(capsys):
    assert run(["bounds", "--d", "3"]) == 0
    out = capsys.readouterr().out
    assert "IO 39" in out and "SIO 15" in out


def test_region_csv(tmp_path, capsys):
    out = tmp_path / "unit_circle.csv"
    assert run(["region", "--r", "1,0,0", "--n", "100", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["theta", "s_perp", "s_z_max"]
    assert len(rows) == 100
    assert np.allclose(rows[:, 1] ** 2 + rows[:, 2] ** 2, 1, atol=1e-12)
    assert np.all(np.diff(rows[:, 0]) > 0)


def test_region_to_stdout(capsys):
    assert run(["region", "--r=-0.8,0,-0.6", "--n", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "theta,s_perp,s_z_max" and len(lines) == 4
    assert run(["region", "--r", "0.5,0,0.5", "--n", "3", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["rows"][-1][1:] == pytest.approx([0.5, 0.5])


def test_gibbs_region_csv(tmp_path):
    out = tmp_path / "g.csv"
    assert run(["gibbs-region", "--r", "0.5,0,0.5", "--t=-0.2", "--n", "40", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["s_z", "s_perp_max"]
    assert np.all(np.diff(rows[:, 0]) > 0)
    assert rows[0, 0] == pytest.approx(-2 / 3, abs=1e-10) and rows[-1, 0] == pytest.approx(0.5)


def test_gibbs_check(capsys):
    assert run(["gibbs-check", "--r", "0.5,0,0.5", "--t=-0.2", "--s=0,0,-0.7"]) == 1
    assert run(["gibbs-check", "--r", "0.5,0,0.5", "--t=-0.2", "--s", "0.1,0,0"]) == 0
    assert "feasible" in capsys.readouterr().out


def test_classify_and_choi(lb_file, capsys):
    assert run(["classify", "--file", lb_file]) == 0
    assert "class: SIO" in capsys.readouterr().out
    assert run(["choi", "--file", lb_file, "--json"]) == 0
    m = json.loads(capsys.readouterr().out)
    assert len(m) == 4 and len(m[0]) == 4
    assert run(["choi", "--file", lb_file]) == 0


@pytest.mark.parametrize("d,mode,strict", [(2, "io", False), (2, "sio", True), (3, "io", False), (3, "sio", True)])
def test_reduce_round_trip(tmp_path, capsys, d, mode, strict):
    src, dst = tmp_path / "in.json", tmp_path / "out.json"
    ch = random_incoherent_channel(d, 20, strict, seed=d)
    save_channel(ch, str(src))
    assert run(["reduce", "--file", str(src), "--mode", mode, "--out", str(dst)]) == 0
    assert "reduced 20 ->" in capsys.readouterr().out
    assert channels_equal(load_channel(str(dst)), ch)


def test_reduce_json(tmp_path, capsys):
    src = tmp_path / "in.json"
    save_channel(random_incoherent_channel(3, 20, seed=1), str(src))
    assert run(["reduce", "--file", str(src), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["output_operators"] <= 39 and data["choi_distance"] <= 1e-8


def test_convert_build(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert run(["convert-build", "--r", "0.5,0,0.5", "--s", "0.3,0.4,0", "--out", str(out)]) == 0
    assert "output state (0.3, 0.4, " in capsys.readouterr().out
    assert len(load_channel(str(out))) <= 4
    assert run(["convert-build", "--r", "0.5,0,0.5", "--theta", "0.5"]) == 0
    assert json.loads(capsys.readouterr().out)["dim"] == 2
    assert run(["convert-build", "--r", "0.5,0,0.5", "--s", "0.5,0,0.6"]) == 1
    assert run(["convert-build", "--r", "0.5,0,0.5"]) == 2


def test_lowerbound(tmp_path, capsys):
    out = tmp_path / "lb.json"
    assert run(["lowerbound", "--d", "3", "--out", str(out), "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"d": 3, "kraus_rank": 9, "class": "SIO"}
    assert len(load_channel(str(out))) == 9


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["rank"],
    ["rank", "--file", "/nonexistent.json"],
    ["region", "--r", "1,1,1"],
    ["region", "--r", "a,b,c"],
    ["bounds", "--d", "0"],
    ["gibbs-region", "--r", "0.5,0,0.5", "--t", "3"],
    ["lowerbound", "--d", "1"],
])
def test_input_errors_exit_2(argv, capsys):
    assert run(argv) == 2


def test_bad_json_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["rank", "--file", str(bad)]) == 2
    bad.write_text('{"dim": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}')
    assert run(["classify", "--file", str(bad)]) == 0
    bad.write_text('{"dim": 2, "kraus": [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}')
    assert run(["classify", "--file", str(bad)]) == 2


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    assert "convert-check" in capsys.readouterr().out

import json

import pytest

from steerport.cli import analyze_lines, main
from steerport.qmat import ket_to_density
from steerport.statefile import density_to_dict, dump_state, load_state, parse_state
from steerport.states import (
    PSI_MINUS,
    XStateParams,
    mems_rank2_params,
    mems_rank3_params,
    saturating_family,
)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def values(text):
    out = {}
    for line in text.splitlines():
        key, _, val = line.partition(" = ")
        out[key] = val
    return out


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, obj in [
        ("singlet", ket_to_density(PSI_MINUS)),
        ("mems3", mems_rank3_params(0.6)),
        ("mems2", mems_rank2_params(0.5)),
        ("sat", saturating_family(0.5)),
    ]:
        paths[name] = tmp_path / f"{name}.json"
        dump_state(obj, paths[name])
    # (0.6|0> + 0.8|1>)|0> has coherences off the X pattern
    nonx = density_to_dict(ket_to_density([0.6, 0.0, 0.8, 0.0]))
    paths["nonx"] = tmp_path / "nonx.json"
    paths["nonx"].write_text(json.dumps(nonx))
    return paths


def test_analyze_singlet(capsys, files):
    code, out, _ = run(capsys, "analyze", files["singlet"])
    v = values(out)
    assert code == 0
    assert v["S"] == "1.732051"
    assert v["f"] == "1.000000"
    assert v["steerable"] == "yes"


def test_analyze_mems3(capsys, files):
    _, out, _ = run(capsys, "analyze", files["mems3"])
    v = values(out)
    assert float(v["S"]) == pytest.approx(1.121507, abs=1e-6)
    assert float(v["C"]) == pytest.approx(0.6, abs=1e-6)
    assert "F" in v and "chi0" in v


def test_analyze_saturating(capsys, files):
    _, out, _ = run(capsys, "analyze", files["sat"])
    v = values(out)
    assert v["f13"] == "1.000000"
    for key in ("two_steering:23", "two_steering:12", "one_steering:13"):
        assert v[key] == "3.000000"


def test_analyze_round_trip(tmp_path):
    x = XStateParams(0.3, 0.2, 0.1, 0.4, 0.2 + 0.1j, -0.05j)
    first = analyze_lines(parse_state(x.to_dict()))
    path = tmp_path / "x.json"
    dump_state(parse_state(x.to_dict()).x, path)
    assert analyze_lines(load_state(path)) == first


def test_analyze_invalid_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"type": "mems", "lambdas": [0.5, 0.5, 0.5, 0.0]}))
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2
    assert "sum" in err


def test_sweep_rows_and_determinism(capsys, tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "sweep", "--family", "mems3", "--from", 0, "--to", 1, "--steps", 101, "--out", out1)[0] == 0
    assert run(capsys, "sweep", "--family", "mems3", "--from", 0, "--to", 1, "--steps", 101, "--out", out2)[0] == 0
    lines = out1.read_text().splitlines()
    assert len(lines) == 102
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_matches_analyze(capsys, tmp_path, files):
    out = tmp_path / "m2.csv"
    run(capsys, "sweep", "--family", "mems2", "--from", 0, "--to", 1, "--steps", 11, "--out", out)
    header, *rows = out.read_text().splitlines()
    names = header.split(",")
    row = dict(zip(names, rows[5].split(",")))
    _, text, _ = run(capsys, "analyze", files["mems2"])
    v = values(text)
    assert float(row["p"]) == 0.5
    assert float(row["S"]) == pytest.approx(float(v["S"]), abs=1e-6)
    assert float(row["C"]) == pytest.approx(float(v["C"]), abs=1e-6)
    assert float(row["steering_bound"]) == pytest.approx(float(v["steering_bound"]), abs=1e-6)


def test_saturating_sweep_columns(capsys, tmp_path):
    out = tmp_path / "sat.csv"
    run(capsys, "sweep", "--family", "saturating", "--from", 0.05, "--to", 0.7, "--steps", 14, "--out", out)
    header, *rows = out.read_text().splitlines()
    names = header.split(",")
    for r in rows:
        row = dict(zip(names, r.split(",")))
        for key in ("two_steering:23", "two_steering:12", "one_steering:13"):
            assert row[key] == "3.000000000"


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--family", "mems3", "--from", 1, "--to", 0, "--steps", 5],
        ["sweep", "--family", "saturating", "--from", 0, "--to", 0.5, "--steps", 5],
        ["sweep", "--family", "mems4", "--from", 0, "--to", 1, "--steps", 5],
        ["sweep", "--family", "mems2", "--from", 0, "--to", 1, "--steps", 0],
        ["verify", "--theorem", "T9", "--samples", 5],
        ["verify", "--theorem", "T1", "--samples", 0],
        ["verify", "--theorem", "T1", "--samples", 5, "--seed", -3],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(
        capsys, "sweep", "--family", "mems2", "--from", 0, "--to", 1, "--steps", 3,
        "--out", tmp_path / "no" / "such" / "dir.csv",
    )
    assert code == 2
    assert "cannot write" in err


def test_verify_writes_report(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--theorem", "T3", "--samples", 2000, "--seed", 7, "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["theorem_id"] == "T3" and doc["violations"] == 0


def test_verify_exit_one_on_violation(capsys, tmp_path):
    # MC_EQ3 on states with det R > 0 cannot meet the N-formula; index 15 of seed 5 is one
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--theorem", "MC_EQ3", "--samples", 20, "--seed", 5,
                     "--inputs", 2000, "--out", out)
    doc = json.loads(out.read_text())
    assert doc["violations"] > 0
    assert code == 1


def test_verify_byte_identical_across_workers(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "verify", "--theorem", "T1", "--samples", 9000, "--seed", 3, "--workers", 1, "--out", a)
    run(capsys, "verify", "--theorem", "T1", "--samples", 9000, "--seed", 3, "--workers", 2, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_simulate_singlet(capsys, files):
    code, out, _ = run(capsys, "simulate", "--state", files["singlet"], "--strategy", "optimal",
                       "--inputs", 10000, "--seed", 1)
    v = values(out)
    assert code == 0
    assert float(v["mean"]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("strategy", ["optimal", "restricted-pauli"])
def test_simulate_mems2(capsys, files, strategy):
    _, out, _ = run(capsys, "simulate", "--state", files["mems2"], "--strategy", strategy,
                    "--inputs", 100000, "--seed", 2)
    v = values(out)
    assert float(v["reference"]) == pytest.approx(5 / 6, abs=1e-6)
    assert abs(float(v["mean"]) - 5 / 6) <= 3 * float(v["std_error"]) + 1e-6
    assert v["within_3sigma"] == "yes"


def test_simulate_standard_has_no_reference(capsys, files):
    _, out, _ = run(capsys, "simulate", "--state", files["mems2"], "--strategy", "standard", "--inputs", 500)
    assert values(out)["reference"] == "none"


def test_simulate_is_deterministic(capsys, files):
    argv = ("simulate", "--state", files["mems3"], "--strategy", "optimal", "--inputs", 3000, "--seed", 9)
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_restricted_needs_x_state(capsys, files):
    code, _, err = run(capsys, "simulate", "--state", files["nonx"], "--strategy", "restricted-pauli")
    assert code == 2
    assert "X-shaped" in err


def test_simulate_rejects_three_qubit(capsys, files):
    assert run(capsys, "simulate", "--state", files["sat"], "--strategy", "optimal")[0] == 2


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "steerport", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "analyze" in proc.stdout

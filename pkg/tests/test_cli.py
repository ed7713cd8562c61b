import csv
import json
import math
import subprocess
import sys

import pytest

from mixedpowers.cli import main

TRI = {"factors": [["1", "1"], ["1", "2"]], "norm": {"kind": "wl1", "weights": ["1", "1", "2"]}}
PLANAR = {"factors": [["1", "1"], ["1", "-1"]], "norm": {"kind": "linf"}}
# z(1-z) and (1+z)^3: the first vanishes at the origin
VANISHING = {"factors": [["0", "1", "-1"], ["1", "3", "3", "1"]]}


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, data in (("tri", TRI), ("planar", PLANAR), ("vanishing", VANISHING)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_oracle_hand_expansion(files, capsys):
    code, out, _ = run(["oracle", files["tri"], "2,2,1"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["value"] == "5"


def test_oracle_constant_terms(files, capsys):
    code, out, _ = run(["oracle", files["tri"], "0,5,7"], capsys)
    assert code == 0 and json.loads(out)["value"] == "1"


def test_oracle_vanishing_factor(files, capsys):
    code, _, err = run(["oracle", files["vanishing"], "5,3,2"], capsys)
    assert code == 2
    assert "H1" in err and "--reduce" in err
    code, out, _ = run(["oracle", files["vanishing"], "5,3,2", "--reduce"], capsys)
    assert code == 0
    # [z^2] (1-z)^3 (1+z)^6 = 15 - 18 + 3
    assert json.loads(out)["value"] == "0"
    code, out, _ = run(["oracle", files["vanishing"], "6,3,2", "--reduce"], capsys)
    # [z^3] (1-z)^3 (1+z)^6 = 20 - 45 + 18 - 1
    assert json.loads(out)["value"] == "-8"


def test_estimate_binomial_gaussian(files, capsys):
    code, out, _ = run(["estimate", files["tri"], "50,100,0", "--method", "gaussian"], capsys)
    assert code == 0
    data = json.loads(out)
    assert math.exp(float(data["log_abs"])) == pytest.approx(1.01145e29, rel=2e-5)
    assert data["method"] == "gaussian"


def test_estimate_airy_window_refuses_gaussian(files, capsys):
    code, _, err = run(["estimate", files["planar"], "200,900,99", "--method", "gaussian"], capsys)
    assert code == 4
    assert "quadrature" in err


@pytest.mark.parametrize("system,n", [("tri", "2,4,1"), ("tri", "7,10,3"), ("planar", "20,90,9"),
                                      ("planar", "1,9,1")])
def test_estimate_quadrature_matches_oracle(files, capsys, system, n):
    _, out, _ = run(["oracle", files[system], n], capsys)
    exact = int(json.loads(out)["value"])
    code, out, _ = run(["estimate", files[system], n, "--method", "quadrature"], capsys)
    assert code == 0
    data = json.loads(out)
    est = int(data["sign"]) * math.exp(float(data["log_abs"]))
    assert est == pytest.approx(exact, rel=1e-8)


def test_estimate_no_critical_point(files, capsys):
    # n0 beyond the degree of the product has no positive critical point
    code, _, _ = run(["estimate", files["tri"], "9,2,1", "--method", "gaussian"], capsys)
    assert code == 3


def test_critical_and_phase(files, capsys):
    code, out, _ = run(["critical", files["tri"], "--direction", "7/25,6/25,6/25"], capsys)
    assert code == 0
    assert float(json.loads(out)["critical_point"]["z"]) == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run(["phase", files["planar"], "--direction", "2/9,1,1/9", "--check"], capsys)
    assert code == 0
    data = json.loads(out)
    c2, c4 = data["coeffs"][2], data["coeffs"][4]
    assert abs(float(c2[0])) < 1e-10 and abs(float(c2[1])) < 1e-10
    assert float(c4[0]) == pytest.approx(10 / 81, abs=1e-12)
    assert all(data["checks"][key]["pass"] for key in "abc")


def _sweep(files, name, spec):
    p = files["dir"] / f"{name}.json"
    p.write_text(json.dumps(spec))
    return str(p), str(files["dir"] / f"{name}.csv")


def test_verify_monotone_family(files, capsys):
    sweep, out_csv = _sweep(files, "mono", {"method": "gaussian", "tolerance": "monotone-decreasing",
                                           "family": {"base": [2, 4, 3], "multipliers": [8, 16, 32, 64]}})
    code, out, _ = run(["verify", files["tri"], sweep, out_csv, "--jobs", "1"], capsys)
    assert code == 0
    assert json.loads(out)["status"] == "ok"
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert [int(r["size"]) for r in rows] == sorted(int(r["size"]) for r in rows)
    assert set(rows[0]) >= {"n", "exact", "estimate", "rel_error", "regime", "nz_product", "c2"}


def test_verify_quadrature_tolerance(files, capsys):
    sweep, out_csv = _sweep(files, "quad", {"method": "quadrature", "tolerance": 1e-8,
                                           "instances": [[3, 4, 2], [1, 2, 1], [10, 30, 5], [0, 3, 1]]})
    code, out, _ = run(["verify", files["tri"], sweep, out_csv, "--jobs", "2"], capsys)
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert max(float(r["rel_error"]) for r in rows) < 1e-8


def test_verify_coalescing_family_fails(files, capsys):
    sweep, out_csv = _sweep(files, "coal", {"method": "gaussian", "tolerance": 1e-2,
                                           "family": {"base": [200, 900, 99], "multipliers": [1, 2]}})
    code, out, _ = run(["verify", files["planar"], sweep, out_csv, "--jobs", "1"], capsys)
    assert code in (4, 5)
    assert json.loads(out)["status"] != "ok"


def test_verify_tolerance_violation(files, capsys):
    sweep, out_csv = _sweep(files, "tight", {"method": "gaussian", "tolerance": 1e-9,
                                            "instances": [[3, 4, 2], [30, 40, 20]]})
    code, out, _ = run(["verify", files["tri"], sweep, out_csv, "--jobs", "1"], capsys)
    assert code == 5
    assert json.loads(out)["status"] == "tolerance-violation"


def test_app_examples(capsys):
    code, out, _ = run(["app", "trivariate", "1", "4", "2"], capsys)
    assert code == 0 and json.loads(out)["exact"]["value"] == "5"
    code, out, _ = run(["app", "planar-core", "3", "2"], capsys)
    assert code == 0 and json.loads(out)["exact"]["value"] == "6"
    code, _, _ = run(["app", "planar-core", "3", "4"], capsys)
    assert code == 3


def test_density_table(capsys, tmp_path):
    code, out, _ = run(["app", "--emit-density-table"], capsys)
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["x", "density"]
    at_zero = [r for r in rows[1:] if float(r[0]) == 0.0]
    assert float(at_zero[0][1]) == pytest.approx(0.5176388, abs=1e-7)
    path = tmp_path / "table.csv"
    code, out, _ = run(["app", "planar-core", "30", "10", "--emit-density-table", str(path)], capsys)
    assert code == 0 and path.read_text().splitlines()[0] == "x,density"
    # a query plus a table needs a path so the two outputs do not interleave
    code, _, _ = run(["app", "planar-core", "30", "10", "--emit-density-table"], capsys)
    assert code == 2


def test_sequence_files(capsys, tmp_path):
    # rooted maps M_n and rooted 2-connected maps C_k, first few values
    m = tmp_path / "m.txt"
    m.write_text("offset: 0\n1\n2\n9\n54\n378\n")
    c = tmp_path / "c.txt"
    c.write_text("offset: 1\n2\n1\n2\n6\n")
    code, out, _ = run(["app", "planar-core", "3", "2", "--method", "none",
                        "--m-file", str(m), "--c-file", str(c)], capsys)
    assert code == 0
    data = json.loads(out)
    # 2 * C_2 / (3 * M_3) * 6 = 2 * 1 * 6 / 162
    assert data["p_nk"] == "2/27"
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\n")
    code, _, _ = run(["app", "planar-core", "3", "2", "--m-file", str(bad), "--c-file", str(c)], capsys)
    assert code == 2
    code, _, _ = run(["app", "planar-core", "3", "2", "--m-file", str(m), "--c-file", str(bad)], capsys)
    assert code == 2


def test_precision_env_and_flag(files, capsys, monkeypatch):
    monkeypatch.setenv("MIXEDPOWERS_PRECISION", "256")
    code, out, _ = run(["estimate", files["tri"], "5,10,3", "--method", "quadrature"], capsys)
    assert code == 0
    code, out2, _ = run(["estimate", files["tri"], "5,10,3", "--method", "quadrature", "--precision", "64"], capsys)
    assert code == 0
    assert float(json.loads(out)["log_abs"]) == pytest.approx(float(json.loads(out2)["log_abs"]), rel=1e-12)


def test_bad_input_exit_codes(files, capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["oracle", str(broken), "1,1,1"]) == 2
    assert main(["oracle", str(tmp_path / "missing.json"), "1,1,1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["oracle", files["tri"], "1,x,1"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_console_script_bit_identical(files):
    args = [sys.executable, "-m", "mixedpowers.cli", "estimate", files["tri"], "40,80,20",
            "--method", "quadrature"]
    first = subprocess.run(args, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(args, capture_output=True, text=True, check=True).stdout
    assert first == second and first

import csv
import json
import os
import subprocess
import sys

import pytest

from conftest import B0_GOLDEN
from robinmag.cli import UsageError, load_config, main, parse_modes, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# parsing helpers

def test_parse_range():
    assert parse_range("0:1:0.5") == [0.0, 0.5, 1.0]
    assert parse_range("1.25") == [1.25]
    assert len(parse_range("0:2.5:0.05")) == 51
    for bad in ("2:1:0.5", "0:1:0", "0:1:-1", "a:b:c", "0:1"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_parse_modes():
    assert parse_modes("-2:4") == [-2, -1, 0, 1, 2, 3, 4]
    assert parse_modes("0,3,1") == [0, 3, 1]
    with pytest.raises(UsageError):
        parse_modes("4:-2")


def test_config_unknown_key(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n_max": 512, "n_maxx": 3}))
    with pytest.raises(UsageError):
        load_config(str(path))


# lambda

def test_lambda_m0(capsys):
    code, out, _ = run(capsys, "lambda", "--m", "0", "--b", "1.0")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"m", "b", "lambda", "n_used", "residual", "converged"}
    assert data["lambda"] == pytest.approx(0.25, abs=1e-12)
    assert data["converged"] is True


def test_lambda_b0(capsys):
    code, out, _ = run(capsys, "lambda", "--m", "1", "--b", "0")
    assert code == 0
    assert json.loads(out)["lambda"] == pytest.approx(2.0, abs=1e-10)


def test_lambda_negative_mode(capsys):
    code, out, _ = run(capsys, "lambda", "--m", "-2", "--b", "1")
    assert code == 0
    assert json.loads(out)["m"] == -2


def test_lambda_missing_b(capsys):
    code, _, err = run(capsys, "lambda", "--m", "1")
    assert code == 1
    assert "usage" in err.lower()


def test_lambda_unconverged_exit_2(capsys):
    code, out, _ = run(capsys, "lambda", "--m", "1", "--b", "1.9", "--n-initial", "4", "--n-max", "8")
    assert code == 2
    assert json.loads(out)["converged"] is False


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_initial": 4, "n_max": 8}))
    code, _, _ = run(capsys, "lambda", "--m", "1", "--b", "1.9", "--config", str(cfg))
    assert code == 2
    code, out, _ = run(capsys, "lambda", "--m", "1", "--b", "1.9", "--config", str(cfg), "--n-max", "2048")
    assert code == 0
    assert json.loads(out)["converged"] is True


def test_config_unknown_key_exit_1(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rel_tl": 1e-9}))
    code, _, err = run(capsys, "lambda", "--m", "0", "--b", "1", "--config", str(cfg))
    assert code == 1
    assert "rel_tl" in err


# sweep

def test_sweep_m0(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--b", "0:1:0.5", "--m", "0", "--out", str(tmp_path))
    assert code == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert rows[0] == ["b", "m", "lambda", "converged", "n_used", "residual"]
    assert len(rows) == 4
    assert [float(r[2]) for r in rows[1:]] == pytest.approx([0.0, 0.0625, 0.25], abs=1e-14)
    eff = read_csv(tmp_path / "effective.csv")
    assert eff[0] == ["b", "e_value", "argmin_m"]
    assert [r[2] for r in eff[1:]] == ["0", "0", "0"]


def test_sweep_full_mode_grid(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--b", "0:2.5:0.05", "--m", "-2:4", "--svg",
                     "--formats", "csv,json", "--out", str(tmp_path))
    assert code == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) - 1 == 51 * 7
    svg = (tmp_path / "sweep.svg").read_text()
    assert svg.count("<polyline") == 7
    assert "m = -2" in svg and "m = 4" in svg
    data = json.loads((tmp_path / "sweep.json").read_text())
    argmins = [p["argmin_m"] for p in data["per_b"]]
    switch = [i for i in range(1, len(argmins)) if argmins[i] != argmins[i - 1]]
    assert len(switch) == 1
    i = switch[0]
    assert data["per_b"][i - 1]["b"] <= B0_GOLDEN <= data["per_b"][i]["b"]


def test_sweep_reversed_range(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--b", "2:1:0.5", "--m", "0", "--out", str(tmp_path))
    assert code == 1


def test_sweep_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(capsys, "sweep", "--b", "0:1:0.5", "--m", "0", "--out", str(blocker / "sub"))
    assert code == 1


def test_sweep_is_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        code, _, _ = run(capsys, "sweep", "--b", "0:2:0.25", "--auto", "--svg", "--out", str(tmp_path / name))
        assert code == 0
    for f in ("sweep.csv", "effective.csv", "sweep.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


# other analysis commands

def test_effective(tmp_path, capsys):
    code, out, _ = run(capsys, "effective", "--b", "1.9", "--out", str(tmp_path))
    assert code == 0
    data = json.loads(out)
    assert data["argmin_m"] == 1 and data["e_value"] < 0.9025


def test_crossing(capsys):
    code, out, _ = run(capsys, "crossing")
    assert code == 0
    assert json.loads(out)["b0"] == pytest.approx(B0_GOLDEN, abs=1e-8)


def test_crossing_bad_bracket(capsys):
    code, _, err = run(capsys, "crossing", "--bracket", "0.1:0.5")
    assert code == 1
    assert err


def test_derivative(capsys):
    code, out, _ = run(capsys, "derivative", "--m", "1", "--b", "1.5", "--fd-step", "1e-4")
    assert code == 0
    data = json.loads(out)
    assert data["derivative"] == pytest.approx(data["central_difference"], abs=1e-5)


@pytest.mark.parametrize(
    "m,b,verdict,exponents,log_case",
    [
        ("1", "0.5", "LimitPoint", [1.5, -0.5], False),
        ("0", "2", "LimitCircle", [0.5, 0.5], True),
        ("-2", "1", "LimitPoint", [2.5, -1.5], False),
    ],
)
def test_classify(capsys, m, b, verdict, exponents, log_case):
    code, out, _ = run(capsys, "classify", "--m", m, "--b", b)
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == {"zero": verdict, "pi": verdict}
    assert data["exponents"] == exponents
    assert data["log_case"] is log_case


def test_classify_series_coefficients(capsys):
    _, out, _ = run(capsys, "classify", "--m", "1", "--b", "0.6")
    series = {s["exponent"]: s for s in json.loads(out)["frobenius"]}
    assert series[1.5]["symbolic"][1] == "-b/3"
    assert series[1.5]["coeffs"][1] == pytest.approx(-0.2, abs=1e-15)
    assert series[-0.5]["symbolic"][1] == "b"
    assert series[-0.5]["resonance_order"] == 2


def test_series_bad_exponent(capsys):
    code, _, _ = run(capsys, "series", "--m", "1", "--b", "1", "--exponent", "0.7")
    assert code == 1


def test_validate(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    assert "ln2-integral" in out


def test_certify_bad_step(tmp_path, capsys):
    code, _, _ = run(capsys, "certify", "--grid-step", "0", "--out", str(tmp_path))
    assert code == 1


def test_certify_restricted_range_fails(tmp_path, capsys):
    code, out, _ = run(capsys, "certify", "--b-max", "0.9", "--grid-step", "0.05", "--out", str(tmp_path))
    assert code == 2
    report = json.loads((tmp_path / "certify.json").read_text())
    items = {i["name"]: i for i in report["items"]}
    mono = items["e(b) non-monotonic"]
    assert mono["passed"] is False
    assert mono["data"]["decreasing_intervals"] == []
    assert [k for k, v in items.items() if not v["passed"]] == ["e(b) non-monotonic"]


def test_module_entry_point(tmp_path):
    env = dict(os.environ, NO_COLOR="1")
    proc = subprocess.run(
        [sys.executable, "-m", "robinmag", "lambda", "--m", "0", "--b", "0.5"],
        capture_output=True, text=True, env=env, cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["lambda"] == pytest.approx(0.0625)

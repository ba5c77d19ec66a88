import csv
import io
import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from sharpsmooth.cli import main, parse_k_range, run

FAST_COMMANDS = [
    ["constants", "--d", "4", "--tau", "2", "--theta", "sobolev", "--k", "0..5"],
    ["constants", "--d", "3", "--tau", "2", "--theta", "one", "--k", "0..0"],
    ["classify", "--d", "6", "--tau", "5.5", "--theta", "sobolev"],
    ["classify", "--d", "4", "--tau", "2", "--theta", "sobolev"],
    ["classify", "--d", "5", "--tau", "2", "--theta", "homogeneous"],
    ["thresholds", "--d", "5"],
    ["thresholds", "--d", "6", "--sweep", "10"],
    ["sharp", "schrodinger", "--d", "4", "--s", "0"],
    ["sharp", "wave", "--d", "4", "--s", "0.5"],
    ["verify", "simulate", "--d", "4", "--tau", "2", "--k", "0"],
]


def _schema(command):
    text = resources.files("sharpsmooth").joinpath(f"schemas/{command}.schema.json").read_text()
    return json.loads(text)


def _json(argv):
    code, record, text, _ = run([*argv, "--format", "json"])
    return code, json.loads(text)


@pytest.mark.parametrize("argv", FAST_COMMANDS, ids=lambda a: " ".join(a))
def test_payload_validates_against_schema(argv):
    code, payload = _json(argv)
    assert code == 0
    jsonschema.validate(payload, _schema(argv[0]))


@pytest.mark.parametrize("argv", FAST_COMMANDS[:8], ids=lambda a: " ".join(a))
def test_json_is_deterministic(argv):
    _, a = _json(argv)
    _, b = _json(argv)
    a["diagnostics"].pop("runtime_s")
    b["diagnostics"].pop("runtime_s")
    assert json.dumps(a) == json.dumps(b)


def test_constants_identity_rows():
    _, payload = _json(FAST_COMMANDS[0])
    rows = payload["results"]["rows"]
    assert len(rows) == 6
    assert all(abs(r["beta"] / math.pi - 1) < 1e-12 for r in rows)


def test_constants_theta_one():
    _, payload = _json(FAST_COMMANDS[1])
    assert payload["results"]["rows"][0]["beta"] == pytest.approx(2 * math.pi, rel=1e-14)


def test_json_round_trips_floats():
    _, payload = _json(["constants", "--d", "7", "--tau", "2.5", "--k", "10"])
    # mpmath oracle at 40 digits
    assert payload["results"]["rows"][0]["beta"] == pytest.approx(2.3368050245453412384, rel=1e-14)


def test_classify_payloads():
    _, p = _json(FAST_COMMANDS[2])
    assert p["results"]["kmin_set"] == [0] and p["results"]["kmax_set"] == []
    _, p = _json(FAST_COMMANDS[3])
    assert p["results"]["identity"] and p["results"]["kmin_set"] == "N0"
    assert p["results"]["b"] == pytest.approx(math.pi, rel=1e-12)
    _, p = _json(FAST_COMMANDS[4])
    assert p["results"]["b"] == 0.0 and "degenerate: zero constant" in p["results"]["flags"]


def test_classify_argmin_one_above_tau_upper():
    _, p = _json(["classify", "--d", "6", "--tau", "5.95"])
    assert p["results"]["kmin_set"] == [1] and p["results"]["kmax_set"] == [0]


def test_thresholds_payload():
    _, p = _json(FAST_COMMANDS[5])
    lo, hi = p["results"]["tau_star"], p["results"]["tau_upper_star"]
    assert 4.5 < lo["value"] < 4.7 and lo["value"] <= hi["value"]
    assert abs(lo["residual"]) <= 1e-12 and abs(hi["residual"]) <= 1e-12
    _, p = _json(FAST_COMMANDS[6])
    assert len(p["results"]["sweep"]) == 10
    assert all(0 < s["k_of_tau"] < 1 for s in p["results"]["sweep"])


def test_thresholds_sweep_d5_has_upper_bound():
    _, p = _json(["thresholds", "--d", "5", "--sweep", "4"])
    assert all(s["k_of_tau"] <= s["upper_bound"] for s in p["results"]["sweep"])


def test_sharp_payloads():
    _, p = _json(FAST_COMMANDS[8])
    assert p["results"]["c"] == pytest.approx(math.pi) and p["results"]["multiplier"] == 2.0


@pytest.mark.parametrize("argv", [
    ["constants", "--d", "2", "--tau", "2.5"],
    ["constants", "--d", "1", "--tau", "0.5"],
    ["thresholds", "--d", "4"],
    ["sharp", "schrodinger", "--d", "3", "--s", "0.9"],
    ["classify", "--d", "4", "--tau", "2", "--theta", "custom"],
    ["constants", "--d", "4", "--tau", "2", "--theta", "custom"],
    ["constants", "--d", "4", "--tau", "2", "--k", "5..1"],
    ["nonsense"],
], ids=lambda a: " ".join(a))
def test_usage_and_domain_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_verify_failure_exit_1(capsys):
    assert main(["verify", "simulate", "--rel-tol", "1e-20", "--format", "json"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert not payload["results"]["passed"] and payload["results"]["n_failed"] >= 1


def test_csv_format(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["constants", "--d", "4", "--tau", "2", "--k", "0..3", "--format", "csv",
                 "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
    assert rows[0] == ["k", "mu", "beta"] and len(rows) == 5
    assert float(rows[1][2]) == pytest.approx(math.pi, rel=1e-15)


def test_csv_quotes_embedded_json():
    _, _, text, _ = run(["classify", "--d", "6", "--tau", "5.5", "--format", "csv"])
    rows = list(csv.reader(io.StringIO(text)))
    header, row = rows
    assert json.loads(row[header.index("extremisers")])["lower"] == "radial data only"


def test_table_format_uses_ten_digits():
    _, _, text, _ = run(["constants", "--d", "4", "--tau", "2", "--k", "0"])
    assert "3.141592654" in text and "3.1415926535" not in text


def test_custom_theta_table(tmp_path):
    table = tmp_path / "theta.txt"
    table.write_text("# k theta\n0 1.0\n1, 2.0\n")
    code, payload = _json(["constants", "--d", "3", "--tau", "2", "--theta", "custom",
                           "--theta-table", str(table), "--k", "0,1"])
    _, base = _json(["constants", "--d", "3", "--tau", "2", "--theta", "one", "--k", "0,1"])
    assert code == 0 and payload["results"]["tail_limit"] is None and not payload["results"]["certified"]
    assert payload["results"]["rows"][1]["beta"] == pytest.approx(4 * base["results"]["rows"][1]["beta"])


def test_env_overrides_quadrature(monkeypatch):
    monkeypatch.setenv("SHARPSMOOTH_QUAD_REL_TOL", "1e-9")
    _, payload = _json(["constants", "--d", "4", "--tau", "2", "--k", "0"])
    assert payload["diagnostics"]["quadrature"]["rel_tol"] == 1e-9


def test_parse_k_range():
    assert parse_k_range("0..3") == [0, 1, 2, 3]
    assert parse_k_range("2,5") == [2, 5]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sharpsmooth", "classify", "--d", "4", "--tau", "2",
                           "--format", "json"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["regime_label"] == "d=4, tau=2"
    proc = subprocess.run([sys.executable, "-m", "sharpsmooth", "thresholds", "--d", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2

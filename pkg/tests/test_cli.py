import csv
import io
import json
import subprocess
import sys

import pytest

from hci_pnc.cli import EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, build_parser, main
from hci_pnc.constants import CONSTANTS_ENV_VAR
from reference_data import DELTA


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants_report(capsys):
    code, out, _ = run(capsys, "constants", "--Z", "92", "--A", "238")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["derived"]["delta_p_m"] == pytest.approx(0.0880, abs=1e-12)
    rep = doc["weak_charge_report"]
    assert rep["q_w"] == pytest.approx(-142.0992, abs=1e-9)
    assert set(rep) >= {"q_w", "p_w", "p_w_tilde", "a_pnc_bouchiat", "a_pnc_sandars"}


def test_constants_env_override(capsys, tmp_path, monkeypatch):
    p = tmp_path / "consts.txt"
    p.write_text("sin2_theta_w_star = 0.2394  # default\n")
    monkeypatch.setenv(CONSTANTS_ENV_VAR, str(p))
    code, out, _ = run(capsys, "constants")
    assert code == EXIT_OK
    assert json.loads(out)["derived"]["eta"] == pytest.approx(0.0424)
    monkeypatch.setenv(CONSTANTS_ENV_VAR, str(tmp_path / "missing.txt"))
    code, _, err = run(capsys, "constants")
    assert code == EXIT_INPUT
    assert json.loads(err)["kind"] == "input"


def test_pnc_uranium(capsys):
    code, out, _ = run(capsys, "pnc", "--Z", "92", "--A", "238")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert float(rows[0]["delta_loop_wf"]) == pytest.approx(1.225e-2, rel=0.02)


def test_pnc_json_fields(capsys):
    code, out, _ = run(capsys, "pnc", "--Z", "5", "--A", "10.807", "--format", "json", "--grid-points", "3000")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert set(doc) == {"Z", "A", "R_fm", "n", "n_prime", "m_plain_eV", "m_uehling_eV", "delta_loop_wf"}


def test_solve_and_uehling_dumps(capsys):
    code, out, _ = run(capsys, "solve", "--Z", "20", "--A", "40", "--n", "2", "--kappa", "1")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "r_fm,g,f" and len(lines) - 1 in (4000, 4001)
    code, out, _ = run(capsys, "uehling", "--Z", "20", "--A", "40", "--grid-points", "500")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r_fm", "V_U_eV"]
    assert all(float(v) <= 0 for _, v in rows[1:])


def test_exit_codes(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == EXIT_USAGE and json.loads(err)["kind"] == "usage"
    code, _, _ = run(capsys, "pnc", "--Z", "92", "--bogus")
    assert code == EXIT_USAGE
    code, _, err = run(capsys, "pnc", "--Z", "92")
    assert code == EXIT_INPUT and "--A" in json.loads(err)["error"]
    code, _, _ = run(capsys, "pnc", "--Z", "10", "--A", "3")
    assert code == EXIT_INPUT
    code, _, err = run(capsys, "solve", "--Z", "10", "--A", "20", "--n", "2", "--rmax", "5e4")
    assert code == EXIT_NUMERIC and "r_max" in json.loads(err)["error"]


def test_help_mentions_units():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    text = sub["pnc"].format_help()
    for flag in ("--Z", "--A", "--n", "--nprime", "--grid-points", "--rmax", "--constants-file", "--format", "--out"):
        assert flag in text
    assert "fm" in text and "eV" in parser.format_help()


def test_output_file_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["pnc", "--Z", "3", "--A", "6.939", "--grid-points", "2500", "--out", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hci_pnc", "constants"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert "sin2_theta_w_star" in proc.stdout


def test_table2_default_list(tmp_path):
    out = tmp_path / "t2.csv"
    assert main(["table2", "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 21
    for row, ref in zip(rows, DELTA):
        assert float(row["delta_loop_wf"]) == pytest.approx(ref, rel=0.03)

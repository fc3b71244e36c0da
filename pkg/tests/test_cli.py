import csv
import io
import json

import pytest

from pcgmub.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def machine_part(text: str, first_key: str) -> str:
    return text[text.index(first_key):]


def test_replay_periods_csv(capsys):
    code, out, _ = run(capsys, "replay-periods", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(machine_part(out, "d,T_um"))))
    assert [r["T_exp_um"] for r in rows] == [
        "616", "752", "872", "976", "1072", "1152", "1232", "1312", "1384"]


def test_replay_periods_json_matches_csv(capsys, tmp_path):
    target = tmp_path / "p.json"
    code, out, _ = run(capsys, "replay-periods", "--out", str(target))
    assert code == 0 and "wrote" in out
    data = json.loads(target.read_text())
    assert data["ok"] and len(data["rows"]) == 9
    assert data["rows"][0] == {"d": 2, "T_um": 617.3, "T_over_l": 77.2, "T_exp_um": 616,
                               "matches_reference": True}


def test_replay_periods_mismatch_exit_code(capsys):
    code, _, _ = run(capsys, "replay-periods", "--wavelength", "800")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ("replay-periods", "--pixel", "0"),
    ("simulate-mub", "--d", "4", "--m", "2"),
    ("simulate-mub", "--d", "3", "--k0", "5"),
    ("kl-histogram", "--samples", "10"),
    ("check-pair", "--d", "3"),
    ("triple", "--d", "4", "--m", "2"),
    ("optics", "--focal", "100", "--distance", "300"),
    ("no-such-command",),
    ("simulate-mub", "--format", "xml"),
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_simulate_pair_json(capsys):
    code, out, _ = run(capsys, "simulate-mub", "--d", "3", "--theta", "23", "--k0", "1")
    assert code == 0
    data = json.loads(machine_part(out, "{"))
    assert data["ok"] and data["results"][0]["k0"] == 1
    assert len(data["results"][0]["p"]) == 3


def test_simulate_triple_csv(capsys):
    code, out, _ = run(capsys, "simulate-mub", "triple", "--d", "3", "--k0", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(machine_part(out, "prep_deg"))))
    assert len(rows) == 9


def test_simulate_tolerance_failure_exit_code(capsys):
    code, _, _ = run(capsys, "simulate-mub", "--d", "3", "--tol", "1e-9")
    assert code == 3


def test_simulate_alpha23(capsys):
    code, out, _ = run(capsys, "simulate-mub", "alpha23", "--d", "2", "--format", "csv")
    assert code == 0
    assert "unreliable" in out


def test_kl_histogram_writes_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "kl-histogram", "--d", "2,5", "--samples", "1000",
                       "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / "kl_hist_d5.csv").read_text().splitlines()
    assert text[0] == "bin_left,bin_right,probability" and len(text) == 101
    assert (tmp_path / "summary.csv").exists()


def test_kl_histogram_seed_reproducible(capsys):
    args = ("kl-histogram", "--d", "2", "--samples", "1000", "--seed", "7")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_check_pair(capsys):
    code, out, _ = run(capsys, "check-pair", "--d", "2", "--T", "3.5449077018",
                       "--T-prime", "3.5449077018")
    assert code == 0 and json.loads(machine_part(out, "{"))["m"] == 1
    code, _, _ = run(capsys, "check-pair", "--d", "2", "--T", "2", "--T-prime", "2")
    assert code == 3


def test_triple_command(capsys):
    code, out, _ = run(capsys, "triple", "--d", "5", "--m", "1,1,2")
    assert code == 0
    assert json.loads(machine_part(out, "{"))["pair_m"] == [1, 1, 2]


def test_search_quadruples_command(capsys):
    code, out, _ = run(capsys, "search-quadruples", "--samples", "5000", "--seed", "2")
    assert code == 0
    assert json.loads(machine_part(out, "{"))["min_residual"] > 1e-3


def test_optics_command(capsys):
    code, out, _ = run(capsys, "optics", "--focal", "250", "--distance", "200",
                       "--stages", "lens:250:200,lens:250:200,reflect")
    assert code == 0
    data = json.loads(machine_part(out, "{"))
    assert data["theta_deg"] == pytest.approx(78.46, abs=0.01)
    assert data["effective_angle_deg"] == pytest.approx(23.07, abs=0.01)
    assert data["axis_flipped"] is True


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nd = 4\nformat = csv\nk0 = 1\n")
    code, out, _ = run(capsys, "simulate-mub", "--config", str(cfg), "--d", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(machine_part(out, "k0,"))))
    assert len(rows) == 1 and "p_2" in rows[0] and "p_3" not in rows[0]


def test_bad_config_is_usage_error(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign\n")
    code, _, err = run(capsys, "replay-periods", "--config", str(cfg))
    assert code == 2 and "expected key = value" in err


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "pcgmub", "triple", "--d", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout

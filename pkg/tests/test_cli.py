import subprocess
import sys

import pytest

from hybrid_noma.cli import main
from hybrid_noma.sweep import CSV_HEADER, parse_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sumrate(capsys):
    code, out, _ = run(capsys, "sumrate", "--k", "3", "--rho-db", "120", "--trials", "20000")
    assert code == 0
    recs = parse_csv(out)
    assert [r.method for r in recs] == ["analytic", "mc"]
    assert abs(recs[0].estimate - recs[1].estimate) < 4 * recs[1].std_error


def test_rf_and_energy(capsys):
    code, out, _ = run(capsys, "sumrate", "--link", "rf", "--k", "2", "--methods", "analytic")
    assert code == 0 and parse_csv(out)[0].link == "rf"
    code, out, _ = run(capsys, "energy", "--k", "4", "--beta", "0.5", "--rho-db", "150")
    assert code == 0
    assert [r.link for r in parse_csv(out)] == ["hybrid", "vlc_only"]


def test_input_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "sumrate", "--set", "semi_angle_deg=120")[0] == 1
    assert run(capsys, "sumrate", "--set", "nonsense=1")[0] == 1
    assert run(capsys, "sumrate", "--config", str(tmp_path / "missing.cfg"))[0] == 1
    assert run(capsys, "sumrate", "--link", "rf", "--mode", "ofdma")[0] == 1
    assert run(capsys, "sumrate", "--methods", "guess")[0] == 1
    code, _, err = run(capsys, "reproduce", "--figure", "fig42", "--out-dir", str(tmp_path))
    assert code == 1 and "fig42" in err
    code, _, err = run(capsys, "sweep", "--param", "rho_db", "--from", "2", "--to", "1", "--steps", "3")
    assert code == 1


def test_sweep_to_file(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(
        capsys, "sweep", "--param", "semi_angle_deg", "--from", "30", "--to", "60", "--steps", "2",
        "--modes", "noma,ofdma", "--out", str(out),
    )
    assert code == 0
    text = out.read_bytes().decode("utf-8")
    assert text.startswith(CSV_HEADER + "\n") and len(parse_csv(text)) == 4


def test_config_echo(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("K = 6\n")
    code, out, _ = run(capsys, "config", "--config", str(cfg))
    assert code == 0 and f"K = 6  # file:{cfg}:1" in out
    code, _, err = run(capsys, "sumrate", "--config", str(cfg), "--methods", "analytic", "--show-config")
    assert "K = 6" in err


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--trials", "50000")
    assert code == 0
    assert out.count("PASS") == 4


def test_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("HYBRID_NOMA_SEED", "4242")
    code, out, _ = run(capsys, "sumrate", "--trials", "1000")
    assert all(r.seed == 4242 for r in parse_csv(out))
    code, out, _ = run(capsys, "sumrate", "--trials", "1000", "--seed", "1")
    assert all(r.seed == 1 for r in parse_csv(out))


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "hybrid_noma.cli", "sumrate", "--methods", "analytic"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout.startswith(CSV_HEADER)

import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cryochain import __version__
from cryochain.cli import DEFAULT_SEED, main

GOLDEN = Path(__file__).parent / "golden"


def run(tmp_path, *args, out="out"):
    out_dir = tmp_path / out
    code = main([*args, "--out", str(out_dir)])
    return code, out_dir


def header(path):
    with open(path, newline="") as fh:
        return next(csv.reader(fh))


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("cmd, name", [
    (["pll"], "pll_trajectory.csv"),
    (["ser", "--sweep", "10", "12", "1", "--trials", "2000"], "ser_sweep.csv"),
    (["device"], "device_table.csv"),
    (["power"], "power.csv"),
    (["chain", "--trials", "1000"], "chain_report.csv"),
])
def test_csv_headers_match_golden(tmp_path, cmd, name):
    code, out = run(tmp_path, *cmd)
    assert code == 0
    produced = (out / name).read_text().splitlines()
    golden = (GOLDEN / name).read_text().splitlines()
    assert produced[0] == golden[0]
    # exactly one header row
    assert sum(1 for line in produced if line == golden[0]) == 1


def test_manifest_written(tmp_path):
    code, out = run(tmp_path, "power")
    assert code == 0
    m = json.loads((out / "run_manifest.json").read_text())
    assert m["subcommand"] == "power" and m["seed"] == DEFAULT_SEED
    assert m["version"] == __version__ and m["config"] is None
    assert m["out"] == str(out) and m["started"]


def test_device_default_reports_75x(tmp_path):
    code, out = run(tmp_path, "device")
    noise = next(r for r in rows(out / "device_table.csv") if r["parameter"] == "Thermal Noise")
    assert float(noise["T_300K"]) == 1.0 and float(noise["T_4K"]) == 75.0


def test_device_three_temperatures(tmp_path):
    code, out = run(tmp_path, "device", "--temperatures", "300", "150", "4")
    assert header(out / "device_table.csv") == ["parameter", "unit", "T_300K", "T_150K", "T_4K"]
    mob = next(r for r in rows(out / "device_table.csv") if r["parameter"] == "Carrier Mobility")
    vals = [float(mob[k]) for k in ("T_300K", "T_150K", "T_4K")]
    assert vals == sorted(vals)


def test_pll_summary(tmp_path):
    code, out = run(tmp_path, "pll")
    s = json.loads((out / "pll_summary.json").read_text())
    assert code == 0
    assert s["lock_time_s"] < 2e-3 and s["jitter_rms_deg"] < 0.5


def test_pll_not_locked_warns(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pll_sim": {"detuning_hz": 100.0, "t_max": 1e-3}}))
    code, out = run(tmp_path, "pll", "--config", str(cfg))
    assert code == 0
    assert json.loads((out / "pll_summary.json").read_text())["lock_time_s"] is None
    assert "warning" in capsys.readouterr().err


def test_pll_large_step_is_usage_error(tmp_path):
    code, _ = run(tmp_path, "pll", "--dt", "1e-3")
    assert code == 2


def test_ser_sweep_includes_target(tmp_path):
    code, out = run(tmp_path, "ser", "--sweep", "18.1", "20.1", "1", "--trials", "2000")
    r = {round(float(x["es_n0_db"]), 3): x for x in rows(out / "ser_sweep.csv")}
    assert 0.9e-6 <= float(r[19.1]["ser_analytic"]) <= 1.2e-6


def test_ser_empty_sweep(tmp_path):
    code, _ = run(tmp_path, "ser", "--sweep", "5", "0", "1")
    assert code == 2


def test_sweeps_deterministic(tmp_path):
    args = ("ser", "--sweep", "6", "10", "2", "--trials", "5000", "--seed", "11")
    _, a = run(tmp_path, *args, out="a")
    _, b = run(tmp_path, *args, out="b")
    assert (a / "ser_sweep.csv").read_bytes() == (b / "ser_sweep.csv").read_bytes()
    _, c = run(tmp_path, *args[:-1], "12", out="c")
    assert (a / "ser_sweep.csv").read_bytes() != (c / "ser_sweep.csv").read_bytes()


def test_chain_ideal_config(tmp_path):
    cfg = tmp_path / "ideal.json"
    cfg.write_text(json.dumps({"lo": {"phase_error_deg": 0.0}, "link": {"es_n0_db": None}}))
    code, out = run(tmp_path, "chain", "--config", str(cfg))
    rep = json.loads((out / "chain_report.json").read_text())
    assert code == 0 and rep["ser_mc"] == 0.0 and rep["irr"] == 200.0


def test_chain_nominal_summary(tmp_path, capsys):
    code, out = run(tmp_path, "chain")
    text = capsys.readouterr().out
    rep = json.loads((out / "chain_report.json").read_text())
    assert rep["irr"] > 35 and rep["iq_phase_error"] < 2
    assert "199.7 mW -> 88.8 mW" in text
    for label in ("Temperature", "DAC/ADC Bits", "I/Q Phase Error", "LNA Gain"):
        assert label in text


def test_chain_format_json_only(tmp_path):
    code, out = run(tmp_path, "chain", "--format", "json", "--trials", "1000")
    assert (out / "chain_report.json").exists() and not (out / "chain_report.csv").exists()


def test_power_examples(tmp_path, capsys):
    code, out = run(tmp_path, "power")
    r = {x["parameter"]: x for x in rows(out / "power.csv")}
    assert float(r["Steady-State Power (mW)"]["projected"]) == pytest.approx(88.76, abs=0.01)
    assert float(r["Thermal Budget Use (%)"]["projected"]) == pytest.approx(8.9, abs=0.05)
    code, out = run(tmp_path, "power", "--vdd-to", "1.8", out="same")
    r = {x["parameter"]: x for x in rows(out / "power.csv")}
    assert float(r["Steady-State Power (mW)"]["projected"]) == 199.7
    code, out = run(tmp_path, "power", "--p-mw", "100", "--vdd-from", "2", "--vdd-to", "1",
                    "--budget-w", "1", out="quarter")
    r = {x["parameter"]: x for x in rows(out / "power.csv")}
    assert float(r["Steady-State Power (mW)"]["projected"]) == pytest.approx(25.0)


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"pll": {"kdd": 1}}))
    code, _ = run(tmp_path, "chain", "--config", str(cfg))
    assert code == 2
    assert "pll.kdd" in capsys.readouterr().err


def test_usage_error_exit_code(tmp_path):
    assert main(["nope"]) == 2
    assert main(["ser", "--trials", "abc"]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cryochain", "power", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "Steady-State Power" in proc.stdout

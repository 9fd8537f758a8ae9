"""CLI contract: subcommands, exit codes, parseable output."""

import subprocess
import sys
from pathlib import Path

import pytest

from osclink.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_kv(text):
    kv = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            kv[k] = v
    return kv


def test_solve_paper_asic(capsys):
    code, out, _ = run_cli(["solve", CONFIGS / "paper_asic.yaml"], capsys)
    assert code == 0
    kv = parse_kv(out)
    assert kv["delta"] == "1"
    assert kv["n_min"] == "2"
    assert kv["feasible"] == "true"
    assert float(kv["latency_ns"]) == pytest.approx(1.0)
    assert float(kv["throughput_pkt_per_ns"]) == pytest.approx(2.0)
    assert float(kv["max_frequency_error_pct"]) == pytest.approx(3.49, abs=0.01)


def test_solve_infeasible_names_violated_side(capsys):
    code, out, _ = run_cli(["solve", CONFIGS / "adversarial_infeasible.yaml"], capsys)
    assert code == 2
    kv = parse_kv(out)
    assert kv["feasible"] == "false"
    assert "upper bound" in kv["infeasible_reason"]
    assert "lower bound" in kv["infeasible_reason"]


def test_solve_output_is_flat_key_value(capsys):
    code, out, _ = run_cli(["solve", CONFIGS / "paper_asic.yaml"], capsys)
    assert code == 0
    for line in out.strip().splitlines():
        assert " = " in line


def test_simulate_clean(capsys):
    code, out, _ = run_cli(
        ["simulate", CONFIGS / "paper_asic.yaml", "--cycles", "500", "--seed", "3"],
        capsys)
    assert code == 0
    kv = parse_kv(out)
    assert kv["violations_total"] == "0"
    assert kv["cycles_completed"] == "500"


def test_simulate_gate_level(capsys):
    code, out, _ = run_cli(
        ["simulate", CONFIGS / "paper_asic.yaml", "--cycles", "200",
         "--fidelity", "gate_level"], capsys)
    assert code == 0
    kv = parse_kv(out)
    assert kv["engine"] == "reference"
    assert float(kv["fraction_time_md_m"]) > 0.0


def test_simulate_violations_exit_code(capsys):
    code, out, _ = run_cli(["simulate", CONFIGS / "adversarial_infeasible.yaml"], capsys)
    assert code == 3
    kv = parse_kv(out)
    assert int(kv["violations_total"]) >= 1


def test_simulate_trace_out(tmp_path, capsys):
    out_csv = tmp_path / "trace.csv"
    out_vcd = tmp_path / "trace.vcd"
    code, out, _ = run_cli(
        ["simulate", CONFIGS / "paper_asic.yaml", "--cycles", "100",
         "--trace-out", out_csv, "--vcd", out_vcd], capsys)
    assert code == 0
    assert out_csv.read_text().startswith("time_ps,clk_snd,clk_rcv")
    assert out_vcd.read_text().startswith("$timescale 1 fs $end")


def test_unknown_key_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("band_ghz: {slow: [2.0, 2.05], fast: [2.25, 2.3]}\nbogus_key: 1\n")
    code, _, err = run_cli(["solve", bad], capsys)
    assert code == 1
    assert "bogus_key" in err


def test_missing_band_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("t_osc_ps: 200.0\n")
    code, _, err = run_cli(["solve", bad], capsys)
    assert code == 1
    assert "band_ghz" in err


def test_malformed_yaml_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("band_ghz: [unclosed\n")
    code, _, err = run_cli(["solve", bad], capsys)
    assert code == 1


def test_defaulted_keys_notice(tmp_path, capsys):
    minimal = tmp_path / "m.yaml"
    minimal.write_text("band_ghz: {slow: [2.0, 2.05], fast: [2.25, 2.3]}\n")
    code, _, err = run_cli(["solve", minimal], capsys)
    assert code == 0
    assert "defaulted" in err


def test_sweep_empty_offsets(capsys):
    code, _, err = run_cli(
        ["sweep", CONFIGS / "paper_spice.yaml", "--offsets", ""], capsys)
    assert code == 1
    assert "offset" in err


def test_sweep_csv_output(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, text, _ = run_cli(
        ["sweep", CONFIGS / "paper_spice.yaml", "--offsets=-100,100",
         "--cycles", "6000", "--seed", "2", "--out", out], capsys)
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == ("offset_ps,stabilization_time_ns,final_gap_cycles,"
                        "violations,violations_post_stab,stabilized")
    assert len(lines) == 3
    assert lines[1].startswith("-100.000,")


def test_console_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "osclink.cli", "solve", str(CONFIGS / "paper_asic.yaml")],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "delta = 1" in proc.stdout

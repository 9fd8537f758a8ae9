"""Engine semantics: determinism, dual-path equivalence, exports, sweeps."""

import dataclasses
import filecmp

import numpy as np
import pytest

from osclink import engine
from osclink.analysis import LinkParams, RateBand
from osclink.engine import (
    Fidelity,
    SimConfig,
    Trace,
    export_trace_csv,
    export_trace_vcd,
    sweep_initial_offset,
    trace_columns,
)
from osclink.oscillator import UnlockedPolicy
from osclink.presets import (
    adversarial_infeasible_config,
    paper_asic_config,
    paper_spice_config,
)


def small_cfg(**overrides):
    cfg = paper_asic_config(seed=5, cycles=300)
    return dataclasses.replace(cfg, **overrides)


# -- determinism -------------------------------------------------------------

def test_same_seed_byte_identical_csv(tmp_path):
    cfg = small_cfg(trace_stride_ps=5.0)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_trace_csv(engine.run(cfg).trace, str(a))
    export_trace_csv(engine.run(cfg).trace, str(b))
    assert filecmp.cmp(a, b, shallow=False)
    assert a.read_bytes() != b"" and a.read_text().startswith("time_ps,")


def test_different_seeds_differ(tmp_path):
    cfg = small_cfg(trace_stride_ps=5.0)
    other = dataclasses.replace(cfg, seed=6)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_trace_csv(engine.run(cfg).trace, str(a))
    export_trace_csv(engine.run(other).trace, str(b))
    assert not filecmp.cmp(a, b, shallow=False)


# -- kernel / reference equivalence ------------------------------------------

@pytest.mark.parametrize("policy", list(UnlockedPolicy))
def test_kernel_matches_reference(policy):
    cfg = small_cfg(policy_snd=policy, policy_rcv=policy, trace_stride_ps=7.0,
                    duration_cycles=400)
    rk = engine.run(dataclasses.replace(cfg, engine_path="kernel"))
    rr = engine.run(dataclasses.replace(cfg, engine_path="reference"))
    assert rk.engine_used == "kernel" and rr.engine_used == "reference"
    assert rk.stats == rr.stats
    assert rk.counts == rr.counts
    assert [(v.kind, v.time_ps, v.cell) for v in rk.violations] == \
           [(v.kind, v.time_ps, v.cell) for v in rr.violations]
    assert np.array_equal(rk.trace.time_fs, rr.trace.time_fs)
    assert np.array_equal(rk.trace.c_s, rr.trace.c_s)
    assert np.array_equal(rk.trace.c_r, rr.trace.c_r)
    assert np.array_equal(rk.trace.md_rcv, rr.trace.md_rcv)
    assert np.array_equal(rk.trace.flags, rr.trace.flags)


def test_kernel_matches_reference_on_violating_run():
    cfg = adversarial_infeasible_config(seed=2, cycles=300)
    rk = engine.run(dataclasses.replace(cfg, engine_path="kernel"))
    rr = engine.run(dataclasses.replace(cfg, engine_path="reference"))
    assert rk.counts == rr.counts and rk.total_violations > 0
    assert [(v.kind, v.time_ps, v.cell) for v in rk.violations] == \
           [(v.kind, v.time_ps, v.cell) for v in rr.violations]


def test_kernel_matches_reference_collided_start():
    cfg = small_cfg(initial_offset_ps=30.0, gap_trace_stride_ps=8.0,
                    duration_cycles=2000)
    rk = engine.run(dataclasses.replace(cfg, engine_path="kernel"))
    rr = engine.run(dataclasses.replace(cfg, engine_path="reference"))
    assert rk.stats == rr.stats
    assert np.array_equal(rk.gap_trace.fill, rr.gap_trace.fill)


# -- fidelity equivalence -----------------------------------------------------

def test_gate_level_equals_behavioral_on_clean_run():
    cfg = small_cfg(duration_cycles=500, engine_path="reference")
    rb = engine.run(cfg)
    rg = engine.run(dataclasses.replace(cfg, fidelity=Fidelity.GATE_LEVEL))
    assert rb.total_violations == 0 and rg.total_violations == 0
    assert rb.stats == rg.stats


# -- behavior -----------------------------------------------------------------

def test_feasible_run_is_clean_all_policies():
    for policy in UnlockedPolicy:
        res = engine.run(small_cfg(policy_snd=policy, policy_rcv=policy))
        assert res.total_violations == 0, (policy, res.counts)


def test_infeasible_adversarial_violates_quickly():
    res = engine.run(adversarial_infeasible_config(seed=0, cycles=10_000))
    assert res.counts["P2_OVERFLOW"] + res.counts["P1_UNDERRUN"] >= 1
    assert res.stats.cycles_completed < 100


def test_monitors_disarmed_for_collided_start():
    cfg = small_cfg(initial_offset_ps=0.0)
    assert not cfg.contract_start()
    assert not cfg.monitors_armed()
    cfg = small_cfg()
    assert cfg.contract_start() and cfg.monitors_armed()


def test_contract_start_with_offset_phases():
    """Clocks may start anywhere in (-delta, 0] and stay armed and clean."""
    cfg = small_cfg(initial_c_snd_cycles=-0.05, initial_c_rcv_cycles=-0.02,
                    duration_cycles=500)
    assert cfg.monitors_armed()
    res = engine.run(cfg)
    assert res.total_violations == 0
    rr = engine.run(dataclasses.replace(cfg, engine_path="reference"))
    assert rr.stats == res.stats
    with pytest.raises(ValueError):
        small_cfg(initial_c_snd_cycles=-0.5).validate()  # outside (-delta, 0]
    with pytest.raises(ValueError):
        small_cfg(initial_c_rcv_cycles=0.2).validate()


def test_trace_times_strictly_increasing():
    res = engine.run(small_cfg(trace_stride_ps=5.0))
    assert np.all(np.diff(res.trace.time_fs) > 0)


def test_throughput_within_guarantees():
    res = engine.run(small_cfg(duration_cycles=2000))
    band = res.config.params.band
    thr = res.stats.measured_throughput_pkt_per_ns
    assert band.s_minus * 1000.0 - 0.05 <= thr <= band.f_plus * 1000.0 + 0.05


# -- exports -------------------------------------------------------------------

def test_csv_columns_exact(tmp_path):
    res = engine.run(small_cfg(trace_stride_ps=10.0))
    path = tmp_path / "t.csv"
    export_trace_csv(res.trace, str(path))
    header = path.read_text().splitlines()[0]
    assert header.split(",") == [
        "time_ps", "clk_snd", "clk_rcv", "c_s_cycles", "c_r_cycles",
        "md_snd", "md_rcv", "F_0", "F_1", "fill", "p_offset",
    ]
    assert header.split(",") == trace_columns(2)


def test_csv_ternary_encoding(tmp_path):
    res = engine.run(small_cfg(trace_stride_ps=5.0))
    path = tmp_path / "t.csv"
    export_trace_csv(res.trace, str(path))
    body = path.read_text().splitlines()[1:]
    md_vals = {line.split(",")[6] for line in body}
    assert md_vals <= {"0", "1", "x"} and "x" in md_vals


def test_empty_trace_header_only(tmp_path):
    empty = Trace(
        n=2,
        time_fs=np.array([], dtype=np.int64),
        clk_snd=np.array([], dtype=np.uint8),
        clk_rcv=np.array([], dtype=np.uint8),
        c_s=np.array([], dtype=np.float64),
        c_r=np.array([], dtype=np.float64),
        md_snd=np.array([], dtype=np.uint8),
        md_rcv=np.array([], dtype=np.uint8),
        flags=np.zeros((0, 2), dtype=np.uint8),
    )
    path = tmp_path / "empty.csv"
    export_trace_csv(empty, str(path))
    assert path.read_text() == ",".join(trace_columns(2)) + "\n"


def test_vcd_four_state(tmp_path):
    res = engine.run(small_cfg(trace_stride_ps=5.0))
    path = tmp_path / "t.vcd"
    export_trace_vcd(res.trace, str(path))
    text = path.read_text()
    assert text.startswith("$timescale 1 fs $end")
    assert "$var wire 1" in text and "$var real 64" in text
    assert "$dumpvars" in text
    # metastable mode signals appear as x
    assert any(line.startswith("x") for line in text.splitlines())


def test_export_trace_dispatch(tmp_path):
    res = engine.run(small_cfg(trace_stride_ps=10.0))
    engine.export_trace(res.trace, "CSV", str(tmp_path / "a.csv"))
    engine.export_trace(res.trace, "vcd", str(tmp_path / "a.vcd"))
    with pytest.raises(ValueError):
        engine.export_trace(res.trace, "hdf5", str(tmp_path / "a.h5"))


# -- step robustness -----------------------------------------------------------

def test_step_refinement_preserves_trajectory():
    cfg = small_cfg(duration_cycles=500)
    half = dataclasses.replace(cfg, step_ps=0.5)
    a, b = engine.run(cfg), engine.run(half)
    assert a.stats == b.stats
    assert a.counts == b.counts


def test_quantum_refinement_preserves_verdicts():
    cfg = small_cfg(duration_cycles=500)
    fine = dataclasses.replace(cfg, rate_quantum_ps=0.5, step_ps=0.5)
    a, b = engine.run(cfg), engine.run(fine)
    assert a.total_violations == 0 and b.total_violations == 0


# -- sweep ----------------------------------------------------------------------

def test_sweep_requires_offsets():
    with pytest.raises(ValueError):
        sweep_initial_offset(small_cfg(), [])


def test_sweep_rejects_huge_offset():
    with pytest.raises(ValueError):
        sweep_initial_offset(small_cfg(), [10_000.0])


def test_sweep_resolves_directionally():
    base = dataclasses.replace(paper_spice_config(seed=4, cycles=8000))
    pts = sweep_initial_offset(base, [-150.0, 150.0])
    for p in pts:
        assert p.stabilized
        assert p.violations_post_stab == 0
        assert abs(abs(p.final_gap_cycles) - 1.0) < 0.25
    assert pts[0].final_gap_cycles < 0 < pts[1].final_gap_cycles


# -- config validation -----------------------------------------------------------

def test_config_validation_errors():
    with pytest.raises(ValueError):
        small_cfg(duration_cycles=None, duration_ps=None).validate()
    with pytest.raises(ValueError):
        small_cfg(duration_ps=100.0).validate()  # both set
    with pytest.raises(ValueError):
        small_cfg(step_ps=2.0).validate()  # step > quantum
    with pytest.raises(ValueError):
        small_cfg(trace_stride_ps=1.5).validate()  # not a multiple
    params = LinkParams(band=RateBand.from_ghz(2.0, 2.05, 2.25, 2.3), tau_s_ps=450.0)
    with pytest.raises(ValueError):
        SimConfig(params=params).validate()  # tau exceeds a cycle
    with pytest.raises(ValueError):
        small_cfg(engine_path="bogus").validate()


def test_gate_fidelity_rejected_by_kernel():
    cfg = small_cfg(fidelity=Fidelity.GATE_LEVEL, engine_path="kernel")
    with pytest.raises(ValueError):
        engine.run(cfg)


def test_duration_in_ps():
    cfg = small_cfg(duration_cycles=None, duration_ps=10_000.0)
    res = engine.run(cfg)
    assert res.stats.duration_ns == pytest.approx(10.0)
    assert res.stats.cycles_completed == pytest.approx(21, abs=2)

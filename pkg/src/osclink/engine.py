"""Deterministic hybrid simulation engine for the tunable-clock link.

Time lives on an integer-femtosecond grid.  Both continuous clocks are
integrated with piecewise-constant rates redrawn on a fixed lattice (the
rate quantum, 1 ps by default), which makes every clock-edge time exactly
interpolable: the engine is event-exact, and the integration step only
bounds the granularity of monitor bookkeeping.  All scheduling is fully
ordered by (time, event-kind, domain), so two runs with the same config
and seed produce byte-identical exports.

Randomness: one PCG64 stream per oscillator, derived by spawning the run
seed, consumed one draw per rate refresh while the band is non-degenerate.

Rate-band changes caused by mode-signal events take effect at the next
rate-quantum boundary (at most one quantum late).  Widening is always
admissible; narrowing one quantum late models an oscillator whose
response time is longer by one quantum, which the conformance monitors
absorb with one quantum of detection grace.

The flag transition seen by the controller's sampling flip-flop settles
one setup window before the full access duration elapses: the access
duration is defined as the total window during which sampling is
vulnerable to that transition, so the flag-M interval plus the flip-flop
setup window compose to exactly it, and the hold-side margin comes from
the sampling clock's tuned phase shift.  The observer-facing flag (trace
exports, read_flag) stays pessimistic over the whole access window.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import oscillator as osc_mod
from .analysis import LinkParams, feasible_threshold_range
from .controller import ClockedTh, ClockedThGateN2
from .monitors import Monitor, RunStats, ViolationEvent
from .oscillator import OscillatorState, UnlockedPolicy
from .ringbuffer import BufferState, GateLevelCell
from .ternary import FlipFlop, TernaryValue, t_not

FS_PER_PS = 1000
_NEG_INF_FS = -(2**62)

# Deterministic processing order for simultaneous events.
EV_SND_RISE = 1
EV_RCV_FALL = 2
EV_RCV_RISE = 3
EV_RCV_SAMPLE = 4
EV_CTRL_OUT = 5


class Fidelity(enum.Enum):
    BEHAVIORAL = "behavioral"
    GATE_LEVEL = "gate_level"


TRACE_COLUMNS_FIXED = (
    "time_ps", "clk_snd", "clk_rcv", "c_s_cycles", "c_r_cycles", "md_snd", "md_rcv",
)


def trace_columns(n: int) -> List[str]:
    return list(TRACE_COLUMNS_FIXED) + [f"F_{i}" for i in range(n)] + ["fill", "p_offset"]


@dataclass(frozen=True)
class SimConfig:
    """Everything one run needs; two runs with equal configs and seeds are
    bit-identical.

    duration is given either in receiver cycles (completed reads) or in
    picoseconds.  initial_offset_ps switches the run into the
    initialization-slack mode: instead of the contractual start (both
    clocks at 0), the clocks begin pointer-collided,
    p_s(0) - p_r(0) = offset * nominal rate, which deliberately breaks the
    start contract; the contract monitors are disarmed and only buffer
    safety is tracked.

    step_ps is the engine bookkeeping step; rate_quantum_ps is the lattice
    on which oscillator rates refresh.  They are decoupled so that
    refining the step leaves trajectories bit-identical.
    """

    params: LinkParams
    seed: int = 0
    duration_cycles: Optional[int] = 10_000
    duration_ps: Optional[float] = None
    step_ps: float = 1.0
    rate_quantum_ps: float = 1.0
    policy_snd: UnlockedPolicy = UnlockedPolicy.UNIFORM_RANDOM
    policy_rcv: UnlockedPolicy = UnlockedPolicy.UNIFORM_RANDOM
    fidelity: Fidelity = Fidelity.BEHAVIORAL
    initial_offset_ps: Optional[float] = None
    initial_c_snd_cycles: float = 0.0
    initial_c_rcv_cycles: float = 0.0
    halt_on_violation: bool = False
    trace_stride_ps: float = 0.0
    gap_trace_stride_ps: float = 0.0
    stabilization_band_cycles: float = 0.25
    stabilization_window_cycles: int = 50
    ff_setup_ps: float = 30.0
    ff_hold_ps: float = 10.0
    engine_path: str = "auto"  # auto | kernel | reference

    def validate(self) -> None:
        p = self.params
        if (self.duration_cycles is None) == (self.duration_ps is None):
            raise ValueError("exactly one of duration_cycles / duration_ps required")
        if self.duration_cycles is not None and self.duration_cycles <= 0:
            raise ValueError("duration_cycles must be positive")
        if self.duration_ps is not None and self.duration_ps <= 0:
            raise ValueError("duration_ps must be positive")
        if self.step_ps <= 0 or self.rate_quantum_ps <= 0:
            raise ValueError("step and rate quantum must be positive")
        if self.step_ps > self.rate_quantum_ps:
            raise ValueError("step must not exceed the rate quantum")
        if self.engine_path not in ("auto", "kernel", "reference"):
            raise ValueError(f"unknown engine path {self.engine_path!r}")
        off = p.sample_offset_cycles
        if not (0.0 <= off < 0.5):
            raise ValueError(
                f"sampling offset f+ tau_s/2 = {off:.4f} cycles must lie in [0, 0.5)"
            )
        max_step_cycles = p.band.f_plus * self.rate_quantum_ps
        grid_gap = min(0.5 - off, off) if off > 0 else 0.5
        if max_step_cycles >= min(0.25, grid_gap):
            raise ValueError(
                "rate quantum too coarse: a clock may cross two edge grids in one step"
            )
        period_fast_ps = 1.0 / p.band.f_plus
        for name, tau in (("tau_s", p.tau_s_ps), ("tau_r", p.tau_r_ps), ("tau_max", p.tau_max_ps)):
            if tau >= period_fast_ps:
                raise ValueError(f"{name} must complete within one clock cycle")
        if 0.0 < p.tau_max_ps < self.rate_quantum_ps:
            raise ValueError("tau_max must be zero or at least one rate quantum")
        for name, stride in (("trace_stride_ps", self.trace_stride_ps),
                             ("gap_trace_stride_ps", self.gap_trace_stride_ps)):
            if stride:
                ratio = stride / self.rate_quantum_ps
                if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                    raise ValueError(f"{name} must be a positive multiple of the rate quantum")
        if self.initial_offset_ps is None:
            for name, c0 in (("initial_c_snd_cycles", self.initial_c_snd_cycles),
                             ("initial_c_rcv_cycles", self.initial_c_rcv_cycles)):
                if not (-p.delta_cycles < c0 <= 0.0) and c0 != 0.0:
                    raise ValueError(
                        f"{name} = {c0} outside the start contract (-delta, 0]")
        if self.duration_fs() > 2**62:
            raise ValueError("duration overflows the femtosecond timeline")

    # -- derived quantities -------------------------------------------------

    def quantum_fs(self) -> int:
        return int(round(self.rate_quantum_ps * FS_PER_PS))

    def nominal_rate(self) -> float:
        b = self.params.band
        return 0.5 * (b.s_minus + b.f_plus)

    def initial_clocks(self) -> Tuple[float, float]:
        """(c_s(0), c_r(0)); the slack sweep starts pointer-collided."""
        if self.initial_offset_ps is None:
            return self.initial_c_snd_cycles, self.initial_c_rcv_cycles
        half = self.params.n_cells / 2.0
        return -half + self.initial_offset_ps * self.nominal_rate(), 0.0

    def contract_start(self) -> bool:
        c_s0, c_r0 = self.initial_clocks()
        return abs(c_s0 - c_r0) <= max(self.params.delta_cycles, 0.0)

    def monitors_armed(self) -> bool:
        return (
            self.contract_start()
            and feasible_threshold_range(self.params, self.params.n_cells) is not None
        )

    def duration_fs(self) -> int:
        """Upper bound on simulated time, in fs."""
        if self.duration_ps is not None:
            return int(math.ceil(self.duration_ps * FS_PER_PS))
        # cycle-count runs stop on the read counter; cap generously
        worst_period_ps = 1.0 / self.params.band.s_minus
        return int(math.ceil((self.duration_cycles + 4) * worst_period_ps * 1.25 * FS_PER_PS))

    def duration_quanta(self) -> int:
        q = self.quantum_fs()
        return (self.duration_fs() + q - 1) // q

    def target_reads(self) -> int:
        return self.duration_cycles if self.duration_cycles is not None else 2**62

    def tau_eff_ps(self, tau_ps: float) -> float:
        """Flag transition duration as seen by the sampling flip-flop.

        The access duration is defined as the total window during which a
        latch is vulnerable to that cell's flag transition, so the
        transition time plus the flip-flop setup window compose to exactly
        the access duration: an access starting in (edge - tau, edge]
        corrupts the latch, one starting at or before edge - tau has
        settled with the full setup margin.  The hold-side margin is the
        sampling clock's phase shift being tuned for it, so transitions
        beginning after the edge do not corrupt.
        """
        return max(0.0, tau_ps - self.ff_setup_ps)


@dataclass
class Trace:
    """Sampled signal rows, one per stride interval."""

    n: int
    time_fs: np.ndarray
    clk_snd: np.ndarray
    clk_rcv: np.ndarray
    c_s: np.ndarray
    c_r: np.ndarray
    md_snd: np.ndarray
    md_rcv: np.ndarray
    flags: np.ndarray  # (rows, n) codes 0/1/2

    @property
    def columns(self) -> List[str]:
        return trace_columns(self.n)

    def __len__(self) -> int:
        return len(self.time_fs)

    def gap(self) -> np.ndarray:
        return self.c_s - self.c_r

    def as_object_array(self) -> np.ndarray:
        """Rows in export order with ternary codes as strings (for the
        trace-based statistics cross-check)."""
        code = np.array(["0", "1", "x"])
        rows = []
        fill = self.n / 2.0 + self.gap()
        for i in range(len(self)):
            row = [
                self.time_fs[i] / FS_PER_PS,
                int(self.clk_snd[i]), int(self.clk_rcv[i]),
                self.c_s[i], self.c_r[i],
                code[self.md_snd[i]], code[self.md_rcv[i]],
            ]
            row.extend(code[self.flags[i, j]] for j in range(self.n))
            row.extend([fill[i], self.c_s[i] - self.c_r[i]])
            rows.append(row)
        return np.array(rows, dtype=object)


@dataclass
class GapTrace:
    time_fs: np.ndarray
    fill: np.ndarray


@dataclass
class RunResult:
    config: SimConfig
    stats: RunStats
    violations: List[ViolationEvent]
    counts: Dict[str, int]
    last_violation_ps: float
    trace: Optional[Trace]
    gap_trace: Optional[GapTrace]
    engine_used: str

    @property
    def total_violations(self) -> int:
        return sum(self.counts.values())


# ---------------------------------------------------------------------------
# trace export

def _codes_to_chars(codes: np.ndarray) -> np.ndarray:
    return np.array(["0", "1", "x"], dtype="U1")[codes]


def export_trace_csv(trace: Trace, path: str) -> None:
    """Write the documented CSV: time_ps, clk_snd, clk_rcv, c_s_cycles,
    c_r_cycles, md_snd, md_rcv, F_0..F_{N-1}, fill, p_offset with ternary
    values encoded as 0/1/x."""
    n = trace.n
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(",".join(trace.columns) + "\n")
        md_s = _codes_to_chars(trace.md_snd)
        md_r = _codes_to_chars(trace.md_rcv)
        flag_chars = _codes_to_chars(trace.flags) if len(trace) else trace.flags
        for i in range(len(trace)):
            t_ps = trace.time_fs[i] / FS_PER_PS
            gap = trace.c_s[i] - trace.c_r[i]
            parts = [
                f"{t_ps:.3f}",
                str(int(trace.clk_snd[i])),
                str(int(trace.clk_rcv[i])),
                f"{trace.c_s[i]:.9f}",
                f"{trace.c_r[i]:.9f}",
                md_s[i],
                md_r[i],
            ]
            parts.extend(flag_chars[i, j] for j in range(n))
            parts.append(f"{n / 2.0 + gap:.9f}")
            parts.append(f"{gap:.9f}")
            f.write(",".join(parts) + "\n")


def export_trace_vcd(trace: Trace, path: str) -> None:
    """Write a four-state VCD (M encoded as x) plus real-valued clock and
    fill signals, on the femtosecond timescale."""
    n = trace.n
    wires = ["clk_snd", "clk_rcv", "md_snd", "md_rcv"] + [f"F_{i}" for i in range(n)]
    reals = ["c_s_cycles", "c_r_cycles", "fill", "p_offset"]
    ids = {}
    for i, name in enumerate(wires + reals):
        ids[name] = chr(33 + i)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("$timescale 1 fs $end\n")
        f.write("$scope module link $end\n")
        for name in wires:
            f.write(f"$var wire 1 {ids[name]} {name} $end\n")
        for name in reals:
            f.write(f"$var real 64 {ids[name]} {name} $end\n")
        f.write("$upscope $end\n$enddefinitions $end\n")

        def wire_vals(i: int) -> Dict[str, str]:
            vals = {
                "clk_snd": str(int(trace.clk_snd[i])),
                "clk_rcv": str(int(trace.clk_rcv[i])),
                "md_snd": "01x"[trace.md_snd[i]],
                "md_rcv": "01x"[trace.md_rcv[i]],
            }
            for j in range(n):
                vals[f"F_{j}"] = "01x"[trace.flags[i, j]]
            return vals

        def real_vals(i: int) -> Dict[str, float]:
            gap = trace.c_s[i] - trace.c_r[i]
            return {
                "c_s_cycles": trace.c_s[i],
                "c_r_cycles": trace.c_r[i],
                "fill": n / 2.0 + gap,
                "p_offset": gap,
            }

        prev_w: Dict[str, str] = {}
        prev_r: Dict[str, float] = {}
        for i in range(len(trace)):
            w = wire_vals(i)
            r = real_vals(i)
            changed_w = {k: v for k, v in w.items() if prev_w.get(k) != v}
            changed_r = {k: v for k, v in r.items() if prev_r.get(k) != v}
            if not changed_w and not changed_r and i:
                continue
            f.write(f"#{int(trace.time_fs[i])}\n")
            if i == 0:
                f.write("$dumpvars\n")
            for k, v in changed_w.items():
                f.write(f"{v}{ids[k]}\n")
            for k, v in changed_r.items():
                f.write(f"r{v:.9g} {ids[k]}\n")
            if i == 0:
                f.write("$end\n")
            prev_w, prev_r = w, r


def export_trace(trace: Trace, fmt: str, path: str) -> None:
    if fmt.lower() == "csv":
        export_trace_csv(trace, path)
    elif fmt.lower() == "vcd":
        export_trace_vcd(trace, path)
    else:
        raise ValueError(f"unknown trace format {fmt!r}")


# ---------------------------------------------------------------------------
# reference engine

def _clk_level(c: float) -> int:
    return 1 if (c - math.floor(c)) < 0.5 else 0


class _FlagSignals:
    """Per-cell flag transition windows as seen by the sampling flip-flop.

    Tracks, for each cell, the start of its most recent access, the time
    the flag signal settles (start + effective duration) and the levels
    before/after.  The full access window stays M for observers.
    """

    def __init__(self, n: int, tau_eff_s_fs: int, tau_eff_r_fs: int,
                 tau_full_s_fs: int, tau_full_r_fs: int) -> None:
        self.n = n
        self.tau_eff = {True: tau_eff_s_fs, False: tau_eff_r_fs}
        self.tau_full = {True: tau_full_s_fs, False: tau_full_r_fs}
        self.start_fs = [_NEG_INF_FS] * n
        self.settle_fs = [_NEG_INF_FS] * n
        self.full_until_fs = [_NEG_INF_FS] * n
        self.val_prev = [TernaryValue.ONE if i < n // 2 else TernaryValue.ZERO for i in range(n)]
        self.val_new = list(self.val_prev)

    def on_access(self, idx: int, t_fs: int, by_sender: bool) -> None:
        self.val_prev[idx] = self.val_new[idx]
        self.val_new[idx] = TernaryValue.ONE if by_sender else TernaryValue.ZERO
        self.start_fs[idx] = t_fs
        self.settle_fs[idx] = t_fs + self.tau_eff[by_sender]
        self.full_until_fs[idx] = t_fs + self.tau_full[by_sender]

    def sampled(self, idx: int, t_fs: int) -> Tuple[TernaryValue, Optional[float]]:
        """(level at t, last settle time in ps) for the flip-flop D input."""
        if t_fs < self.start_fs[idx]:
            return self.val_prev[idx], None
        if t_fs < self.settle_fs[idx]:
            return TernaryValue.M, None
        settle = self.settle_fs[idx]
        return self.val_new[idx], (settle / FS_PER_PS if settle > _NEG_INF_FS else None)

    def observer(self, idx: int, t_fs: int) -> TernaryValue:
        """Worst-case flag view: M for the entire access window."""
        if self.start_fs[idx] <= t_fs < self.full_until_fs[idx]:
            return TernaryValue.M
        return self.val_new[idx] if t_fs >= self.start_fs[idx] else self.val_prev[idx]


class _ReferenceEngine:
    """Straight-line per-quantum simulator built from the model modules.

    Used directly for gate-level fidelity and short behavioral runs, and
    as the semantics oracle for the accelerated kernel: both consume the
    same random streams in the same order and must produce identical
    trajectories and event sequences.
    """

    def __init__(self, cfg: SimConfig) -> None:
        cfg.validate()
        self.cfg = cfg
        p = cfg.params
        self.n = p.n_cells
        self.qfs = cfg.quantum_fs()
        self.qps = self.qfs / FS_PER_PS
        ss = np.random.SeedSequence(cfg.seed)
        child_s, child_r = ss.spawn(2)
        self.gen_s = np.random.Generator(np.random.PCG64(child_s))
        self.gen_r = np.random.Generator(np.random.PCG64(child_r))

        c_s0, c_r0 = cfg.initial_clocks()
        self.osc_s = OscillatorState(p.band, p.t_osc_ps, c=c_s0,
                                     unlocked_policy=cfg.policy_snd)
        self.osc_r = OscillatorState(p.band, p.t_osc_ps, c=c_r0,
                                     unlocked_policy=cfg.policy_rcv)

        self.buf = BufferState(self.n, p.tau_s_ps, p.tau_r_ps)
        self.flags = _FlagSignals(
            self.n,
            int(round(cfg.tau_eff_ps(p.tau_s_ps) * FS_PER_PS)),
            int(round(cfg.tau_eff_ps(p.tau_r_ps) * FS_PER_PS)),
            int(round(p.tau_s_ps * FS_PER_PS)),
            int(round(p.tau_r_ps * FS_PER_PS)),
        )
        self.gate_cells: Optional[List[GateLevelCell]] = None
        self.gate_ctrl: Optional[ClockedThGateN2] = None
        first_cell = int(math.floor(c_r0 + 0.5)) % self.n
        ff = FlipFlop(setup_ps=cfg.ff_setup_ps, hold_ps=cfg.ff_hold_ps)
        self.ctrl = ClockedTh(self.n, p.tau_max_ps, p.sample_offset_cycles, ffs=ff)
        self.ctrl.init_address(first_cell)
        if cfg.fidelity is Fidelity.GATE_LEVEL:
            tau_eff_s = cfg.tau_eff_ps(p.tau_s_ps)
            tau_eff_r = cfg.tau_eff_ps(p.tau_r_ps)
            cells = []
            for i in range(self.n):
                cell = (GateLevelCell.initially_full(tau_eff_s, tau_eff_r)
                        if i < self.n // 2 else GateLevelCell(tau_eff_s, tau_eff_r))
                cell.ff_snd = dataclasses.replace(
                    cell.ff_snd, setup_ps=cfg.ff_setup_ps, hold_ps=cfg.ff_hold_ps)
                cell.ff_rcv = dataclasses.replace(
                    cell.ff_rcv, setup_ps=cfg.ff_setup_ps, hold_ps=cfg.ff_hold_ps)
                cells.append(cell)
            self.gate_cells = cells
            if self.n == 2:
                self.gate_ctrl = ClockedThGateN2(
                    p.tau_max_ps, p.sample_offset_cycles,
                    ffs=FlipFlop(setup_ps=cfg.ff_setup_ps, hold_ps=cfg.ff_hold_ps))
                self.gate_ctrl.init_address(first_cell)

        self.monitor = Monitor(
            p,
            arm_contract_monitors=cfg.monitors_armed(),
            t_ctr_grace_ps=cfg.rate_quantum_ps,
            seed=cfg.seed,
        )
        # md is the receiver mode signal; the sender mode is its negation.
        self.md = TernaryValue.M
        self.md_since_fs = 0
        self.md_m_time_fs = 0
        self.pending: Optional[Tuple[int, int, TernaryValue, int]] = None
        # next crossing thresholds per grid
        off = p.sample_offset_cycles
        self.next_rise_s = math.floor(c_s0) + 1.0
        self.next_rise_r = math.floor(c_r0) + 1.0
        self.next_fall_r = math.floor(c_r0 - 0.5) + 1.5
        self.next_samp_r = math.floor(c_r0 - off) + 1.0 + off
        self.tau_max_fs = int(round(p.tau_max_ps * FS_PER_PS))

        self.reads = 0
        self.writes = 0
        self.last_snd_access_fs = [None] * self.n  # type: List[Optional[int]]
        gap0 = c_s0 - c_r0
        self.max_abs_gap = abs(gap0)
        self.gap_min = gap0
        self.gap_max = gap0
        self.gap_sum = 0.0
        self.gap_samples = 0
        self.latency_max_fs: Optional[int] = None

        self.trace_rows: List[Tuple] = []
        self.trace_stride_q = (int(round(cfg.trace_stride_ps / cfg.rate_quantum_ps))
                               if cfg.trace_stride_ps else 0)
        self.gap_stride_q = (int(round(cfg.gap_trace_stride_ps / cfg.rate_quantum_ps))
                             if cfg.gap_trace_stride_ps else 0)
        self.gap_trace: List[Tuple[int, float]] = []

    # -- helpers -------------------------------------------------------------

    def _buffer_hook(self, t_fs: int):
        def hook(kind: str, t_ps: float, cell: int, detail: str) -> None:
            self.monitor.record(kind, t_ps, cell, detail,
                                self.osc_s.c, self.osc_r.c, self.md.code)
        return hook

    def _set_md(self, value: TernaryValue, t_fs: int) -> None:
        if value is self.md:
            return
        if self.md is TernaryValue.M:
            self.md_m_time_fs += t_fs - self.md_since_fs
        self.md = value
        self.md_since_fs = t_fs
        t_ps = t_fs / FS_PER_PS
        self.osc_r.set_mode(value, t_ps)
        self.osc_s.set_mode(t_not(value), t_ps)

    def _flag_for_sample(self, idx: int, t_fs: int) -> Tuple[TernaryValue, Optional[float]]:
        if self.gate_cells is not None:
            t_ps = t_fs / FS_PER_PS
            value = self.gate_cells[idx].output(t_ps)
            settle = self.flags.settle_fs[idx]
            last = settle / FS_PER_PS if settle > _NEG_INF_FS else None
            return value, last
        return self.flags.sampled(idx, t_fs)

    # -- event handlers --------------------------------------------------------

    def _handle_sender_rise(self, k: int, t_fs: int) -> None:
        cell = (k + self.n // 2) % self.n
        t_ps = t_fs / FS_PER_PS
        self.buf.sender_access(cell, t_ps, self._buffer_hook(t_fs))
        self.flags.on_access(cell, t_fs, by_sender=True)
        if self.gate_cells is not None:
            self.gate_cells[cell].set_event(t_ps)
        self.monitor.on_access("sender", cell, t_ps)
        self.writes += 1
        self.last_snd_access_fs[cell] = t_fs

    def _handle_receiver_rise(self, k: int, t_fs: int) -> None:
        cell = k % self.n
        t_ps = t_fs / FS_PER_PS
        before = self.monitor.counts["P1_UNDERRUN"]
        self.buf.receiver_access(cell, t_ps, self._buffer_hook(t_fs))
        clean = self.monitor.counts["P1_UNDERRUN"] == before
        self.flags.on_access(cell, t_fs, by_sender=False)
        if self.gate_cells is not None:
            self.gate_cells[cell].reset_event(t_ps)
        self.monitor.on_access("receiver", cell, t_ps)
        self.reads += 1
        last_snd = self.last_snd_access_fs[cell]
        if clean and last_snd is not None:
            lat = t_fs - last_snd + int(round(self.cfg.params.tau_r_ps * FS_PER_PS))
            if self.latency_max_fs is None or lat > self.latency_max_fs:
                self.latency_max_fs = lat

    def _handle_fall(self, t_fs: int) -> None:
        self.ctrl.on_falling_edge()
        if self.gate_ctrl is not None:
            self.gate_ctrl.on_falling_edge(t_fs / FS_PER_PS)

    def _handle_sample(self, k: int, t_fs: int) -> None:
        cell = (k + self.n // 2) % self.n
        if self.ctrl.ffa_addr != cell:
            self.monitor.record(
                "INTERNAL", t_fs / FS_PER_PS, cell,
                f"sampling address {self.ctrl.ffa_addr} != expected {cell}",
                self.osc_s.c, self.osc_r.c, self.md.code)
        value, last_change = self._flag_for_sample(cell, t_fs)
        t_ps = t_fs / FS_PER_PS
        if self.gate_ctrl is not None:
            f0, l0 = self._flag_for_sample(0, t_fs)
            f1, l1 = self._flag_for_sample(1, t_fs)
            latched = self.gate_ctrl.on_sample(f0, f1, last_change, t_ps)
            self.ctrl.on_sample(value, last_change, t_ps)  # keep shadows aligned
            if latched is not self.ctrl.ffs.stored:
                self.monitor.record(
                    "INTERNAL", t_ps, cell,
                    f"gate controller latched {latched.code} vs behavioral "
                    f"{self.ctrl.ffs.stored.code}",
                    self.osc_s.c, self.osc_r.c, self.md.code)
        else:
            latched = self.ctrl.on_sample(value, last_change, t_ps)
        if self.tau_max_fs == 0:
            self._set_md(latched, t_fs)
            self.pending = None
            return
        if latched is not self.md:
            self._set_md(TernaryValue.M, t_fs)
        self.pending = (t_fs, t_fs + self.tau_max_fs, latched, cell)

    def _handle_ctrl_out(self, t_fs: int) -> None:
        assert self.pending is not None
        _, _, value, _ = self.pending
        self.pending = None
        self._set_md(value, t_fs)

    # -- main loop ---------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        qfs, qps = self.qfs, self.qps
        cap_q = cfg.duration_quanta()
        target = cfg.target_reads()
        halt = cfg.halt_on_violation

        # accesses exactly at t = 0 (clocks starting on the edge grid)
        if self.osc_s.c == self.next_rise_s - 1.0:
            self._handle_sender_rise(int(round(self.next_rise_s)) - 1, 0)
        if self.osc_r.c == self.next_rise_r - 1.0:
            self._handle_receiver_rise(int(round(self.next_rise_r)) - 1, 0)
        self._emit_trace_row(0)
        self._emit_gap_sample(0)

        q = 0
        end_fs = 0
        while q < cap_q and self.reads < target:
            t0_fs = q * qfs
            t1_fs = t0_fs + qfs
            t0_ps = t0_fs / FS_PER_PS
            cs0, cr0 = self.osc_s.c, self.osc_r.c
            gap0 = cs0 - cr0
            osc_mod.advance(self.osc_s, qps, self.gen_s, t0_ps, gap0, tie_high=True)
            osc_mod.advance(self.osc_r, qps, self.gen_r, t0_ps, -gap0, tie_high=False)
            cs1, cr1 = self.osc_s.c, self.osc_r.c

            events: List[Tuple[int, int, int]] = []
            if cs1 >= self.next_rise_s:
                frac = (self.next_rise_s - cs0) / (cs1 - cs0)
                events.append((t0_fs + int(round(qfs * frac)), EV_SND_RISE,
                               int(round(self.next_rise_s))))
            if cr1 >= self.next_fall_r:
                frac = (self.next_fall_r - cr0) / (cr1 - cr0)
                events.append((t0_fs + int(round(qfs * frac)), EV_RCV_FALL, 0))
            if cr1 >= self.next_rise_r:
                frac = (self.next_rise_r - cr0) / (cr1 - cr0)
                events.append((t0_fs + int(round(qfs * frac)), EV_RCV_RISE,
                               int(round(self.next_rise_r))))
            if cr1 >= self.next_samp_r:
                frac = (self.next_samp_r - cr0) / (cr1 - cr0)
                k = int(round(self.next_samp_r - self.cfg.params.sample_offset_cycles))
                events.append((t0_fs + int(round(qfs * frac)), EV_RCV_SAMPLE, k))
            if self.pending is not None and t0_fs < self.pending[1] <= t1_fs:
                events.append((self.pending[1], EV_CTRL_OUT, 0))
            events.sort(key=lambda e: (e[0], e[1]))

            for t_fs, kind, payload in events:
                if kind == EV_SND_RISE:
                    self._handle_sender_rise(payload, t_fs)
                    self.next_rise_s += 1.0
                elif kind == EV_RCV_FALL:
                    self._handle_fall(t_fs)
                    self.next_fall_r += 1.0
                elif kind == EV_RCV_RISE:
                    self._handle_receiver_rise(payload, t_fs)
                    self.next_rise_r += 1.0
                elif kind == EV_RCV_SAMPLE:
                    self._handle_sample(payload, t_fs)
                    self.next_samp_r += 1.0
                else:
                    self._handle_ctrl_out(t_fs)

            gap1 = cs1 - cr1
            t1_ps = t1_fs / FS_PER_PS
            self.monitor.check_lemma1(cs1, cr1, t1_ps)
            self.monitor.observe_segment(t0_ps, t1_ps, gap0, gap1, self.md)
            a = abs(gap1)
            if a > self.max_abs_gap:
                self.max_abs_gap = a
            if gap1 < self.gap_min:
                self.gap_min = gap1
            elif gap1 > self.gap_max:
                self.gap_max = gap1
            self.gap_sum += gap1
            self.gap_samples += 1
            q += 1
            end_fs = t1_fs
            if self.trace_stride_q and q % self.trace_stride_q == 0:
                self._emit_trace_row(t1_fs)
            if self.gap_stride_q and q % self.gap_stride_q == 0:
                self._emit_gap_sample(t1_fs)
            if halt and self.monitor.total > 0:
                break

        return self._finalize(end_fs)

    # -- output ----------------------------------------------------------------

    def _emit_trace_row(self, t_fs: int) -> None:
        if not self.trace_stride_q:
            return
        md_r = self.md
        md_s = t_not(md_r)
        flags = [self.flags.observer(i, t_fs).value for i in range(self.n)]
        self.trace_rows.append((
            t_fs, _clk_level(self.osc_s.c), _clk_level(self.osc_r.c),
            self.osc_s.c, self.osc_r.c, md_s.value, md_r.value, tuple(flags),
        ))

    def _emit_gap_sample(self, t_fs: int) -> None:
        if self.gap_stride_q:
            self.gap_trace.append((t_fs, self.n // 2 + (self.osc_s.c - self.osc_r.c)))

    def _finalize(self, end_fs: int) -> RunResult:
        if self.md is TernaryValue.M:
            self.md_m_time_fs += end_fs - self.md_since_fs
        duration_ns = end_fs / FS_PER_PS / 1000.0
        c_s0, c_r0 = self.cfg.initial_clocks()
        avg_freq = (((self.osc_s.c - c_s0) + (self.osc_r.c - c_r0)) / 2.0 / duration_ns
                    if duration_ns > 0 else math.nan)
        mean_gap = self.gap_sum / self.gap_samples if self.gap_samples else 0.0
        half = self.n / 2.0
        stats = RunStats(
            duration_ns=duration_ns,
            cycles_completed=self.reads,
            sender_writes=self.writes,
            fraction_time_md_m=self.md_m_time_fs / end_fs if end_fs else 0.0,
            max_abs_clock_diff=self.max_abs_gap,
            measured_throughput_pkt_per_ns=self.reads / duration_ns if duration_ns else 0.0,
            measured_latency_max_ns=(self.latency_max_fs / FS_PER_PS / 1000.0
                                     if self.latency_max_fs is not None else None),
            avg_frequency_ghz=avg_freq,
            fill_min=half + self.gap_min,
            fill_max=half + self.gap_max,
            fill_mean=half + mean_gap,
            fill_final=half + (self.osc_s.c - self.osc_r.c),
        )
        trace = self._build_trace() if self.trace_rows else None
        gap_trace = None
        if self.gap_trace:
            arr = np.array(self.gap_trace, dtype=float)
            gap_trace = GapTrace(arr[:, 0].astype(np.int64), arr[:, 1])
        return RunResult(
            config=self.cfg,
            stats=stats,
            violations=self.monitor.violations,
            counts=dict(self.monitor.counts),
            last_violation_ps=self.monitor.last_violation_ps,
            trace=trace,
            gap_trace=gap_trace,
            engine_used="reference",
        )

    def _build_trace(self) -> Trace:
        rows = self.trace_rows
        m = len(rows)
        n = self.n
        tr = Trace(
            n=n,
            time_fs=np.array([r[0] for r in rows], dtype=np.int64),
            clk_snd=np.array([r[1] for r in rows], dtype=np.uint8),
            clk_rcv=np.array([r[2] for r in rows], dtype=np.uint8),
            c_s=np.array([r[3] for r in rows], dtype=np.float64),
            c_r=np.array([r[4] for r in rows], dtype=np.float64),
            md_snd=np.array([r[5] for r in rows], dtype=np.uint8),
            md_rcv=np.array([r[6] for r in rows], dtype=np.uint8),
            flags=np.array([r[7] for r in rows], dtype=np.uint8).reshape(m, n),
        )
        return tr


# ---------------------------------------------------------------------------
# public entry points

def run(config: SimConfig) -> RunResult:
    """Execute one simulation run, dispatching to the accelerated kernel
    for behavioral fidelity when available."""
    config.validate()
    path = config.engine_path
    if path == "auto":
        path = "kernel" if config.fidelity is Fidelity.BEHAVIORAL else "reference"
    if path == "kernel":
        if config.fidelity is not Fidelity.BEHAVIORAL:
            raise ValueError("the accelerated kernel only implements behavioral fidelity")
        from . import _kernel
        return _kernel.run_kernel(config)
    return _ReferenceEngine(config).run()


@dataclass(frozen=True)
class SweepPoint:
    offset_ps: float
    stabilized: bool
    stabilization_time_ns: Optional[float]
    final_gap_cycles: Optional[float]
    violations_total: int
    violations_post_stab: int
    seed: int
    gap_trace: Optional[GapTrace] = None


def stabilization_analysis(
    result: RunResult,
    band_cycles: float,
    window_cycles: int,
) -> Tuple[bool, Optional[float], Optional[float], int]:
    """(stabilized, stabilization_time_ns, settled pointer gap, post-stab
    violations) from a run's fill samples.

    The settled value is the mean fill over the trailing window; the
    stabilization time is the start of the longest suffix that stays
    within +-band of it, required to span at least window_cycles receiver
    cycles.  Reported gap is the settled pointer separation p_s - p_r.
    """
    gt = result.gap_trace
    if gt is None or len(gt.fill) < 4:
        raise ValueError("run has no fill samples; set gap_trace_stride_ps")
    fill = gt.fill
    t_fs = gt.time_fs
    period_ps = 1.0 / result.config.params.band.s_minus
    window_fs = int(window_cycles * period_ps * FS_PER_PS)
    tail = t_fs >= t_fs[-1] - window_fs
    settled = float(np.mean(fill[tail]))
    ok = np.abs(fill - settled) <= band_cycles
    # longest true suffix
    bad = np.flatnonzero(~ok)
    start_idx = 0 if len(bad) == 0 else int(bad[-1]) + 1
    if start_idx >= len(fill):
        return False, None, settled, 0
    stab_fs = int(t_fs[start_idx])
    if t_fs[-1] - stab_fs < window_fs:
        return False, None, settled, 0
    stab_ps = stab_fs / FS_PER_PS
    post = sum(1 for v in result.violations if v.time_ps > stab_ps)
    if result.total_violations > len(result.violations):
        # records were capped: fall back to the last-violation timestamp
        post = max(post, 1 if result.last_violation_ps > stab_ps else 0)
    return True, stab_ps / 1000.0, settled, post


def sweep_initial_offset(base: SimConfig, offsets_ps: Sequence[float]) -> List[SweepPoint]:
    """Run the initialization-slack sweep: one pointer-collided run per
    offset, reporting stabilization time and resolution direction."""
    if len(offsets_ps) == 0:
        raise ValueError("offset list must not be empty")
    period_ps = 1.0 / base.params.band.s_minus
    points: List[SweepPoint] = []
    for off in offsets_ps:
        if abs(off) > period_ps:
            raise ValueError(f"offset {off} ps exceeds one clock period ({period_ps:.1f} ps)")
        cfg = dataclasses.replace(
            base,
            initial_offset_ps=float(off),
            gap_trace_stride_ps=base.gap_trace_stride_ps or 8.0 * base.rate_quantum_ps,
        )
        res = run(cfg)
        stabilized, stab_ns, settled_fill, post = stabilization_analysis(
            res, cfg.stabilization_band_cycles, cfg.stabilization_window_cycles
        )
        final_gap = settled_fill  # settled p_s - p_r, in cells/cycles
        points.append(SweepPoint(
            offset_ps=float(off),
            stabilized=stabilized,
            stabilization_time_ns=stab_ns,
            final_gap_cycles=final_gap if stabilized else None,
            violations_total=res.total_violations,
            violations_post_stab=post,
            seed=cfg.seed,
            gap_trace=res.gap_trace,
        ))
    return points


def export_sweep_curves_csv(points: Sequence[SweepPoint], path: str) -> None:
    """Long-format pointer-separation curves, one block per offset:
    offset_ps, time_ps, pointer_gap with pointer_gap = p_s - p_r."""
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("offset_ps,time_ps,pointer_gap\n")
        for p in points:
            if p.gap_trace is None:
                continue
            for t_fs, fill in zip(p.gap_trace.time_fs, p.gap_trace.fill):
                f.write(f"{p.offset_ps:.3f},{t_fs / FS_PER_PS:.3f},{fill:.9f}\n")

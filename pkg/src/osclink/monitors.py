"""Runtime assertion suite for the proven link properties.

Monitors observe the simulation continuously (piecewise-linearly between
rate-refresh quanta) and record violations instead of aborting, so both
positive runs (no events expected) and adversarial runs (events expected)
can be analyzed after the fact.

The divergence-bound and output-forcing monitors are armed only when
their preconditions hold: the configured parameters must admit a feasible
threshold and the clocks must start within the initial-offset contract.
Runs started deliberately outside that contract (initialization-slack
sweeps) still track underruns and overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .analysis import LinkParams
from .ternary import TernaryValue

VIOLATION_KINDS = (
    "P1_UNDERRUN",
    "P2_OVERFLOW",
    "LEMMA1_BOUND",
    "SEPARATION",
    "L1_CONFORMANCE",
    "INTERNAL",
)

KIND_CODES = {name: i for i, name in enumerate(VIOLATION_KINDS)}

# Accesses land on the integer-femtosecond grid, so interpolated times can
# be off by one unit on each side of a separation measurement.
SEPARATION_SLACK_FS = 2


@dataclass(frozen=True)
class ViolationEvent:
    """One recorded property violation with reproduction context."""

    kind: str
    time_ps: float
    cell: Optional[int]
    detail: str
    c_s: float = math.nan
    c_r: float = math.nan
    md_rcv: str = "?"
    seed: Optional[int] = None

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        where = f" cell={self.cell}" if self.cell is not None else ""
        return f"[{self.kind}] t={self.time_ps:.3f}ps{where} {self.detail}"


@dataclass(frozen=True)
class RunStats:
    """Aggregate observables of one completed run."""

    duration_ns: float
    cycles_completed: int
    sender_writes: int
    fraction_time_md_m: float
    max_abs_clock_diff: float
    measured_throughput_pkt_per_ns: float
    measured_latency_max_ns: Optional[float]
    avg_frequency_ghz: float
    fill_min: float
    fill_max: float
    fill_mean: float
    fill_final: float


def fill_level(c_s: float, c_r: float, n: int) -> float:
    """Buffer fill: sender pointer minus receiver pointer, which by the
    pointer definitions equals n/2 + (c_s - c_r)."""
    return n / 2.0 + (c_s - c_r)


def lemma1_bound_cycles(params: LinkParams) -> float:
    """Proven divergence bound on |c_s - c_r| under a feasible threshold."""
    return params.n_cells / 2.0 - params.band.f_plus * params.tau_access_max_ps


class Monitor:
    """Synchronous observer for one reference-engine run.

    The engine feeds it piecewise-linear clock segments (constant mode
    outputs within a segment) plus discrete access events; it maintains
    the trailing-window state for the output-forcing check and the
    separation bookkeeping per cell.
    """

    def __init__(
        self,
        params: LinkParams,
        *,
        arm_contract_monitors: bool,
        t_ctr_grace_ps: float,
        seed: Optional[int] = None,
        max_records: int = 65536,
    ) -> None:
        self.params = params
        self.armed = arm_contract_monitors
        self.seed = seed
        self.max_records = max_records
        self.violations: List[ViolationEvent] = []
        self.counts: Dict[str, int] = {k: 0 for k in VIOLATION_KINDS}
        self.last_violation_ps: float = -math.inf
        self.p1p2_clean = True

        self.threshold = params.sample_offset_cycles
        self.bound = lemma1_bound_cycles(params)
        self.t_ctr_ps = params.t_ctr_ps + t_ctr_grace_ps
        self.max_tau_ps = params.tau_access_max_ps
        # last time each forcing condition was observed false
        self._fail_plus_ps = 0.0
        self._fail_minus_ps = 0.0
        self._last_access: Dict[Tuple[int, str], float] = {}

    # -- recording ---------------------------------------------------------

    def record(
        self,
        kind: str,
        t_ps: float,
        cell: Optional[int],
        detail: str,
        c_s: float = math.nan,
        c_r: float = math.nan,
        md_rcv: str = "?",
    ) -> None:
        if kind not in KIND_CODES:
            raise ValueError(f"unknown violation kind {kind!r}")
        self.counts[kind] += 1
        self.last_violation_ps = max(self.last_violation_ps, t_ps)
        if kind in ("P1_UNDERRUN", "P2_OVERFLOW"):
            self.p1p2_clean = False
        if len(self.violations) < self.max_records:
            self.violations.append(
                ViolationEvent(kind, t_ps, cell, detail, c_s, c_r, md_rcv, self.seed)
            )

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    # -- access bookkeeping (underrun/overflow come from the buffer hook) --

    def on_access(self, party: str, cell: int, t_ps: float) -> None:
        other = "receiver" if party == "sender" else "sender"
        prev = self._last_access.get((cell, other))
        if prev is not None and self.armed and self.p1p2_clean:
            sep = t_ps - prev
            if sep < self.max_tau_ps - SEPARATION_SLACK_FS * 1e-3:
                self.record(
                    "SEPARATION", t_ps, cell,
                    f"{party} followed {other} after {sep:.3f}ps < {self.max_tau_ps}ps",
                )
        self._last_access[(cell, party)] = t_ps

    # -- continuous checks -------------------------------------------------

    def check_lemma1(self, c_s: float, c_r: float, t_ps: float) -> None:
        """Divergence bound |c_s - c_r| <= n/2 - f+ max(tau_s, tau_r);
        claimed only for feasible parameters under the start contract."""
        if not self.armed:
            return
        gap = c_s - c_r
        if abs(gap) > self.bound:
            self.record(
                "LEMMA1_BOUND", t_ps, None,
                f"|c_s - c_r| = {abs(gap):.6f} > {self.bound:.6f}",
                c_s, c_r,
            )

    def observe_segment(
        self,
        t0_ps: float,
        t1_ps: float,
        gap0: float,
        gap1: float,
        md_rcv: TernaryValue,
    ) -> None:
        """Advance the output-forcing state over one linear gap segment.

        The mode outputs must be constant over the segment (the engine
        breaks segments at every output change).  Whenever one forcing
        condition has held continuously for the controller reaction time
        (plus one integration step of detection grace), the outputs must
        equal the forced pair.
        """
        if not self.armed:
            return
        th = self.threshold
        self._fail_plus_ps = _update_fail_time(
            self._fail_plus_ps, t0_ps, t1_ps, gap0, gap1, th
        )
        self._fail_minus_ps = _update_fail_time(
            self._fail_minus_ps, t0_ps, t1_ps, -gap0, -gap1, th
        )
        if not self.p1p2_clean:
            return
        if t1_ps - self._fail_plus_ps >= self.t_ctr_ps and md_rcv is not TernaryValue.ONE:
            self.record(
                "L1_CONFORMANCE", t1_ps, None,
                f"c_s - c_r >= {th:.6f} held for {t1_ps - self._fail_plus_ps:.1f}ps "
                f"but md_rcv={md_rcv.code}",
                md_rcv=md_rcv.code,
            )
        if t1_ps - self._fail_minus_ps >= self.t_ctr_ps and md_rcv is not TernaryValue.ZERO:
            self.record(
                "L1_CONFORMANCE", t1_ps, None,
                f"c_r - c_s >= {th:.6f} held for {t1_ps - self._fail_minus_ps:.1f}ps "
                f"but md_rcv={md_rcv.code}",
                md_rcv=md_rcv.code,
            )


def _update_fail_time(
    fail_ps: float, t0: float, t1: float, g0: float, g1: float, th: float
) -> float:
    """Latest time the condition g(t) >= th was false, given g linear on
    [t0, t1]; crossing instants are interpolated exactly."""
    ok0 = g0 >= th
    ok1 = g1 >= th
    if ok0 and ok1:
        return fail_ps
    if not ok1:
        return t1
    # false at t0, true at t1: condition became true at the crossing
    frac = (th - g0) / (g1 - g0)
    return t0 + frac * (t1 - t0)


def check_fill_identity(p_s: float, p_r: float, c_s: float, c_r: float, n: int) -> bool:
    """The fill level definition ties pointers to clocks exactly."""
    return (p_s - p_r) == (n / 2.0 + c_s - c_r)


def collect_stats(trace: "np.ndarray", params: LinkParams, column_names: List[str]) -> RunStats:
    """Recompute the trace-derivable statistics from an exported trace.

    Used as an independent cross-check of the engine's incremental
    accumulator.  Latency needs exact access times, which a strided trace
    does not carry, so it is reported as None here.
    """
    cols = {name: i for i, name in enumerate(column_names)}
    t_ps = trace[:, cols["time_ps"]].astype(float)
    if len(t_ps) < 2:
        raise ValueError("trace too short for statistics")
    c_s = trace[:, cols["c_s_cycles"]].astype(float)
    c_r = trace[:, cols["c_r_cycles"]].astype(float)
    fill = trace[:, cols["fill"]].astype(float)
    md = trace[:, cols["md_rcv"]]
    duration_ns = (t_ps[-1] - t_ps[0]) / 1000.0

    clk_r = trace[:, cols["clk_rcv"]].astype(int)
    rising = int(np.sum((clk_r[1:] == 1) & (clk_r[:-1] == 0)))

    md_m = np.asarray([v == "x" for v in md])
    # rows are evenly strided: time-weight by row count
    frac_m = float(np.mean(md_m[:-1]))

    avg_freq = float(((c_s[-1] - c_s[0]) + (c_r[-1] - c_r[0])) / 2.0 / duration_ns)
    return RunStats(
        duration_ns=duration_ns,
        cycles_completed=rising,
        sender_writes=-1,
        fraction_time_md_m=frac_m,
        max_abs_clock_diff=float(np.max(np.abs(c_s - c_r))),
        measured_throughput_pkt_per_ns=rising / duration_ns,
        measured_latency_max_ns=None,
        avg_frequency_ghz=avg_freq,
        fill_min=float(np.min(fill)),
        fill_max=float(np.max(fill)),
        fill_mean=float(np.mean(fill)),
        fill_final=float(fill[-1]),
    )

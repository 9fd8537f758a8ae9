"""Accelerated behavioral-fidelity simulation kernel.

A single jitted loop that replicates the reference engine step for step:
same per-oscillator PCG64 streams, same draw conditions, same float
expressions in the same order, so both paths produce bit-identical
trajectories and event sequences.  The reference engine in engine.py is
the readable specification of these semantics; this module is its
hot-path twin for million-cycle runs, and the equivalence is enforced by
tests rather than assumed.

Scalar run state lives in two small arrays (int64 / float64 slots) so the
event handlers can be expressed as closures without unsupported nonlocal
rebinding.
"""

from __future__ import annotations

import math
from typing import List

import numpy as np
from numba import njit

from .analysis import LinkParams
from .engine import (
    EV_CTRL_OUT,
    EV_RCV_FALL,
    EV_RCV_RISE,
    EV_RCV_SAMPLE,
    EV_SND_RISE,
    FS_PER_PS,
    Fidelity,
    GapTrace,
    RunResult,
    SimConfig,
    Trace,
)
from .monitors import VIOLATION_KINDS, RunStats, ViolationEvent
from .oscillator import UnlockedPolicy

_NEG = -(2**62)

_POLICY_CODE = {
    UnlockedPolicy.UNIFORM_RANDOM: 0,
    UnlockedPolicy.MAX_RATE: 1,
    UnlockedPolicy.MIN_RATE: 2,
    UnlockedPolicy.ADVERSARIAL_TOWARD_PEER: 3,
}

_KIND_P1 = 0
_KIND_P2 = 1
_KIND_LEMMA1 = 2
_KIND_SEPARATION = 3
_KIND_L1 = 4
_KIND_INTERNAL = 5

MAX_RECORDS = 65536

# int64 state slots
I_MD = 0
I_MD_SINCE = 1
I_MD_M_TIME = 2
I_FFA = 3
I_PENDING = 4
I_PEND_OUT = 5
I_PEND_VAL = 6
I_READS = 7
I_WRITES = 8
I_LATENCY = 9
I_NVIOL = 10
I_NTR = 11
I_NGAP = 12
I_CLEAN = 13
I_GAPSAMP = 14
I_MODE_S = 15
I_MODE_R = 16
I_STATE = 17

# float64 state slots
F_CS = 0
F_CR = 1
F_SINCE_S = 2
F_SINCE_R = 3
F_RISE_S = 4
F_RISE_R = 5
F_FALL_R = 6
F_SAMP_R = 7
F_FAIL_P = 8
F_FAIL_M = 9
F_GMIN = 10
F_GMAX = 11
F_GABS = 12
F_GSUM = 13
F_STATE = 14


@njit(cache=True)
def _pick_rate(gen, mode, since_ps, t0_ps, t_osc_ps,
               s_lo, s_hi, f_lo, f_hi, policy, gap_to_peer, tie_high):
    """Mirror of oscillator.advance()'s rate selection; since_ps = nan
    marks the pre-start mode history."""
    unlocked = True
    if mode != 2:
        if since_ps != since_ps or t0_ps - since_ps >= t_osc_ps:
            unlocked = False
    if not unlocked:
        if mode == 0:
            lo, hi = s_lo, s_hi
        else:
            lo, hi = f_lo, f_hi
        uniform = True
    else:
        lo, hi = s_lo, f_hi
        if policy == 0:
            uniform = True
        elif policy == 1:
            lo = hi
            uniform = False
        elif policy == 2:
            hi = lo
            uniform = False
        else:
            ahead = tie_high if gap_to_peer == 0.0 else gap_to_peer > 0.0
            if ahead:
                lo = hi
            else:
                hi = lo
            uniform = False
    if uniform and hi > lo:
        return lo + (hi - lo) * gen.random()
    return lo


@njit(cache=True)
def _simulate(  # noqa: C901 - deliberately one flat state machine
    gen_s, gen_r,
    n, qfs, qps, cap_q, target_reads,
    s_lo, s_hi, f_lo, f_hi,
    policy_s, policy_r,
    t_osc_ps,
    tau_s_fs, tau_r_fs, tau_eff_s_fs, tau_eff_r_fs, tau_max_fs,
    setup_ps, hold_ps,
    off_cycles,
    armed, l1_threshold, lemma1_bound, t_ctr_ps, max_tau_ps,
    halt_on_violation,
    trace_stride_q, gap_stride_q,
    # state slots
    I, F,
    # outputs
    viol_kind, viol_t_ps, viol_cell, viol_cs, viol_cr, viol_md, counts,
    tr_time, tr_clk_s, tr_clk_r, tr_cs, tr_cr, tr_mds, tr_mdr, tr_flags,
    gap_t, gap_fill,
    # per-cell scratch
    validity, pend_validity, busy_since, busy_until, last_party,
    sig_start, sig_settle, sig_full, sig_prev, sig_new,
    last_acc_s, last_acc_r, last_snd,
):
    half = n // 2

    def record(kind, t_ps, cell):
        counts[kind] += 1
        if kind <= _KIND_P2:
            I[I_CLEAN] = 0
        k = I[I_NVIOL]
        if k < viol_kind.shape[0]:
            viol_kind[k] = kind
            viol_t_ps[k] = t_ps
            viol_cell[k] = cell
            viol_cs[k] = F[F_CS]
            viol_cr[k] = F[F_CR]
            viol_md[k] = I[I_MD]
            I[I_NVIOL] = k + 1

    def set_md(value, t_fs):
        if value == I[I_MD]:
            return
        if I[I_MD] == 2:
            I[I_MD_M_TIME] += t_fs - I[I_MD_SINCE]
        I[I_MD] = value
        I[I_MD_SINCE] = t_fs
        t_ps = t_fs / FS_PER_PS
        if value != I[I_MODE_R]:
            I[I_MODE_R] = value
            F[F_SINCE_R] = t_ps
        inv = value if value == 2 else 1 - value
        if inv != I[I_MODE_S]:
            I[I_MODE_S] = inv
            F[F_SINCE_S] = t_ps

    def access(cell, t_fs, by_sender):
        t_ps = t_fs / FS_PER_PS
        if pend_validity[cell] >= 0 and t_fs >= busy_until[cell]:
            validity[cell] = pend_validity[cell]
            pend_validity[cell] = -1
        party = 1 if by_sender else 2
        if busy_since[cell] <= t_fs < busy_until[cell]:
            record(_KIND_INTERNAL if last_party[cell] == party else _KIND_SEPARATION,
                   t_ps, cell)
        new_valid = 1 if by_sender else 0
        cur_valid = validity[cell]
        if pend_validity[cell] >= 0 and t_fs >= busy_until[cell]:
            cur_valid = pend_validity[cell]
        if cur_valid == new_valid:
            record(_KIND_P2 if by_sender else _KIND_P1, t_ps, cell)
        tau = tau_s_fs if by_sender else tau_r_fs
        busy_since[cell] = t_fs
        busy_until[cell] = t_fs + tau
        last_party[cell] = party
        if tau == 0:
            validity[cell] = new_valid
            pend_validity[cell] = -1
        else:
            pend_validity[cell] = new_valid
        sig_prev[cell] = sig_new[cell]
        sig_new[cell] = new_valid
        sig_start[cell] = t_fs
        sig_settle[cell] = t_fs + (tau_eff_s_fs if by_sender else tau_eff_r_fs)
        sig_full[cell] = t_fs + tau
        prev_other = last_acc_r[cell] if by_sender else last_acc_s[cell]
        if prev_other > _NEG and armed and I[I_CLEAN] == 1:
            sep = t_ps - prev_other / FS_PER_PS
            if sep < max_tau_ps - 0.002:
                record(_KIND_SEPARATION, t_ps, cell)
        if by_sender:
            last_acc_s[cell] = t_fs
            I[I_WRITES] += 1
            last_snd[cell] = t_fs
        else:
            last_acc_r[cell] = t_fs

    def receiver_access(cell, t_fs):
        before = counts[_KIND_P1]
        access(cell, t_fs, False)
        I[I_READS] += 1
        if counts[_KIND_P1] == before and last_snd[cell] > _NEG:
            lat = t_fs - last_snd[cell] + tau_r_fs
            if lat > I[I_LATENCY]:
                I[I_LATENCY] = lat

    def emit_trace(t_fs):
        i = I[I_NTR]
        if i >= tr_time.shape[0]:
            return
        c_s = F[F_CS]
        c_r = F[F_CR]
        tr_time[i] = t_fs
        tr_clk_s[i] = 1 if (c_s - math.floor(c_s)) < 0.5 else 0
        tr_clk_r[i] = 1 if (c_r - math.floor(c_r)) < 0.5 else 0
        tr_cs[i] = c_s
        tr_cr[i] = c_r
        tr_mdr[i] = I[I_MD]
        tr_mds[i] = I[I_MD] if I[I_MD] == 2 else 1 - I[I_MD]
        for j in range(n):
            if sig_start[j] <= t_fs < sig_full[j]:
                tr_flags[i, j] = 2
            elif t_fs >= sig_start[j]:
                tr_flags[i, j] = sig_new[j]
            else:
                tr_flags[i, j] = sig_prev[j]
        I[I_NTR] = i + 1

    def emit_gap(t_fs):
        i = I[I_NGAP]
        if i < gap_t.shape[0]:
            gap_t[i] = t_fs
            gap_fill[i] = half + (F[F_CS] - F[F_CR])
            I[I_NGAP] = i + 1

    def sample(k, t_fs):
        cell = (k + half) % n
        t_ps = t_fs / FS_PER_PS
        if I[I_FFA] != cell:
            record(_KIND_INTERNAL, t_ps, cell)
        if t_fs < sig_start[cell]:
            d = sig_prev[cell]
            have_change = False
            change_ps = 0.0
        elif t_fs < sig_settle[cell]:
            d = np.int64(2)
            have_change = False
            change_ps = 0.0
        else:
            d = np.int64(sig_new[cell])
            have_change = sig_settle[cell] > _NEG
            change_ps = sig_settle[cell] / FS_PER_PS
        if d == 2:
            latched = np.int64(2)
        elif have_change and (t_ps - setup_ps < change_ps < t_ps + hold_ps):
            latched = np.int64(2)
        else:
            latched = np.int64(d)
        if tau_max_fs == 0:
            set_md(latched, t_fs)
            I[I_PENDING] = 0
            return
        if latched != I[I_MD]:
            set_md(2, t_fs)
        I[I_PENDING] = 1
        I[I_PEND_OUT] = t_fs + tau_max_fs
        I[I_PEND_VAL] = latched

    # accesses exactly at t = 0 for on-grid starts
    if F[F_CS] == F[F_RISE_S] - 1.0:
        access((np.int64(round(F[F_RISE_S])) - 1 + half) % n, np.int64(0), True)
    if F[F_CR] == F[F_RISE_R] - 1.0:
        receiver_access((np.int64(round(F[F_RISE_R])) - 1) % n, np.int64(0))
    if trace_stride_q > 0:
        emit_trace(np.int64(0))
    if gap_stride_q > 0:
        emit_gap(np.int64(0))

    ev_t = np.empty(5, dtype=np.int64)
    ev_kind = np.empty(5, dtype=np.int64)
    ev_pay = np.empty(5, dtype=np.int64)

    q = np.int64(0)
    end_fs = np.int64(0)
    while q < cap_q and I[I_READS] < target_reads:
        t0_fs = q * qfs
        t1_fs = t0_fs + qfs
        t0_ps = t0_fs / FS_PER_PS
        cs0 = F[F_CS]
        cr0 = F[F_CR]
        gap0 = cs0 - cr0
        rate_s = _pick_rate(gen_s, I[I_MODE_S], F[F_SINCE_S], t0_ps, t_osc_ps,
                            s_lo, s_hi, f_lo, f_hi, policy_s, gap0, True)
        rate_r = _pick_rate(gen_r, I[I_MODE_R], F[F_SINCE_R], t0_ps, t_osc_ps,
                            s_lo, s_hi, f_lo, f_hi, policy_r, -gap0, False)
        cs1 = cs0 + rate_s * qps
        cr1 = cr0 + rate_r * qps
        F[F_CS] = cs1
        F[F_CR] = cr1

        n_ev = 0
        if cs1 >= F[F_RISE_S]:
            frac = (F[F_RISE_S] - cs0) / (cs1 - cs0)
            ev_t[n_ev] = t0_fs + np.int64(round(qfs * frac))
            ev_kind[n_ev] = EV_SND_RISE
            ev_pay[n_ev] = np.int64(round(F[F_RISE_S]))
            n_ev += 1
        if cr1 >= F[F_FALL_R]:
            frac = (F[F_FALL_R] - cr0) / (cr1 - cr0)
            ev_t[n_ev] = t0_fs + np.int64(round(qfs * frac))
            ev_kind[n_ev] = EV_RCV_FALL
            ev_pay[n_ev] = 0
            n_ev += 1
        if cr1 >= F[F_RISE_R]:
            frac = (F[F_RISE_R] - cr0) / (cr1 - cr0)
            ev_t[n_ev] = t0_fs + np.int64(round(qfs * frac))
            ev_kind[n_ev] = EV_RCV_RISE
            ev_pay[n_ev] = np.int64(round(F[F_RISE_R]))
            n_ev += 1
        if cr1 >= F[F_SAMP_R]:
            frac = (F[F_SAMP_R] - cr0) / (cr1 - cr0)
            ev_t[n_ev] = t0_fs + np.int64(round(qfs * frac))
            ev_kind[n_ev] = EV_RCV_SAMPLE
            ev_pay[n_ev] = np.int64(round(F[F_SAMP_R] - off_cycles))
            n_ev += 1
        if I[I_PENDING] == 1 and t0_fs < I[I_PEND_OUT] <= t1_fs:
            ev_t[n_ev] = I[I_PEND_OUT]
            ev_kind[n_ev] = EV_CTRL_OUT
            ev_pay[n_ev] = 0
            n_ev += 1

        for i in range(1, n_ev):
            tt = ev_t[i]
            kk = ev_kind[i]
            pp = ev_pay[i]
            j = i - 1
            while j >= 0 and (ev_t[j] > tt or (ev_t[j] == tt and ev_kind[j] > kk)):
                ev_t[j + 1] = ev_t[j]
                ev_kind[j + 1] = ev_kind[j]
                ev_pay[j + 1] = ev_pay[j]
                j -= 1
            ev_t[j + 1] = tt
            ev_kind[j + 1] = kk
            ev_pay[j + 1] = pp

        for i in range(n_ev):
            kind = ev_kind[i]
            t_fs = ev_t[i]
            if kind == EV_SND_RISE:
                access((ev_pay[i] + half) % n, t_fs, True)
                F[F_RISE_S] += 1.0
            elif kind == EV_RCV_FALL:
                I[I_FFA] = (I[I_FFA] + 1) % n
                F[F_FALL_R] += 1.0
            elif kind == EV_RCV_RISE:
                receiver_access(ev_pay[i] % n, t_fs)
                F[F_RISE_R] += 1.0
            elif kind == EV_RCV_SAMPLE:
                sample(ev_pay[i], t_fs)
                F[F_SAMP_R] += 1.0
            else:
                I[I_PENDING] = 0
                set_md(I[I_PEND_VAL], t_fs)

        gap1 = cs1 - cr1
        t1_ps = t1_fs / FS_PER_PS
        if armed:
            if abs(gap1) > lemma1_bound:
                record(_KIND_LEMMA1, t1_ps, -1)
            ok0 = gap0 >= l1_threshold
            ok1 = gap1 >= l1_threshold
            if not ok1:
                F[F_FAIL_P] = t1_ps
            elif not ok0:
                F[F_FAIL_P] = t0_ps + (l1_threshold - gap0) / (gap1 - gap0) * (t1_ps - t0_ps)
            ok0 = -gap0 >= l1_threshold
            ok1 = -gap1 >= l1_threshold
            if not ok1:
                F[F_FAIL_M] = t1_ps
            elif not ok0:
                F[F_FAIL_M] = t0_ps + (l1_threshold + gap0) / (-gap1 + gap0) * (t1_ps - t0_ps)
            if I[I_CLEAN] == 1:
                if t1_ps - F[F_FAIL_P] >= t_ctr_ps and I[I_MD] != 1:
                    record(_KIND_L1, t1_ps, -1)
                if t1_ps - F[F_FAIL_M] >= t_ctr_ps and I[I_MD] != 0:
                    record(_KIND_L1, t1_ps, -1)

        a = abs(gap1)
        if a > F[F_GABS]:
            F[F_GABS] = a
        if gap1 < F[F_GMIN]:
            F[F_GMIN] = gap1
        elif gap1 > F[F_GMAX]:
            F[F_GMAX] = gap1
        F[F_GSUM] += gap1
        I[I_GAPSAMP] += 1
        q += 1
        end_fs = t1_fs
        if trace_stride_q > 0 and q % trace_stride_q == 0:
            emit_trace(t1_fs)
        if gap_stride_q > 0 and q % gap_stride_q == 0:
            emit_gap(t1_fs)
        if halt_on_violation and I[I_NVIOL] > 0:
            break

    if I[I_MD] == 2:
        I[I_MD_M_TIME] += end_fs - I[I_MD_SINCE]
    return end_fs


_VIOLATION_DETAIL = {
    _KIND_P1: "receiver access to invalid cell",
    _KIND_P2: "sender access to valid cell",
    _KIND_LEMMA1: "clock divergence exceeded proven bound",
    _KIND_SEPARATION: "opposite-party accesses closer than max(tau_s, tau_r)",
    _KIND_L1: "forcing condition held for T_ctr but outputs not forced",
    _KIND_INTERNAL: "internal consistency check failed",
}


def run_kernel(config: SimConfig) -> RunResult:
    """Run one behavioral-fidelity simulation through the jitted kernel."""
    config.validate()
    if config.fidelity is not Fidelity.BEHAVIORAL:
        raise ValueError("kernel supports behavioral fidelity only")
    p: LinkParams = config.params
    n = p.n_cells
    qfs = config.quantum_fs()
    cap_q = config.duration_quanta()
    c_s0, c_r0 = config.initial_clocks()

    ss = np.random.SeedSequence(config.seed)
    child_s, child_r = ss.spawn(2)
    gen_s = np.random.Generator(np.random.PCG64(child_s))
    gen_r = np.random.Generator(np.random.PCG64(child_r))

    trace_stride_q = (int(round(config.trace_stride_ps / config.rate_quantum_ps))
                      if config.trace_stride_ps else 0)
    gap_stride_q = (int(round(config.gap_trace_stride_ps / config.rate_quantum_ps))
                    if config.gap_trace_stride_ps else 0)
    n_tr_max = cap_q // trace_stride_q + 2 if trace_stride_q else 1
    n_gap_max = cap_q // gap_stride_q + 2 if gap_stride_q else 1

    viol_kind = np.zeros(MAX_RECORDS, dtype=np.uint8)
    viol_t_ps = np.zeros(MAX_RECORDS, dtype=np.float64)
    viol_cell = np.zeros(MAX_RECORDS, dtype=np.int32)
    viol_cs = np.zeros(MAX_RECORDS, dtype=np.float64)
    viol_cr = np.zeros(MAX_RECORDS, dtype=np.float64)
    viol_md = np.zeros(MAX_RECORDS, dtype=np.uint8)
    counts = np.zeros(6, dtype=np.int64)

    tr_time = np.zeros(n_tr_max, dtype=np.int64)
    tr_clk_s = np.zeros(n_tr_max, dtype=np.uint8)
    tr_clk_r = np.zeros(n_tr_max, dtype=np.uint8)
    tr_cs = np.zeros(n_tr_max, dtype=np.float64)
    tr_cr = np.zeros(n_tr_max, dtype=np.float64)
    tr_mds = np.zeros(n_tr_max, dtype=np.uint8)
    tr_mdr = np.zeros(n_tr_max, dtype=np.uint8)
    tr_flags = np.zeros((n_tr_max, n), dtype=np.uint8)

    gap_t = np.zeros(n_gap_max, dtype=np.int64)
    gap_fill = np.zeros(n_gap_max, dtype=np.float64)

    validity = np.array([1 if i < n // 2 else 0 for i in range(n)], dtype=np.int64)
    pend_validity = np.full(n, -1, dtype=np.int64)
    busy_since = np.full(n, _NEG, dtype=np.int64)
    busy_until = np.full(n, _NEG, dtype=np.int64)
    last_party = np.zeros(n, dtype=np.int64)
    sig_start = np.full(n, _NEG, dtype=np.int64)
    sig_settle = np.full(n, _NEG, dtype=np.int64)
    sig_full = np.full(n, _NEG, dtype=np.int64)
    sig_prev = validity.copy()
    sig_new = validity.copy()
    last_acc_s = np.full(n, _NEG, dtype=np.int64)
    last_acc_r = np.full(n, _NEG, dtype=np.int64)
    last_snd = np.full(n, _NEG, dtype=np.int64)

    I = np.zeros(I_STATE, dtype=np.int64)
    F = np.zeros(F_STATE, dtype=np.float64)
    I[I_MD] = 2
    I[I_MODE_S] = 2
    I[I_MODE_R] = 2
    I[I_CLEAN] = 1
    I[I_LATENCY] = -1
    I[I_FFA] = (int(math.floor(c_r0 + 0.5)) % n + n // 2) % n
    F[F_CS] = c_s0
    F[F_CR] = c_r0
    F[F_SINCE_S] = math.nan
    F[F_SINCE_R] = math.nan
    off = p.sample_offset_cycles
    F[F_RISE_S] = math.floor(c_s0) + 1.0
    F[F_RISE_R] = math.floor(c_r0) + 1.0
    F[F_FALL_R] = math.floor(c_r0 - 0.5) + 1.5
    F[F_SAMP_R] = math.floor(c_r0 - off) + 1.0 + off
    gap0 = c_s0 - c_r0
    F[F_GMIN] = gap0
    F[F_GMAX] = gap0
    F[F_GABS] = abs(gap0)

    armed = config.monitors_armed()
    end_fs = _simulate(
        gen_s, gen_r,
        n, qfs, qfs / FS_PER_PS, cap_q, config.target_reads(),
        p.band.s_minus, p.band.s_plus, p.band.f_minus, p.band.f_plus,
        _POLICY_CODE[config.policy_snd], _POLICY_CODE[config.policy_rcv],
        p.t_osc_ps,
        int(round(p.tau_s_ps * FS_PER_PS)), int(round(p.tau_r_ps * FS_PER_PS)),
        int(round(config.tau_eff_ps(p.tau_s_ps) * FS_PER_PS)),
        int(round(config.tau_eff_ps(p.tau_r_ps) * FS_PER_PS)),
        int(round(p.tau_max_ps * FS_PER_PS)),
        config.ff_setup_ps, config.ff_hold_ps,
        off,
        armed, p.sample_offset_cycles,
        n / 2.0 - p.band.f_plus * p.tau_access_max_ps,
        p.t_ctr_ps + config.rate_quantum_ps,
        p.tau_access_max_ps,
        config.halt_on_violation,
        trace_stride_q, gap_stride_q,
        I, F,
        viol_kind, viol_t_ps, viol_cell, viol_cs, viol_cr, viol_md, counts,
        tr_time, tr_clk_s, tr_clk_r, tr_cs, tr_cr, tr_mds, tr_mdr, tr_flags,
        gap_t, gap_fill,
        validity, pend_validity, busy_since, busy_until, last_party,
        sig_start, sig_settle, sig_full, sig_prev, sig_new,
        last_acc_s, last_acc_r, last_snd,
    )

    duration_ns = end_fs / FS_PER_PS / 1000.0
    half = n / 2.0
    reads = int(I[I_READS])
    avg_freq = (((F[F_CS] - c_s0) + (F[F_CR] - c_r0)) / 2.0 / duration_ns
                if duration_ns > 0 else math.nan)
    mean_gap = F[F_GSUM] / I[I_GAPSAMP] if I[I_GAPSAMP] else 0.0
    stats = RunStats(
        duration_ns=duration_ns,
        cycles_completed=reads,
        sender_writes=int(I[I_WRITES]),
        fraction_time_md_m=I[I_MD_M_TIME] / end_fs if end_fs else 0.0,
        max_abs_clock_diff=float(F[F_GABS]),
        measured_throughput_pkt_per_ns=(reads / duration_ns if duration_ns else 0.0),
        measured_latency_max_ns=(I[I_LATENCY] / FS_PER_PS / 1000.0
                                 if I[I_LATENCY] >= 0 else None),
        avg_frequency_ghz=avg_freq,
        fill_min=half + float(F[F_GMIN]),
        fill_max=half + float(F[F_GMAX]),
        fill_mean=half + mean_gap,
        fill_final=half + (F[F_CS] - F[F_CR]),
    )

    n_viol = int(I[I_NVIOL])
    violations: List[ViolationEvent] = []
    code = "01x"
    for i in range(n_viol):
        kind = VIOLATION_KINDS[viol_kind[i]]
        cell = int(viol_cell[i])
        violations.append(ViolationEvent(
            kind=kind,
            time_ps=float(viol_t_ps[i]),
            cell=cell if cell >= 0 else None,
            detail=_VIOLATION_DETAIL[int(viol_kind[i])],
            c_s=float(viol_cs[i]),
            c_r=float(viol_cr[i]),
            md_rcv=code[viol_md[i]],
            seed=config.seed,
        ))
    counts_dict = {VIOLATION_KINDS[i]: int(counts[i]) for i in range(6)}
    last_v = max((v.time_ps for v in violations), default=-math.inf)

    trace = None
    if trace_stride_q:
        m = int(I[I_NTR])
        trace = Trace(
            n=n,
            time_fs=tr_time[:m].copy(),
            clk_snd=tr_clk_s[:m].copy(),
            clk_rcv=tr_clk_r[:m].copy(),
            c_s=tr_cs[:m].copy(),
            c_r=tr_cr[:m].copy(),
            md_snd=tr_mds[:m].copy(),
            md_rcv=tr_mdr[:m].copy(),
            flags=tr_flags[:m].copy(),
        )
    gap_trace = None
    if gap_stride_q:
        m = int(I[I_NGAP])
        gap_trace = GapTrace(gap_t[:m].copy(), gap_fill[:m].copy())

    return RunResult(
        config=config,
        stats=stats,
        violations=violations,
        counts=counts_dict,
        last_violation_ps=last_v,
        trace=trace,
        gap_trace=gap_trace,
        engine_used="kernel",
    )

"""Tunable oscillator model producing a continuous clock.

Each oscillator integrates a continuous clock c(t) whose rate depends on
the recent history of its one-bit mode input: a mode held stable for the
oscillator response time locks the rate into the slow or fast band, and
any instability (including an M level) unlocks it, allowing any rate
between the slowest slow and the fastest fast rate.  The derived discrete
clock is floor(c); rising edges occur at integer crossings of c and
falling edges at half-integer crossings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .analysis import RateBand
from .ternary import TernaryValue


class LockStatus(enum.Enum):
    LOCKED_SLOW = "locked_slow"
    LOCKED_FAST = "locked_fast"
    UNLOCKED = "unlocked"


class UnlockedPolicy(enum.Enum):
    """Rate selection while the oscillator is unlocked.

    The correctness claims quantify over all admissible behaviors, so any
    choice within [s-, f+] is sound.  UNIFORM_RANDOM reproduces the
    reference simulation methodology; the deterministic extremes and the
    adversary exist to stress the proven bounds.
    """

    UNIFORM_RANDOM = "uniform_random"
    MAX_RATE = "max_rate"
    MIN_RATE = "min_rate"
    ADVERSARIAL_TOWARD_PEER = "adversarial_toward_peer"


class EdgeKind(enum.Enum):
    RISING = "rising"
    FALLING = "falling"


@dataclass
class OscillatorState:
    """One tunable oscillator: continuous clock plus mode-signal history.

    The mode history is kept compressed as the current (value, since)
    segment; lock detection only needs to know how long the present level
    has been stable.  A since_ps of None marks the pre-start history,
    treated as the initial mode value held forever.
    """

    band: RateBand
    t_osc_ps: float
    c: float = 0.0
    mode: TernaryValue = TernaryValue.M
    mode_since_ps: Optional[float] = None
    unlocked_policy: UnlockedPolicy = UnlockedPolicy.UNIFORM_RANDOM

    def set_mode(self, value: TernaryValue, now_ps: float) -> None:
        """Record a mode-signal level change at time now_ps."""
        if value is not self.mode:
            self.mode = value
            self.mode_since_ps = now_ps


def lock_status(state: OscillatorState, now_ps: float) -> LockStatus:
    """Lock state at time now_ps per the mode history.

    Locked iff the mode signal has been constantly 0 (slow) or constantly
    1 (fast) over the closed window [now - T_osc, now]; any M or any
    recent change unlocks.  The locked band applies from the first instant
    the window condition holds.
    """
    if state.mode is TernaryValue.M:
        return LockStatus.UNLOCKED
    if state.mode_since_ps is not None and now_ps - state.mode_since_ps < state.t_osc_ps:
        return LockStatus.UNLOCKED
    return LockStatus.LOCKED_SLOW if state.mode is TernaryValue.ZERO else LockStatus.LOCKED_FAST


def rate_bounds(
    state: OscillatorState,
    status: LockStatus,
    gap_to_peer: Optional[float] = None,
    tie_high: bool = True,
) -> Tuple[float, float, bool]:
    """Admissible rate interval for one integration step, plus whether the
    rate is drawn uniformly from it.

    gap_to_peer is this clock minus the peer clock (cycles); the adversary
    uses its sign to pick the extreme that drives the two clocks apart,
    toward the proven divergence bound.  tie_high resolves the gap == 0
    tie: exactly one side of a pair must run high so that a lockstep start
    actually diverges.
    """
    band = state.band
    if status is LockStatus.LOCKED_SLOW:
        return band.s_minus, band.s_plus, True
    if status is LockStatus.LOCKED_FAST:
        return band.f_minus, band.f_plus, True
    lo, hi = band.unlocked_lo, band.unlocked_hi
    policy = state.unlocked_policy
    if policy is UnlockedPolicy.UNIFORM_RANDOM:
        return lo, hi, True
    if policy is UnlockedPolicy.MAX_RATE:
        return hi, hi, False
    if policy is UnlockedPolicy.MIN_RATE:
        return lo, lo, False
    # ADVERSARIAL_TOWARD_PEER: widen the current clock separation.
    if gap_to_peer is None:
        ahead = tie_high
    elif gap_to_peer == 0.0:
        ahead = tie_high
    else:
        ahead = gap_to_peer > 0.0
    return (hi, hi, False) if ahead else (lo, lo, False)


def advance(
    state: OscillatorState,
    dt_ps: float,
    rng: np.random.Generator,
    now_ps: float,
    gap_to_peer: Optional[float] = None,
    tie_high: bool = True,
) -> float:
    """Advance the continuous clock by one integration step.

    Returns the rate used (cycles/ps).  The rate is redrawn each step:
    uniform within the locked band, or per the unlocked policy within
    [s-, f+].  Raises ValueError for a nonpositive dt.
    """
    if dt_ps <= 0.0:
        raise ValueError(f"dt must be positive, got {dt_ps}")
    status = lock_status(state, now_ps)
    lo, hi, uniform = rate_bounds(state, status, gap_to_peer, tie_high)
    if uniform and hi > lo:
        rate = lo + (hi - lo) * rng.random()
    else:
        rate = lo
    assert state.band.s_minus <= rate <= state.band.f_plus
    state.c += rate * dt_ps
    return rate


def edge_events(
    c_before: float,
    c_after: float,
    t_start_ps: float,
    dt_ps: float,
) -> List[Tuple[float, EdgeKind]]:
    """Clock edges generated while c moves from c_before to c_after.

    RISING at each integer crossing, FALLING at each half-integer crossing
    (the negated clock used by the sampling-address counter), with times
    linearly interpolated within the step.  Requires c_after >= c_before.
    """
    if c_after < c_before:
        raise ValueError("continuous clock must not decrease")
    events: List[Tuple[float, EdgeKind]] = []
    if c_after == c_before:
        return events
    slope = (c_after - c_before) / dt_ps
    for offset, kind in ((0.0, EdgeKind.RISING), (0.5, EdgeKind.FALLING)):
        k = np.floor(c_before - offset) + 1.0
        while k + offset <= c_after:
            # crossings strictly inside (c_before, c_after] count
            if k + offset > c_before:
                t = t_start_ps + (k + offset - c_before) / slope
                events.append((t, kind))
            k += 1.0
    events.sort(key=lambda e: e[0])
    return events

"""Closed-form feasibility bounds for the tunable-clock link.

Evaluates the minimum ring size, the feasible controller-threshold
interval, guaranteed latency/throughput, and the oscillator accuracy
budget, directly from the model constants.

Unit discipline: rates are stored in cycles/ps (1 GHz = 1e-3 cycles/ps),
durations in ps, thresholds and clock values in receiver-clock cycles.
Wall-clock durations enter the cycle-domain bounds multiplied by the
relevant extreme rate.  Ceiling expressions are evaluated exactly over
rationals constructed from the binary float parameters, so results are
deterministic and immune to double-rounding at integer boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Tuple

GHZ_TO_CYCLES_PER_PS = 1e-3


@dataclass(frozen=True)
class RateBand:
    """Slow and fast frequency bands of a tunable oscillator.

    All four rates are in cycles/ps.  The band ordering
    0 < s_minus <= s_plus <= f_minus <= f_plus guarantees a clock in slow
    mode is never faster than one in fast mode.
    """

    s_minus: float
    s_plus: float
    f_minus: float
    f_plus: float

    def __post_init__(self) -> None:
        if not (0.0 < self.s_minus <= self.s_plus <= self.f_minus <= self.f_plus):
            raise ValueError(
                f"rate band must satisfy 0 < s- <= s+ <= f- <= f+, got "
                f"({self.s_minus}, {self.s_plus}, {self.f_minus}, {self.f_plus})"
            )

    @staticmethod
    def from_ghz(s_minus: float, s_plus: float, f_minus: float, f_plus: float) -> "RateBand":
        return RateBand(
            s_minus * GHZ_TO_CYCLES_PER_PS,
            s_plus * GHZ_TO_CYCLES_PER_PS,
            f_minus * GHZ_TO_CYCLES_PER_PS,
            f_plus * GHZ_TO_CYCLES_PER_PS,
        )

    @property
    def unlocked_lo(self) -> float:
        return self.s_minus

    @property
    def unlocked_hi(self) -> float:
        return self.f_plus


@dataclass(frozen=True)
class LinkParams:
    """All model constants of one link instance.

    delta_cycles bounds the initial clock offset (both continuous clocks
    start in (-delta, 0]); threshold_cycles, when present, is the
    controller threshold to validate instead of solving for the feasible
    interval.
    """

    band: RateBand
    t_osc_ps: float = 200.0
    tau_s_ps: float = 100.0
    tau_r_ps: float = 100.0
    tau_max_ps: float = 50.0
    delta_cycles: float = 0.1
    n_cells: int = 2
    threshold_cycles: Optional[float] = None

    def __post_init__(self) -> None:
        if self.delta_cycles < 0 or self.delta_cycles > 1:
            raise ValueError(f"delta must be in [0, 1] cycles, got {self.delta_cycles}")
        for name in ("t_osc_ps", "tau_s_ps", "tau_r_ps", "tau_max_ps"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.n_cells < 2 or self.n_cells % 2:
            raise ValueError(f"ring size must be even and >= 2, got {self.n_cells}")

    @property
    def t_ctr_ps(self) -> float:
        """Maximum controller reaction time: one worst-case sampling period
        plus the propagation delay from the flags to the mode outputs."""
        return 1.0 / self.band.s_minus + self.tau_max_ps

    @property
    def sample_offset_cycles(self) -> float:
        """Phase shift of the flag-sampling clock relative to the receiver
        clock, in receiver cycles.  Centers the sampling instant in the
        flag transition window so both flag polarities get equal margin."""
        return self.band.f_plus * self.tau_s_ps / 2.0

    @property
    def tau_access_max_ps(self) -> float:
        return max(self.tau_s_ps, self.tau_r_ps)

    def with_n(self, n: int) -> "LinkParams":
        return replace(self, n_cells=n)


@dataclass(frozen=True)
class DerivedBounds:
    """Solver output for one parameter set."""

    delta_cap: int
    n_min: int
    t_range: Optional[Tuple[float, float]]
    t_ctr_ps: float
    latency_ns: Optional[float]
    throughput_pkt_per_ns: Optional[float]
    max_rate_error: Optional[float]

    @property
    def feasible(self) -> bool:
        return self.t_range is not None


def _frac(x: float) -> Fraction:
    return Fraction(x)


def compute_delta(params: LinkParams) -> int:
    """Minimum half-ring-size (in cells) needed for a provably correct link.

    Exact ceiling of
        (f+ - s-)(T_osc + 1/s- + tau_max) + f+ max(tau_s, tau_r)
        + max(delta, f+ tau_s / 2)
    evaluated over rationals.
    """
    b = params.band
    f_plus = _frac(b.f_plus)
    s_minus = _frac(b.s_minus)
    reaction = _frac(params.t_osc_ps) + 1 / s_minus + _frac(params.tau_max_ps)
    inner = (
        (f_plus - s_minus) * reaction
        + f_plus * _frac(params.tau_access_max_ps)
        + max(_frac(params.delta_cycles), f_plus * _frac(params.tau_s_ps) / 2)
    )
    return math.ceil(inner)


def min_ring_size(params: LinkParams) -> int:
    """Smallest even ring size; clamped to 2 since the ring must be nonempty."""
    return max(2, 2 * compute_delta(params))


def feasible_threshold_range(params: LinkParams, n: int) -> Optional[Tuple[float, float]]:
    """Interval of controller thresholds (in cycles) valid for ring size n.

    Lower end: the threshold must exceed both the initial clock offset and
    the sampling-alignment margin f+ tau_s / 2.  Upper end: half the ring
    minus the worst-case drift during one full control reaction and the
    access-separation margin.  Returns None when the interval is empty.
    """
    if n <= 0 or n % 2:
        raise ValueError(f"ring size must be even and positive, got {n}")
    b = params.band
    f_plus = _frac(b.f_plus)
    s_minus = _frac(b.s_minus)
    t_ctr = 1 / s_minus + _frac(params.tau_max_ps)
    lower = max(_frac(params.delta_cycles), f_plus * _frac(params.tau_s_ps) / 2)
    upper = (
        Fraction(n, 2)
        - (f_plus - s_minus) * (_frac(params.t_osc_ps) + t_ctr)
        - f_plus * _frac(params.tau_access_max_ps)
    )
    if lower > upper:
        return None
    return (float(lower), float(upper))


def latency_throughput(params: LinkParams, n: int) -> Tuple[float, float]:
    """Guaranteed worst-case latency (ns) and throughput (packets/ns).

    Both follow from the minimum guaranteed clock rate s-; raises
    ValueError for an infeasible configuration.
    """
    if feasible_threshold_range(params, n) is None:
        raise ValueError(f"no feasible threshold for ring size {n}")
    s_minus_ghz = params.band.s_minus / GHZ_TO_CYCLES_PER_PS
    return (n / s_minus_ghz, s_minus_ghz)


def max_frequency_error(nominal_slow_ghz: float, nominal_fast_ghz: float) -> float:
    """Largest relative oscillator error r keeping slow mode below fast mode.

    With two-sided error r, a nominal pair (g, f) stays ordered iff
    (1+r)^2/(1-r)^2 <= f/g; the largest such r is
    (sqrt(f/g) - 1) / (sqrt(f/g) + 1).
    """
    if not (0.0 < nominal_slow_ghz < nominal_fast_ghz):
        raise ValueError(
            f"need 0 < slow < fast, got ({nominal_slow_ghz}, {nominal_fast_ghz})"
        )
    root = math.sqrt(nominal_fast_ghz / nominal_slow_ghz)
    return (root - 1.0) / (root + 1.0)


def solve(params: LinkParams, n: Optional[int] = None,
          nominal_slow_ghz: Optional[float] = None,
          nominal_fast_ghz: Optional[float] = None) -> DerivedBounds:
    """Full bound report for a parameter set.

    With n omitted, solves at the minimum feasible ring size.  Nominal
    frequencies, when given, add the oscillator accuracy budget.
    """
    delta_cap = compute_delta(params)
    n_min = max(2, 2 * delta_cap)
    n_eval = n if n is not None else n_min
    t_range = feasible_threshold_range(params, n_eval)
    if t_range is not None:
        latency, throughput = latency_throughput(params, n_eval)
    else:
        latency, throughput = None, None
    rate_error = None
    if nominal_slow_ghz is not None and nominal_fast_ghz is not None:
        rate_error = max_frequency_error(nominal_slow_ghz, nominal_fast_ghz)
    return DerivedBounds(
        delta_cap=delta_cap,
        n_min=n_min,
        t_range=t_range,
        t_ctr_ps=params.t_ctr_ps,
        latency_ns=latency,
        throughput_pkt_per_ns=throughput,
        max_rate_error=rate_error,
    )

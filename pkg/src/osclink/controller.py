"""Mode-signal controller: abstract threshold reference and clocked circuit.

The reference controller forces the mode pair as soon as the continuous
clock difference reaches a threshold; anything below threshold leaves the
outputs unconstrained.  The clocked implementation realizes it with two
flip-flops: an address counter advanced on falling receiver-clock edges
and a sampling flip-flop that, on (phase-shifted) rising edges, latches
the full/empty flag of the cell opposite the receiver's position.  Its
output drives the receiver mode directly and the sender mode through an
inverter, so md_snd is always the closure-negation of md_rcv.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .ringbuffer import BufferState
from .ternary import FlipFlop, TernaryValue, ff_latch, t_mux, t_not


@dataclass(frozen=True)
class ControllerOutputs:
    md_snd: TernaryValue
    md_rcv: TernaryValue


FORCED_RECEIVER_FAST = ControllerOutputs(md_snd=TernaryValue.ZERO, md_rcv=TernaryValue.ONE)
FORCED_SENDER_FAST = ControllerOutputs(md_snd=TernaryValue.ONE, md_rcv=TernaryValue.ZERO)


def cont_th_reference(c_s: float, c_r: float, threshold: float) -> Optional[ControllerOutputs]:
    """Specification oracle for the threshold controller.

    Returns the forced output pair when the clock difference has reached
    the threshold (sender ahead: receiver fast / sender slow, and
    symmetrically), or None when the outputs are unconstrained.  Used by
    the conformance monitor, not as a circuit.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if c_s - c_r >= threshold:
        return FORCED_RECEIVER_FAST
    if c_r - c_s >= threshold:
        return FORCED_SENDER_FAST
    return None


def sampled_cell_index(receiver_address: int, n: int) -> int:
    """Cell whose flag is sampled while the receiver reads receiver_address:
    the one opposite in the ring."""
    if n <= 0 or n % 2:
        raise ValueError(f"ring size must be even and positive, got {n}")
    return (receiver_address + n // 2) % n


@dataclass
class ClockedTh:
    """Behavioral clocked threshold controller for any even ring size.

    ffa holds the address to sample, kept opposite the receiver's cell by
    advancing on falling clock edges (half a cycle before each sample, so
    the multiplexer has settled by the time ffs latches).  ffs latches the
    selected flag on rising edges of the sampling clock, which the engine
    phase-shifts by sample_offset_cycles relative to the receiver clock.
    New outputs become visible tau_max after the latch edge.
    """

    n: int
    tau_max_ps: float
    sample_offset_cycles: float
    ffa_addr: int = 0
    ffs: FlipFlop = field(default_factory=FlipFlop)
    ffa_unstable: bool = False

    def init_address(self, first_receiver_cell: int) -> None:
        """Point ffa at the cell opposite the receiver's first address."""
        self.ffa_addr = sampled_cell_index(first_receiver_cell, self.n)

    def on_falling_edge(self) -> int:
        """Advance the sampling address (modulo-n counter, one-bit toggle
        when n == 2).  Returns the new address."""
        self.ffa_addr = (self.ffa_addr + 1) % self.n
        return self.ffa_addr

    def on_sample(
        self,
        flag_value: TernaryValue,
        flag_last_change_ps: Optional[float],
        edge_ps: float,
    ) -> TernaryValue:
        """Latch the currently selected flag at a rising sampling edge.

        flag_value is the level of the selected flag at the edge and
        flag_last_change_ps the time it last finished changing; setup/hold
        vulnerability follows the flip-flop's window.  Returns the stored
        value; the caller makes md_rcv = stored and md_snd = not(stored)
        visible tau_max later.
        """
        self.ffs = ff_latch(self.ffs, flag_value, flag_last_change_ps, edge_ps)
        return self.ffs.stored

    def on_rising_edge(self, buf: BufferState, edge_ps: float) -> TernaryValue:
        """Spec-shaped sampling against a buffer: reads the selected flag
        through the worst-case observer interface."""
        idx = self.ffa_addr
        value = buf.read_flag(idx, edge_ps)
        settle = buf.flag_settle_ps(idx)
        last_change = settle if math.isfinite(settle) else None
        return self.on_sample(value, last_change, edge_ps)

    def outputs(self) -> ControllerOutputs:
        """Output pair implied by the current ffs state (post-propagation)."""
        v = self.ffs.stored
        return ControllerOutputs(md_snd=t_not(v), md_rcv=v)


@dataclass
class ClockedThGateN2:
    """Gate-level controller for a two-cell ring, cross-checkable against
    the behavioral variant.

    ffa is a one-bit counter built from a flip-flop with inverted feedback
    clocked on falling edges; the flag multiplexer and output inverter are
    evaluated under the metastable closure, so an unstable address or flag
    propagates M exactly as the worst-case model demands.
    """

    tau_max_ps: float
    sample_offset_cycles: float
    ffa: FlipFlop = field(default_factory=lambda: FlipFlop(stored=TernaryValue.ONE))
    ffs: FlipFlop = field(default_factory=FlipFlop)
    ffa_changed_ps: float = -math.inf

    def init_address(self, first_receiver_cell: int) -> None:
        addr = sampled_cell_index(first_receiver_cell, 2)
        self.ffa = FlipFlop(
            stored=TernaryValue.from_bool(bool(addr)),
            setup_ps=self.ffa.setup_ps,
            hold_ps=self.ffa.hold_ps,
            clk_to_q_ps=self.ffa.clk_to_q_ps,
        )

    def on_falling_edge(self, edge_ps: float) -> TernaryValue:
        d = t_not(self.ffa.stored)
        self.ffa = ff_latch(self.ffa, d, self.ffa_changed_ps, edge_ps)
        self.ffa_changed_ps = edge_ps + self.ffa.clk_to_q_ps
        return self.ffa.stored

    def on_sample(
        self,
        flag0: TernaryValue,
        flag1: TernaryValue,
        flag_last_change_ps: Optional[float],
        edge_ps: float,
    ) -> TernaryValue:
        d = t_mux(self.ffa.stored, flag0, flag1)
        self.ffs = ff_latch(self.ffs, d, flag_last_change_ps, edge_ps)
        return self.ffs.stored

    def outputs(self) -> ControllerOutputs:
        v = self.ffs.stored
        return ControllerOutputs(md_snd=t_not(v), md_rcv=v)

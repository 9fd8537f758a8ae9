"""Ring buffer with validity semantics and per-cell full/empty flags.

Cells alternate between valid (written, ready to read) and invalid (read,
ready to write).  An access by the wrong party is not an abort: it is
reported to the monitor as an underrun/overflow event and the run
continues, so adversarial configurations can be observed in full.

Flag semantics are worst-case: for the entire access window [t, t + tau)
the flag may be metastable, and read_flag reports M throughout.  The flag
reaches its new stable level exactly when the access completes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

from .ternary import FlipFlop, TernaryValue, ff_latch, t_not, t_xor


class Validity(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"


class Party(enum.Enum):
    NONE = "none"
    SENDER = "sender"
    RECEIVER = "receiver"


# Monitor callback: (kind, time_ps, cell_index, detail)
MonitorHook = Callable[[str, float, int, str], None]


def _noop_monitor(kind: str, t_ps: float, cell: int, detail: str) -> None:
    return None


@dataclass
class Cell:
    """One ring-buffer slot.

    busy_until_ps is set while an access is in progress; the flag reads M
    inside the window and the pending validity/flag level applies when the
    window closes.
    """

    validity: Validity
    flag_stable: TernaryValue
    busy_since_ps: float = -math.inf
    busy_until_ps: float = -math.inf
    last_accessor: Party = Party.NONE
    pending_validity: Optional[Validity] = None
    pending_flag: Optional[TernaryValue] = None

    def settle(self, now_ps: float) -> None:
        """Apply the pending state once the access window has closed."""
        if self.pending_validity is not None and now_ps >= self.busy_until_ps:
            self.validity = self.pending_validity
            self.flag_stable = self.pending_flag  # type: ignore[assignment]
            self.pending_validity = None
            self.pending_flag = None

    def is_busy(self, now_ps: float) -> bool:
        return self.busy_since_ps <= now_ps < self.busy_until_ps

    def validity_at(self, now_ps: float) -> Validity:
        if self.pending_validity is not None and now_ps >= self.busy_until_ps:
            return self.pending_validity
        return self.validity


@dataclass
class BufferState:
    """Ring of n cells plus the access durations.

    At t = 0, cells 0 .. n/2 - 1 are valid with flag 1 and the rest
    invalid with flag 0: the sender starts half a ring ahead of the
    receiver and each party first touches cells in its own half.
    """

    n: int
    tau_s_ps: float
    tau_r_ps: float
    cells: List[Cell] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n < 2 or self.n % 2:
            raise ValueError(f"ring size must be even and >= 2, got {self.n}")
        if self.tau_s_ps < 0 or self.tau_r_ps < 0:
            raise ValueError("access durations must be >= 0")
        if not self.cells:
            half = self.n // 2
            self.cells = [
                Cell(Validity.VALID, TernaryValue.ONE) if i < half
                else Cell(Validity.INVALID, TernaryValue.ZERO)
                for i in range(self.n)
            ]

    def _begin_access(
        self,
        idx: int,
        t_ps: float,
        party: Party,
        tau_ps: float,
        new_validity: Validity,
        new_flag: TernaryValue,
        violation_kind: str,
        monitor: MonitorHook,
    ) -> None:
        cell = self.cells[idx]
        cell.settle(t_ps)
        if cell.is_busy(t_ps):
            kind = "INTERNAL" if cell.last_accessor is party else "SEPARATION"
            monitor(kind, t_ps, idx, f"access during open window of {cell.last_accessor.value}")
        if cell.validity_at(t_ps) is new_validity:
            # Sender must hit invalid cells, receiver valid ones.
            monitor(violation_kind, t_ps, idx, f"{party.value} access to {new_validity.value} cell")
        cell.busy_since_ps = t_ps
        cell.busy_until_ps = t_ps + tau_ps
        cell.last_accessor = party
        if tau_ps == 0.0:
            cell.validity = new_validity
            cell.flag_stable = new_flag
            cell.pending_validity = None
            cell.pending_flag = None
        else:
            cell.pending_validity = new_validity
            cell.pending_flag = new_flag

    def sender_access(self, idx: int, t_ps: float, monitor: MonitorHook = _noop_monitor) -> None:
        """Sender starts writing cell idx at time t_ps.

        The cell becomes valid (flag 1) when the write completes at
        t + tau_s; a write to an already-valid cell is an overflow event.
        """
        self._begin_access(
            idx, t_ps, Party.SENDER, self.tau_s_ps,
            Validity.VALID, TernaryValue.ONE, "P2_OVERFLOW", monitor,
        )

    def receiver_access(self, idx: int, t_ps: float, monitor: MonitorHook = _noop_monitor) -> None:
        """Receiver starts reading cell idx at time t_ps.

        The cell becomes invalid (flag 0) when the read completes at
        t + tau_r; a read of an invalid cell is an underrun event.
        """
        self._begin_access(
            idx, t_ps, Party.RECEIVER, self.tau_r_ps,
            Validity.INVALID, TernaryValue.ZERO, "P1_UNDERRUN", monitor,
        )

    def read_flag(self, idx: int, t_ps: float) -> TernaryValue:
        """Worst-case observer view of the full/empty flag of cell idx.

        M whenever an access window is open; the settled level otherwise.
        Raises IndexError for an out-of-range cell.
        """
        if not (0 <= idx < self.n):
            raise IndexError(f"cell index {idx} out of range for ring of {self.n}")
        cell = self.cells[idx]
        if cell.is_busy(t_ps):
            return TernaryValue.M
        if cell.pending_flag is not None and t_ps >= cell.busy_until_ps:
            return cell.pending_flag
        return cell.flag_stable

    def flag_settle_ps(self, idx: int) -> float:
        """Time the most recent access's flag transition completes."""
        return self.cells[idx].busy_until_ps


@dataclass
class GateLevelCell:
    """Gate-level flag cell: one flip-flop per clock domain feeding a XOR.

    The sender flip-flop, when clocked, copies the negation of the
    receiver flip-flop's state, making the XOR output 1; the receiver
    flip-flop copies the sender state, resetting the XOR output to 0.
    Each flip-flop output is treated as in transition (M) for the access
    duration after its latch, so the XOR output refines the behavioral
    flag: whenever the behavioral flag is stable the XOR agrees.
    """

    tau_s_ps: float
    tau_r_ps: float
    ff_snd: FlipFlop = field(default_factory=lambda: FlipFlop(stored=TernaryValue.ZERO))
    ff_rcv: FlipFlop = field(default_factory=lambda: FlipFlop(stored=TernaryValue.ZERO))
    snd_latched_ps: float = -math.inf
    rcv_latched_ps: float = -math.inf

    @staticmethod
    def initially_full(tau_s_ps: float, tau_r_ps: float) -> "GateLevelCell":
        cell = GateLevelCell(tau_s_ps, tau_r_ps)
        cell.ff_snd = FlipFlop(stored=TernaryValue.ONE)
        return cell

    def _ff_out(self, stored: TernaryValue, latched_ps: float, tau_ps: float, t_ps: float) -> TernaryValue:
        if latched_ps <= t_ps < latched_ps + tau_ps:
            return TernaryValue.M
        return stored

    def snd_out(self, t_ps: float) -> TernaryValue:
        return self._ff_out(self.ff_snd.stored, self.snd_latched_ps, self.tau_s_ps, t_ps)

    def rcv_out(self, t_ps: float) -> TernaryValue:
        return self._ff_out(self.ff_rcv.stored, self.rcv_latched_ps, self.tau_r_ps, t_ps)

    def set_event(self, t_ps: float) -> None:
        """Sender-domain clock edge: latch the negated receiver state."""
        d = t_not(self.rcv_out(t_ps))
        self.ff_snd = ff_latch(self.ff_snd, d, self.rcv_latched_ps + self.tau_r_ps, t_ps)
        self.snd_latched_ps = t_ps

    def reset_event(self, t_ps: float) -> None:
        """Receiver-domain clock edge: copy the sender state."""
        d = self.snd_out(t_ps)
        self.ff_rcv = ff_latch(self.ff_rcv, d, self.snd_latched_ps + self.tau_s_ps, t_ps)
        self.rcv_latched_ps = t_ps

    def output(self, t_ps: float) -> TernaryValue:
        return t_xor(self.snd_out(t_ps), self.rcv_out(t_ps))

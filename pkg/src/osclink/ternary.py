"""Three-valued signal domain with worst-case metastability propagation.

Signals take values in {0, M, 1}, where M marks a potentially metastable or
transitioning level.  Combinational gates are evaluated under a metastable
closure: an M input is allowed to resolve to either binary value, and the
gate output is only stable if every resolution agrees.  Only explicit
logical masking can stop M from propagating; no probabilistic resolution is
modeled.
"""

from __future__ import annotations

import dataclasses
import inspect
import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, FrozenSet, Optional


class TernaryValue(Enum):
    ZERO = 0
    ONE = 1
    M = 2

    @property
    def is_stable(self) -> bool:
        return self is not TernaryValue.M

    @property
    def code(self) -> str:
        """Single-character encoding used by trace exports ('0', '1', 'x')."""
        if self is TernaryValue.ZERO:
            return "0"
        if self is TernaryValue.ONE:
            return "1"
        return "x"

    @staticmethod
    def from_bool(b: bool) -> "TernaryValue":
        return TernaryValue.ONE if b else TernaryValue.ZERO

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return self.name


ZERO = TernaryValue.ZERO
ONE = TernaryValue.ONE
M = TernaryValue.M

MAX_GATE_ARITY = 4


def resolutions(v: TernaryValue) -> FrozenSet[bool]:
    """Binary values a signal level may resolve to.

    A stable level has exactly one resolution; M may be seen as either 0
    or 1 by downstream logic.
    """
    if v is TernaryValue.ZERO:
        return frozenset((False,))
    if v is TernaryValue.ONE:
        return frozenset((True,))
    return frozenset((False, True))


def gate_closure(truth_table: Callable[..., bool], *inputs: TernaryValue) -> TernaryValue:
    """Evaluate a boolean gate under the worst-case metastable closure.

    The gate output is the stable value b iff the truth table yields b for
    every combination of resolutions of the inputs; otherwise the output
    is M.  Supports gates of up to 4 inputs.

    Raises ValueError on arity mismatch between the table and the inputs.
    """
    k = len(inputs)
    if k > MAX_GATE_ARITY:
        raise ValueError(f"gate arity {k} exceeds supported maximum {MAX_GATE_ARITY}")
    _check_arity(truth_table, k)

    outputs = set()
    for combo in itertools.product(*(resolutions(v) for v in inputs)):
        outputs.add(bool(truth_table(*combo)))
        if len(outputs) == 2:
            return TernaryValue.M
    (only,) = outputs
    return TernaryValue.from_bool(only)


def _check_arity(fn: Callable[..., bool], k: int) -> None:
    try:
        sig = inspect.signature(fn)
    except (TypeError, ValueError):
        return  # builtins without signatures: trust the caller
    params = list(sig.parameters.values())
    if any(p.kind in (p.VAR_POSITIONAL, p.VAR_KEYWORD) for p in params):
        return
    n_required = sum(
        1 for p in params
        if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD) and p.default is p.empty
    )
    n_max = sum(1 for p in params if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD))
    if not (n_required <= k <= n_max):
        raise ValueError(f"truth table takes {n_required} inputs, got {k}")


# The three gate shapes the link design actually uses.

def t_not(a: TernaryValue) -> TernaryValue:
    return gate_closure(lambda x: not x, a)


def t_xor(a: TernaryValue, b: TernaryValue) -> TernaryValue:
    return gate_closure(lambda x, y: x != y, a, b)


def t_mux(sel: TernaryValue, in0: TernaryValue, in1: TernaryValue) -> TernaryValue:
    """2-input multiplexer: output in1 when sel is high, in0 when low.

    Logical masking applies: an M select with agreeing data inputs still
    produces a stable output.
    """
    return gate_closure(lambda s, a, b: b if s else a, sel, in0, in1)


@dataclass(frozen=True)
class FlipFlop:
    """Edge-triggered storage cell with an explicit vulnerability window.

    An input change within (edge - setup_ps, edge + hold_ps) around a latch
    edge stores M, as does latching while the input itself is M.  Output
    becomes visible clk_to_q_ps after the edge; the caller accounts for
    that delay when propagating the stored value.
    """

    stored: TernaryValue = TernaryValue.M
    setup_ps: float = 30.0
    hold_ps: float = 10.0
    clk_to_q_ps: float = 20.0


def ff_latch(
    ff: FlipFlop,
    d: TernaryValue,
    input_last_change_ps: Optional[float],
    edge_ps: float,
) -> FlipFlop:
    """Latch input d at a clock edge, honoring the setup/hold window.

    input_last_change_ps is the time the data input last changed level
    (None if it never changed).  A stable input that changed inside the
    open window (edge - setup, edge + hold) is stored as M; an M input is
    always stored as M.
    """
    if d is TernaryValue.M:
        stored = TernaryValue.M
    elif input_last_change_ps is not None and (
        edge_ps - ff.setup_ps < input_last_change_ps < edge_ps + ff.hold_ps
    ):
        stored = TernaryValue.M
    else:
        stored = d
    return dataclasses.replace(ff, stored=stored)

"""osclink: simulator and bound calculator for a synchronizer-free
producer-consumer link between two tunable clock domains.

The sender and receiver each own a frequency-tunable oscillator; a small
clocked controller samples ring-buffer full/empty flags and nudges the
oscillators between a slow and a fast band.  The controller itself may go
metastable, but the design contains that metastability to the mode
signals: the library simulates the link under worst-case three-valued
semantics and asserts the proven safety properties at runtime, alongside
closed-form evaluation of the feasibility bounds.
"""

from .analysis import (
    DerivedBounds,
    LinkParams,
    RateBand,
    compute_delta,
    feasible_threshold_range,
    latency_throughput,
    max_frequency_error,
    min_ring_size,
    solve,
)
from .controller import (
    ClockedTh,
    ClockedThGateN2,
    ControllerOutputs,
    cont_th_reference,
    sampled_cell_index,
)
from .engine import (
    Fidelity,
    RunResult,
    SimConfig,
    SweepPoint,
    Trace,
    export_sweep_curves_csv,
    export_trace,
    export_trace_csv,
    export_trace_vcd,
    run,
    stabilization_analysis,
    sweep_initial_offset,
    trace_columns,
)
from .monitors import Monitor, RunStats, ViolationEvent, fill_level, lemma1_bound_cycles
from .oscillator import (
    EdgeKind,
    LockStatus,
    OscillatorState,
    UnlockedPolicy,
    advance,
    edge_events,
    lock_status,
)
from .ringbuffer import BufferState, Cell, GateLevelCell, Validity
from .ternary import (
    M,
    ONE,
    ZERO,
    FlipFlop,
    TernaryValue,
    ff_latch,
    gate_closure,
    resolutions,
    t_mux,
    t_not,
    t_xor,
)

__version__ = "0.1.0"

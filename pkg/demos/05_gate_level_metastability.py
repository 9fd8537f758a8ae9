"""Gate-level fidelity: flags from two-flip-flop XOR cells, the sampling
address from a real toggle flip-flop, everything evaluated under the
worst-case three-valued closure.

On a violation-free run the gate-level model is observationally identical
to the behavioral one (the refinement the design proves); its value is
showing the metastability plumbing explicitly.

Run: python demos/05_gate_level_metastability.py
"""

import dataclasses

from osclink import Fidelity, run
from osclink.presets import paper_asic_config

cfg = paper_asic_config(seed=3, cycles=5_000, fidelity=Fidelity.GATE_LEVEL)
gate = run(cfg)
behav = run(dataclasses.replace(cfg, fidelity=Fidelity.BEHAVIORAL,
                                engine_path="reference"))

print(f"gate-level : md metastable {100 * gate.stats.fraction_time_md_m:.2f}% "
      f"of the time, {gate.total_violations} violations")
print(f"behavioral : md metastable {100 * behav.stats.fraction_time_md_m:.2f}% "
      f"of the time, {behav.total_violations} violations")
print(f"identical trajectories: {gate.stats == behav.stats}")

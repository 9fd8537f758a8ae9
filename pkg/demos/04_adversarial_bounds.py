"""The bounds are load-bearing: break them and watch the link fail.

With the oscillator response time inflated past feasibility, an
adversarial rate daemon (always running the leading clock at the fast
extreme and the trailing one at the slow extreme while unlocked) overruns
the buffer within a handful of cycles.  The same adversary against a
feasible configuration is provably contained.

Run: python demos/04_adversarial_bounds.py
"""

from osclink import UnlockedPolicy, run
from osclink.presets import adversarial_infeasible_config, paper_asic_config

print("feasible configuration, adversarial rates:")
good = run(paper_asic_config(seed=0, cycles=50_000,
                             policy=UnlockedPolicy.ADVERSARIAL_TOWARD_PEER))
print(f"  {good.stats.cycles_completed} cycles, "
      f"max divergence {good.stats.max_abs_clock_diff:.3f} cycles "
      f"(bound 0.77), violations: {good.total_violations}")

print("\ninfeasible configuration (T_osc = 5 ns), adversarial rates:")
bad = run(adversarial_infeasible_config(seed=0, cycles=10_000))
print(f"  stopped after {bad.stats.cycles_completed} cycles with "
      f"{bad.total_violations} violations:")
for v in bad.violations[:4]:
    print(f"    {v}")

"""Closed-form feasibility tour: how big must the ring be, which controller
thresholds work, and how accurate the oscillators must be.

Run: python demos/01_bounds_and_feasibility.py
"""

from osclink import LinkParams, RateBand, feasible_threshold_range, max_frequency_error, solve

# The 65 nm operating point: slow mode 2.0 GHz, fast mode 2.3 GHz.
params = LinkParams(
    band=RateBand.from_ghz(2.0, 2.05, 2.25, 2.3),
    t_osc_ps=200.0,    # oscillator response time
    tau_s_ps=100.0,    # write duration (= total sampling vulnerability)
    tau_r_ps=100.0,    # read duration
    tau_max_ps=50.0,   # controller propagation delay
    delta_cycles=0.1,  # initial clock offset budget
    n_cells=2,
)

bounds = solve(params, nominal_slow_ghz=2.0, nominal_fast_ghz=2.3)
print(f"half-ring bound          : {bounds.delta_cap}")
print(f"minimum ring size        : {bounds.n_min} cells")
print(f"controller reaction time : {bounds.t_ctr_ps:.0f} ps")
print(f"feasible thresholds      : [{bounds.t_range[0]:.3f}, {bounds.t_range[1]:.3f}] cycles")
print(f"guaranteed latency       : {bounds.latency_ns:.2f} ns")
print(f"guaranteed throughput    : {bounds.throughput_pkt_per_ns:.2f} packets/ns")
print(f"oscillator error budget  : {100 * bounds.max_rate_error:.2f}%")

# The threshold window narrows as the ring shrinks relative to the delays.
print("\nfeasible threshold interval vs ring size:")
for n in (2, 4, 8):
    rng = feasible_threshold_range(params, n)
    print(f"  N={n}: [{rng[0]:.3f}, {rng[1]:.3f}] cycles")

# A slower oscillator response eventually makes N=2 infeasible.
print("\noscillator response time vs N=2 feasibility:")
for t_osc in (200.0, 1000.0, 2000.0, 3000.0):
    import dataclasses
    slower = dataclasses.replace(params, t_osc_ps=t_osc)
    rng = feasible_threshold_range(slower, 2)
    verdict = f"[{rng[0]:.3f}, {rng[1]:.3f}]" if rng else "infeasible"
    print(f"  T_osc={t_osc:6.0f} ps: {verdict}")

# Wider nominal spacing buys more oscillator error headroom.
print("\nnominal pair -> tolerable two-sided frequency error:")
for fast in (2.3, 2.5, 3.0):
    print(f"  2.0/{fast} GHz: {100 * max_frequency_error(2.0, fast):.2f}%")

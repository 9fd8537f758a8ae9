"""Canonical parameter sets used by the shipped configs, demos and tests."""

from __future__ import annotations

import dataclasses

from .analysis import LinkParams, RateBand
from .engine import Fidelity, SimConfig
from .oscillator import UnlockedPolicy


def paper_asic_params() -> LinkParams:
    """2.0 / 2.3 GHz behavioral bands with a two-cell ring.

    Band widths of 50 MHz model per-step drift inside each locked mode
    while keeping the analysis anchors s- = 2.0 and f+ = 2.3 GHz.
    """
    return LinkParams(
        band=RateBand.from_ghz(2.0, 2.05, 2.25, 2.3),
        t_osc_ps=200.0,
        tau_s_ps=100.0,
        tau_r_ps=100.0,
        tau_max_ps=50.0,
        delta_cycles=0.1,
        n_cells=2,
    )


def paper_spice_params() -> LinkParams:
    """2.09 / 2.42 GHz operating points of the transistor-level design."""
    return LinkParams(
        band=RateBand.from_ghz(2.09, 2.14, 2.37, 2.42),
        t_osc_ps=200.0,
        tau_s_ps=100.0,
        tau_r_ps=100.0,
        tau_max_ps=50.0,
        delta_cycles=0.1,
        n_cells=2,
    )


def adversarial_infeasible_params() -> LinkParams:
    """Oscillator response time inflated until no threshold is feasible at
    N = 2; used by the negative safety test."""
    return dataclasses.replace(paper_asic_params(), t_osc_ps=5000.0)


def paper_asic_config(
    seed: int = 0,
    cycles: int = 10_000,
    policy: UnlockedPolicy = UnlockedPolicy.UNIFORM_RANDOM,
    fidelity: Fidelity = Fidelity.BEHAVIORAL,
) -> SimConfig:
    return SimConfig(
        params=paper_asic_params(),
        seed=seed,
        duration_cycles=cycles,
        policy_snd=policy,
        policy_rcv=policy,
        fidelity=fidelity,
    )


def paper_spice_config(seed: int = 0, cycles: int = 10_000) -> SimConfig:
    return SimConfig(params=paper_spice_params(), seed=seed, duration_cycles=cycles)


def adversarial_infeasible_config(seed: int = 0, cycles: int = 10_000) -> SimConfig:
    return SimConfig(
        params=adversarial_infeasible_params(),
        seed=seed,
        duration_cycles=cycles,
        policy_snd=UnlockedPolicy.ADVERSARIAL_TOWARD_PEER,
        policy_rcv=UnlockedPolicy.ADVERSARIAL_TOWARD_PEER,
        halt_on_violation=True,
    )

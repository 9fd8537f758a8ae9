"""Command-line front end: bound solving, simulation, offset sweeps.

Configuration lives in a YAML file whose keys mirror the model constants
(units suffixed onto every key); command-line flags override file values.
Exit codes are a stable contract:

    0  success / feasible / no violations
    1  malformed configuration or usage error
    2  infeasible parameter set (solve)
    3  violations recorded (simulate)
    4  I/O failure
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Any, Dict, Optional, Sequence

import yaml

from . import engine
from .analysis import LinkParams, RateBand, max_frequency_error, solve
from .engine import Fidelity, SimConfig
from .oscillator import UnlockedPolicy

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_VIOLATIONS = 3
EXIT_IO = 4


class ConfigError(Exception):
    pass


_TOP_KEYS = {
    "band_ghz", "t_osc_ps", "tau_s_ps", "tau_r_ps", "tau_max_ps",
    "delta_cycles", "n_cells", "threshold_cycles", "nominal_ghz", "sim",
}
_SIM_KEYS = {
    "cycles", "duration_ps", "seed", "step_ps", "rate_quantum_ps",
    "unlocked_policy", "fidelity", "initial_offset_ps",
    "initial_c_snd_cycles", "initial_c_rcv_cycles", "halt_on_violation",
    "trace_stride_ps", "gap_trace_stride_ps", "stabilization_band_cycles",
    "stabilization_window_cycles", "ff_setup_ps", "ff_hold_ps", "engine_path",
}

_DEFAULTS = {
    "t_osc_ps": 200.0,
    "tau_s_ps": 100.0,
    "tau_r_ps": 100.0,
    "tau_max_ps": 50.0,
    "delta_cycles": 0.1,
    "n_cells": 2,
}


def _reject_unknown(mapping: Dict[str, Any], allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def load_config(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    _reject_unknown(doc, _TOP_KEYS, "config")
    if "sim" in doc:
        if not isinstance(doc["sim"], dict):
            raise ConfigError("'sim' must be a mapping")
        _reject_unknown(doc["sim"], _SIM_KEYS, "sim")
    return doc


def build_params(doc: Dict[str, Any]) -> LinkParams:
    if "band_ghz" not in doc:
        raise ConfigError("missing required key 'band_ghz'")
    band = doc["band_ghz"]
    if (not isinstance(band, dict) or set(band) != {"slow", "fast"}
            or len(band["slow"]) != 2 or len(band["fast"]) != 2):
        raise ConfigError("'band_ghz' needs 'slow: [lo, hi]' and 'fast: [lo, hi]'")
    defaulted = [k for k in _DEFAULTS if k not in doc]
    if defaulted:
        print(f"note: defaulted keys: {', '.join(sorted(defaulted))}", file=sys.stderr)
    try:
        return LinkParams(
            band=RateBand.from_ghz(band["slow"][0], band["slow"][1],
                                   band["fast"][0], band["fast"][1]),
            t_osc_ps=float(doc.get("t_osc_ps", _DEFAULTS["t_osc_ps"])),
            tau_s_ps=float(doc.get("tau_s_ps", _DEFAULTS["tau_s_ps"])),
            tau_r_ps=float(doc.get("tau_r_ps", _DEFAULTS["tau_r_ps"])),
            tau_max_ps=float(doc.get("tau_max_ps", _DEFAULTS["tau_max_ps"])),
            delta_cycles=float(doc.get("delta_cycles", _DEFAULTS["delta_cycles"])),
            n_cells=int(doc.get("n_cells", _DEFAULTS["n_cells"])),
            threshold_cycles=doc.get("threshold_cycles"),
        )
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e


def _parse_policy(name: str) -> UnlockedPolicy:
    try:
        return UnlockedPolicy(name)
    except ValueError:
        valid = ", ".join(p.value for p in UnlockedPolicy)
        raise ConfigError(f"unknown unlocked_policy {name!r} (choose from {valid})")


def build_sim_config(doc: Dict[str, Any], args: argparse.Namespace) -> SimConfig:
    params = build_params(doc)
    sim = doc.get("sim", {}) or {}

    policy_doc = sim.get("unlocked_policy", "uniform_random")
    if isinstance(policy_doc, dict):
        _reject_unknown(policy_doc, {"snd", "rcv"}, "sim.unlocked_policy")
        pol_s = _parse_policy(policy_doc.get("snd", "uniform_random"))
        pol_r = _parse_policy(policy_doc.get("rcv", "uniform_random"))
    else:
        pol_s = pol_r = _parse_policy(str(policy_doc))
    if getattr(args, "policy", None):
        pol_s = pol_r = _parse_policy(args.policy)

    cycles = sim.get("cycles")
    duration_ps = sim.get("duration_ps")
    if getattr(args, "cycles", None) is not None:
        cycles, duration_ps = args.cycles, None
    if cycles is None and duration_ps is None:
        cycles = 10_000

    fidelity = Fidelity(sim.get("fidelity", "behavioral"))
    if getattr(args, "fidelity", None):
        fidelity = Fidelity(args.fidelity)

    seed = sim.get("seed", 0)
    if getattr(args, "seed", None) is not None:
        seed = args.seed

    try:
        cfg = SimConfig(
            params=params,
            seed=int(seed),
            duration_cycles=int(cycles) if cycles is not None else None,
            duration_ps=float(duration_ps) if duration_ps is not None else None,
            step_ps=float(sim.get("step_ps", 1.0)),
            rate_quantum_ps=float(sim.get("rate_quantum_ps", 1.0)),
            policy_snd=pol_s,
            policy_rcv=pol_r,
            fidelity=fidelity,
            initial_offset_ps=sim.get("initial_offset_ps"),
            initial_c_snd_cycles=float(sim.get("initial_c_snd_cycles", 0.0)),
            initial_c_rcv_cycles=float(sim.get("initial_c_rcv_cycles", 0.0)),
            halt_on_violation=bool(sim.get("halt_on_violation", False)),
            trace_stride_ps=float(sim.get("trace_stride_ps", 0.0)),
            gap_trace_stride_ps=float(sim.get("gap_trace_stride_ps", 0.0)),
            stabilization_band_cycles=float(sim.get("stabilization_band_cycles", 0.25)),
            stabilization_window_cycles=int(sim.get("stabilization_window_cycles", 50)),
            ff_setup_ps=float(sim.get("ff_setup_ps", 30.0)),
            ff_hold_ps=float(sim.get("ff_hold_ps", 10.0)),
            engine_path=str(sim.get("engine_path", "auto")),
        )
        if getattr(args, "trace_out", None):
            stride = cfg.trace_stride_ps or 10.0 * cfg.rate_quantum_ps
            cfg = dataclasses.replace(cfg, trace_stride_ps=stride)
        cfg.validate()
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from e
    return cfg


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _emit(key: str, value: Any) -> None:
    print(f"{key} = {_fmt(value)}")


def cmd_solve(args: argparse.Namespace) -> int:
    doc = load_config(args.config)
    params = build_params(doc)
    n = args.n if args.n is not None else params.n_cells
    nominal = doc.get("nominal_ghz") or {}
    if nominal:
        _reject_unknown(nominal, {"slow", "fast"}, "nominal_ghz")
    bounds = solve(
        params, n=n,
        nominal_slow_ghz=nominal.get("slow"),
        nominal_fast_ghz=nominal.get("fast"),
    )
    n_eval = n if n is not None else bounds.n_min
    _emit("delta", bounds.delta_cap)
    _emit("n_min", bounds.n_min)
    _emit("n", n_eval)
    _emit("t_ctr_ps", bounds.t_ctr_ps)
    _emit("feasible", bounds.feasible)
    if bounds.t_range is not None:
        _emit("threshold_min_cycles", bounds.t_range[0])
        _emit("threshold_max_cycles", bounds.t_range[1])
        _emit("latency_ns", bounds.latency_ns)
        _emit("throughput_pkt_per_ns", bounds.throughput_pkt_per_ns)
    else:
        b = params.band
        drift = (b.f_plus - b.s_minus) * (params.t_osc_ps + params.t_ctr_ps)
        access = b.f_plus * params.tau_access_max_ps
        lower = max(params.delta_cycles, params.sample_offset_cycles)
        upper = n_eval / 2 - drift - access
        _emit("threshold_lower_cycles", lower)
        _emit("threshold_upper_cycles", upper)
        _emit(
            "infeasible_reason",
            f"upper bound n/2 - drift({drift:.6g}) - access({access:.6g}) = "
            f"{upper:.6g} falls below lower bound max(delta, sampling offset) = {lower:.6g}",
        )
    if bounds.max_rate_error is not None:
        _emit("max_frequency_error", bounds.max_rate_error)
        _emit("max_frequency_error_pct", 100.0 * bounds.max_rate_error)
    return EXIT_OK if bounds.feasible else EXIT_INFEASIBLE


def cmd_simulate(args: argparse.Namespace) -> int:
    doc = load_config(args.config)
    cfg = build_sim_config(doc, args)
    result = engine.run(cfg)
    s = result.stats
    _emit("seed", cfg.seed)
    _emit("fidelity", cfg.fidelity.value)
    _emit("engine", result.engine_used)
    _emit("duration_ns", s.duration_ns)
    _emit("cycles_completed", s.cycles_completed)
    _emit("sender_writes", s.sender_writes)
    _emit("fraction_time_md_m", s.fraction_time_md_m)
    _emit("max_abs_clock_diff_cycles", s.max_abs_clock_diff)
    _emit("throughput_pkt_per_ns", s.measured_throughput_pkt_per_ns)
    if s.measured_latency_max_ns is not None:
        _emit("latency_max_ns", s.measured_latency_max_ns)
    _emit("avg_frequency_ghz", s.avg_frequency_ghz)
    _emit("fill_mean", s.fill_mean)
    _emit("fill_final", s.fill_final)
    for kind, count in result.counts.items():
        _emit(f"violations.{kind}", count)
    _emit("violations_total", result.total_violations)
    try:
        if args.trace_out:
            if result.trace is None:
                raise OSError("no trace captured")
            engine.export_trace_csv(result.trace, args.trace_out)
            _emit("trace_csv", args.trace_out)
        if args.vcd:
            if result.trace is None:
                raise OSError("no trace captured")
            engine.export_trace_vcd(result.trace, args.vcd)
            _emit("trace_vcd", args.vcd)
    except OSError as e:
        print(f"error: trace export failed: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_VIOLATIONS if result.total_violations else EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    doc = load_config(args.config)
    cfg = build_sim_config(doc, args)
    try:
        offsets = [float(x) for x in args.offsets.split(",") if x.strip() != ""]
    except ValueError as e:
        raise ConfigError(f"bad offset list: {e}") from e
    if not offsets:
        raise ConfigError("offset list must not be empty")
    points = engine.sweep_initial_offset(cfg, offsets)
    header = "offset_ps,stabilization_time_ns,final_gap_cycles,violations,violations_post_stab,stabilized"
    lines = [header]
    for p in points:
        lines.append(",".join([
            f"{p.offset_ps:.3f}",
            f"{p.stabilization_time_ns:.6f}" if p.stabilization_time_ns is not None else "",
            f"{p.final_gap_cycles:.6f}" if p.final_gap_cycles is not None else "",
            str(p.violations_total),
            str(p.violations_post_stab),
            "1" if p.stabilized else "0",
        ]))
    out = "\n".join(lines) + "\n"
    print(out, end="")
    try:
        if args.out:
            with open(args.out, "w", encoding="ascii") as f:
                f.write(out)
        if args.curves_out:
            engine.export_sweep_curves_csv(points, args.curves_out)
    except OSError as e:
        print(f"error: cannot write sweep output: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osclink",
        description="Simulator and bound calculator for a synchronizer-free "
                    "link between tunable clock domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="evaluate feasibility bounds")
    p_solve.add_argument("config", help="YAML config file")
    p_solve.add_argument("--n", type=int, default=None, help="ring size to evaluate")
    p_solve.set_defaults(fn=cmd_solve)

    p_sim = sub.add_parser("simulate", help="run one simulation")
    p_sim.add_argument("config")
    p_sim.add_argument("--cycles", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--fidelity", choices=[f.value for f in Fidelity], default=None)
    p_sim.add_argument("--policy", choices=[p.value for p in UnlockedPolicy], default=None)
    p_sim.add_argument("--trace-out", default=None, help="write trace CSV here")
    p_sim.add_argument("--vcd", default=None, help="write trace VCD here")
    p_sim.set_defaults(fn=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="initialization-offset sweep")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--offsets", required=True,
                         help="comma-separated offsets in ps; use the = form "
                              "for negative values, e.g. --offsets=-75,0,30,50")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--cycles", type=int, default=None)
    p_sweep.add_argument("--out", default=None, help="write sweep CSV here")
    p_sweep.add_argument("--curves-out", default=None,
                         help="write per-offset pointer-gap curves CSV here")
    p_sweep.set_defaults(fn=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

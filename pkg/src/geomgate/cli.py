"""Command-line harness: synth | qpt | rb | selftest.

Reads a JSON experiment config, runs the requested characterization, and
writes plot-ready CSV / JSON artifacts into the output directory (flag
--out, falling back to $GEOMGATE_OUT, then ./geomgate_out). Every report
embeds the fully resolved configuration. Exit codes: 0 success, 2 config
error, 3 fit divergence, 4 invariant failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import benchmarking, evolution, pulse, tomography
from .channels import GateChannelCache
from .config import (config_to_dict, load_config, parse_mode,
                     resolve_gate)
from .errors import ConfigError, GeomgateError
from .qcore import axis_eigenstates
from .selftest import run_selftest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FIT = 3
EXIT_INVARIANT = 4


def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_synth(cfg: ExperimentConfig, outdir: Path) -> int:
    if cfg.synth is None:
        raise ConfigError("config has no synth section")
    spec = resolve_gate(cfg.synth)
    schedule = pulse.synthesize(spec, cfg.segment_duration_ns)
    pulse.save_schedule(schedule, outdir / "schedule.json")

    psi_plus, _ = axis_eigenstates(spec)
    traj = evolution.evolve_unitary(schedule, psi_plus, dt=cfg.dt_ns)
    evolution.trajectory_to_csv(traj, outdir / "trajectory.csv")
    evolution.bloch_path_to_csv(traj, outdir / "bloch_path.csv")

    report = evolution.phase_decomposition(traj)
    _write_json({"config": config_to_dict(cfg),
                 "total_phase": report.total,
                 "dynamical_phase": report.dynamical,
                 "geometric_phase": report.geometric,
                 "cyclicity_defect": report.cyclicity_defect},
                outdir / "phase_report.json")
    print(f"gate ({spec.theta:.6f}, {spec.phi:.6f}, {spec.gamma:.6f})")
    print(f"total phase      {report.total:+.9f} rad")
    print(f"dynamical phase  {report.dynamical:+.9f} rad")
    print(f"geometric phase  {report.geometric:+.9f} rad")
    print(f"cyclicity defect {report.cyclicity_defect:.3e}")
    return EXIT_OK


def cmd_qpt(cfg: ExperimentConfig, outdir: Path) -> int:
    if cfg.qpt is None:
        raise ConfigError("config has no qpt section")
    cache = GateChannelCache(cfg.device, cfg.segment_duration_ns, cfg.dt_ns)
    fidelities = []
    for name in cfg.qpt.gates:
        result = tomography.run_qpt(name, device=cfg.device, shots=cfg.shots,
                                    seed=cfg.seed, channels=cache)
        payload = tomography.qpt_report(result, gate_name=name)
        payload["config"] = config_to_dict(cfg)
        _write_json(payload, outdir / f"qpt_{_slug(name)}.json")
        tomography.chi_to_csv(result.chi, outdir / f"chi_{_slug(name)}.csv")
        fidelities.append(result.fidelity)
        print(f"{name:9s} F_P = {result.fidelity:.6f}")
    avg = float(np.mean(fidelities))
    _write_json({"config": config_to_dict(cfg),
                 "gates": list(cfg.qpt.gates),
                 "fidelities": fidelities,
                 "average_fidelity": avg},
                outdir / "qpt_summary.json")
    print(f"average F_P over {len(fidelities)} gates = {avg:.6f}")
    return EXIT_OK


def cmd_rb(cfg: ExperimentConfig, outdir: Path) -> int:
    if cfg.rb is None:
        raise ConfigError("config has no rb section")
    section = cfg.rb
    base = benchmarking.RbConfig(sequence_lengths=section.lengths,
                                 randomizations=section.randomizations,
                                 shots=cfg.shots, seed=cfg.seed,
                                 readout_correction=section.readout_correction)
    cache = GateChannelCache(cfg.device, cfg.segment_duration_ns, cfg.dt_ns)
    curve, ref_fit, ref_result = benchmarking.run_reference_rb(
        base, cfg.device, channels=cache)
    benchmarking.decay_to_csv(curve, outdir / "rb_reference.csv")
    payload = benchmarking.fit_report(ref_result)
    payload["config"] = config_to_dict(cfg)
    _write_json(payload, outdir / "rb_reference_fit.json")
    print(f"reference: p={ref_fit.p:.6f} r={ref_result.r:.6f} "
          f"F_avg={ref_result.F_avg:.6f} converged={ref_fit.converged}")

    diverged = not ref_fit.converged
    for target in section.interleaved:
        icfg = benchmarking.RbConfig(sequence_lengths=section.lengths,
                                     randomizations=section.randomizations,
                                     shots=cfg.shots, seed=cfg.seed,
                                     interleaved_target=target,
                                     readout_correction=section.readout_correction)
        icurve, ifit, iresult = benchmarking.run_interleaved_rb(
            icfg, cfg.device, reference=ref_fit, channels=cache)
        slug = _slug(target)
        benchmarking.decay_to_csv(icurve, outdir / f"rb_interleaved_{slug}.csv")
        payload = benchmarking.fit_report(iresult)
        payload["config"] = config_to_dict(cfg)
        payload["target"] = target
        _write_json(payload, outdir / f"rb_interleaved_{slug}_fit.json")
        print(f"interleaved {target:9s} p_g={iresult.p_g:.6f} "
              f"F_g={iresult.F_g:.6f} converged={ifit.converged}")
        diverged = diverged or not ifit.converged
    return EXIT_FIT if diverged else EXIT_OK


def cmd_selftest(seed: int) -> int:
    report = run_selftest(seed=seed)
    sys.stdout.write(report.text)
    print(f"report sha256: {report.digest}")
    return EXIT_OK if report.all_passed else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomgate",
        description="Synthesis and characterization of geometric single-qubit gates.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("synth", True), ("qpt", True), ("rb", True),
                               ("selftest", False)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config,
                       help="path to the JSON experiment config")
        p.add_argument("--out", default=None,
                       help="output directory (default $GEOMGATE_OUT or ./geomgate_out)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--mode", default=None,
                       help="override the config mode: exact | shots:<n>")
        p.add_argument("--jobs", type=int, default=1,
                       help="max parallel workers (results are identical for any value)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outdir = Path(args.out or os.environ.get("GEOMGATE_OUT", "geomgate_out"))
    try:
        cfg = None
        if args.config is not None:
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg = dataclasses.replace(cfg, seed=args.seed)
            if args.mode is not None:
                cfg = dataclasses.replace(cfg, shots=parse_mode(args.mode))
        if args.command == "selftest":
            seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
            return cmd_selftest(seed)
        outdir.mkdir(parents=True, exist_ok=True)
        if args.command == "synth":
            return cmd_synth(cfg, outdir)
        if args.command == "qpt":
            return cmd_qpt(cfg, outdir)
        if args.command == "rb":
            return cmd_rb(cfg, outdir)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except GeomgateError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

"""Experiment configuration: JSON loading, validation, and materialization.

A config document is a single JSON object; unknown fields anywhere are
rejected and every embedded value is validated on load. Reports emitted by
the CLI embed the fully resolved configuration so no defaults stay hidden.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .benchmarking import DEFAULT_LENGTHS
from .errors import ConfigError
from .evolution import DeviceParams
from .qcore import GATE_NAMES, GateSpec, named_gate


@dataclass(frozen=True)
class SynthSection:
    gate: str | None = None
    theta: float | None = None
    phi: float | None = None
    gamma: float | None = None


@dataclass(frozen=True)
class QptSection:
    gates: tuple[str, ...] = GATE_NAMES


@dataclass(frozen=True)
class RbSection:
    lengths: tuple[int, ...] = DEFAULT_LENGTHS
    randomizations: int = 50
    interleaved: tuple[str, ...] = ()
    readout_correction: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    device: DeviceParams | None = None
    segment_duration_ns: float = 10.0
    dt_ns: float = 0.01
    shots: int | None = None
    seed: int = 0
    synth: SynthSection | None = None
    qpt: QptSection | None = None
    rb: RbSection | None = None


DEFAULT_SHOTS = 4096


def parse_mode(text: str) -> int | None:
    """"exact" -> None; "shots:<n>" -> n; bare "shots" -> 4096."""
    if text == "exact":
        return None
    if text == "shots":
        return DEFAULT_SHOTS
    if text.startswith("shots:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"invalid shot count in mode {text!r}") from None
        if n < 1:
            raise ConfigError(f"shot count must be >= 1, got {n}")
        return n
    raise ConfigError(f"mode must be 'exact' or 'shots:<n>', got {text!r}")


def mode_string(shots: int | None) -> str:
    return "exact" if shots is None else f"shots:{shots}"


def _check_fields(section: dict, allowed: set[str], where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown field {key!r} "
                              f"(allowed: {', '.join(sorted(allowed))})")


def _parse_device(data, where: str) -> DeviceParams | None:
    if data is None:
        return None
    _check_fields(data, {"T1_us", "T2_star_us", "f10_GHz",
                         "readout_f0", "readout_f1"}, where)
    try:
        return DeviceParams(**data)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{where}: {err}") from None


def _parse_synth(data, where: str) -> SynthSection:
    _check_fields(data, {"gate", "theta", "phi", "gamma"}, where)
    section = SynthSection(**data)
    resolve_gate(section)  # validates eagerly
    return section


def _parse_qpt(data, where: str) -> QptSection:
    _check_fields(data, {"gates"}, where)
    gates = tuple(data.get("gates", GATE_NAMES))
    for g in gates:
        named_gate(g)
    if not gates:
        raise ConfigError(f"{where}: gates list is empty")
    return QptSection(gates=gates)


def _parse_rb(data, where: str) -> RbSection:
    _check_fields(data, {"lengths", "randomizations", "interleaved",
                         "readout_correction"}, where)
    section = RbSection(
        lengths=tuple(data.get("lengths", DEFAULT_LENGTHS)),
        randomizations=int(data.get("randomizations", 50)),
        interleaved=tuple(data.get("interleaved", ())),
        readout_correction=bool(data.get("readout_correction", True)),
    )
    lengths = section.lengths
    if not lengths or any(int(m) < 1 for m in lengths):
        raise ConfigError(f"{where}: lengths must be positive")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ConfigError(f"{where}: lengths must be strictly increasing")
    if section.randomizations < 2:
        raise ConfigError(f"{where}: randomizations must be >= 2")
    for g in section.interleaved:
        named_gate(g)
    return section


def resolve_gate(section: SynthSection) -> GateSpec:
    """Gate spec from a name or explicit (theta, phi, gamma) angles."""
    angles = (section.theta, section.phi, section.gamma)
    if section.gate is not None:
        if any(a is not None for a in angles):
            raise ConfigError("synth: give either a gate name or angles, not both")
        try:
            return named_gate(section.gate)
        except Exception as err:
            raise ConfigError(f"synth: {err}") from None
    if any(a is None for a in angles):
        raise ConfigError("synth: need a gate name or all of theta/phi/gamma")
    try:
        return GateSpec(section.theta, section.phi, section.gamma)
    except ValueError as err:
        raise ConfigError(f"synth: {err}") from None


def config_from_dict(data: dict, where: str = "config") -> ExperimentConfig:
    _check_fields(data, {"device", "segment_duration_ns", "dt_ns", "mode",
                         "seed", "synth", "qpt", "rb"}, where)
    device = _parse_device(data.get("device"), f"{where}.device")
    seg_t = float(data.get("segment_duration_ns", 10.0))
    dt = float(data.get("dt_ns", 0.01))
    if not seg_t > 0:
        raise ConfigError(f"{where}: segment_duration_ns must be positive")
    if not 0 < dt <= seg_t / 100.0:
        raise ConfigError(f"{where}: dt_ns must be in (0, segment_duration_ns/100]")
    shots = parse_mode(data.get("mode", "exact"))
    seed = int(data.get("seed", 0))
    try:
        synth = (_parse_synth(data["synth"], f"{where}.synth")
                 if "synth" in data and data["synth"] is not None else None)
        qpt = (_parse_qpt(data["qpt"], f"{where}.qpt")
               if "qpt" in data and data["qpt"] is not None else None)
        rb = (_parse_rb(data["rb"], f"{where}.rb")
              if "rb" in data and data["rb"] is not None else None)
    except ConfigError:
        raise
    except Exception as err:
        raise ConfigError(f"{where}: {err}") from None
    return ExperimentConfig(device=device, segment_duration_ns=seg_t,
                            dt_ns=dt, shots=shots, seed=seed,
                            synth=synth, qpt=qpt, rb=rb)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(data, where=str(path))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Fully materialized configuration (explicit defaults included)."""
    out = {
        "device": None if cfg.device is None else {
            "T1_us": cfg.device.T1_us,
            "T2_star_us": cfg.device.T2_star_us,
            "f10_GHz": cfg.device.f10_GHz,
            "readout_f0": cfg.device.readout_f0,
            "readout_f1": cfg.device.readout_f1,
        },
        "segment_duration_ns": cfg.segment_duration_ns,
        "dt_ns": cfg.dt_ns,
        "mode": mode_string(cfg.shots),
        "seed": cfg.seed,
    }
    if cfg.synth is not None:
        spec = resolve_gate(cfg.synth)
        out["synth"] = {"gate": cfg.synth.gate, "theta": spec.theta,
                        "phi": spec.phi, "gamma": spec.gamma}
    if cfg.qpt is not None:
        out["qpt"] = {"gates": list(cfg.qpt.gates)}
    if cfg.rb is not None:
        out["rb"] = {"lengths": list(cfg.rb.lengths),
                     "randomizations": cfg.rb.randomizations,
                     "interleaved": list(cfg.rb.interleaved),
                     "readout_correction": cfg.rb.readout_correction}
    return out

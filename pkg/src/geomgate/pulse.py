"""Three-segment slice-path pulse synthesis.

A target rotation (theta, phi, gamma) compiles to three equal-duration
resonant-drive segments. Segment pulse areas are (theta/2, pi/2,
pi/2 - theta/2) and the carrier phase offsets are (phi - pi/2,
phi - gamma/2 + pi/2, phi - pi/2); the middle segment changes the drive
plane so the driven state traces a closed slice-shaped loop through both
poles of the rotation axis. The default envelope Omega0 * sin^2(pi t / T)
turns on and off smoothly at the segment edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import InvalidDuration, OutOfRange
from .qcore import GateSpec

ENVELOPES = ("sin2", "square")


@dataclass(frozen=True)
class PulseSegment:
    """One constant-phase drive interval.

    duration in ns, peak_amplitude in rad/ns, phase_offset in rad.
    """

    duration: float
    peak_amplitude: float
    phase_offset: float
    envelope: str = "sin2"

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.peak_amplitude < 0:
            raise ValueError("peak_amplitude must be nonnegative")
        if self.envelope not in ENVELOPES:
            raise ValueError(f"unknown envelope {self.envelope!r}")


def amplitude_at(segment: PulseSegment, t: float) -> float:
    """Instantaneous Rabi rate at local time t in [0, duration]."""
    if not 0 <= t <= segment.duration:
        raise OutOfRange(f"t={t} outside [0, {segment.duration}]")
    if segment.envelope == "square":
        return segment.peak_amplitude
    if t == 0.0 or t == segment.duration:
        return 0.0
    s = math.sin(math.pi * t / segment.duration)
    return segment.peak_amplitude * s * s


def segment_area(segment: PulseSegment) -> float:
    """Closed-form pulse area: Omega0 T / 2 for sin^2, Omega0 T for square."""
    if segment.envelope == "square":
        return segment.peak_amplitude * segment.duration
    return 0.5 * segment.peak_amplitude * segment.duration


def segment_area_quadrature(segment: PulseSegment) -> float:
    """Adaptive-quadrature pulse area; oracle for the closed form."""
    val, _ = quad(lambda t: amplitude_at(segment, t), 0.0, segment.duration,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered three-segment schedule realizing ``source_spec``.

    Boundary times tau1 < tau2 < tau delimit the segments; areas and phase
    offsets are pinned to the source spec and checked on construction.
    """

    segments: tuple[PulseSegment, PulseSegment, PulseSegment]
    source_spec: GateSpec
    tau1: float
    tau2: float
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if len(self.segments) != 3:
            raise ValueError("schedule requires exactly 3 segments")
        if not self.tau1 < self.tau2 < self.tau:
            raise ValueError("boundary times must satisfy tau1 < tau2 < tau")
        durations = [s.duration for s in self.segments]
        bounds = (self.tau1, self.tau2 - self.tau1, self.tau - self.tau2)
        if any(abs(d - b) > 1e-9 for d, b in zip(durations, bounds)):
            raise ValueError("segment durations do not match boundary times")
        spec = self.source_spec
        want_areas = (0.5 * spec.theta, 0.5 * math.pi,
                      0.5 * math.pi - 0.5 * spec.theta)
        for seg, a in zip(self.segments, want_areas):
            if abs(segment_area(seg) - a) > 1e-12:
                raise ValueError("segment areas inconsistent with source spec")
        want_phases = (spec.phi - 0.5 * math.pi,
                       spec.phi - 0.5 * spec.gamma + 0.5 * math.pi,
                       spec.phi - 0.5 * math.pi)
        for seg, p in zip(self.segments, want_phases):
            if abs(seg.phase_offset - p) > 1e-12:
                raise ValueError("segment phases inconsistent with source spec")

    @property
    def total_duration(self) -> float:
        return self.tau


def synthesize(spec: GateSpec, segment_duration: float = 10.0,
               envelope: str = "sin2") -> PulseSchedule:
    """Compile a rotation spec into its three-segment schedule.

    Every segment lasts ``segment_duration`` ns; the peak amplitude of
    segment k is scaled so its area matches the protocol. A zero-area
    segment (theta = 0 or pi) is emitted with zero amplitude so the total
    gate time is always 3 T.
    """
    if segment_duration <= 0:
        raise InvalidDuration(f"segment duration must be > 0, got {segment_duration}")
    areas = (0.5 * spec.theta, 0.5 * math.pi, 0.5 * math.pi - 0.5 * spec.theta)
    phases = (spec.phi - 0.5 * math.pi,
              spec.phi - 0.5 * spec.gamma + 0.5 * math.pi,
              spec.phi - 0.5 * math.pi)
    scale = 1.0 if envelope == "square" else 2.0
    segments = tuple(
        PulseSegment(duration=segment_duration,
                     peak_amplitude=scale * a / segment_duration,
                     phase_offset=p,
                     envelope=envelope)
        for a, p in zip(areas, phases)
    )
    return PulseSchedule(segments=segments, source_spec=spec,
                         tau1=segment_duration,
                         tau2=2.0 * segment_duration,
                         tau=3.0 * segment_duration)


# ---------------------------------------------------------------------------
# serialization

def schedule_to_dict(schedule: PulseSchedule) -> dict:
    spec = schedule.source_spec
    return {
        "theta": spec.theta,
        "phi": spec.phi,
        "gamma": spec.gamma,
        "T_ns": schedule.segments[0].duration,
        "segments": [
            {
                "duration_ns": s.duration,
                "peak_rad_per_ns": s.peak_amplitude,
                "phase_rad": s.phase_offset,
                "envelope": s.envelope,
            }
            for s in schedule.segments
        ],
    }


def schedule_from_dict(data: dict) -> PulseSchedule:
    spec = GateSpec(data["theta"], data["phi"], data["gamma"])
    segments = tuple(
        PulseSegment(duration=s["duration_ns"],
                     peak_amplitude=s["peak_rad_per_ns"],
                     phase_offset=s["phase_rad"],
                     envelope=s["envelope"])
        for s in data["segments"]
    )
    t1 = segments[0].duration
    t2 = t1 + segments[1].duration
    tau = t2 + segments[2].duration
    return PulseSchedule(segments=segments, source_spec=spec,
                         tau1=t1, tau2=t2, tau=tau)


def save_schedule(schedule: PulseSchedule, path) -> None:
    with open(path, "w") as fh:
        json.dump(schedule_to_dict(schedule), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_schedule(path) -> PulseSchedule:
    with open(path) as fh:
        return schedule_from_dict(json.load(fh))

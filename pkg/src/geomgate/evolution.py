"""Schedule propagation and trajectory analysis.

Within one segment the rotating-frame Hamiltonian
H(t) = Omega(t) (cos(phi') sx + sin(phi') sy) commutes with itself at all
times, so the exact segment propagator depends only on the pulse area.
Numerical propagation uses fixed-step classical RK4, either for the pure
Schrodinger state or for the density matrix under a Lindblad master equation
with relaxation (rate 1/T1) and pure dephasing (rate 1/T2*).

Trajectory analysis splits the cyclic total phase into dynamical and
geometric parts and measures the solid angle enclosed by the Bloch path.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotCyclic, PathNotClosed, StepTooLarge
from .pulse import PulseSchedule, PulseSegment, amplitude_at, segment_area
from .qcore import I2, SIGMA_MINUS, SIGMA_X, SIGMA_Y, SIGMA_Z


@dataclass(frozen=True)
class DeviceParams:
    """Qubit decoherence and readout parameters.

    T1 and T2* are in microseconds (T2* is the pure dephasing time, used
    directly as Gamma_phi = 1/T2*); f10 is carried as metadata only, all
    dynamics live in the rotating frame.
    """

    T1_us: float
    T2_star_us: float
    f10_GHz: float = 5.266
    readout_f0: float = 0.980
    readout_f1: float = 0.936

    def __post_init__(self):
        if not self.T1_us > 0:
            raise ValueError("T1 must be positive")
        if not self.T2_star_us > 0:
            raise ValueError("T2* must be positive")
        for name, f in (("readout_f0", self.readout_f0),
                        ("readout_f1", self.readout_f1)):
            if not 0.5 < f <= 1.0:
                raise ValueError(f"{name}={f} outside (0.5, 1]")

    @property
    def gamma1_per_ns(self) -> float:
        return 1.0 / (self.T1_us * 1000.0)

    @property
    def gamma_phi_per_ns(self) -> float:
        return 1.0 / (self.T2_star_us * 1000.0)

    @classmethod
    def default_xmon(cls) -> "DeviceParams":
        """Reference Xmon-style device values used throughout the tests."""
        return cls(T1_us=19.0, T2_star_us=10.0, f10_GHz=5.266,
                   readout_f0=0.980, readout_f1=0.936)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-sampled evolution with the instantaneous Hamiltonian.

    ``states`` has shape (N, 2) for pure states or (N, 2, 2) for density
    matrices; ``hamiltonians`` has shape (N, 2, 2).
    """

    times: np.ndarray
    states: np.ndarray
    hamiltonians: np.ndarray

    @property
    def is_pure(self) -> bool:
        return self.states.ndim == 2


@dataclass(frozen=True)
class PhaseReport:
    """Cyclic-phase split: total = dynamical + geometric (mod 2 pi)."""

    total: float
    dynamical: float
    geometric: float
    cyclicity_defect: float


def wrap_angle(a: float) -> float:
    """Wrap to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def _drive_matrix(segment: PulseSegment) -> np.ndarray:
    """Constant matrix K with H(t) = Omega(t) K inside the segment."""
    return (math.cos(segment.phase_offset) * SIGMA_X
            + math.sin(segment.phase_offset) * SIGMA_Y)


def segment_propagator_exact(segment: PulseSegment) -> np.ndarray:
    """cos(a) I - i sin(a) (cos(phi') sx + sin(phi') sy), a = pulse area."""
    a = segment_area(segment)
    return math.cos(a) * I2 - 1j * math.sin(a) * _drive_matrix(segment)


def _segments_of(schedule) -> tuple[PulseSegment, ...]:
    if isinstance(schedule, PulseSchedule):
        return schedule.segments
    return tuple(schedule)


def schedule_propagator(schedule) -> np.ndarray:
    """Ordered product U_3 U_2 U_1 of the exact segment propagators."""
    u = I2
    for seg in _segments_of(schedule):
        u = segment_propagator_exact(seg) @ u
    return u


# ---------------------------------------------------------------------------
# fixed-step RK4 propagation

def _segment_steps(segment: PulseSegment, dt: float, min_steps: int) -> int:
    if dt <= 0:
        raise StepTooLarge(f"dt must be positive, got {dt}")
    if dt > segment.duration / min_steps:
        raise StepTooLarge(
            f"dt={dt} exceeds duration/{min_steps}={segment.duration / min_steps}"
        )
    return max(min_steps, int(round(segment.duration / dt)))


def _integrate(segments, y0: np.ndarray, dt: float, min_steps: int,
               make_rhs):
    """March RK4 across the segments, sampling every step.

    ``make_rhs(k_mat)`` returns f(omega, y) with H = omega * k_mat; omega is
    the instantaneous Rabi rate. Returns (times, states, hamiltonians).
    """
    times = [0.0]
    states = [y0]
    hams = [np.zeros((2, 2), dtype=complex)]
    y = y0
    t_off = 0.0
    for seg in segments:
        n = _segment_steps(seg, dt, min_steps)
        h = seg.duration / n
        k_mat = _drive_matrix(seg)
        rhs = make_rhs(k_mat)
        for i in range(n):
            t_loc = i * h
            w0 = amplitude_at(seg, t_loc)
            w1 = amplitude_at(seg, t_loc + 0.5 * h)
            w2 = amplitude_at(seg, min(t_loc + h, seg.duration))
            k1 = rhs(w0, y)
            k2 = rhs(w1, y + (0.5 * h) * k1)
            k3 = rhs(w1, y + (0.5 * h) * k2)
            k4 = rhs(w2, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            times.append(t_off + (i + 1) * h)
            states.append(y)
            hams.append(w2 * k_mat)
        t_off += seg.duration
    return (np.array(times), np.array(states), np.array(hams))


def _envelope_grid(segment: PulseSegment, n: int, h: float):
    """Rabi rate at the n+1 grid points and the n midpoints of a segment."""
    t_full = np.arange(n + 1) * h
    t_half = (np.arange(n) + 0.5) * h
    if segment.envelope == "square":
        return (np.full(n + 1, segment.peak_amplitude),
                np.full(n, segment.peak_amplitude))
    w_full = segment.peak_amplitude * np.sin(np.pi * t_full / segment.duration) ** 2
    w_full[0] = 0.0
    w_full[-1] = 0.0
    w_half = segment.peak_amplitude * np.sin(np.pi * t_half / segment.duration) ** 2
    return w_full, w_half


def evolve_unitary(schedule, psi0: np.ndarray, dt: float = 0.01) -> Trajectory:
    """Integrate i d|psi>/dt = H(t)|psi> over the schedule.

    Requires dt <= segment duration / 100; the actual step divides each
    segment exactly. The RK4 update runs on scalar amplitudes, exploiting
    K |psi> = (e^{-i phi'} c1, e^{+i phi'} c0).
    """
    segments = _segments_of(schedule)
    counts = [_segment_steps(seg, dt, 100) for seg in segments]
    total = sum(counts)

    times = np.empty(total + 1)
    states = np.empty((total + 1, 2), dtype=complex)
    hams = np.empty((total + 1, 2, 2), dtype=complex)
    times[0] = 0.0
    states[0] = np.asarray(psi0, dtype=complex)
    hams[0] = 0.0

    a, b = complex(psi0[0]), complex(psi0[1])
    pos = 0
    t_off = 0.0
    for seg, n in zip(segments, counts):
        h = seg.duration / n
        w_full, w_half = _envelope_grid(seg, n, h)
        k_mat = _drive_matrix(seg)
        em = -1j * complex(math.cos(seg.phase_offset), -math.sin(seg.phase_offset))
        ep = -1j * complex(math.cos(seg.phase_offset), math.sin(seg.phase_offset))
        hh = 0.5 * h
        h6 = h / 6.0
        wf = w_full.tolist()
        wm = w_half.tolist()
        for i in range(n):
            w0, w1, w2 = wf[i], wm[i], wf[i + 1]
            k1a = w0 * em * b
            k1b = w0 * ep * a
            a2 = a + hh * k1a
            b2 = b + hh * k1b
            k2a = w1 * em * b2
            k2b = w1 * ep * a2
            a3 = a + hh * k2a
            b3 = b + hh * k2b
            k3a = w1 * em * b3
            k3b = w1 * ep * a3
            a4 = a + h * k3a
            b4 = b + h * k3b
            k4a = w2 * em * b4
            k4b = w2 * ep * a4
            a = a + h6 * (k1a + 2.0 * (k2a + k3a) + k4a)
            b = b + h6 * (k1b + 2.0 * (k2b + k3b) + k4b)
            states[pos + i + 1, 0] = a
            states[pos + i + 1, 1] = b
        times[pos + 1:pos + n + 1] = t_off + np.arange(1, n + 1) * h
        hams[pos + 1:pos + n + 1] = w_full[1:, None, None] * k_mat
        pos += n
        t_off += seg.duration
    return Trajectory(times=times, states=states, hamiltonians=hams)


def evolve_lindblad(schedule, rho0: np.ndarray,
                    device: DeviceParams | None = None,
                    dt: float = 0.01) -> Trajectory:
    """Integrate the master equation over the schedule.

    d rho/dt = -i[H, rho] + G1 D[s-] rho + (Gphi/2) D[sz] rho with
    G1 = 1/T1, Gphi = 1/T2*. ``device=None`` turns dissipation off.
    """
    segments = _segments_of(schedule)
    g1 = device.gamma1_per_ns if device is not None else 0.0
    gphi = device.gamma_phi_per_ns if device is not None else 0.0
    sm = SIGMA_MINUS
    sp = sm.conj().T
    pe = sp @ sm  # |1><1|

    def make_rhs(k_mat):
        def rhs(omega, rho):
            h = omega * k_mat
            out = -1j * (h @ rho - rho @ h)
            if g1:
                out = out + g1 * (sm @ rho @ sp - 0.5 * (pe @ rho + rho @ pe))
            if gphi:
                out = out + 0.5 * gphi * (SIGMA_Z @ rho @ SIGMA_Z - rho)
            return out
        return rhs

    times, states, hams = _integrate(segments, np.asarray(rho0, dtype=complex),
                                     dt, 1, make_rhs)
    return Trajectory(times=times, states=states, hamiltonians=hams)


# ---------------------------------------------------------------------------
# trajectory analysis

def phase_decomposition(traj: Trajectory, cyclic_tol: float = 1e-6) -> PhaseReport:
    """Split the cyclic phase of a pure trajectory.

    total = arg<psi(0)|psi(tau)>, dynamical = -integral <psi|H|psi> dt
    (composite trapezoid over the samples), geometric = total - dynamical
    wrapped to [-pi, pi).
    """
    if not traj.is_pure:
        raise ValueError("phase decomposition requires a pure-state trajectory")
    overlap = np.vdot(traj.states[0], traj.states[-1])
    defect = 1.0 - abs(overlap)
    if defect > cyclic_tol:
        raise NotCyclic(f"cyclicity defect {defect:.3g} exceeds {cyclic_tol}")
    total = float(np.angle(overlap))
    expect = np.einsum("ti,tij,tj->t", traj.states.conj(), traj.hamiltonians,
                       traj.states).real
    dynamical = -float(np.trapezoid(expect, traj.times))
    geometric = wrap_angle(total - dynamical)
    return PhaseReport(total=total, dynamical=dynamical, geometric=geometric,
                       cyclicity_defect=max(defect, 0.0))


def bloch_trajectory(traj: Trajectory) -> np.ndarray:
    """(N, 3) array of Bloch vectors (<sx>, <sy>, <sz>) of a pure trajectory."""
    if not traj.is_pure:
        raise ValueError("bloch trajectory requires a pure-state trajectory")
    c0 = traj.states[:, 0]
    c1 = traj.states[:, 1]
    cross = c0.conj() * c1
    return np.column_stack([2.0 * cross.real,
                            2.0 * cross.imag,
                            (abs(c0) ** 2 - abs(c1) ** 2)])


def enclosed_solid_angle(path: np.ndarray, closure_tol: float = 1e-6) -> float:
    """Signed solid angle enclosed by a closed path of unit vectors.

    Sums the signed spherical-triangle excesses of the fan anchored at the
    first path point (counterclockwise about the outward normal positive).
    """
    path = np.asarray(path, dtype=float)
    if np.linalg.norm(path[0] - path[-1]) > closure_tol:
        raise PathNotClosed("path endpoints differ by more than the tolerance")
    v0 = path[0]
    a = path[:-1]
    b = path[1:]
    num = np.einsum("i,ti->t", v0, np.cross(a, b))
    den = 1.0 + a @ v0 + b @ v0 + np.einsum("ti,ti->t", a, b)
    return float(np.sum(2.0 * np.arctan2(num, den)))


# ---------------------------------------------------------------------------
# CSV export

def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Pure: t_ns, re_c0, im_c0, re_c1, im_c1. Density: the 4 real dof."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if traj.is_pure:
            writer.writerow(["t_ns", "re_c0", "im_c0", "re_c1", "im_c1"])
            for t, s in zip(traj.times, traj.states):
                writer.writerow([repr(float(t)),
                                 repr(float(s[0].real)), repr(float(s[0].imag)),
                                 repr(float(s[1].real)), repr(float(s[1].imag))])
        else:
            writer.writerow(["t_ns", "rho00", "re_rho01", "im_rho01", "rho11"])
            for t, r in zip(traj.times, traj.states):
                writer.writerow([repr(float(t)),
                                 repr(float(r[0, 0].real)), repr(float(r[0, 1].real)),
                                 repr(float(r[0, 1].imag)), repr(float(r[1, 1].real))])


def bloch_path_to_csv(traj: Trajectory, path) -> None:
    """Columns t_ns, x, y, z of the Bloch path of a pure trajectory."""
    vectors = bloch_trajectory(traj)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ns", "x", "y", "z"])
        for t, v in zip(traj.times, vectors):
            writer.writerow([repr(float(t)), repr(float(v[0])),
                             repr(float(v[1])), repr(float(v[2]))])

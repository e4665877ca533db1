"""Gate-level quantum channels as 4x4 superoperators.

Row-major vectorization: vec(rho) = rho.reshape(4), so vec(A rho B) =
(A kron B^T) vec(rho). A gate schedule under a fixed noise model is a linear
map on rho; compiling it once to a superoperator makes sequence execution a
chain of 4x4 products, exactly equivalent to concatenated master-equation
integration because the dynamics are time-local and linear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import (DeviceParams, _drive_matrix, _envelope_grid,
                        _segment_steps, _segments_of, schedule_propagator)
from .pulse import synthesize
from .qcore import GateSpec, SIGMA_MINUS, SIGMA_Z, unitary_to_axis_angle

I4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class DepolarizingNoise:
    """Synthetic per-gate depolarizing channel of fixed strength.

    Applied after the ideal gate unitary: rho -> (1 - s) rho + s I/2.
    """

    strength: float

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("depolarizing strength must be in [0, 1]")


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(4)


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(2, 2)


def unitary_superop(u: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> U rho U^dag."""
    return np.kron(u, u.conj())


def depolarizing_superop(strength: float) -> np.ndarray:
    trace_row = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)
    half_id = np.array([0.5, 0.0, 0.0, 0.5], dtype=complex)
    return (1.0 - strength) * I4 + strength * np.outer(half_id, trace_row)


def lindblad_generator(h: np.ndarray, gamma1: float, gamma_phi: float) -> np.ndarray:
    """4x4 generator L with d vec(rho)/dt = L vec(rho)."""
    sm = SIGMA_MINUS
    pe = sm.conj().T @ sm
    gen = -1j * (np.kron(h, np.eye(2)) - np.kron(np.eye(2), h.T))
    if gamma1:
        gen = gen + gamma1 * (np.kron(sm, sm.conj())
                              - 0.5 * (np.kron(pe, np.eye(2))
                                       + np.kron(np.eye(2), pe.T)))
    if gamma_phi:
        gen = gen + 0.5 * gamma_phi * (np.kron(SIGMA_Z, SIGMA_Z.conj()) - I4)
    return gen


def schedule_superop(schedule, device: DeviceParams | None = None,
                     dt: float = 0.01) -> np.ndarray:
    """Superoperator of the full schedule under the device noise model.

    RK4 on dS/dt = L(t) S with the same stepping as the trajectory
    integrators; with no device this reduces to the exact unitary channel.
    """
    if device is None:
        return unitary_superop(schedule_propagator(schedule))
    g1 = device.gamma1_per_ns
    gphi = device.gamma_phi_per_ns
    l_diss = lindblad_generator(np.zeros((2, 2)), g1, gphi)
    s = I4.copy()
    for seg in _segments_of(schedule):
        n = _segment_steps(seg, dt, 1)
        h = seg.duration / n
        w_full, w_half = _envelope_grid(seg, n, h)
        k_mat = _drive_matrix(seg)
        # L(t) = w(t) * L_drive + L_diss
        l_drive = lindblad_generator(k_mat, 0.0, 0.0)
        for i in range(n):
            l0 = w_full[i] * l_drive + l_diss
            lh = w_half[i] * l_drive + l_diss
            l1 = w_full[i + 1] * l_drive + l_diss
            k1 = l0 @ s
            k2 = lh @ (s + 0.5 * h * k1)
            k3 = lh @ (s + 0.5 * h * k2)
            k4 = l1 @ (s + h * k3)
            s = s + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return s


def gate_superop(spec: GateSpec, noise=None, segment_duration: float = 10.0,
                 dt: float = 0.01) -> np.ndarray:
    """Channel of one compiled gate under a noise model.

    ``noise`` is None (ideal), DeviceParams (Lindblad over the schedule), or
    DepolarizingNoise (ideal unitary followed by depolarizing).
    """
    schedule = synthesize(spec, segment_duration)
    if noise is None:
        return unitary_superop(schedule_propagator(schedule))
    if isinstance(noise, DepolarizingNoise):
        ideal = unitary_superop(schedule_propagator(schedule))
        return depolarizing_superop(noise.strength) @ ideal
    if isinstance(noise, DeviceParams):
        return schedule_superop(schedule, noise, dt)
    raise TypeError(f"unsupported noise model {noise!r}")


class GateChannelCache:
    """Memoized gate -> superoperator compilation for a fixed noise model."""

    def __init__(self, noise=None, segment_duration: float = 10.0,
                 dt: float = 0.01):
        self.noise = noise
        self.segment_duration = segment_duration
        self.dt = dt
        self._by_key: dict[tuple, np.ndarray] = {}

    @staticmethod
    def _key(spec: GateSpec) -> tuple:
        return (round(spec.theta, 12), round(spec.phi, 12), round(spec.gamma, 12))

    def for_spec(self, spec: GateSpec) -> np.ndarray:
        key = self._key(spec)
        sop = self._by_key.get(key)
        if sop is None:
            sop = gate_superop(spec, self.noise, self.segment_duration, self.dt)
            self._by_key[key] = sop
        return sop

    def for_unitary(self, u: np.ndarray) -> np.ndarray:
        return self.for_spec(unitary_to_axis_angle(u))

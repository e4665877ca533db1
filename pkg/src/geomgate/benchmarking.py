"""Clifford randomized benchmarking over the compiled geometric gate set.

Reference RB drives |0> through m random Cliffords plus a recovery gate and
fits the mean survival to F(m) = A p^m + B; interleaved RB inserts a fixed
target after every random Clifford. Every Clifford (and the recovery) is
realized as a single three-segment schedule of duration 3T via axis-angle
extraction, so all gates cost the same wall-clock time under noise.

Execution composes per-gate channel superoperators, which is exactly
equivalent to concatenated master-equation integration (the dynamics are
time-local and linear) and keeps long sequences cheap. Randomness is drawn
from counter-based Philox streams keyed by (seed, length index,
randomization index), so results are reproducible regardless of execution
order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import GateChannelCache, vec
from .errors import FitDiverged
from .evolution import DeviceParams
from .qcore import (GateSpec, KET0, clifford_group, clifford_tables,
                    clifford_index_of, density_of, named_gate, recovery_gate,
                    axis_angle_unitary, unitary_to_axis_angle)
from .tomography import ReadoutModel

DEFAULT_LENGTHS = (1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96)


@dataclass(frozen=True)
class RbConfig:
    """Benchmarking run parameters; ``shots=None`` means exact survival."""

    sequence_lengths: tuple[int, ...] = DEFAULT_LENGTHS
    randomizations: int = 50
    shots: int | None = None
    seed: int = 0
    interleaved_target: str | None = None
    readout_correction: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sequence_lengths",
                           tuple(int(m) for m in self.sequence_lengths))
        lengths = self.sequence_lengths
        if not lengths or any(m < 1 for m in lengths):
            raise ValueError("sequence lengths must be positive")
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("sequence lengths must be strictly increasing")
        if self.randomizations < 2:
            raise ValueError("need at least 2 randomizations per length")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 or None")


@dataclass
class DecayCurve:
    """Per-length survival statistics plus the raw per-randomization values."""

    lengths: tuple[int, ...]
    means: np.ndarray
    stderrs: np.ndarray
    samples: list[np.ndarray] = field(default_factory=list)


@dataclass
class DecayFit:
    """Parameters of F(m) = A p^m + B with fit diagnostics."""

    A: float
    B: float
    p: float
    residual_norm: float
    converged: bool
    degenerate: bool = False
    iterations: int = 0


@dataclass
class RbResult:
    """Derived figures: r = (1 - p)/2, F_avg = 1 - r, and optionally
    F_g = 1 - (1 - p_g / p)/2 for an interleaved target."""

    reference: DecayFit
    interleaved: DecayFit | None = None
    r: float = 0.0
    F_avg: float = 0.0
    p_g: float | None = None
    F_g: float | None = None

    @staticmethod
    def from_fits(reference: DecayFit, interleaved: DecayFit | None = None) -> "RbResult":
        r = (1.0 - reference.p) / 2.0
        res = RbResult(reference=reference, interleaved=interleaved,
                       r=r, F_avg=1.0 - r)
        if interleaved is not None:
            res.p_g = interleaved.p
            res.F_g = 1.0 - (1.0 - interleaved.p / reference.p) / 2.0
        return res


# ---------------------------------------------------------------------------
# sequences

def sequence_rng(seed: int, length_index: int, rand_index: int) -> np.random.Generator:
    """Splittable per-sequence stream; independent of execution order."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((seed, length_index, rand_index))))


def sample_sequence(m: int, rng) -> tuple[list[int], int]:
    """m uniform Clifford indices plus the recovery index closing to I."""
    if m < 1:
        raise ValueError("sequence length must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    indices = [int(k) for k in rng.integers(0, 24, size=m)]
    return indices, recovery_gate(indices).index


def _survival_from_prob(p0: float, shots: int | None, rng,
                        readout: ReadoutModel | None,
                        readout_correction: bool) -> float:
    if shots is None:
        # absorb integrator dust at the boundaries; anything larger is a bug
        # and must surface in the invariant checks
        if -1e-9 < p0 < 0.0:
            return 0.0
        if 1.0 < p0 < 1.0 + 1e-9:
            return 1.0
        return float(p0)
    probs = np.array([p0, 1.0 - p0])
    if readout is not None:
        probs = readout.apply(probs)
    n0 = rng.binomial(shots, min(max(probs[0], 0.0), 1.0))
    est = np.array([n0 / shots, 1.0 - n0 / shots])
    if readout is not None and readout_correction:
        est = readout.correct(est)
    return float(est[0])


def execute_sequence(cliffords, recovery: int, *, channels: GateChannelCache,
                     interleaved_sop: np.ndarray | None = None,
                     shots: int | None = None, rng=None,
                     readout: ReadoutModel | None = None,
                     readout_correction: bool = True) -> float:
    """Survival probability of |0> for one compiled sequence.

    Applies the cached per-gate channels in order (interleaving the target
    channel if given), then the recovery channel, and reads out P(|0>).
    """
    group = clifford_group()
    v = vec(density_of(KET0))
    for idx in cliffords:
        v = channels.for_spec(group[idx].spec) @ v
        if interleaved_sop is not None:
            v = interleaved_sop @ v
    v = channels.for_spec(group[recovery].spec) @ v
    p0 = float(v[0].real)
    return _survival_from_prob(p0, shots, rng, readout, readout_correction)


def run_sequence(sequence: tuple[list[int], int],
                 device: DeviceParams | None = None,
                 shots: int | None = None, seed: int = 0,
                 segment_duration: float = 10.0, dt: float = 0.01) -> float:
    """One-off convenience wrapper around ``execute_sequence``."""
    cliffords, recovery = sequence
    channels = GateChannelCache(device, segment_duration, dt)
    readout = (ReadoutModel.from_device(device)
               if (isinstance(device, DeviceParams) and shots) else None)
    return execute_sequence(cliffords, recovery, channels=channels,
                            shots=shots, rng=np.random.default_rng(seed),
                            readout=readout)


# ---------------------------------------------------------------------------
# decay fitting

def _model(m: np.ndarray, a: float, b: float, p: float) -> np.ndarray:
    return a * np.power(p, m) + b


def fit_decay(curve: DecayCurve, weighted: bool = False,
              max_iterations: int = 200) -> DecayFit:
    """Damped Gauss-Newton least squares for (A, B, p).

    Start values: B0 = F(m_max), A0 = F(m_min) - B0, p0 from the two-point
    ratio of the first two lengths. Converged when the relative parameter
    change drops below 1e-10; raises FitDiverged (with the best iterate
    attached) after ``max_iterations``. A constant curve is degenerate:
    p is reported as 1 with A = 0 and the fit flagged.
    """
    m = np.asarray(curve.lengths, dtype=float)
    f = np.asarray(curve.means, dtype=float)
    if len(m) < 3:
        raise ValueError("need at least 3 sequence lengths to fit")

    if float(np.ptp(f)) < 1e-12:
        return DecayFit(A=0.0, B=float(f.mean()), p=1.0, residual_norm=0.0,
                        converged=True, degenerate=True)

    if weighted and np.all(curve.stderrs > 0):
        w = 1.0 / np.asarray(curve.stderrs, dtype=float)
    else:
        w = np.ones_like(f)

    b0 = f[-1]
    a0 = f[0] - b0
    p0 = 0.95
    if abs(a0) > 1e-12 and abs(f[1] - b0) > 1e-15:
        ratio = (f[1] - b0) / (f[0] - b0)
        if ratio > 0:
            p0 = ratio ** (1.0 / (m[1] - m[0]))
    p0 = min(max(p0, 1e-6), 1.0 - 1e-9)
    if abs(a0) < 1e-12:
        a0 = math.copysign(1e-6, f[0] - f[-1] or 1.0)

    x = np.array([a0, b0, p0])

    def cost(params):
        return float(np.sum((w * (f - _model(m, *params))) ** 2))

    lam = 1e-3
    current = cost(x)
    converged = False
    its = 0
    for its in range(1, max_iterations + 1):
        a, b, p = x
        resid = w * (f - _model(m, a, b, p))
        pm = np.power(p, m)
        jac = np.column_stack([w * pm, w, w * a * m * np.power(p, m - 1.0)])
        jtj = jac.T @ jac
        jtr = jac.T @ resid
        step = None
        for _ in range(25):
            damp = jtj + lam * (np.diag(np.diag(jtj)) + 1e-12 * np.eye(3))
            try:
                delta = np.linalg.solve(damp, jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = x + delta
            trial[2] = min(max(trial[2], 1e-9), 1.0)
            if cost(trial) <= current:
                step = trial
                lam = max(lam / 3.0, 1e-14)
                break
            lam *= 10.0
        if step is None:
            break
        rel = float(np.max(np.abs(step - x) / (np.abs(x) + 1e-12)))
        x = step
        current = cost(x)
        if rel < 1e-10:
            converged = True
            break

    fit = DecayFit(A=float(x[0]), B=float(x[1]), p=float(x[2]),
                   residual_norm=math.sqrt(current), converged=converged,
                   iterations=its)
    if not converged:
        raise FitDiverged(f"decay fit did not converge in {its} iterations",
                          fit=fit)
    return fit


# ---------------------------------------------------------------------------
# benchmark drivers

def _collect_curve(config: RbConfig, run_one) -> DecayCurve:
    means = []
    stderrs = []
    samples = []
    for li, m in enumerate(config.sequence_lengths):
        vals = np.array([run_one(m, li, ri)
                         for ri in range(config.randomizations)])
        samples.append(vals)
        means.append(vals.mean())
        stderrs.append(vals.std(ddof=1) / math.sqrt(len(vals)))
    return DecayCurve(lengths=config.sequence_lengths,
                      means=np.array(means), stderrs=np.array(stderrs),
                      samples=samples)


def _fit_or_flag(curve: DecayCurve, weighted: bool) -> DecayFit:
    try:
        return fit_decay(curve, weighted=weighted)
    except FitDiverged as err:
        return err.fit


def run_reference_rb(config: RbConfig, device: DeviceParams | None = None,
                     segment_duration: float = 10.0, dt: float = 0.01,
                     channels: GateChannelCache | None = None
                     ) -> tuple[DecayCurve, DecayFit, RbResult]:
    """Reference RB: sample, execute, average, and fit the decay."""
    if channels is None:
        channels = GateChannelCache(device, segment_duration, dt)
    readout = (ReadoutModel.from_device(device)
               if (isinstance(device, DeviceParams) and config.shots) else None)

    def run_one(m, li, ri):
        rng = sequence_rng(config.seed, li, ri)
        cliffords, recovery = sample_sequence(m, rng)
        return execute_sequence(cliffords, recovery, channels=channels,
                                shots=config.shots, rng=rng, readout=readout,
                                readout_correction=config.readout_correction)

    curve = _collect_curve(config, run_one)
    fit = _fit_or_flag(curve, weighted=config.shots is not None)
    return curve, fit, RbResult.from_fits(fit)


def _interleaved_recovery_plan(target_spec: GateSpec):
    """Recovery lookup for sequences interleaved with the target.

    Clifford targets ride the composition table; anything else falls back to
    inverting the accumulated matrix product via axis-angle extraction.
    """
    target_u = axis_angle_unitary(target_spec)
    compose, inverse = clifford_tables()
    group = clifford_group()
    try:
        g_idx = clifford_index_of(target_u)
    except ValueError:
        g_idx = None

    if g_idx is not None:
        def recover(cliffords):
            acc = 0
            for idx in cliffords:
                acc = int(compose[g_idx, int(compose[idx, acc])])
            return group[int(inverse[acc])].spec
    else:
        def recover(cliffords):
            acc = np.eye(2, dtype=complex)
            for idx in cliffords:
                acc = target_u @ group[idx].unitary @ acc
            return unitary_to_axis_angle(acc.conj().T)
    return recover


def run_interleaved_rb(config: RbConfig, device: DeviceParams | None = None,
                       reference: DecayFit | None = None,
                       target_superop: np.ndarray | None = None,
                       segment_duration: float = 10.0, dt: float = 0.01,
                       channels: GateChannelCache | None = None
                       ) -> tuple[DecayCurve, DecayFit, RbResult]:
    """Interleaved RB for ``config.interleaved_target``.

    The target gate follows every random Clifford; the recovery inverts the
    whole combination. ``reference`` supplies the reference decay fit (it is
    computed on the spot when omitted). ``target_superop`` overrides the
    target's channel, e.g. to wrap it in a synthetic depolarizing stub.
    """
    if config.interleaved_target is None:
        raise ValueError("config.interleaved_target is not set")
    target_spec = named_gate(config.interleaved_target)
    if channels is None:
        channels = GateChannelCache(device, segment_duration, dt)
    if reference is None:
        _, reference, _ = run_reference_rb(config, device,
                                           segment_duration, dt,
                                           channels=channels)
    readout = (ReadoutModel.from_device(device)
               if (isinstance(device, DeviceParams) and config.shots) else None)
    target_sop = (target_superop if target_superop is not None
                  else channels.for_spec(target_spec))
    recover = _interleaved_recovery_plan(target_spec)
    group = clifford_group()

    def run_one(m, li, ri):
        rng = sequence_rng(config.seed, li, ri)
        cliffords, _ = sample_sequence(m, rng)
        recovery_spec = recover(cliffords)
        v = vec(density_of(KET0))
        for idx in cliffords:
            v = target_sop @ (channels.for_spec(group[idx].spec) @ v)
        v = channels.for_spec(recovery_spec) @ v
        return _survival_from_prob(float(v[0].real), config.shots, rng,
                                   readout, config.readout_correction)

    curve = _collect_curve(config, run_one)
    fit = _fit_or_flag(curve, weighted=config.shots is not None)
    return curve, fit, RbResult.from_fits(reference, fit)


# ---------------------------------------------------------------------------
# reports

def decay_to_csv(curve: DecayCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "mean_survival", "stderr", "n_random"])
        for m, mean, se, vals in zip(curve.lengths, curve.means,
                                     curve.stderrs, curve.samples):
            writer.writerow([m, repr(float(mean)), repr(float(se)), len(vals)])


def fit_report(result: RbResult) -> dict:
    ref = result.reference
    out = {
        "A": ref.A, "B": ref.B, "p": ref.p,
        "r": result.r, "F_avg": result.F_avg,
        "converged": ref.converged, "degenerate": ref.degenerate,
        "residual": ref.residual_norm,
    }
    if result.interleaved is not None:
        out.update({
            "p_g": result.p_g, "F_g": result.F_g,
            "interleaved_A": result.interleaved.A,
            "interleaved_B": result.interleaved.B,
            "interleaved_converged": result.interleaved.converged,
            "interleaved_residual": result.interleaved.residual_norm,
        })
    return out


def save_fit_report(result: RbResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(fit_report(result), fh, indent=2, sort_keys=True)
        fh.write("\n")

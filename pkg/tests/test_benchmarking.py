import csv
import json

import numpy as np
import pytest

from geomgate.benchmarking import (DecayCurve, DecayFit,
                                   RbConfig, RbResult, decay_to_csv,
                                   execute_sequence, fit_decay, fit_report,
                                   run_interleaved_rb, run_reference_rb,
                                   run_sequence, sample_sequence,
                                   save_fit_report, sequence_rng)
from geomgate.channels import (DepolarizingNoise, GateChannelCache,
                               depolarizing_superop, unitary_superop)
from geomgate.errors import FitDiverged
from geomgate.qcore import (I2, axis_angle_unitary, clifford_group,
                            clifford_inverse, named_gate, phase_distance)


def test_rb_config_validation():
    with pytest.raises(ValueError):
        RbConfig(sequence_lengths=())
    with pytest.raises(ValueError):
        RbConfig(sequence_lengths=(4, 2))
    with pytest.raises(ValueError):
        RbConfig(sequence_lengths=(1, 2), randomizations=1)
    with pytest.raises(ValueError):
        RbConfig(shots=0)


# ---------------------------------------------------------------------------
# sequences

def test_sample_sequence_deterministic():
    a = sample_sequence(20, sequence_rng(7, 0, 0))
    b = sample_sequence(20, sequence_rng(7, 0, 0))
    assert a == b
    c = sample_sequence(20, sequence_rng(7, 0, 1))
    assert a != c


def test_sample_sequence_single():
    for seed in range(10):
        (indices, recovery) = sample_sequence(1, sequence_rng(seed, 0, 0))
        assert recovery == clifford_inverse(indices[0])


def test_sample_sequence_products_close(rng):
    group = clifford_group()
    for k in range(200):
        indices, recovery = sample_sequence(20, sequence_rng(k, 0, 0))
        acc = I2
        for idx in indices:
            acc = group[idx].unitary @ acc
        acc = group[recovery].unitary @ acc
        assert phase_distance(acc, I2) < 1e-10


# ---------------------------------------------------------------------------
# execution

def test_execute_noiseless_survival_is_one():
    channels = GateChannelCache(None)
    for seed in range(5):
        indices, recovery = sample_sequence(30, sequence_rng(seed, 1, 2))
        p = execute_sequence(indices, recovery, channels=channels)
        assert abs(p - 1.0) < 1e-9


def test_run_sequence_wrapper(device):
    seq = sample_sequence(3, sequence_rng(0, 0, 0))
    p = run_sequence(seq, device=None)
    assert abs(p - 1.0) < 1e-9
    p = run_sequence(seq, device=device)
    assert 0.99 < p < 1.0


def test_execute_depolarizing_matches_closed_form():
    lam = 0.03
    channels = GateChannelCache(DepolarizingNoise(lam))
    for m in (1, 2, 5, 10, 40):
        indices, recovery = sample_sequence(m, sequence_rng(3, 0, m))
        p = execute_sequence(indices, recovery, channels=channels)
        want = 0.5 + 0.5 * (1.0 - lam) ** (m + 1)
        assert abs(p - want) < 1e-12


def test_execute_survival_bounds(device):
    channels = GateChannelCache(device)
    indices, recovery = sample_sequence(50, sequence_rng(1, 0, 0))
    p = execute_sequence(indices, recovery, channels=channels)
    assert -1e-9 < p < 1.0 + 1e-9


def test_execute_single_gate_error_scale(device):
    channels = GateChannelCache(device)
    vals = []
    for seed in range(10):
        indices, recovery = sample_sequence(1, sequence_rng(seed, 0, 0))
        vals.append(execute_sequence(indices, recovery, channels=channels))
    # two compiled gates of 30 ns each at the coherence-limited error scale
    assert 0.99 < min(vals) and max(vals) < 0.9999


# ---------------------------------------------------------------------------
# decay fitting

def _curve(lengths, values, stderrs=None):
    values = np.asarray(values, dtype=float)
    if stderrs is None:
        stderrs = np.zeros_like(values)
    return DecayCurve(lengths=tuple(lengths), means=values,
                      stderrs=np.asarray(stderrs),
                      samples=[np.array([v]) for v in values])


def test_fit_decay_exact_model_recovery():
    m = np.arange(1, 101)
    vals = 0.5 * np.power(0.99, m) + 0.5
    fit = fit_decay(_curve(m, vals))
    assert abs(fit.p - 0.99) < 1e-6
    assert abs(fit.A - 0.5) < 1e-6
    assert abs(fit.B - 0.5) < 1e-6
    assert fit.converged and not fit.degenerate


def test_fit_decay_constant_curve_degenerate():
    fit = fit_decay(_curve([1, 2, 4, 8], np.ones(4)))
    assert fit.degenerate
    assert fit.p == 1.0
    assert fit.A + fit.B == pytest.approx(1.0, abs=1e-12)


def test_fit_decay_needs_three_lengths():
    with pytest.raises(ValueError):
        fit_decay(_curve([1, 2], [1.0, 0.9]))


def test_fit_decay_diverges_on_pathological_data():
    vals = [0.99734343, 0.99586727, 0.99320957, 0.98744443]
    with pytest.raises(FitDiverged) as err:
        fit_decay(_curve([1, 2, 4, 8], vals))
    assert err.value.fit is not None
    assert err.value.fit.converged is False


def test_fit_decay_weighted_smoke(rng):
    m = np.arange(1, 51)
    truth = 0.45 * np.power(0.97, m) + 0.52
    noise = rng.normal(0.0, 0.004, size=m.size)
    stderr = np.full(m.size, 0.004)
    fit = fit_decay(_curve(m, truth + noise, stderr), weighted=True)
    assert abs(fit.p - 0.97) < 5e-3


def test_fit_decay_binomial_calibration(rng):
    m = np.arange(1, 101)
    truth = 0.5 * np.power(0.99, m) + 0.5
    hits = 0
    for _ in range(20):
        sampled = rng.binomial(1000, truth) / 1000.0
        fit = fit_decay(_curve(m, sampled))
        hits += abs(fit.p - 0.99) <= 0.002
    assert hits >= 18


# ---------------------------------------------------------------------------
# reference RB

def test_reference_rb_noiseless():
    cfg = RbConfig(sequence_lengths=(1, 2, 4, 8), randomizations=3, seed=1)
    curve, fit, result = run_reference_rb(cfg, None)
    assert np.allclose(curve.means, 1.0, atol=1e-9)
    assert 1.0 - fit.p < 1e-6
    assert result.F_avg == pytest.approx(1.0, abs=1e-6)


def test_reference_rb_reproducible(device):
    cfg = RbConfig(sequence_lengths=(1, 4, 8), randomizations=4, seed=5)
    cache = GateChannelCache(device)
    a = run_reference_rb(cfg, device, channels=cache)
    b = run_reference_rb(cfg, device, channels=cache)
    assert np.array_equal(a[0].means, b[0].means)
    assert np.array_equal(a[0].stderrs, b[0].stderrs)
    assert a[1].p == b[1].p


def test_reference_rb_depolarizing_equivalence():
    lam = 0.02
    cfg = RbConfig(sequence_lengths=(1, 2, 4, 6, 8, 12, 16, 24, 32, 48),
                   randomizations=5, seed=3)
    _, fit, result = run_reference_rb(cfg, DepolarizingNoise(lam))
    assert abs(fit.p - (1.0 - lam)) < 1e-4
    assert result.r == pytest.approx(lam / 2.0, abs=1e-4)


def test_rb_result_identities():
    ref = DecayFit(A=0.5, B=0.5, p=0.994, residual_norm=0.0, converged=True)
    result = RbResult.from_fits(ref)
    assert result.r == pytest.approx(0.003, abs=1e-12)
    assert result.F_avg == pytest.approx(0.997, abs=1e-12)
    inter = DecayFit(A=0.5, B=0.5, p=0.992, residual_norm=0.0, converged=True)
    result = RbResult.from_fits(ref, inter)
    assert result.p_g == 0.992
    assert result.F_g == pytest.approx(1.0 - (1.0 - 0.992 / 0.994) / 2.0,
                                       abs=1e-12)


def test_reference_rb_shot_mode_with_readout(device):
    cfg = RbConfig(sequence_lengths=(1, 2, 4), randomizations=4, seed=2,
                   shots=4096)
    curve, fit, _ = run_reference_rb(cfg, device)
    assert np.all(curve.means > 0.9)
    assert np.all(curve.stderrs >= 0.0)
    # same seed reproduces bit-identically
    curve2, _, _ = run_reference_rb(cfg, device)
    assert np.array_equal(curve.means, curve2.means)


# ---------------------------------------------------------------------------
# interleaved RB

def test_interleaved_identity_noiseless():
    cfg = RbConfig(sequence_lengths=(1, 2, 4, 8), randomizations=3, seed=4,
                   interleaved_target="I")
    _, fit, result = run_interleaved_rb(cfg, None)
    assert result.F_g == pytest.approx(1.0, abs=1e-6)


def test_interleaved_depolarizing_target_recovers_half_lambda():
    lam = 0.01
    cfg = RbConfig(sequence_lengths=(1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96),
                   randomizations=6, seed=5, interleaved_target="H")
    target_sop = (depolarizing_superop(lam)
                  @ unitary_superop(axis_angle_unitary(named_gate("H"))))
    _, fit, result = run_interleaved_rb(cfg, None, target_superop=target_sop)
    assert abs(result.F_g - (1.0 - lam / 2.0)) < 1e-3
    assert abs(result.p_g - (1.0 - lam)) < 1e-6


def test_interleaved_requires_target():
    cfg = RbConfig(sequence_lengths=(1, 2, 4), randomizations=3)
    with pytest.raises(ValueError):
        run_interleaved_rb(cfg, None)


def test_interleaved_recovery_plan_non_clifford_target():
    # falls back to matrix accumulation when the target is not a Clifford
    from geomgate.benchmarking import _interleaved_recovery_plan
    from geomgate.qcore import GateSpec

    target = GateSpec(0.4, 0.3, 1.1)
    recover = _interleaved_recovery_plan(target)
    group = clifford_group()
    target_u = axis_angle_unitary(target)
    cliffords = [3, 17, 8, 21, 0, 11]
    acc = I2
    for idx in cliffords:
        acc = target_u @ group[idx].unitary @ acc
    recovery_u = axis_angle_unitary(recover(cliffords))
    assert phase_distance(recovery_u @ acc, I2) < 1e-10


def test_interleaved_device_gate_fidelity(device):
    cfg = RbConfig(sequence_lengths=(2, 8, 16, 32, 64), randomizations=8,
                   seed=6, interleaved_target="H")
    cache = GateChannelCache(device)
    _, _, result = run_interleaved_rb(cfg, device, channels=cache)
    assert 0.99 < result.F_g <= 1.0


# ---------------------------------------------------------------------------
# reports

def test_decay_csv_round_trip(tmp_path):
    cfg = RbConfig(sequence_lengths=(1, 2, 4), randomizations=3, seed=0)
    curve, _, _ = run_reference_rb(cfg, None)
    path = tmp_path / "decay.csv"
    decay_to_csv(curve, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["m", "mean_survival", "stderr", "n_random"]
    assert [int(r[0]) for r in rows[1:]] == [1, 2, 4]
    assert all(float(r[1]) == pytest.approx(1.0, abs=1e-9) for r in rows[1:])


def test_fit_report_round_trip(tmp_path):
    ref = DecayFit(A=0.5, B=0.5, p=0.994, residual_norm=1e-8, converged=True)
    inter = DecayFit(A=0.49, B=0.5, p=0.990, residual_norm=2e-8, converged=True)
    result = RbResult.from_fits(ref, inter)
    path = tmp_path / "fit.json"
    save_fit_report(result, path)
    data = json.loads(path.read_text())
    assert data["p"] == 0.994
    assert data["r"] == pytest.approx(0.003)
    assert data["F_avg"] == pytest.approx(0.997)
    assert data["p_g"] == 0.990
    assert data["F_g"] == result.F_g
    assert data["converged"] is True

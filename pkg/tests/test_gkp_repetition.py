from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotorkit.clifford import Atom, GeneratorWord
from rotorkit.gkp_repetition import (
    RepetitionConfig,
    decode,
    monte_carlo,
    run_trial,
    verify_circuit,
    wrap,
    wrap_int,
)
from rotorkit.simulator import TruncatedRotorState, apply_pauli_numeric, apply_word


def test_wrap_examples():
    assert wrap(0.1, 1.0) == pytest.approx(0.1)
    assert wrap(0.6, 1.0) == pytest.approx(-0.4)
    assert wrap(-0.5, 1.0) == pytest.approx(-0.5)
    assert wrap(0.5, 1.0) == pytest.approx(-0.5)
    assert np.allclose(wrap(np.array([0.6, 2.2]), 1.0), [-0.4, 0.2])
    assert [wrap_int(k, 4) for k in (-3, -2, 1, 2, 5)] == [1, -2, 1, -2, 1]
    assert list(wrap_int(np.array([-3, 2, 5]), 4)) == [1, -2, 1]
    with pytest.raises(ValueError):
        wrap(0.1, 0.0)


@given(st.floats(-50, 50), st.floats(0.1, 7))
def test_wrap_range(x, p):
    w = wrap(x, p)
    assert -p / 2 - 1e-12 <= w < p / 2 + 1e-12
    k = (x - w) / p
    assert abs(k - round(k)) < 1e-9


def test_decode_examples():
    syn, sx, res, zf, xf = decode(0.02, -0.01, 0, 4)
    assert syn == pytest.approx(0.01) and res == pytest.approx(0.005)
    assert not zf and not xf and sx == 0
    big = math.pi / 4 + 0.01
    syn, _, res, zf, _ = decode(big, 0.0, 0, 4)
    assert zf and res == big and syn == pytest.approx(big - math.pi / 2)
    _, sx, _, _, xf = decode(0.0, 0.0, 3, 4)
    assert sx == -1 and xf
    _, sx, _, _, xf = decode(0.0, 0.0, 1, 4)
    assert sx == 1 and not xf


def test_config_validation():
    with pytest.raises(ValueError):
        RepetitionConfig(0, 0.1)
    with pytest.raises(ValueError):
        RepetitionConfig(2, -0.1)
    with pytest.raises(ValueError):
        RepetitionConfig(2, 0.1, shots=0)


def test_noiseless_run():
    stats = monte_carlo(RepetitionConfig(3, 0.0, shots=1000))
    assert stats.var_residual_z == 0 and stats.z_fail_rate == 0 and stats.x_fail_rate == 0
    assert math.isnan(stats.var_ratio)
    t = run_trial(RepetitionConfig(3, 0.0), np.random.default_rng(0))
    assert t.residual_z == 0 and not t.z_failure


def test_variance_halving_and_stderr():
    stats = monte_carlo(RepetitionConfig(4, 0.05, shots=200_000, seed=1))
    assert abs(stats.var_ratio - 0.5) < 4 * stats.stderr_var_ratio
    assert stats.z_fail_rate == 0
    assert abs(stats.mean_residual_z) < 5 * math.sqrt(stats.var_residual_z / stats.shots)


def test_thread_count_does_not_change_results(monkeypatch):
    cfg = RepetitionConfig(2, 0.6, sigma_x=0.8, shots=50_000, seed=11)
    one = monte_carlo(cfg, threads=1)
    four = monte_carlo(cfg, threads=4)
    assert one == four
    monkeypatch.setenv("ROTORKIT_THREADS", "3")
    assert monte_carlo(cfg) == one
    monkeypatch.setenv("ROTORKIT_THREADS", "many")
    with pytest.raises(ValueError):
        monte_carlo(cfg)


def test_large_noise_fails_often():
    stats = monte_carlo(RepetitionConfig(4, 2.0, sigma_x=3.0, shots=40_000, seed=2))
    assert stats.z_fail_rate > 0.5 and stats.x_fail_rate > 0.3
    excl = monte_carlo(RepetitionConfig(4, 2.0, shots=40_000, seed=2, exclude_failures=True))
    assert excl.var_residual_z == pytest.approx(excl.var_residual_z_success_only)
    assert excl.var_residual_z < stats.var_residual_z


def test_syndrome_circuit_propagation():
    """CNOT(3->1) CNOT(3->2) copies Z(xi1) Z(xi2) onto the ancilla as Z(-(xi1 + xi2))."""
    xi1, xi2 = 0.3, -0.1
    rng = np.random.default_rng(5)
    amps = {(a, b, c): complex(rng.normal(), rng.normal()) for a in range(-2, 3) for b in range(-2, 3) for c in range(-2, 3)}
    s = TruncatedRotorState(3, 10, amps)
    word = GeneratorWord([Atom("cnot", 2, 0), Atom("cnot", 2, 1)])
    lhs = apply_word(apply_pauli_numeric(s, [0, 0, 0], [xi1, xi2, 0.0]), word)
    rhs = apply_pauli_numeric(apply_word(s, word), [0, 0, 0], [xi1, xi2, -(xi1 + xi2)])
    assert lhs.distance(rhs) < 1e-12


@pytest.mark.parametrize("m", [2, 3, 4])
def test_verify_circuit(m):
    rep = verify_circuit(RepetitionConfig(m, 0.1), L=30, delta=0.02, xi=(0.1, 0.05), grid=2048)
    assert rep.peaks_ok
    assert len(rep.found_peaks) == m
    assert rep.stabilizer_xx == pytest.approx(rep.stabilizer_xx_expected, abs=1e-12)
    assert abs(rep.stabilizer_z - 1) < 1e-12
    assert rep.evolved_truncation_weight == 0


def test_verify_circuit_fock_mode():
    rep = verify_circuit(RepetitionConfig(2, 0.1, fock=True), L=30, delta=0.02, xi=(0.2, 0.0), grid=2048)
    assert rep.mode == "fock" and rep.peaks_ok
    assert rep.to_json()["peaks_ok"] is True


def test_verify_circuit_limits():
    with pytest.raises(ValueError):
        verify_circuit(RepetitionConfig(5, 0.1), L=20, delta=0.05)
    with pytest.raises(ValueError):
        verify_circuit(RepetitionConfig(2, 0.1), L=41, delta=0.05)
    with pytest.raises(RuntimeError):
        verify_circuit(RepetitionConfig(2, 0.1), L=10, delta=0.001)

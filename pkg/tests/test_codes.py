from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotorkit import _intmat as im
from rotorkit.clifford import act_on_pauli, synthesize_generators
from rotorkit.codes import (
    CSSViolation,
    HomologicalRotorCode,
    RotorGkpCode,
    codeword_state,
    coset_points,
    encoder_matrix,
    encoder_reproduces_code,
    encoding_circuit,
    logical_operators,
    rotor_gkp_concatenation,
    same_x_class,
    same_z_class,
)
from rotorkit.lattice import homology, in_row_lattice, random_unimodular
from rotorkit.pauli import symplectic_phase

CM = HomologicalRotorCode.current_mirror()
CMF = HomologicalRotorCode.current_mirror_flipped()


def test_css_validation():
    CM.validate()
    CMF.validate()
    bad = HomologicalRotorCode(1, ((1,),), ((1,),))
    with pytest.raises(CSSViolation) as err:
        bad.validate()
    assert (err.value.x_row, err.value.z_row, err.value.value) == (0, 0, 1)
    assert not bad.is_valid()
    with pytest.raises(ValueError):
        HomologicalRotorCode(3, ((1, 0),), ())


def _check_logicals(code):
    logs = logical_operators(code)
    hom = homology(code)
    assert sorted(d for d in logs.orders if d) == sorted(hom.torsion)
    assert logs.orders.count(0) == hom.free_rank
    for x, z, d in logs.pairing:
        assert all(sum(a * b for a, b in zip(x, row)) == 0 for row in code.H_Z)
        assert not in_row_lattice(code.H_X, x) if code.H_X else any(x)
        if d:
            assert d * np.array(x).tolist() and in_row_lattice(code.H_X, [d * v for v in x])
            # Z commutes with every X stabilizer and pairs to 1/d with its partner
            assert all(sum(Fraction(a) * b for a, b in zip(z, row)) % 1 == 0 for row in code.H_X)
            assert sum(Fraction(a) * b for a, b in zip(z, x)) % 1 == Fraction(1, d)
    for i, (x, z, d) in enumerate(logs.pairing):
        if d:
            assert symplectic_phase(logs.x_pauli(i), logs.z_pauli(i)).turns == Fraction(1, d)
    return logs


def test_current_mirror_logicals():
    logs = _check_logicals(CM)
    assert logs.orders == (2,)
    z = logs.z_logicals[0]
    assert set(abs(t) for t in z) <= {Fraction(0), Fraction(1, 2)}
    # equal up to stabilizers to X1 X2^-... style representatives from the flipped picture
    assert same_z_class(CM, z, (Fraction(1, 2), Fraction(-1, 2), 0, 0))


def test_trivial_code_has_a_free_rotor():
    code = HomologicalRotorCode(1, (), ())
    logs = _check_logicals(code)
    assert logs.orders == (0,)
    assert logs.x_logicals[0] in ((1,), (-1,))
    assert logs.z_pauli(0, Fraction(1, 8)).phi[0].turns in (Fraction(1, 8), Fraction(7, 8))


@given(st.lists(st.integers(0, 6), min_size=1, max_size=3), st.integers(0, 10**6))
def test_logicals_of_scrambled_diagonal_codes(entries, seed):
    rng = random.Random(seed)
    n = len(entries)
    base = HomologicalRotorCode.diagonal(entries)
    code = base.deform(random_unimodular(n, rng, bound=4), random_unimodular(n, rng, bound=4))
    _check_logicals(code)


def test_class_membership_helpers():
    assert same_x_class(CM, (1, 0, 0, -1), (0, 1, 0, -1))
    assert not same_x_class(CM, (1, 0, 0, -1), (0, 0, 0, 0))
    assert not same_z_class(CM, (Fraction(1, 2), Fraction(1, 2), 0, 0), (0, 0, 0, 0))


def test_rotor_gkp():
    g = RotorGkpCode(3, 2)
    assert g.logical_x().m == (3,)
    assert g.logical_z().phi[0].turns == Fraction(1, 6)
    assert g.stabilizer_x_exponent == 6 and g.stabilizer_z_angle.turns == Fraction(1, 3)
    assert all(l % 6 == 3 for l in g.momenta(1, 20))
    assert g.momenta(0, 12) == [-12, -6, 0, 6, 12]
    with pytest.raises(ValueError):
        g.momenta(2, 5)
    # commutation of logicals: X(N) Z(2pi/dN) picks up 2pi/d
    assert symplectic_phase(g.logical_x(), g.logical_z()).turns == Fraction(1, 2)


@pytest.mark.parametrize("N,d", [(1, 2), (3, 2), (2, 5)])
def test_concatenation(N, d):
    step1, step2 = rotor_gkp_concatenation(N, d)
    assert homology(step1).torsion == (d * N,)
    assert step2.logical_dimension == d and step2.outer_dimension == d * N
    assert step2.stabilizer_power == d


def test_encoder_examples():
    assert len(encoding_circuit(HomologicalRotorCode.single_rotor(6))) == 0
    assert encoder_reproduces_code(CMF)
    assert encoder_reproduces_code(CM)


@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.integers(0, 10**6))
def test_encoder_round_trip(entries, seed):
    rng = random.Random(seed)
    n = len(entries)
    code = HomologicalRotorCode.diagonal(entries).deform(random_unimodular(n, rng, bound=5), random_unimodular(n, rng, bound=5))
    A, ds = encoder_matrix(code)
    word = encoding_circuit(code)
    g = word.evaluate(n)
    assert g.A == A
    assert encoder_reproduces_code(code, word)
    # decode then encode is the identity
    decoder = synthesize_generators(im.inverse_unimodular(A))
    assert (word + decoder).evaluate(n).A == im.identity(n)
    assert tuple(d for d in ds if d > 1) == homology(code).torsion


def test_codeword_state_gkp():
    st_ = codeword_state(RotorGkpCode(3, 2), 0, 20, 0.1, normalize=False)
    assert sorted(k[0] for k in st_.amps) == [-18, -12, -6, 0, 6, 12, 18]
    for (l,), a in st_.amps.items():
        assert abs(a - math.exp(-0.1 * l * l / 2)) < 1e-15
    sharp = codeword_state(RotorGkpCode(3, 2), 0, 20, 50.0)
    assert abs(sharp.amplitude([0]) - 1) < 1e-12


def test_codeword_support_matches_brute_force():
    L = 4
    rows = CM.H_X
    lattice = set()
    for coeffs in itertools.product(range(-12, 13), repeat=3):
        v = tuple(sum(c * r[k] for c, r in zip(coeffs, rows)) for k in range(4))
        if max(abs(x) for x in v) <= L:
            lattice.add(v)
    state = codeword_state(CM, 0, L, 0.3)
    assert set(state.amps) == lattice
    other = codeword_state(CM, 1, L, 0.3)
    assert not set(other.amps) & lattice
    assert state.inner(other) == 0
    assert abs(state.norm() - 1) < 1e-12


def test_codeword_errors():
    with pytest.raises(ValueError):
        codeword_state(CM, 2, 4, 0.3)
    with pytest.raises(ValueError):
        coset_points(CM, (0, 0), -2, 2)


def test_stabilizers_fix_codewords():
    from rotorkit.simulator import apply_pauli

    state = codeword_state(CM, 1, 6, 0.2)
    for z in CM.z_stabilizers(Fraction(2, 9)):
        out = apply_pauli(state, z)
        assert out.distance(state) < 1e-12
    logs = logical_operators(CM)
    flipped = apply_pauli(state, logs.z_pauli(0))
    assert flipped.distance(state.scaled(-1)) < 1e-12


def test_json_round_trip():
    assert HomologicalRotorCode.from_json(CM.to_json()) == CM
    assert CM.to_json()["hx"][0] == ["1", "-1", "0", "0"]

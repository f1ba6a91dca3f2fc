from __future__ import annotations

import cmath
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotorkit.theta import (
    jacobi_theta,
    overlap_grid,
    qec_overlap,
    qec_overlap_as_printed,
    qec_overlap_bruteforce,
)


@given(
    st.sampled_from([1, 2, 3, 4]),
    st.floats(-3, 3),
    st.floats(-0.8, 0.8),
    st.floats(0.01, 0.95),
)
def test_theta_matches_mpmath(kind, x, y, q):
    z = complex(x, y)
    ref = complex(mpmath.jtheta(kind, mpmath.mpc(x, y), q))
    assert abs(jacobi_theta(kind, z, q) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_theta_edge_cases():
    assert jacobi_theta(3, 0.4, 0.0) == 1
    assert jacobi_theta(1, 0.4, 0.0) == 0
    with pytest.raises(ValueError):
        jacobi_theta(5, 0, 0.1)
    with pytest.raises(ValueError):
        jacobi_theta(3, 0, 1.0)


def test_jacobi_identity():
    q = 0.3
    t2, t3, t4 = (jacobi_theta(k, 0, q) for k in (2, 3, 4))
    assert abs(t3**4 - t2**4 - t4**4) < 1e-13


@given(
    st.integers(2, 4),
    st.floats(0.02, 0.4),
    st.integers(-8, 8),
    st.integers(-8, 8),
    st.floats(-2, 2),
    st.integers(0, 1),
    st.integers(0, 1),
)
def test_overlap_matches_brute_force(N, delta, m, mp, dt, bra, ket):
    cf = qec_overlap(N, delta, m, mp, dt, bra, ket)
    bf, scale = qec_overlap_bruteforce(N, delta, m, mp, dt, bra, ket, with_scale=True)
    assert abs(cf - bf) <= 1e-11 * max(scale, 1e-300)


@given(st.integers(-6, 6), st.integers(-6, 6), st.floats(-2, 2), st.integers(0, 1), st.integers(0, 1))
def test_overlap_hermiticity(m, mp, dt, bra, ket):
    # <b| E'^dag E |k>* = <k| E^dag E' |b>
    a = qec_overlap(2, 0.1, m, mp, dt, bra, ket)
    b = qec_overlap(2, 0.1, mp, m, -dt, ket, bra)
    assert cmath.isclose(a.conjugate(), b, rel_tol=1e-12, abs_tol=1e-14)


def test_overlap_zero_when_shift_is_not_a_multiple():
    assert qec_overlap(3, 0.1, 1, 0, 0.2, 0, 0) == 0
    assert qec_overlap_bruteforce(3, 0.1, 1, 0, 0.2, 0, 0) == 0


def test_printed_offdiagonal_sign():
    # j = 1, z = 0: theta_1 vanishes, so take z != 0
    printed = qec_overlap_as_printed(2, 0.1, 2, 0, 0.5, 1, 0)
    exact = qec_overlap(2, 0.1, 2, 0, 0.5, 1, 0)
    bf = qec_overlap_bruteforce(2, 0.1, 2, 0, 0.5, 1, 0)
    assert cmath.isclose(exact, bf, rel_tol=1e-12)
    assert not cmath.isclose(printed, bf, rel_tol=1e-6)
    with pytest.raises(ValueError):
        qec_overlap_as_printed(2, 0.1, 0, 0, 0.0, 0, 1)


def test_grid():
    rows = overlap_grid(2, 0.1, 3)
    assert len(rows) == 7 * 7 * 3 * 4
    assert all(r.agrees() for r in rows)
    printed = [r for r in rows if r.printed_matches is not None]
    assert all(r.printed_matches for r in printed if r.bra == r.ket)
    assert any(not r.printed_matches for r in printed)
    # diagonal entry at zero error: theta_3(0, q) times the trivial prefactor
    zero = next(r for r in rows if (r.m, r.mp, r.dtheta, r.bra, r.ket) == (0, 0, 0.0, 0, 0))
    assert zero.closed_form == pytest.approx(jacobi_theta(3, 0, math.exp(-0.8)))


def test_invalid_arguments():
    with pytest.raises(ValueError):
        qec_overlap(2, 0.0, 0, 0, 0.0, 0, 0)
    with pytest.raises(ValueError):
        qec_overlap(2, 0.1, 0, 0, 0.0, 2, 0)

"""Jacobi theta functions and Knill-Laflamme overlaps of regularized rotor GKP qubits.

The codewords here use the envelope ``exp(-delta l^2)`` (note: no factor 1/2),
so that the nome is ``q = exp(-2 delta N^2)``:

    |0> = sum_k exp(-delta (kN)^2) |kN>,   |1> = sum_k (-1)^k exp(-delta (kN)^2) |kN>.

Both are left unnormalized.  The module-wide regularizer ``exp(-D l^2 / 2)``
corresponds to ``delta = D / 2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_TOL = 1e-16


def jacobi_theta(kind: int, z: complex, q: float) -> complex:
    """Series definitions of the four Jacobi theta functions with nome ``q``."""
    if kind not in (1, 2, 3, 4):
        raise ValueError("kind must be 1, 2, 3 or 4")
    if not 0 <= q < 1:
        raise ValueError("nome q must lie in [0, 1)")
    if q == 0:
        return 1.0 + 0j if kind in (3, 4) else 0j
    z = complex(z)
    log_q = math.log(q)
    # terms grow like exp(k |Im z| * 2) before the Gaussian factor wins
    k_turn = int(abs(z.imag) / -log_q) + 2
    total = 0j if kind in (1, 2) else 1.0 + 0j
    k = 0 if kind in (1, 2) else 1
    while True:
        if kind == 1:
            term = 2 * (-1) ** k * q ** ((k + 0.5) ** 2) * cmath.sin((2 * k + 1) * z)
        elif kind == 2:
            term = 2 * q ** ((k + 0.5) ** 2) * cmath.cos((2 * k + 1) * z)
        elif kind == 3:
            term = 2 * q ** (k * k) * cmath.cos(2 * k * z)
        else:
            term = 2 * (-1) ** k * q ** (k * k) * cmath.cos(2 * k * z)
        total += term
        if k > k_turn and abs(term) < _TOL * max(1.0, abs(total)):
            break
        k += 1
        if k > 100_000:
            raise RuntimeError("theta series failed to converge")
    return total


def _parts(N: int, delta: float, m: int, mp: int, dtheta: float):
    diff = m - mp
    if diff % N:
        return None
    j = diff // N
    pre = cmath.exp(1j * dtheta * (m + mp) / 2) * math.exp(-delta * diff * diff / 2)
    return j, pre, dtheta * N / 2, math.exp(-2 * delta * N * N)


def qec_overlap(N: int, delta: float, m: int, mp: int, dtheta: float, bra: int, ket: int) -> complex:
    """``<bra| E_{m'}(theta')^dag E_m(theta) |ket>`` with ``E_m(theta) = Z(theta) X(m)``.

    Depends on the angles only through ``dtheta = theta - theta'``.  With
    ``j = (m - m')/N``, ``z = dtheta N / 2`` and ``q = exp(-2 delta N^2)``:

    * ``<0|.|0>``: theta_3 (j even) or theta_2 (j odd);
    * ``<1|.|1>``: the same times ``(-1)^j``;
    * ``<1|.|0>``: ``(-1)^(j/2) theta_4`` or ``(-1)^((j+1)/2) i theta_1``;
    * ``<0|.|1>``: ``(-1)^(j/2) theta_4`` or ``(-1)^((j-1)/2) i theta_1``;

    all multiplied by ``exp(i dtheta (m+m')/2) exp(-delta (m-m')^2 / 2)``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if bra not in (0, 1) or ket not in (0, 1):
        raise ValueError("bra and ket label 0 or 1")
    parts = _parts(N, delta, m, mp, dtheta)
    if parts is None:
        return 0j
    j, pre, z, q = parts
    odd = j % 2 != 0
    if bra == ket:
        val = jacobi_theta(2 if odd else 3, z, q)
        if bra == 1 and odd:
            val = -val
    elif not odd:
        val = (-1) ** ((j // 2) % 2) * jacobi_theta(4, z, q)
    else:
        s = (j + 1) // 2 if bra == 1 else (j - 1) // 2
        val = (-1) ** (s % 2) * 1j * jacobi_theta(1, z, q)
    return pre * val


def qec_overlap_as_printed(N: int, delta: float, m: int, mp: int, dtheta: float, bra: int, ket: int) -> complex:
    """Variant with the off-diagonal odd branch written as ``-theta_1`` (no ``<0|.|1>`` case).

    Off-diagonal: ``-theta_1`` for odd ``(m'-m)/N`` and ``theta_4`` for even.
    Kept for comparison; it disagrees with the direct sum on part of the grid.
    """
    if (bra, ket) == (0, 1):
        raise ValueError("no printed closed form for <0|.|1>")
    parts = _parts(N, delta, m, mp, dtheta)
    if parts is None:
        return 0j
    j, pre, z, q = parts
    odd = j % 2 != 0
    if bra == ket:
        val = jacobi_theta(2 if odd else 3, z, q)
        if bra == 1 and odd:
            val = -val
    else:
        val = -jacobi_theta(1, z, q) if odd else jacobi_theta(4, z, q)
    return pre * val


def qec_overlap_bruteforce(
    N: int, delta: float, m: int, mp: int, dtheta: float, bra: int, ket: int, kmax: int = 60,
    *, with_scale: bool = False,
) -> complex | tuple[complex, float]:
    """Direct double sum: apply ``X(-m') Z(dtheta) X(m)`` to the ket and project on the bra.

    With ``with_scale`` also return the sum of absolute values of the terms,
    the natural size of floating-point noise in the result.
    """
    coeff = {}
    for k in range(-kmax, kmax + 1):
        coeff[k * N] = ((-1) ** k if ket else 1) * math.exp(-delta * (k * N) ** 2)
    bra_coeff = {}
    for k in range(-kmax, kmax + 1):
        bra_coeff[k * N] = ((-1) ** k if bra else 1) * math.exp(-delta * (k * N) ** 2)
    total = 0j
    scale = 0.0
    for l, c in coeff.items():
        l1 = l + m
        phase = cmath.exp(1j * dtheta * l1)
        l2 = l1 - mp
        b = bra_coeff.get(l2)
        if b is not None:
            total += b * phase * c
            scale += abs(b * c)
    return (total, scale) if with_scale else total


@dataclass(frozen=True)
class OverlapGridRow:
    m: int
    mp: int
    dtheta: float
    bra: int
    ket: int
    closed_form: complex
    brute_force: complex
    as_printed: complex | None
    term_scale: float = 0.0

    @property
    def exact_zero(self) -> bool:
        return self.closed_form == 0

    @property
    def rel_error(self) -> float:
        """Relative error; for exact zeros, the brute-force residue relative to the term scale."""
        if self.exact_zero:
            return abs(self.brute_force) / self.term_scale if self.term_scale else 0.0
        return abs(self.closed_form - self.brute_force) / abs(self.brute_force)

    def agrees(self, rtol: float = 1e-10, zero_tol: float = 1e-14) -> bool:
        if self.exact_zero:
            return self.rel_error <= zero_tol
        return self.rel_error <= rtol

    @property
    def printed_matches(self) -> bool | None:
        if self.as_printed is None:
            return None
        if self.as_printed == 0:
            return abs(self.brute_force) <= 1e-14 * max(self.term_scale, 1e-300)
        return abs(self.as_printed - self.brute_force) <= 1e-10 * abs(self.brute_force)


def overlap_grid(
    N: int, delta: float, mmax: int, dthetas: tuple[float, ...] = (0.0, 0.3, 1.1), kmax: int = 60
) -> list[OverlapGridRow]:
    rows = []
    for m in range(-mmax, mmax + 1):
        for mp in range(-mmax, mmax + 1):
            for dt in dthetas:
                for bra in (0, 1):
                    for ket in (0, 1):
                        printed = None if (bra, ket) == (0, 1) else qec_overlap_as_printed(N, delta, m, mp, dt, bra, ket)
                        bf, scale = qec_overlap_bruteforce(N, delta, m, mp, dt, bra, ket, kmax, with_scale=True)
                        rows.append(
                            OverlapGridRow(
                                m,
                                mp,
                                dt,
                                bra,
                                ket,
                                qec_overlap(N, delta, m, mp, dt, bra, ket),
                                bf,
                                printed,
                                scale,
                            )
                        )
    return rows

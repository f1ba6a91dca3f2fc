"""Homological rotor codes: validation, logical operators, encoders, codewords."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import _intmat as im
from .clifford import GeneratorWord, SymplecticRotorOp, act_on_pauli, synthesize_generators
from .lattice import (
    HomologyResult,
    homology,
    in_row_lattice,
    same_row_lattice,
    smith_normal_form,
)
from .pauli import ExactAngle, PauliVector
from .simulator import TruncatedRotorState


class CSSViolation(ValueError):
    def __init__(self, x_row: int, z_row: int, value: int):
        self.x_row, self.z_row, self.value = x_row, z_row, value
        super().__init__(
            f"CSS condition fails: X row {x_row} and Z row {z_row} have inner product {value}"
        )


@dataclass(frozen=True)
class HomologicalRotorCode:
    n: int
    H_X: im.IntMatrix = ()
    H_Z: im.IntMatrix = ()

    def __post_init__(self):
        hx = im.as_matrix(self.H_X)
        hz = im.as_matrix(self.H_Z)
        for name, M in (("H_X", hx), ("H_Z", hz)):
            if M and len(M[0]) != self.n:
                raise ValueError(f"{name} has {len(M[0])} columns, expected {self.n}")
        object.__setattr__(self, "H_X", hx)
        object.__setattr__(self, "H_Z", hz)

    @property
    def r_x(self) -> int:
        return len(self.H_X)

    @property
    def r_z(self) -> int:
        return len(self.H_Z)

    def validate(self) -> None:
        for i, x in enumerate(self.H_X):
            for j, z in enumerate(self.H_Z):
                val = sum(a * b for a, b in zip(x, z))
                if val:
                    raise CSSViolation(i, j, val)

    def is_valid(self) -> bool:
        try:
            self.validate()
        except CSSViolation:
            return False
        return True

    def x_stabilizers(self) -> list[PauliVector]:
        return [PauliVector(self.n, row, (ExactAngle(0),) * self.n) for row in self.H_X]

    def z_stabilizers(self, turns: Fraction = Fraction(1, 7)) -> list[PauliVector]:
        """Z stabilizers at a sample angle (the true group is a continuum)."""
        return [
            PauliVector(self.n, (0,) * self.n, tuple(ExactAngle(turns * h) for h in row))
            for row in self.H_Z
        ]

    def deform(self, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]] | None = None) -> HomologicalRotorCode:
        """Apply a CSS Clifford with X block ``A`` (rows transform as ``H_X A^T``)
        and an optional stabilizer re-basis ``B``."""
        A = im.as_matrix(A)
        Ainv = im.inverse_unimodular(A)
        hx = im.matmul(self.H_X, im.transpose(A)) if self.H_X else ()
        if B is not None and hx:
            hx = im.matmul(im.as_matrix(B), hx)
        hz = im.matmul(self.H_Z, Ainv) if self.H_Z else ()
        return HomologicalRotorCode(self.n, hx, hz)

    @classmethod
    def current_mirror(cls) -> HomologicalRotorCode:
        return cls(4, ((1, -1, 0, 0), (0, 0, -1, 1), (-1, -1, 1, 1)), ((1, 1, 1, 1),))

    @classmethod
    def current_mirror_flipped(cls) -> HomologicalRotorCode:
        return cls(4, ((1, 1, 0, 0), (0, 0, 1, 1), (0, 2, 0, 2)), ((1, -1, -1, 1),))

    @classmethod
    def single_rotor(cls, modulus: int) -> HomologicalRotorCode:
        return cls(1, ((modulus,),), ())

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> HomologicalRotorCode:
        n = len(entries)
        return cls(n, tuple(tuple(e if i == j else 0 for j in range(n)) for i, e in enumerate(entries)), ())

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "hx": im.to_str_rows(self.H_X), "hz": im.to_str_rows(self.H_Z)}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> HomologicalRotorCode:
        n = int(obj["n"])
        return cls(n, im.as_matrix(obj.get("hx") or ()), im.as_matrix(obj.get("hz") or ()))


@dataclass(frozen=True)
class LogicalOperators:
    """Logical generators, one per nontrivial homology generator.

    ``orders[i]`` is the torsion order ``d`` (0 for a logical rotor).  For
    torsion generators ``z_logicals[i]`` holds angles in turns whose pairing
    with ``x_logicals[i]`` is ``1/d``; for logical rotors it holds an integer
    direction ``w`` and the logical is ``Z(phi * w)`` for any ``phi``.
    """

    n: int
    x_logicals: tuple[tuple[int, ...], ...]
    z_logicals: tuple[tuple[Fraction, ...], ...]
    orders: tuple[int, ...]

    @property
    def pairing(self) -> tuple[tuple[tuple[int, ...], tuple[Fraction, ...], int], ...]:
        return tuple(zip(self.x_logicals, self.z_logicals, self.orders))

    def x_pauli(self, i: int) -> PauliVector:
        return PauliVector(self.n, self.x_logicals[i], (ExactAngle(0),) * self.n)

    def z_pauli(self, i: int, phi: Fraction | None = None) -> PauliVector:
        """Z logical; ``phi`` (turns) scales the direction of a logical rotor."""
        z = self.z_logicals[i]
        if self.orders[i] == 0:
            phi = Fraction(1, 4) if phi is None else Fraction(phi)
            z = tuple(phi * w for w in z)
        elif phi is not None:
            raise ValueError("torsion Z logicals have a fixed angle")
        return PauliVector(self.n, (0,) * self.n, tuple(ExactAngle(t) for t in z))

    def to_json(self) -> dict[str, Any]:
        return {
            "x_logicals": [[str(v) for v in x] for x in self.x_logicals],
            "z_logicals": [[{"num": t.numerator, "den": t.denominator} for t in z] for z in self.z_logicals],
            "orders": self.orders,
        }


def _centered(t: Fraction) -> Fraction:
    """Representative of ``t mod 1`` in (-1/2, 1/2]."""
    t = t % 1
    return t - 1 if t > Fraction(1, 2) else t


def _best_x(x: tuple[int, ...], rows: im.IntMatrix, radius: int = 2, max_rows: int = 6) -> tuple[int, ...]:
    def key(v):
        return (max((abs(a) for a in v), default=0), sum(abs(a) for a in v), sum(1 for a in v if a), tuple(-a for a in v))

    if not rows:
        return x
    if len(rows) > max_rows:
        # greedy single-row descent
        best = x
        improved = True
        while improved:
            improved = False
            for row in rows:
                for c in range(-radius, radius + 1):
                    cand = tuple(a + c * b for a, b in zip(best, row))
                    if key(cand) < key(best):
                        best, improved = cand, True
        return best
    best = x
    for coeffs in itertools.product(range(-radius, radius + 1), repeat=len(rows)):
        cand = tuple(a + sum(c * r[k] for c, r in zip(coeffs, rows)) for k, a in enumerate(x))
        if key(cand) < key(best):
            best = cand
    return best


def _best_z(z: tuple[Fraction, ...], rows: im.IntMatrix, d: int, max_rows: int = 3) -> tuple[Fraction, ...]:
    def key(v):
        return (sum(1 for a in v if a), max((abs(a) for a in v), default=0), tuple(-a for a in v))

    if d == 0:
        # integer direction: shift by integer multiples of the Z checks
        return _best_x(z, rows)  # type: ignore[arg-type]
    z = tuple(_centered(t) for t in z)
    if not rows or len(rows) > max_rows:
        return z
    steps = [Fraction(j, 2 * d) for j in range(-2 * d, 2 * d + 1)]
    best = z
    for coeffs in itertools.product(steps, repeat=len(rows)):
        cand = tuple(_centered(a + sum(c * r[k] for c, r in zip(coeffs, rows))) for k, a in enumerate(z))
        if key(cand) < key(best):
            best = cand
    return best


def logical_operators(code: HomologicalRotorCode, hom: HomologyResult | None = None) -> LogicalOperators:
    """Logical pairs read off the Smith witnesses of the homology computation.

    With kernel basis ``K``, a left inverse ``L`` and ``U Y V = D`` for the
    presentation ``Y``, generator ``i`` has X exponents ``K U^-1 e_i`` and Z
    angles ``(U L)_i / d_i`` (or direction ``(U L)_i`` for a logical rotor).
    Representatives are then shortened by bounded stabilizer shifts.
    """
    hom = hom or homology(code)
    snf = hom.witnesses
    K, L = hom.kernel, hom.kernel_left_inverse
    Uinv = im.inverse_unimodular(snf.U) if snf.U else ()
    UL = im.matmul(snf.U, L) if snf.U else ()
    xs, zs, orders = [], [], []
    for i, d in zip(hom.generator_indices(), hom.generator_orders()):
        col = tuple(Uinv[r][i] for r in range(len(Uinv)))
        x = im.matvec(K, col)
        if d:
            z = tuple(Fraction(v, d) for v in UL[i])
        else:
            z = tuple(Fraction(v) for v in UL[i])
        xs.append(_best_x(x, code.H_X))
        zs.append(_best_z(z, code.H_Z, d))
        orders.append(d)
    return LogicalOperators(code.n, tuple(xs), tuple(zs), tuple(orders))


def same_x_class(code: HomologicalRotorCode, x1: Sequence[int], x2: Sequence[int]) -> bool:
    return in_row_lattice(code.H_X, [a - b for a, b in zip(x1, x2)])


def same_z_class(code: HomologicalRotorCode, z1: Sequence[Fraction], z2: Sequence[Fraction]) -> bool:
    """Equal action on the code space: the difference pairs trivially with ker(H_Z)."""
    K = homology(code).kernel
    diff = [Fraction(a) - Fraction(b) for a, b in zip(z1, z2)]
    k = len(K[0]) if K and K[0] else 0
    for j in range(k):
        if sum(diff[i] * K[i][j] for i in range(code.n)) % 1:
            return False
    return True


@dataclass(frozen=True)
class RotorGkpCode:
    """Single-rotor GKP code: stabilizers ``X(dN)`` and ``Z(2 pi / N)``."""

    N: int
    d: int

    def __post_init__(self):
        if self.N < 1 or self.d < 1:
            raise ValueError("N and d must be positive")

    @property
    def stabilizer_x_exponent(self) -> int:
        return self.d * self.N

    @property
    def stabilizer_z_angle(self) -> ExactAngle:
        return ExactAngle(Fraction(1, self.N))

    @property
    def logical_dimension(self) -> int:
        return self.d

    def logical_x(self) -> PauliVector:
        return PauliVector.x(1, 0, self.N)

    def logical_z(self) -> PauliVector:
        return PauliVector.z(1, 0, Fraction(1, self.d * self.N))

    def momenta(self, j: int, L: int) -> list[int]:
        """Momenta ``jN + k dN`` inside ``[-L, L]``."""
        if not 0 <= j < self.d:
            raise ValueError(f"logical label {j} out of range for d={self.d}")
        step = self.d * self.N
        start = j * self.N
        kmin = -((L + start) // step)
        return [start + k * step for k in range(kmin, (L - start) // step + 1) if abs(start + k * step) <= L]


@dataclass(frozen=True)
class QuditGkpStep:
    """Qudit GKP encoding a ``Z_d`` qudit into a ``Z_{dN}`` qudit, stabilized by ``Zbar^d``."""

    outer_dimension: int
    logical_dimension: int
    stabilizer_power: int

    def codeword_residues(self, j: int) -> list[int]:
        N = self.outer_dimension // self.logical_dimension
        return [j * N]


def rotor_gkp_concatenation(N: int, d: int) -> tuple[HomologicalRotorCode, QuditGkpStep]:
    if N < 1 or d < 1:
        raise ValueError("N and d must be positive")
    return HomologicalRotorCode.single_rotor(d * N), QuditGkpStep(d * N, d, d)


def encoder_matrix(code: HomologicalRotorCode) -> tuple[im.IntMatrix, tuple[int, ...]]:
    """``A_enc = V^-T`` from ``U H_X V = D`` and the diagonal ``d_i``.

    ``A_enc`` maps the canonical stabilizer ``X(d_i e_i)`` into the row lattice
    of ``H_X``.
    """
    code.validate()
    snf = smith_normal_form(code.H_X, code.n)
    return im.transpose(im.inverse_unimodular(snf.V)), snf.invariant_factors


def encoding_circuit(code: HomologicalRotorCode) -> GeneratorWord:
    A, _ = encoder_matrix(code)
    return synthesize_generators(A)


def canonical_x_stabilizers(code: HomologicalRotorCode) -> list[PauliVector]:
    _, ds = encoder_matrix(code)
    return [PauliVector.x(code.n, i, d) for i, d in enumerate(ds)]


def encoded_x_stabilizers(code: HomologicalRotorCode, word: GeneratorWord | None = None) -> list[PauliVector]:
    word = word if word is not None else encoding_circuit(code)
    g = word.evaluate(code.n)
    return [act_on_pauli(g, p) for p in canonical_x_stabilizers(code)]


def encoder_reproduces_code(code: HomologicalRotorCode, word: GeneratorWord | None = None) -> bool:
    rows = [p.m for p in encoded_x_stabilizers(code, word)]
    return same_row_lattice(rows, code.H_X)


def canonical_logicals(code: HomologicalRotorCode) -> list[tuple[PauliVector, PauliVector, int]]:
    """Single-rotor logical pairs of the decoded (unencoded) code.

    Torsion rotor ``i`` carries ``X(1)``, ``Z(2 pi / d_i)``.
    """
    _, ds = encoder_matrix(code)
    return [
        (PauliVector.x(code.n, i), PauliVector.z(code.n, i, Fraction(1, d)), d)
        for i, d in enumerate(ds)
        if d > 1
    ]


def encoded_logicals(code: HomologicalRotorCode, word: GeneratorWord | None = None) -> list[tuple[PauliVector, PauliVector, int]]:
    word = word if word is not None else encoding_circuit(code)
    g: SymplecticRotorOp = word.evaluate(code.n)
    return [(act_on_pauli(g, x), act_on_pauli(g, z), d) for x, z, d in canonical_logicals(code)]


def _coset_mask(
    code: HomologicalRotorCode,
    hom: HomologyResult,
    label: Sequence[int],
    pts: np.ndarray,
) -> np.ndarray:
    mask = np.ones(len(pts), dtype=bool)
    if code.H_Z:
        mask &= np.all(pts @ np.array(code.H_Z, dtype=np.int64).T == 0, axis=1)
    if hom.kernel_left_inverse:
        UL = np.array(im.matmul(hom.witnesses.U, hom.kernel_left_inverse), dtype=np.int64)
        coords = pts @ UL.T
        for idx, d, lab in zip(hom.generator_indices(), hom.generator_orders(), label):
            if d:
                mask &= np.mod(coords[:, idx] - lab, d) == 0
            else:
                mask &= coords[:, idx] == lab
    return mask


def check_label(hom: HomologyResult, label: int | Sequence[int]) -> tuple[int, ...]:
    orders = hom.generator_orders()
    lab = (label,) if isinstance(label, (int, np.integer)) else tuple(label)
    if len(lab) != len(orders):
        raise ValueError(f"expected {len(orders)} label entries, got {len(lab)}")
    for v, d in zip(lab, orders):
        if d and not 0 <= v < d:
            raise ValueError(f"label {v} out of range for Z_{d}")
    return tuple(int(v) for v in lab)


def coset_points(
    code: HomologicalRotorCode,
    label: Sequence[int],
    lo: int,
    hi: int,
    hom: HomologyResult | None = None,
) -> np.ndarray:
    """All momentum tuples in ``[lo, hi]^n`` belonging to the codeword coset ``label``."""
    hom = hom or homology(code)
    n = code.n
    if (hi - lo + 1) ** n > 20_000_000:
        raise ValueError("box too large to enumerate")
    axis = np.arange(lo, hi + 1, dtype=np.int64)
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    return pts[_coset_mask(code, hom, check_label(hom, label), pts)]


def _tail_bound(n: int, L: int, delta: float) -> float:
    """Upper bound on the squared envelope summed over ``Z^n`` outside the box."""
    if delta <= 0:
        return math.inf
    one_d = 1.0 + 2.0 * sum(math.exp(-delta * l * l) for l in range(1, L + 1))
    tail_1d = 2.0 * sum(math.exp(-delta * l * l) for l in range(L + 1, L + 1 + 200))
    return (one_d + tail_1d) ** n - one_d**n


def codeword_state(
    code: HomologicalRotorCode | RotorGkpCode,
    label: int | Sequence[int],
    L: int,
    delta: float,
    *,
    normalize: bool = True,
) -> TruncatedRotorState:
    """Regularized codeword ``sum_l exp(-delta |l|^2 / 2) |l>`` over one homology coset.

    ``label`` gives one integer per nontrivial homology generator (residue mod
    ``d`` for torsion, momentum coordinate for a logical rotor).  The reported
    truncation weight is a rigorous upper bound on the normalized weight lost
    outside ``[-L, L]^n``.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if isinstance(code, RotorGkpCode):
        j = int(label if isinstance(label, int) else label[0])
        ls = code.momenta(j, L)
        amps = {(l,): math.exp(-delta * l * l / 2) for l in ls}
        n = 1
    else:
        hom = homology(code)
        lab = check_label(hom, label)
        n = code.n
        pts = coset_points(code, lab, -L, L, hom)
        amps = {tuple(int(v) for v in p): math.exp(-delta * float(p @ p) / 2) for p in pts}
    if not amps:
        raise ValueError("no codeword support inside the cutoff")
    kept = sum(abs(a) ** 2 for a in amps.values())
    tail = _tail_bound(n, L, delta)
    trunc = min(1.0, tail / (kept + tail)) if math.isfinite(tail) else 1.0
    st = TruncatedRotorState(n, L, amps, "planar", trunc)
    return st.normalized() if normalize else st

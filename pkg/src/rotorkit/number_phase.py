"""From homological rotor codes to homological number-phase codes.

A rotor code is first re-oriented by a diagonal sign matrix ``S`` (parity
flips) and a stabilizer re-basis ``B`` so that ``B H_X S`` is entrywise
non-negative; its codewords are then cut down to non-negative momenta and
read as Fock states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import _intmat as im
from .clifford import Atom, GeneratorWord
from .codes import (
    HomologicalRotorCode,
    LogicalOperators,
    RotorGkpCode,
    coset_points,
    logical_operators,
)
from .lattice import hermite_normal_form, homology
from .simulator import TruncatedRotorState, apply_atom, apply_projector_below

MAX_ROTORS = 20


class OrientationSearchError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict[str, Any]):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class OrientationFlip:
    signs: tuple[int, ...]
    basis_change: im.IntMatrix

    @property
    def flipped_rotors(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs) if s < 0)

    def apply(self, code: HomologicalRotorCode) -> HomologicalRotorCode:
        S = self.signs
        hx = tuple(tuple(v * s for v, s in zip(row, S)) for row in code.H_X)
        if hx:
            hx = im.matmul(self.basis_change, hx)
        hz = tuple(tuple(v * s for v, s in zip(row, S)) for row in code.H_Z)
        return HomologicalRotorCode(code.n, hx, hz)

    def to_json(self) -> dict[str, Any]:
        return {"signs": list(self.signs), "basis_change": im.to_str_rows(self.basis_change)}


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def _neg_mass(rows: Sequence[Sequence[int]]) -> int:
    return sum(-v for row in rows for v in row if v < 0)


def _nonneg_basis(rows: im.IntMatrix, beta: int, beta_max: int) -> im.IntMatrix | None:
    """Unimodular ``B`` with ``B rows >= 0`` entrywise, or ``None``."""
    r = len(rows)
    a = [list(row) for row in rows]
    B = [list(row) for row in im.identity(r)]
    for i in range(r):
        if all(v <= 0 for v in a[i]) and any(a[i]):
            a[i] = [-v for v in a[i]]
            B[i] = [-v for v in B[i]]
    # greedy single-row additions that lower the negative mass
    while _neg_mass(a):
        best = None
        for i in range(r):
            if not any(v < 0 for v in a[i]):
                continue
            for j in range(r):
                if j == i:
                    continue
                for c in range(-beta, beta + 1):
                    if c == 0:
                        continue
                    cand = [x + c * y for x, y in zip(a[i], a[j])]
                    gain = _neg_mass([a[i]]) - _neg_mass([cand])
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, i, j, c)
        if best is None:
            break
        _, i, j, c = best
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        B[i] = [x + c * y for x, y in zip(B[i], B[j])]
    if not _neg_mass(a):
        return im.as_matrix(B)
    # exhaustive recombination of each offending row
    if r > 5:
        return None
    for i in range(r):
        if not any(v < 0 for v in a[i]):
            continue
        others = [j for j in range(r) if j != i]
        found = False
        for sign in (1, -1):
            for coeffs in itertools.product(range(-beta_max, beta_max + 1), repeat=len(others)):
                cand = [sign * x for x in a[i]]
                cb = [sign * x for x in B[i]]
                for c, j in zip(coeffs, others):
                    if c:
                        cand = [x + c * y for x, y in zip(cand, a[j])]
                        cb = [x + c * y for x, y in zip(cb, B[j])]
                if all(v >= 0 for v in cand):
                    a[i], B[i] = cand, cb
                    found = True
                    break
            if found:
                break
        if not found:
            return None
    return im.as_matrix(B)


def find_orientation(code: HomologicalRotorCode, beta: int = 3, beta_max: int = 6) -> OrientationFlip:
    """Search sign patterns ``S`` and bases ``B`` with ``B H_X S >= 0``.

    Patterns are tried in order of (most rows of ``H_X S`` already
    non-negative, fewest flips, Gray-code index).  For each pattern the basis
    search starts from the rows themselves and then from their Hermite form.
    """
    code.validate()
    n = code.n
    if n > MAX_ROTORS:
        raise OrientationSearchError(f"orientation search is limited to {MAX_ROTORS} rotors", {"n": n})
    rows = code.H_X
    if not rows:
        return OrientationFlip((1,) * n, ())

    patterns = []
    for k in range(2**n):
        g = _gray(k)
        signs = tuple(-1 if (g >> i) & 1 else 1 for i in range(n))
        flipped = tuple(tuple(v * s for v, s in zip(row, signs)) for row in rows)
        good = sum(1 for row in flipped if all(v >= 0 for v in row))
        patterns.append((-good, bin(g).count("1"), k, signs, flipped))
    patterns.sort(key=lambda p: p[:3])

    tried = 0
    for _, _, _, signs, flipped in patterns:
        tried += 1
        B = _nonneg_basis(flipped, beta, beta_max)
        if B is None:
            H, W = hermite_normal_form(flipped)
            B2 = _nonneg_basis(H, beta, beta_max)
            if B2 is not None:
                B = im.matmul(B2, W)
        if B is not None:
            return OrientationFlip(signs, B)
    raise OrientationSearchError(
        "no sign pattern admits a non-negative stabilizer basis within the search bounds",
        {"patterns_tried": tried, "beta": beta, "beta_max": beta_max, "H_X": [list(r) for r in rows]},
    )


@dataclass(frozen=True)
class SemigroupGenerator:
    """An X-type (photon subtraction string) or Z-type (rotation) generator."""

    kind: str
    exponents: tuple[int, ...]

    def label(self) -> str:
        parts = []
        for i, e in enumerate(self.exponents):
            if not e:
                continue
            if self.kind == "X":
                amount = "" if abs(e) == 1 else f"({abs(e)})"
                dag = "^dag" if e > 0 else ""
                parts.append(f"X{i + 1}{amount}{dag}")
            else:
                amount = "phi" if abs(e) == 1 else f"{abs(e)}phi"
                dag = "^dag" if e < 0 else ""
                parts.append(f"Z{i + 1}({amount}){dag}")
        return " ".join(parts) or "I"

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "exponents": [str(e) for e in self.exponents], "label": self.label()}


@dataclass(frozen=True)
class NumberPhaseCode:
    base: HomologicalRotorCode
    flip: OrientationFlip
    original: HomologicalRotorCode
    gkp: RotorGkpCode | None = None

    @property
    def semigroup_x_generators(self) -> tuple[SemigroupGenerator, ...]:
        return tuple(SemigroupGenerator("X", row) for row in self.base.H_X)

    @property
    def z_generators(self) -> tuple[SemigroupGenerator, ...]:
        return tuple(SemigroupGenerator("Z", row) for row in self.base.H_Z)

    def z_discrete_angle(self) -> Fraction | None:
        """GKP-type codes keep a discrete Z stabilizer ``Z(2 pi / N)``; turns returned."""
        return Fraction(1, self.gkp.N) if self.gkp else None

    def to_json(self) -> dict[str, Any]:
        out = {
            "code": self.base.to_json(),
            "signs": list(self.flip.signs),
            "basis_change": im.to_str_rows(self.flip.basis_change),
            "semigroup_x_generators": [g.to_json() for g in self.semigroup_x_generators],
            "z_generators": [g.to_json() for g in self.z_generators],
        }
        if self.gkp:
            t = self.z_discrete_angle()
            out["z_discrete"] = {"num": t.numerator, "den": t.denominator}
        return out


def to_number_phase(code: HomologicalRotorCode | RotorGkpCode) -> NumberPhaseCode:
    if isinstance(code, RotorGkpCode):
        base = HomologicalRotorCode.single_rotor(code.d * code.N)
        return NumberPhaseCode(base, OrientationFlip((1,), ((1,),)), base, code)
    flip = find_orientation(code)
    base = flip.apply(code)
    if any(v < 0 for row in base.H_X for v in row):
        raise AssertionError("orientation search returned a matrix with negative entries")
    base.validate()
    return NumberPhaseCode(base, flip, code)


def np_codeword(npcode: NumberPhaseCode, label: int | Sequence[int], L: int) -> TruncatedRotorState:
    """Flipped planar codeword restricted to ``[0, L]^n`` as a normalized Fock state."""
    if L < 1:
        raise ValueError("cutoff must be at least 1")
    if npcode.gkp is not None:
        j = int(label if isinstance(label, int) else label[0])
        ls = [l for l in npcode.gkp.momenta(j, L) if l >= 0]
        amps = {(l,): 1.0 for l in ls}
    else:
        pts = coset_points(npcode.base, label, 0, L)
        amps = {tuple(int(v) for v in p): 1.0 for p in pts}
    if not amps:
        raise ValueError("codeword has no support in the non-negative box")
    return TruncatedRotorState(npcode.base.n, L, amps, "fock").normalized()


def _daggered_rep(x: tuple[int, ...], rows: im.IntMatrix, radius: int = 2) -> tuple[int, ...]:
    """Prefer a class representative made of photon subtractions (entries <= 0)."""

    def key(v):
        return (sum(1 for a in v if a > 0), max((abs(a) for a in v), default=0), sum(abs(a) for a in v), v)

    best = x
    if not rows or len(rows) > 6:
        return best
    for coeffs in itertools.product(range(-radius, radius + 1), repeat=len(rows)):
        cand = tuple(a + sum(c * r[k] for c, r in zip(coeffs, rows)) for k, a in enumerate(x))
        if key(cand) < key(best):
            best = cand
    return best


def np_logicals(npcode: NumberPhaseCode) -> LogicalOperators:
    """Logicals of the original code pushed through the sign flips ``S``."""
    if npcode.gkp is not None:
        g = npcode.gkp
        return LogicalOperators(1, ((-g.N,),), ((Fraction(1, g.d * g.N),),), (g.d,))
    base_logs = logical_operators(npcode.original)
    S = npcode.flip.signs
    xs, zs = [], []
    for x, z, d in base_logs.pairing:
        sx = tuple(v * s for v, s in zip(x, S))
        xs.append(_daggered_rep(sx, npcode.base.H_X) if d else sx)
        zs.append(tuple(v * s for v, s in zip(z, S)))
    return LogicalOperators(npcode.base.n, tuple(xs), tuple(zs), base_logs.orders)


@dataclass(frozen=True)
class FockAtom:
    atom: Atom
    realization: str
    unitary: bool


_REALIZATION = {
    "cnot": ("controlled photon injection", False),
    "cnot_dag": ("controlled photon subtraction", False),
    "quad": ("Kerr phase exp(i phi n(n+1)/2)", True),
    "cphs": ("cross-Kerr exp(i phi n_i n_j)", True),
    "swap": ("mode swap", True),
}


@dataclass(frozen=True)
class FockChannel:
    """A word tagged for execution on Fock states."""

    word: GeneratorWord
    atoms: tuple[FockAtom, ...]

    @property
    def non_unitary(self) -> tuple[int, ...]:
        return tuple(k for k, a in enumerate(self.atoms) if not a.unitary)

    def apply(self, state: TruncatedRotorState) -> TruncatedRotorState:
        """Run the word (operator order) on a Fock state; weight lost to subtraction is kept, not renormalized."""
        if state.mode != "fock":
            raise ValueError("FockChannel acts on Fock-mode states")
        for fa in reversed(self.atoms):
            state = apply_atom(state, fa.atom)
        return state


def semigroup_word(word: GeneratorWord) -> FockChannel:
    tagged = []
    for atom in word:
        if atom.gate == "p":
            raise ValueError(
                f"{atom}: parity flips do not survive the projection; re-orient the code with find_orientation first"
            )
        real, unitary = _REALIZATION[atom.gate]
        tagged.append(FockAtom(atom, real, unitary))
    return FockChannel(word, tuple(tagged))


@dataclass(frozen=True)
class SyndromeBranches:
    """Kraus branches of the X-syndrome channel: subtraction (wanted) and the P_C projection."""

    subtracted: TruncatedRotorState
    rejected: TruncatedRotorState

    @property
    def probabilities(self) -> tuple[float, float]:
        return self.subtracted.norm() ** 2, self.rejected.norm() ** 2


def syndrome_channel(state: TruncatedRotorState, control: int, target: int) -> SyndromeBranches:
    """``D(rho) = CNOT^dag rho CNOT + P_C rho P_C`` applied to a pure Fock state."""
    if state.mode != "fock":
        raise ValueError("the syndrome channel acts on Fock-mode states")
    sub = apply_atom(state, Atom("cnot_dag", control, target))
    rej = apply_projector_below(state, control, target)
    return SyndromeBranches(sub, rej)

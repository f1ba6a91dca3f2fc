"""Sparse truncated simulator for planar rotors and Fock (number-phase) modes.

States are maps from integer momentum tuples to complex amplitudes.  Planar
states live in ``[-L, L]^n``; Fock states in ``[0, L]^n``.  Amplitude pushed
outside the box is dropped and its weight accumulated in
``truncation_weight``; Fock amplitude annihilated by photon subtraction below
zero goes to ``annihilated_weight``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .clifford import Atom, GeneratorWord
from .pauli import ExactAngle, PauliVector

Key = tuple[int, ...]
MODES = ("planar", "fock")


@dataclass(frozen=True)
class TruncatedRotorState:
    n: int
    L: int
    amps: Mapping[Key, complex]
    mode: str = "planar"
    truncation_weight: float = 0.0
    annihilated_weight: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        clean: dict[Key, complex] = {}
        for k, a in self.amps.items():
            k = tuple(int(x) for x in k)
            if len(k) != self.n:
                raise ValueError(f"momentum tuple {k} does not have {self.n} entries")
            if not self.in_bounds(k):
                raise ValueError(f"momentum tuple {k} outside the {self.mode} box of size {self.L}")
            if a != 0:
                clean[k] = complex(a)
        object.__setattr__(self, "amps", clean)

    def in_bounds(self, k: Key) -> bool:
        lo = 0 if self.mode == "fock" else -self.L
        return all(lo <= x <= self.L for x in k)

    @classmethod
    def basis(cls, momenta: Sequence[int], L: int, mode: str = "planar") -> TruncatedRotorState:
        return cls(len(momenta), L, {tuple(momenta): 1.0}, mode)

    @classmethod
    def from_function(
        cls, n: int, L: int, fn: Callable[[Key], complex], mode: str = "planar", support: Iterable[Key] | None = None
    ) -> TruncatedRotorState:
        if support is None:
            lo = 0 if mode == "fock" else -L
            grids = np.stack(np.meshgrid(*([np.arange(lo, L + 1)] * n), indexing="ij"), -1).reshape(-1, n)
            support = (tuple(int(v) for v in row) for row in grids)
        return cls(n, L, {k: fn(k) for k in support}, mode)

    def with_amps(self, amps: Mapping[Key, complex], extra_trunc: float = 0.0, extra_annih: float = 0.0) -> TruncatedRotorState:
        return TruncatedRotorState(
            self.n,
            self.L,
            amps,
            self.mode,
            self.truncation_weight + extra_trunc,
            self.annihilated_weight + extra_annih,
        )

    @property
    def support(self) -> list[Key]:
        return sorted(self.amps)

    def amplitude(self, k: Sequence[int]) -> complex:
        return self.amps.get(tuple(k), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def normalized(self) -> TruncatedRotorState:
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero state")
        return TruncatedRotorState(
            self.n,
            self.L,
            {k: a / nrm for k, a in self.amps.items()},
            self.mode,
            self.truncation_weight / nrm**2,
            self.annihilated_weight / nrm**2,
        )

    def scaled(self, c: complex) -> TruncatedRotorState:
        return self.with_amps({k: c * a for k, a in self.amps.items()})

    def inner(self, other: TruncatedRotorState) -> complex:
        """``<self|other>``."""
        return sum((a.conjugate() * other.amps.get(k, 0)) for k, a in self.amps.items())

    def __add__(self, other: TruncatedRotorState) -> TruncatedRotorState:
        out = dict(self.amps)
        for k, a in other.amps.items():
            out[k] = out.get(k, 0) + a
        return self.with_amps(out, other.truncation_weight, other.annihilated_weight)

    def __sub__(self, other: TruncatedRotorState) -> TruncatedRotorState:
        return self + other.scaled(-1)

    def tensor(self, other: TruncatedRotorState) -> TruncatedRotorState:
        if self.mode != other.mode:
            raise ValueError("cannot tensor planar and Fock states")
        amps = {k1 + k2: a1 * a2 for k1, a1 in self.amps.items() for k2, a2 in other.amps.items()}
        L = max(self.L, other.L)
        return TruncatedRotorState(self.n + other.n, L, amps, self.mode, self.truncation_weight + other.truncation_weight)

    def with_cutoff(self, L: int) -> TruncatedRotorState:
        """Re-box; amplitudes outside the new box are clipped and recorded."""
        tmp = TruncatedRotorState(self.n, L, {}, self.mode)
        keep = {k: a for k, a in self.amps.items() if tmp.in_bounds(k)}
        lost = sum(abs(a) ** 2 for k, a in self.amps.items() if k not in keep)
        return TruncatedRotorState(self.n, L, keep, self.mode, self.truncation_weight + lost, self.annihilated_weight)

    def max_abs_momentum(self) -> int:
        return max((max(abs(x) for x in k) for k in self.amps), default=0)

    def distance(self, other: TruncatedRotorState, interior: int | None = None) -> float:
        """Largest amplitude difference, optionally only where all ``|l_i| <= interior``."""
        keys = set(self.amps) | set(other.amps)
        if interior is not None:
            keys = {k for k in keys if all(abs(x) <= interior for x in k)}
        return max((abs(self.amps.get(k, 0) - other.amps.get(k, 0)) for k in keys), default=0.0)


def _radians(phi: ExactAngle | float) -> float:
    return phi.radians if isinstance(phi, ExactAngle) else float(phi)


def _remap(state: TruncatedRotorState, fn: Callable[[Key, complex], tuple[Key | None, complex]]) -> TruncatedRotorState:
    out: dict[Key, complex] = {}
    lost = 0.0
    annihilated = 0.0
    for k, a in state.amps.items():
        k2, a2 = fn(k, a)
        if k2 is None:
            annihilated += abs(a) ** 2
            continue
        if not state.in_bounds(k2):
            lost += abs(a2) ** 2
            continue
        out[k2] = out.get(k2, 0) + a2
    return state.with_amps(out, lost, annihilated)


def _check_atom(state: TruncatedRotorState, atom: Atom) -> None:
    for r in atom.rotors:
        if not 0 <= r < state.n:
            raise IndexError(f"{atom} does not fit on {state.n} rotors")
    if state.mode == "fock" and atom.gate == "p":
        raise ValueError("parity flips have no Fock-space counterpart; flip the orientation first")


def apply_atom(state: TruncatedRotorState, atom: Atom) -> TruncatedRotorState:
    """Schrodinger action of one generator.

    Planar: CNOT(c->t)|l> shifts ``l_t`` by ``l_c``; P negates; QUAD multiplies
    by ``exp(i phi l(l+1)/2)``; CPHS by ``exp(i phi l_i l_j)``.  In Fock mode the
    same formulas hold except CNOT^dagger annihilates ``|n, m>`` with ``m < n``.
    """
    _check_atom(state, atom)
    i, j, g = atom.i, atom.j, atom.gate
    fock = state.mode == "fock"

    if g in ("cnot", "cnot_dag"):
        sign = 1 if g == "cnot" else -1

        def fn(k, a):
            k2 = list(k)
            k2[j] += sign * k[i]
            if fock and k2[j] < 0:
                return None, 0
            return tuple(k2), a

        return _remap(state, fn)
    if g == "p":
        return _remap(state, lambda k, a: (tuple(-x if r == i else x for r, x in enumerate(k)), a))
    if g == "swap":

        def fn(k, a):
            k2 = list(k)
            k2[i], k2[j] = k2[j], k2[i]
            return tuple(k2), a

        return _remap(state, fn)
    phi = _radians(atom.phi)
    if g == "quad":
        return _remap(state, lambda k, a: (k, a * cmath.exp(1j * phi * k[i] * (k[i] + 1) / 2)))
    return _remap(state, lambda k, a: (k, a * cmath.exp(1j * phi * k[i] * k[j])))


def apply_word(state: TruncatedRotorState, word: GeneratorWord | Sequence[Atom]) -> TruncatedRotorState:
    """Apply a word written in operator order: the last atom acts first."""
    for atom in reversed(list(word)):
        state = apply_atom(state, atom)
    return state


def apply_pauli_numeric(
    state: TruncatedRotorState,
    m: Sequence[int],
    phi: Sequence[float],
    phase: float = 0.0,
) -> TruncatedRotorState:
    """``exp(i phase) Z(phi) X(m)`` with angles in radians.

    In Fock mode ``X(m)`` is photon injection/subtraction and ``Z(phi)`` the
    rotation ``exp(i phi n)``.
    """
    if len(m) != state.n or len(phi) != state.n:
        raise ValueError("Pauli size does not match the state")
    fock = state.mode == "fock"
    pre = cmath.exp(1j * phase)

    def fn(k, a):
        k2 = tuple(x + s for x, s in zip(k, m))
        if fock and any(x < 0 for x in k2):
            return None, 0
        return k2, a * pre * cmath.exp(1j * sum(p * x for p, x in zip(phi, k2)))

    return _remap(state, fn)


def apply_pauli(state: TruncatedRotorState, p: PauliVector) -> TruncatedRotorState:
    if p.n != state.n:
        raise ValueError("Pauli size does not match the state")
    return apply_pauli_numeric(state, p.m, [a.radians for a in p.phi], p.phase.radians)


def apply_diagonal(state: TruncatedRotorState, fn: Callable[[Key], complex]) -> TruncatedRotorState:
    return _remap(state, lambda k, a: (k, a * fn(k)))


def regularize(state: TruncatedRotorState, delta: float) -> TruncatedRotorState:
    """Apply ``exp(-delta |l|^2 / 2)``."""
    return apply_diagonal(state, lambda k: math.exp(-delta * sum(x * x for x in k) / 2))


def apply_projector_below(state: TruncatedRotorState, control: int, target: int) -> TruncatedRotorState:
    """Fock projector onto ``n_target < n_control``."""
    return _remap(state, lambda k, a: (k, a) if k[target] < k[control] else (None, 0))


@dataclass(frozen=True)
class CoherentStateSpec:
    """Rotor coherent state ``sum_l xi^-l exp(-delta l^2/2) |l>``; delta = 1 is the plain family."""

    xi: complex
    delta: float = 1.0

    def __post_init__(self):
        if self.xi == 0:
            raise ValueError("xi = 0 is not an allowed coherent-state label")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


def coherent_state(spec: CoherentStateSpec | complex, L: int, *, normalize: bool = True) -> TruncatedRotorState:
    if not isinstance(spec, CoherentStateSpec):
        spec = CoherentStateSpec(spec)
    if L < 1:
        raise ValueError("cutoff must be at least 1")
    log_xi = cmath.log(spec.xi)
    amps = {(l,): cmath.exp(-l * log_xi - spec.delta * l * l / 2) for l in range(-L, L + 1)}
    st = TruncatedRotorState(1, L, amps)
    return st.normalized() if normalize else st


def displace(state: TruncatedRotorState, c: float, d: int, rotor: int = 0) -> TruncatedRotorState:
    """``D(c + i d) = exp(-i c d / 2) X(d) Z(-c)`` on one rotor."""
    m = [0] * state.n
    phi = [0.0] * state.n
    m[rotor] = int(d)
    st = apply_pauli_numeric(state, [0] * state.n, [(-c if r == rotor else 0.0) for r in range(state.n)])
    st = apply_pauli_numeric(st, m, phi)
    return st.scaled(cmath.exp(-1j * c * d / 2))


def e_i_a(state: TruncatedRotorState, rotor: int = 0) -> TruncatedRotorState:
    """``exp(i a) = X(1) exp(-l - 1/2)``."""
    st = apply_diagonal(state, lambda k: math.exp(-k[rotor] - 0.5))
    m = [0] * state.n
    m[rotor] = 1
    return apply_pauli_numeric(st, m, [0.0] * state.n)


def _split(state: TruncatedRotorState, rotor: int) -> dict[Key, tuple[np.ndarray, np.ndarray]]:
    groups: dict[Key, list[tuple[int, complex]]] = {}
    for k, a in state.amps.items():
        rest = k[:rotor] + k[rotor + 1 :]
        groups.setdefault(rest, []).append((k[rotor], a))
    return {
        r: (np.array([l for l, _ in v], dtype=float), np.array([a for _, a in v], dtype=complex))
        for r, v in groups.items()
    }


def _phase_wavefunction(ls: np.ndarray, amps: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.outer(thetas, ls)) @ amps / math.sqrt(2 * math.pi)


def phase_amplitude(state: TruncatedRotorState, theta: float | Sequence[float]) -> complex:
    """``<theta|psi>`` with ``|theta> = (2 pi)^-1/2 sum_l exp(-i theta l) |l>``."""
    th = (theta,) if np.isscalar(theta) else tuple(theta)
    if len(th) != state.n:
        raise ValueError(f"need {state.n} angles")
    tot = sum(a * cmath.exp(1j * sum(t * x for t, x in zip(th, k))) for k, a in state.amps.items())
    return tot / (2 * math.pi) ** (state.n / 2)


def phase_amplitudes(state: TruncatedRotorState, thetas: Sequence[float]) -> np.ndarray:
    if state.n != 1:
        raise ValueError("phase_amplitudes is single-rotor; use phase_distribution for marginals")
    ls, amps = _split(state, 0)[()]
    return _phase_wavefunction(ls, amps, np.asarray(thetas, dtype=float))


def phase_distribution(state: TruncatedRotorState, thetas: Sequence[float], rotor: int = 0) -> np.ndarray:
    """Marginal phase density of one rotor (the others traced out in momentum)."""
    th = np.asarray(thetas, dtype=float)
    out = np.zeros(len(th))
    for ls, amps in _split(state, rotor).values():
        out += np.abs(_phase_wavefunction(ls, amps, th)) ** 2
    return out


def wigner(
    state: TruncatedRotorState,
    l_grid: Sequence[float],
    phi_grid: Sequence[float] | None = None,
    M: int = 512,
) -> np.ndarray:
    """Rotor Wigner function, rows indexed by ``l_grid`` and columns by ``phi_grid``.

    ``W(l, phi) = (1/2pi) int_{-pi}^{pi} psi(phi - s/2) conj(psi(phi + s/2)) e^{i s l} ds``
    evaluated with the ``M``-interval trapezoid rule.  The default ``phi_grid``
    is ``M`` uniform points on ``[-pi, pi)``.
    """
    if state.n != 1:
        raise ValueError("wigner needs a single rotor")
    if M < 64:
        raise ValueError("quadrature needs M >= 64")
    ls, amps = _split(state, 0)[()]
    phis = np.asarray(phi_grid if phi_grid is not None else -np.pi + 2 * np.pi * np.arange(M) / M, dtype=float)
    lg = np.asarray(l_grid, dtype=float)
    s = np.linspace(-np.pi, np.pi, M + 1)
    w = np.full(M + 1, 2 * np.pi / M)
    w[0] = w[-1] = np.pi / M
    # psi(phi -+ s/2) on the (phi, s) grid
    minus = _phase_wavefunction(ls, amps, (phis[:, None] - s[None, :] / 2).ravel()).reshape(len(phis), -1)
    plus = _phase_wavefunction(ls, amps, (phis[:, None] + s[None, :] / 2).ravel()).reshape(len(phis), -1)
    F = minus * np.conj(plus) * w[None, :]
    E = np.exp(1j * np.outer(s, lg))
    W = (F @ E).T / (2 * np.pi)
    return W.real


def dense_pauli(p: PauliVector | tuple[Sequence[int], Sequence[float], float], L: int) -> np.ndarray:
    """Dense matrix of a Pauli on the box ``[-L, L]^n`` (row-major momentum order)."""
    if isinstance(p, PauliVector):
        m, phi, phase = p.m, [a.radians for a in p.phi], p.phase.radians
    else:
        m, phi, phase = p
    n = len(m)
    dim1 = 2 * L + 1
    idx = np.stack(np.meshgrid(*([np.arange(-L, L + 1)] * n), indexing="ij"), -1).reshape(-1, n)
    out = np.zeros((dim1**n, dim1**n), dtype=complex)
    for col, k in enumerate(idx):
        k2 = k + np.asarray(m)
        if np.all(np.abs(k2) <= L):
            row = int(np.ravel_multi_index(tuple(k2 + L), (dim1,) * n))
            out[row, col] = cmath.exp(1j * (phase + float(np.dot(phi, k2))))
    return out


def dense_vector(state: TruncatedRotorState) -> np.ndarray:
    dim1 = 2 * state.L + 1
    vec = np.zeros(dim1**state.n, dtype=complex)
    for k, a in state.amps.items():
        vec[np.ravel_multi_index(tuple(x + state.L for x in k), (dim1,) * state.n)] = a
    return vec


def rotor_gkp_comb(N: int, L: int, delta: float, label: int = 0, *, normalize: bool = True) -> TruncatedRotorState:
    """``sum_k (+-1)^k exp(-delta (kN)^2 / 2) |kN>`` inside ``[-L, L]``; label 1 takes the alternating sign."""
    if label not in (0, 1):
        raise ValueError("label must be 0 or 1")
    amps = {}
    for k in range(-(L // N), L // N + 1):
        amps[(k * N,)] = (-1) ** (k * label) * math.exp(-delta * (k * N) ** 2 / 2)
    st = TruncatedRotorState(1, L, amps)
    return st.normalized() if normalize else st

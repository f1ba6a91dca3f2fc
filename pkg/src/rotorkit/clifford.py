"""The rotor Clifford group in symplectic form.

An element is the pair ``(A, C)``: ``A`` is an integer matrix with
``det A = +-1`` acting on the momentum (X) exponents, ``C`` a symmetric matrix
of exact angles.  The assembled quadrature transformation is

    Q = [[A, 0], [A^-T C, A^-T]]

and a Pauli string ``Z(phi) X(m)`` is mapped (up to a global phase) to
``Z(A^-T (C m + phi)) X(A m)``.  ``compose(g, h)`` is the matrix product
``Q_g Q_h``, i.e. the circuit ``U_g U_h`` in which ``h`` acts first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

from . import _intmat as im
from .pauli import ZERO, ExactAngle, PauliVector, angle_dot, symplectic_phase

AngleMatrix = tuple[tuple[ExactAngle, ...], ...]

GATES = ("cnot", "cnot_dag", "p", "swap", "quad", "cphs")
_TWO_ROTOR = {"cnot", "cnot_dag", "swap", "cphs"}


@dataclass(frozen=True)
class Atom:
    """One generator.  ``i``/``j`` are control/target for CNOT-type gates.

    ``phi`` is an :class:`ExactAngle` for the exact layer; the simulator also
    accepts a float in radians.
    """

    gate: str
    i: int
    j: int | None = None
    phi: ExactAngle | float | None = None

    def __post_init__(self):
        if self.gate not in GATES:
            raise ValueError(f"unknown gate {self.gate!r}")
        if self.gate in _TWO_ROTOR:
            if self.j is None or self.j == self.i:
                raise ValueError(f"{self.gate} needs two distinct rotors")
        elif self.j is not None:
            raise ValueError(f"{self.gate} acts on a single rotor")
        if self.gate in ("quad", "cphs"):
            if self.phi is None:
                raise ValueError(f"{self.gate} needs an angle")
            if not isinstance(self.phi, (ExactAngle, float)):
                # rationals are read as turns; floats stay radians for the simulator
                object.__setattr__(self, "phi", ExactAngle(self.phi))
        elif self.phi is not None:
            raise ValueError(f"{self.gate} takes no angle")

    @property
    def rotors(self) -> tuple[int, ...]:
        return (self.i,) if self.j is None else (self.i, self.j)

    @property
    def is_exact(self) -> bool:
        return self.phi is None or isinstance(self.phi, ExactAngle)

    def inverse(self) -> Atom:
        if self.gate == "cnot":
            return Atom("cnot_dag", self.i, self.j)
        if self.gate == "cnot_dag":
            return Atom("cnot", self.i, self.j)
        if self.gate in ("quad", "cphs"):
            return Atom(self.gate, self.i, self.j, -self.phi)
        return self

    def to_json(self) -> dict[str, Any]:
        if self.gate in ("cnot", "cnot_dag"):
            return {"gate": self.gate, "from": self.i, "to": self.j}
        if self.gate == "p":
            return {"gate": "p", "rotor": self.i}
        if self.gate == "swap":
            return {"gate": "swap", "rotors": [self.i, self.j]}
        phi = self.phi.to_json() if isinstance(self.phi, ExactAngle) else {"radians": self.phi}
        if self.gate == "quad":
            return {"gate": "quad", "rotor": self.i, "phi": phi}
        return {"gate": "cphs", "rotors": [self.i, self.j], "phi": phi}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> Atom:
        gate = obj["gate"]
        phi = obj.get("phi")
        if phi is not None:
            phi = float(phi["radians"]) if isinstance(phi, dict) and "radians" in phi else ExactAngle.from_json(phi)
        if gate in ("cnot", "cnot_dag"):
            return cls(gate, int(obj["from"]), int(obj["to"]))
        if gate in ("p", "quad"):
            return cls(gate, int(obj["rotor"]), None, phi)
        if gate in ("swap", "cphs"):
            i, j = obj["rotors"]
            return cls(gate, int(i), int(j), phi)
        raise ValueError(f"unknown gate {gate!r}")

    def __str__(self) -> str:
        if self.gate in ("cnot", "cnot_dag"):
            return f"{self.gate}({self.i}->{self.j})"
        args = ",".join(str(r) for r in self.rotors)
        if self.phi is not None:
            ang = self.phi.turns if isinstance(self.phi, ExactAngle) else self.phi
            args += f";{ang}"
        return f"{self.gate}({args})"


def cnot(control: int, target: int) -> Atom:
    return Atom("cnot", control, target)


def cnot_dag(control: int, target: int) -> Atom:
    return Atom("cnot_dag", control, target)


def parity(rotor: int) -> Atom:
    return Atom("p", rotor)


def swap(i: int, j: int) -> Atom:
    return Atom("swap", i, j)


def quad(rotor: int, phi: ExactAngle | Fraction | float) -> Atom:
    return Atom("quad", rotor, None, phi)


def cphs(i: int, j: int, phi: ExactAngle | Fraction | float) -> Atom:
    return Atom("cphs", i, j, phi)


@dataclass(frozen=True)
class GeneratorWord:
    """A product of atoms written in operator order.

    ``GeneratorWord([a, b, c])`` is the unitary ``a b c``: ``c`` acts first on
    a state, and the symplectic matrix is ``Q_a Q_b Q_c``.
    """

    atoms: tuple[Atom, ...] = ()

    def __init__(self, atoms: Iterable[Atom] = ()):
        object.__setattr__(self, "atoms", tuple(atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __add__(self, other: GeneratorWord) -> GeneratorWord:
        return GeneratorWord(self.atoms + other.atoms)

    def inverse(self) -> GeneratorWord:
        return GeneratorWord(a.inverse() for a in reversed(self.atoms))

    def max_rotor(self) -> int:
        return max((max(a.rotors) for a in self.atoms), default=-1)

    def validate(self, n: int) -> None:
        for a in self.atoms:
            if any(r < 0 or r >= n for r in a.rotors):
                raise IndexError(f"{a} does not fit on {n} rotors")

    def evaluate(self, n: int) -> SymplecticRotorOp:
        self.validate(n)
        out = SymplecticRotorOp.identity(n)
        for a in self.atoms:
            out = compose(out, generator(a, n))
        return out

    def to_json(self) -> list[dict[str, Any]]:
        return [a.to_json() for a in self.atoms]

    @classmethod
    def from_json(cls, obj: Sequence[dict[str, Any]]) -> GeneratorWord:
        return cls(Atom.from_json(a) for a in obj)

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.atoms) or "I"


def _zero_angles(n: int) -> AngleMatrix:
    return tuple((ZERO,) * n for _ in range(n))


def _int_times_angles(A: im.IntMatrix, C: AngleMatrix) -> AngleMatrix:
    cols = list(zip(*C)) if C else []
    return tuple(tuple(angle_dot(row, col) for col in cols) for row in A)


def _angles_times_int(C: AngleMatrix, A: im.IntMatrix) -> AngleMatrix:
    At = im.transpose(A)
    return tuple(tuple(angle_dot(col, row) for col in At) for row in C)


def _add_angles(C1: AngleMatrix, C2: AngleMatrix) -> AngleMatrix:
    return tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(C1, C2))


def _neg_angles(C: AngleMatrix) -> AngleMatrix:
    return tuple(tuple(-a for a in row) for row in C)


@dataclass(frozen=True)
class SymplecticRotorOp:
    n: int
    A: im.IntMatrix
    C: AngleMatrix = field(default=())

    def __post_init__(self):
        A = im.as_matrix(self.A)
        C = self.C or _zero_angles(self.n)
        C = tuple(tuple(ExactAngle(x) for x in row) for row in C)
        if len(A) != self.n or any(len(r) != self.n for r in A):
            raise ValueError(f"A must be {self.n}x{self.n}")
        if len(C) != self.n or any(len(r) != self.n for r in C):
            raise ValueError(f"C must be {self.n}x{self.n}")
        if abs(im.det(A)) != 1:
            raise ValueError("the X block of a rotor Clifford must be unimodular")
        if any(C[i][j] != C[j][i] for i in range(self.n) for j in range(i)):
            raise ValueError("the angle block must be symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)

    @classmethod
    def identity(cls, n: int) -> SymplecticRotorOp:
        return cls(n, im.identity(n))

    @property
    def A_inv(self) -> im.IntMatrix:
        return im.inverse_unimodular(self.A)

    @property
    def is_css(self) -> bool:
        return not any(a for row in self.C for a in row)

    def block_matrix(self) -> tuple[tuple[Any, ...], ...]:
        """Assembled ``2n x 2n`` matrix; lower-left entries are angles."""
        Ait = im.transpose(self.A_inv)
        lower_left = _int_times_angles(Ait, self.C)
        top = tuple(tuple(self.A[i]) + (0,) * self.n for i in range(self.n))
        bottom = tuple(tuple(lower_left[i]) + tuple(Ait[i]) for i in range(self.n))
        return top + bottom

    def satisfies_symplectic_condition(self) -> bool:
        """Check ``Q^T Lambda Q = Lambda`` on the assembled blocks."""
        Q = self.block_matrix()
        n = self.n
        A = [row[:n] for row in Q[:n]]
        B = [row[:n] for row in Q[n:]]
        D = [row[n:] for row in Q[n:]]
        upper_right = [row[n:] for row in Q[:n]]
        if any(x != 0 for row in upper_right for x in row):
            return False
        At = im.transpose(tuple(tuple(r) for r in A))
        # A^T D = I exactly
        if im.matmul(At, tuple(tuple(r) for r in D)) != im.identity(n):
            return False
        # A^T B - B^T A = 0 mod 2 pi
        AtB = _int_times_angles(At, tuple(tuple(r) for r in B))
        return all(AtB[i][j] == AtB[j][i] for i in range(n) for j in range(n))

    def __matmul__(self, other: SymplecticRotorOp) -> SymplecticRotorOp:
        return compose(self, other)

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "A": im.to_str_rows(self.A),
            "C": [[a.to_json() for a in row] for row in self.C],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> SymplecticRotorOp:
        n = int(obj["n"])
        C = obj.get("C")
        return cls(
            n,
            im.as_matrix(obj["A"]),
            tuple(tuple(ExactAngle.from_json(a) for a in row) for row in C) if C else (),
        )


def _check_rotor(r: int, n: int) -> None:
    if not 0 <= r < n:
        raise IndexError(f"rotor index {r} out of range for {n} rotors")


def generator(atom: Atom, n: int) -> SymplecticRotorOp:
    for r in atom.rotors:
        _check_rotor(r, n)
    if not atom.is_exact:
        raise TypeError("exact Clifford elements need ExactAngle parameters")
    A = [list(row) for row in im.identity(n)]
    C = [[ZERO] * n for _ in range(n)]
    i, j = atom.i, atom.j
    if atom.gate == "cnot":
        A[j][i] = 1
    elif atom.gate == "cnot_dag":
        A[j][i] = -1
    elif atom.gate == "p":
        A[i][i] = -1
    elif atom.gate == "swap":
        A[i][i] = A[j][j] = 0
        A[i][j] = A[j][i] = 1
    elif atom.gate == "quad":
        C[i][i] = atom.phi
    elif atom.gate == "cphs":
        C[i][j] = C[j][i] = atom.phi
    return SymplecticRotorOp(n, im.as_matrix(A), tuple(tuple(r) for r in C))


def _check_n(*ops: Any) -> None:
    ns = {op.n for op in ops}
    if len(ns) != 1:
        raise ValueError(f"operands act on different rotor counts {sorted(ns)}")


def compose(g: SymplecticRotorOp, h: SymplecticRotorOp) -> SymplecticRotorOp:
    """``Q_g Q_h``: A = A_g A_h, C = A_h^T C_g A_h + C_h."""
    _check_n(g, h)
    A = im.matmul(g.A, h.A)
    C = _add_angles(_angles_times_int(_int_times_angles(im.transpose(h.A), g.C), h.A), h.C)
    return SymplecticRotorOp(g.n, A, C)


def inverse(g: SymplecticRotorOp) -> SymplecticRotorOp:
    Ainv = g.A_inv
    C = _neg_angles(_angles_times_int(_int_times_angles(im.transpose(Ainv), g.C), Ainv))
    return SymplecticRotorOp(g.n, Ainv, C)


def act_on_pauli(g: SymplecticRotorOp, v: PauliVector) -> PauliVector:
    """Heisenberg image ``U v U^dagger``; the global phase is carried over unchanged."""
    _check_n(g, v)
    Ait = im.transpose(g.A_inv)
    m = im.matvec(g.A, v.m)
    inner = tuple(angle_dot(v.m, row) + p for row, p in zip(g.C, v.phi))
    phi = tuple(angle_dot(row, inner) for row in Ait)
    return PauliVector(g.n, m, phi, v.phase)


def hn_decompose(g: SymplecticRotorOp) -> tuple[SymplecticRotorOp, SymplecticRotorOp]:
    """Split ``g = h nrm`` with ``h`` CSS (C = 0) and ``nrm`` in the normal subgroup (A = I)."""
    h = SymplecticRotorOp(g.n, g.A)
    nrm = SymplecticRotorOp(g.n, im.identity(g.n), g.C)
    return h, nrm


def normal_conjugate(g: SymplecticRotorOp, nrm: SymplecticRotorOp) -> SymplecticRotorOp:
    """``g nrm g^-1``, which stays in the normal subgroup."""
    if nrm.A != im.identity(nrm.n):
        raise ValueError("second argument must have A = identity")
    out = compose(compose(g, nrm), inverse(g))
    if out.A != im.identity(out.n):
        raise AssertionError("conjugate left the normal subgroup")
    Ainv = g.A_inv
    expected = _angles_times_int(_int_times_angles(im.transpose(Ainv), nrm.C), Ainv)
    if out.C != expected:
        raise AssertionError("conjugate angle block disagrees with A^-T C A^-1")
    return out


is_normal_conjugate = normal_conjugate


def is_passive(g: SymplecticRotorOp) -> bool:
    """Signed permutations with no angle block."""
    return g.is_css and im.matmul(g.A, im.transpose(g.A)) == im.identity(g.n)


def transform_nullifier(g: SymplecticRotorOp, momenta: Sequence[int]) -> tuple[int, ...]:
    """Momenta of ``U |l>``.

    Under conjugation the momentum operators map as ``l -> A^-1 l``, so the
    eigenvector ``U |l>`` carries momenta ``A l``.
    """
    if len(momenta) != g.n:
        raise ValueError(f"expected {g.n} momenta, got {len(momenta)}")
    return im.matvec(g.A, momenta)


def synthesize_generators(A: Sequence[Sequence[int]]) -> GeneratorWord:
    """Write a unimodular ``A`` as a word in CNOT, CNOT^dagger, SWAP and P.

    Row reduction by extended-Euclid steps: pivot on the smallest nonzero
    absolute value in the column (lowest row wins ties), subtract quotient
    multiples with CNOT/CNOT^dagger, move the pivot with SWAP and fix its sign
    with P.  If the elementary row operations are ``E_k ... E_1 A = I`` the
    word is ``E_1^-1 ... E_k^-1``.

    Length is at most ``n^2`` SWAP/P atoms plus the sum of Euclidean quotients
    met during elimination; quotient steps are emitted one transvection at a
    time, so large entries produce proportionally long words.
    """
    M = im.as_matrix(A)
    n = len(M)
    if any(len(r) != n for r in M) or abs(im.det(M)) != 1:
        raise ValueError("synthesis needs a square unimodular matrix")
    a = [list(r) for r in M]
    ops: list[Atom] = []

    def add_row(src: int, dst: int, q: int) -> None:
        # row_dst += q * row_src
        if q == 0:
            return
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        atom = cnot(src, dst) if q > 0 else cnot_dag(src, dst)
        ops.extend([atom] * abs(q))

    for c in range(n):
        while True:
            rows = [r for r in range(c, n) if a[r][c] != 0]
            p = min(rows, key=lambda r: (abs(a[r][c]), r))
            others = [r for r in rows if r != p]
            if not others:
                break
            for r in others:
                q = -(a[r][c] // a[p][c])
                add_row(p, r, q)
        if p != c:
            a[p], a[c] = a[c], a[p]
            ops.append(swap(p, c))
        if a[c][c] == -1:
            a[c] = [-x for x in a[c]]
            ops.append(parity(c))
        for r in range(c):
            add_row(c, r, -a[r][c])
    for r in range(n):
        for cc in range(r + 1, n):
            add_row(cc, r, -a[r][cc])
    return GeneratorWord(op.inverse() for op in ops)


@dataclass(frozen=True)
class JosephsonHamiltonian:
    """``-E_J sum_j (T_j + T_j^dagger) - E_C l^T K l`` with Pauli cosine terms ``T_j``."""

    E_J: float
    E_C: float
    n: int
    cosine_terms: tuple[PauliVector, ...]
    kinetic_form: im.IntMatrix

    def __post_init__(self):
        K = im.as_matrix(self.kinetic_form)
        if len(K) != self.n or im.transpose(K) != K:
            raise ValueError("kinetic form must be a symmetric n x n matrix")
        object.__setattr__(self, "kinetic_form", K)
        object.__setattr__(self, "cosine_terms", tuple(self.cosine_terms))

    @classmethod
    def decoupled(cls, n: int, E_J: float = 1.0, E_C: float = 1.0) -> JosephsonHamiltonian:
        return cls(E_J, E_C, n, tuple(PauliVector.x(n, j) for j in range(n)), im.identity(n))


def transform_josephson(g: SymplecticRotorOp, H: JosephsonHamiltonian) -> JosephsonHamiltonian:
    """Conjugate the junction Hamiltonian by ``g``.

    Cosine terms follow :func:`act_on_pauli`; the momenta transform as
    ``l -> A^-1 l`` so the kinetic form becomes ``A^-T K A^-1``.
    """
    _check_n(g, H)
    Ainv = g.A_inv
    K = im.matmul(im.matmul(im.transpose(Ainv), H.kinetic_form), Ainv)
    terms = tuple(act_on_pauli(g, t) for t in H.cosine_terms)
    return JosephsonHamiltonian(H.E_J, H.E_C, H.n, terms, K)


def evaluate_tree(atoms: Sequence[Atom], n: int) -> SymplecticRotorOp:
    """Evaluate a word by balanced pairwise recombination."""
    if not atoms:
        return SymplecticRotorOp.identity(n)
    ops = [generator(a, n) for a in atoms]
    while len(ops) > 1:
        ops = [compose(ops[k], ops[k + 1]) if k + 1 < len(ops) else ops[k] for k in range(0, len(ops), 2)]
    return ops[0]


def random_word(
    n: int,
    length: int,
    rng: random.Random,
    *,
    max_den: int = 12,
    gates: Sequence[str] = GATES,
) -> GeneratorWord:
    """Random word with rational angles of denominator at most ``max_den``."""
    atoms = []
    for _ in range(length):
        choices = [g for g in gates if n >= 2 or g not in _TWO_ROTOR]
        gate = rng.choice(choices)
        i = rng.randrange(n)
        j = None
        if gate in _TWO_ROTOR:
            j = rng.choice([k for k in range(n) if k != i])
        phi = None
        if gate in ("quad", "cphs"):
            den = rng.randint(1, max_den)
            phi = ExactAngle(Fraction(rng.randrange(den), den))
        atoms.append(Atom(gate, i, j, phi))
    return GeneratorWord(atoms)


def _random_pauli(n: int, rng: random.Random, max_den: int = 12) -> PauliVector:
    m = [rng.randint(-5, 5) for _ in range(n)]
    phi = []
    for _ in range(n):
        den = rng.randint(1, max_den)
        phi.append(Fraction(rng.randrange(den), den))
    return PauliVector.from_parts(m, phi)


@dataclass
class GroupLawReport:
    words: int
    seed: int
    n_max: int
    failures: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def to_json(self) -> dict[str, Any]:
        return {"words": self.words, "seed": self.seed, "n_max": self.n_max, "ok": self.ok, "failures": self.failures}


def group_law_suite(words: int = 1000, n_max: int = 4, seed: int = 0, max_length: int = 24) -> GroupLawReport:
    """Exact checks on random words: symplectic condition, block form,
    associativity of evaluation, normal-form round trip, closure of the
    normal subgroup under conjugation and preservation of commutation phases.
    """
    rng = random.Random(seed)
    keys = ("symplectic", "block_form", "associativity", "hn_round_trip", "normal_closure", "phase_preserved")
    fails = dict.fromkeys(keys, 0)
    for _ in range(words):
        n = rng.randint(1, n_max)
        word = random_word(n, rng.randint(1, max_length), rng)
        g = word.evaluate(n)
        if not g.satisfies_symplectic_condition():
            fails["symplectic"] += 1
        Q = g.block_matrix()
        Ait = im.transpose(g.A_inv)
        if any(Q[i][n + j] != 0 for i in range(n) for j in range(n)) or any(
            Q[n + i][n + j] != Ait[i][j] for i in range(n) for j in range(n)
        ):
            fails["block_form"] += 1
        if evaluate_tree(word.atoms, n) != g:
            fails["associativity"] += 1
        h, nrm = hn_decompose(g)
        if compose(h, nrm) != g or not h.is_css or nrm.A != im.identity(n):
            fails["hn_round_trip"] += 1
        angles = random_word(n, rng.randint(1, 6), rng, gates=("quad", "cphs") if n > 1 else ("quad",))
        try:
            normal_conjugate(g, angles.evaluate(n))
        except AssertionError:
            fails["normal_closure"] += 1
        u, v = _random_pauli(n, rng), _random_pauli(n, rng)
        if symplectic_phase(act_on_pauli(g, u), act_on_pauli(g, v)) != symplectic_phase(u, v):
            fails["phase_preserved"] += 1
    return GroupLawReport(words, seed, n_max, fails)

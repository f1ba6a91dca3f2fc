"""Exact integer lattices: Smith and Hermite normal forms, kernels, homology."""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd
from typing import Any, Sequence

from . import _intmat as im


@dataclass(frozen=True)
class SmithDecomposition:
    """``U M V = D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: im.IntMatrix
    D: im.IntMatrix
    V: im.IntMatrix
    invariant_factors: tuple[int, ...]
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def diagonal(self) -> tuple[int, ...]:
        """All ``min(r, c)`` diagonal entries, zeros included."""
        return tuple(self.D[i][i] for i in range(min(self.rows, self.cols)))

    def verify(self, M: Sequence[Sequence[int]]) -> bool:
        M = im.as_matrix(M)
        if self.rows == 0 or self.cols == 0:
            return im.is_unimodular(self.U) and im.is_unimodular(self.V)
        if im.matmul(im.matmul(self.U, M), self.V) != self.D:
            return False
        if not (im.is_unimodular(self.U) and im.is_unimodular(self.V)):
            return False
        d = self.diagonal()
        if any(self.D[i][j] for i in range(self.rows) for j in range(self.cols) if i != j):
            return False
        if any(x < 0 for x in d):
            return False
        nz = [x for x in d if x]
        if d[: len(nz)] != tuple(nz):
            return False
        return all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))

    def to_json(self) -> dict[str, Any]:
        return {
            "U": im.to_str_rows(self.U),
            "D": im.to_str_rows(self.D),
            "V": im.to_str_rows(self.V),
            "invariant_factors": [str(d) for d in self.invariant_factors],
        }


def _dims(M: im.IntMatrix, ncols: int | None) -> tuple[int, int]:
    r = len(M)
    c = len(M[0]) if M else (ncols or 0)
    if ncols is not None and M and c != ncols:
        raise ValueError(f"expected {ncols} columns, got {c}")
    return r, c


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> SmithDecomposition:
    """Deterministic Smith normal form with unimodular witnesses.

    The pivot is the nonzero entry of least absolute value in the trailing
    block (ties: lowest row, then lowest column).  Row and column are cleared
    by Euclidean steps, and a row is folded into the pivot row whenever some
    trailing entry is not divisible by the pivot.
    """
    M = im.as_matrix(M)
    r, c = _dims(M, ncols)
    a = [list(row) for row in M]
    U = [list(row) for row in im.identity(r)]
    V = [list(row) for row in im.identity(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst += q * row src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, q):  # col dst += q * col src
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(r, c)):
        cands = [(abs(a[i][j]), i, j) for i in range(t, r) for j in range(t, c) if a[i][j]]
        if not cands:
            break
        _, pi, pj = min(cands)
        if pi != t:
            swap_rows(pi, t)
        if pj != t:
            swap_cols(pj, t)
        while True:
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // a[t][t]))
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // a[t][t]))
            rest = [(abs(a[i][t]), i, t) for i in range(t + 1, r) if a[i][t]]
            rest += [(abs(a[t][j]), t, j) for j in range(t + 1, c) if a[t][j]]
            if rest:
                _, pi, pj = min(rest)
                if pi != t:
                    swap_rows(pi, t)
                if pj != t:
                    swap_cols(pj, t)
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]

    D = im.as_matrix(a) if r else ()
    diag = [D[i][i] for i in range(min(r, c))]
    return SmithDecomposition(
        U=im.as_matrix(U),
        D=D,
        V=im.as_matrix(V),
        invariant_factors=tuple(x for x in diag if x),
        rows=r,
        cols=c,
    )


def rank(M: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    return smith_normal_form(M, ncols).rank


def hermite_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[im.IntMatrix, im.IntMatrix]:
    """Row-style Hermite form ``H = W M`` with ``W`` unimodular.

    Pivots are positive and entries above each pivot lie in ``[0, pivot)``;
    zero rows trail.
    """
    M = im.as_matrix(M)
    r, c = _dims(M, ncols)
    a = [list(row) for row in M]
    W = [list(row) for row in im.identity(r)]
    prow = 0
    for col in range(c):
        if prow >= r:
            break
        while True:
            nz = [i for i in range(prow, r) if a[i][col]]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(a[i][col]), i))
            a[p], a[prow] = a[prow], a[p]
            W[p], W[prow] = W[prow], W[p]
            others = [i for i in range(prow + 1, r) if a[i][col]]
            if not others:
                break
            for i in others:
                q = a[i][col] // a[prow][col]
                a[i] = [x - q * y for x, y in zip(a[i], a[prow])]
                W[i] = [x - q * y for x, y in zip(W[i], W[prow])]
        if prow < r and a[prow][col]:
            if a[prow][col] < 0:
                a[prow] = [-x for x in a[prow]]
                W[prow] = [-x for x in W[prow]]
            piv = a[prow][col]
            for i in range(prow):
                q = a[i][col] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[prow])]
                    W[i] = [x - q * y for x, y in zip(W[i], W[prow])]
            prow += 1
    return (im.as_matrix(a) if r else ()), im.as_matrix(W)


def kernel_basis(M: Sequence[Sequence[int]], ncols: int | None = None) -> im.IntMatrix:
    """Columns spanning the full integer kernel ``{v : M v = 0}``.

    Taken from the trailing columns of the Smith witness ``V``, so the basis is
    saturated.  Returned as an ``n x k`` matrix (``k`` may be zero).
    """
    snf = smith_normal_form(M, ncols)
    n = snf.cols
    return tuple(tuple(snf.V[i][j] for j in range(snf.rank, n)) for i in range(n))


def kernel_with_left_inverse(
    M: Sequence[Sequence[int]], ncols: int | None = None
) -> tuple[im.IntMatrix, im.IntMatrix]:
    """Kernel basis ``K`` together with an integer ``L`` such that ``L K = I``."""
    snf = smith_normal_form(M, ncols)
    n = snf.cols
    K = tuple(tuple(snf.V[i][j] for j in range(snf.rank, n)) for i in range(n))
    Vinv = im.inverse_unimodular(snf.V) if n else ()
    L = tuple(Vinv[i] for i in range(snf.rank, n))
    return K, L


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int], ncols: int | None = None) -> tuple[int, ...] | None:
    """One integer solution of ``A x = b`` or ``None``."""
    A = im.as_matrix(A)
    snf = smith_normal_form(A, ncols)
    if len(b) != snf.rows:
        raise ValueError("right-hand side has the wrong length")
    Ub = im.matvec(snf.U, b)
    y = [0] * snf.cols
    for i, val in enumerate(Ub):
        d = snf.D[i][i] if i < min(snf.rows, snf.cols) else 0
        if d == 0:
            if val:
                return None
        elif val % d:
            return None
        else:
            y[i] = val // d
    return im.matvec(snf.V, y)


def in_row_lattice(M: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Is ``v`` an integer combination of the rows of ``M``?"""
    M = im.as_matrix(M)
    if not M:
        return all(x == 0 for x in v)
    return solve_integer(im.transpose(M), v) is not None


def same_row_lattice(M1: Sequence[Sequence[int]], M2: Sequence[Sequence[int]]) -> bool:
    return all(in_row_lattice(M2, row) for row in M1) and all(in_row_lattice(M1, row) for row in M2)


def normalize_rows(M: Sequence[Sequence[int]]) -> im.IntMatrix:
    """Divide each nonzero row by the gcd of its entries."""
    out = []
    for row in im.as_matrix(M):
        g = im.gcd_list(row)
        out.append(tuple(x // g for x in row) if g > 1 else tuple(row))
    return tuple(out)


def random_unimodular(n: int, rng: random.Random, bound: int = 10, steps: int | None = None) -> im.IntMatrix:
    """Random unimodular matrix built from elementary moves, entries kept within ``bound``."""
    a = [list(row) for row in im.identity(n)]
    if n == 0:
        return ()
    for _ in range(steps if steps is not None else 6 * n):
        kind = rng.random()
        if n >= 2 and kind < 0.7:
            i, j = rng.sample(range(n), 2)
            q = rng.choice([-2, -1, 1, 2])
            new = [x + q * y for x, y in zip(a[i], a[j])]
            if max(abs(x) for x in new) <= bound:
                a[i] = new
        elif n >= 2 and kind < 0.85:
            i, j = rng.sample(range(n), 2)
            a[i], a[j] = a[j], a[i]
        else:
            i = rng.randrange(n)
            a[i] = [-x for x in a[i]]
    return im.as_matrix(a)


@dataclass(frozen=True)
class HomologyResult:
    """``ker(H_Z) / rowspan(H_X)`` as ``(+) Z_{d_i} (+) Z^free_rank``.

    ``witnesses`` is the Smith decomposition of the presentation matrix whose
    columns are the rows of ``H_X`` in coordinates of ``kernel``.
    """

    torsion: tuple[int, ...]
    free_rank: int
    witnesses: SmithDecomposition
    kernel: im.IntMatrix
    kernel_left_inverse: im.IntMatrix
    presentation: im.IntMatrix
    formula_mismatch: bool = False

    @property
    def kernel_dim(self) -> int:
        return self.witnesses.rows

    @property
    def logical_dimension(self) -> int | None:
        """Product of torsion orders, ``None`` when logical rotors are present."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def generator_orders(self) -> tuple[int, ...]:
        """Orders of the nontrivial homology generators (0 for free)."""
        out = []
        for i in range(self.kernel_dim):
            d = self.witnesses.D[i][i] if i < min(self.witnesses.rows, self.witnesses.cols) else 0
            if d != 1:
                out.append(d)
        return tuple(out)

    def generator_indices(self) -> tuple[int, ...]:
        out = []
        for i in range(self.kernel_dim):
            d = self.witnesses.D[i][i] if i < min(self.witnesses.rows, self.witnesses.cols) else 0
            if d != 1:
                out.append(i)
        return tuple(out)

    def to_json(self) -> dict[str, Any]:
        return {
            "torsion": [str(d) for d in self.torsion],
            "free_rank": self.free_rank,
            "formula_mismatch": self.formula_mismatch,
            "witnesses": self.witnesses.to_json(),
        }


def homology_from_matrices(
    H_X: Sequence[Sequence[int]],
    H_Z: Sequence[Sequence[int]],
    n: int,
    *,
    normalize_z: bool = True,
) -> HomologyResult:
    H_X = im.as_matrix(H_X, n if H_X else None)
    H_Z = im.as_matrix(H_Z, n if H_Z else None)
    if normalize_z:
        H_Z = normalize_rows(H_Z)
    K, L = kernel_with_left_inverse(H_Z, n)
    k = len(K[0]) if K and K[0] else 0
    if n and not K:
        k = 0
    # rows of H_X live in ker(H_Z); write them in kernel coordinates: H_X^T = K Y
    cols = []
    for row in H_X:
        y = im.matvec(L, row)
        if im.matvec(K, y) != tuple(row):
            raise ValueError("a row of H_X is not in ker(H_Z); the CSS condition fails")
        cols.append(y)
    Y = im.transpose(tuple(cols), k) if cols else tuple(() for _ in range(k))
    snf = smith_normal_form(Y, len(H_X))
    torsion = tuple(d for d in snf.invariant_factors if d > 1)
    free_rank = k - snf.rank
    # the full-rank textbook formula: torsion from SNF(H_X), n - r_X - r_Z free
    naive = smith_normal_form(H_X, n)
    naive_torsion = tuple(d for d in naive.invariant_factors if d > 1)
    mismatch = naive_torsion != torsion or (n - len(H_X) - len(H_Z)) != free_rank
    return HomologyResult(
        torsion=torsion,
        free_rank=free_rank,
        witnesses=snf,
        kernel=K,
        kernel_left_inverse=L,
        presentation=Y,
        formula_mismatch=mismatch,
    )


def homology(code: Any, *, normalize_z: bool = True) -> HomologyResult:
    """Homology of a CSS code object exposing ``n``, ``H_X`` and ``H_Z``."""
    if hasattr(code, "validate"):
        code.validate()
    return homology_from_matrices(code.H_X, code.H_Z, code.n, normalize_z=normalize_z)


def same_equivalence_class(c1: Any, c2: Any) -> bool:
    """Codes are Clifford-equivalent iff torsion factors and free ranks agree."""
    h1, h2 = homology(c1), homology(c2)
    return h1.torsion == h2.torsion and h1.free_rank == h2.free_rank


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else 0

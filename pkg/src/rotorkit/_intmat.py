"""Small exact integer-matrix helpers.

Matrices are tuples of row tuples of Python ints, so entries never overflow.
"""

from __future__ import annotations

from typing import Sequence

IntMatrix = tuple[tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    out = tuple(tuple(int(x) for x in row) for row in rows)
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise ValueError("ragged matrix")
    if ncols is not None and out and len(out[0]) != ncols:
        raise ValueError(f"expected {ncols} columns, got {len(out[0])}")
    return out


def shape(M: IntMatrix, ncols: int | None = None) -> tuple[int, int]:
    if not M:
        return 0, (ncols or 0)
    return len(M), len(M[0])


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> IntMatrix:
    return tuple((0,) * c for _ in range(r))


def transpose(M: IntMatrix, ncols: int | None = None) -> IntMatrix:
    r, c = shape(M, ncols)
    return tuple(tuple(M[i][j] for i in range(r)) for j in range(c))


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return ()
    inner = len(A[0])
    if inner != len(B):
        raise ValueError(f"shape mismatch {len(A)}x{inner} @ {len(B)}x?")
    if not B:
        return tuple(() for _ in A)
    cols = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def matvec(A: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def is_zero(M: IntMatrix) -> bool:
    return all(x == 0 for row in M for x in row)


def det(M: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(M)
    if n == 0:
        return 1
    if any(len(r) != n for r in M):
        raise ValueError("determinant of non-square matrix")
    a = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(M: IntMatrix) -> bool:
    if not M:
        return True
    if any(len(r) != len(M) for r in M):
        return False
    return abs(det(M)) == 1


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1 (Gauss-Jordan over Z)."""
    n = len(M)
    a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        # Euclid on column c below the diagonal keeps everything integral
        while True:
            rows = [i for i in range(c, n) if a[i][c] != 0]
            if not rows:
                raise ValueError("matrix is singular")
            p = min(rows, key=lambda i: (abs(a[i][c]), i))
            others = [i for i in rows if i != p]
            if not others:
                break
            for i in others:
                q = a[i][c] // a[p][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[p])]
        a[c], a[p] = a[p], a[c]
        if abs(a[c][c]) != 1:
            raise ValueError("matrix is not unimodular")
        if a[c][c] == -1:
            a[c] = [-x for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                q = a[i][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[c])]
    return tuple(tuple(r[n:]) for r in a)


def gcd_list(values: Sequence[int]) -> int:
    from math import gcd

    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def to_str_rows(M: IntMatrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in M]

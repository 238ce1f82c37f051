"""Exact rational linear algebra for the certificate-bearing code paths.

Dense matrices of ``fractions.Fraction`` kept as lists of lists.  Everything
here must stay exact: kernel witnesses and Schur complements are verified with
zero tolerance.  Float eigensolvers live in :mod:`pigas.spectral`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def as_fraction(x) -> Fraction:
    """Coerce ints, strings like ``'3/4'`` and floats to an exact Fraction.

    Floats go through their repr so ``0.1`` means the decimal 1/10, not the
    binary double closest to it.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def matvec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return [sum((row[j] * v[j] for j in range(len(v))), start=Fraction(0)) for row in m]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            aik = ai[k]
            if aik == 0:
                continue
            bk = b[k]
            for j in range(cols):
                oi[j] += aik * bk[j]
    return out


def submatrix(m: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[m[i][j] for j in cols] for i in rows]


def rank(m: Matrix) -> int:
    """Matrix rank by exact Gaussian elimination."""
    work = [row[:] for row in m]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = 1 / work[r][col]
        work[r] = [x * inv for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == nrows:
            break
    return r


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve ``a @ X = b`` exactly by Gauss-Jordan elimination.

    Raises ValueError if ``a`` is singular.
    """
    n = len(a)
    ncols = len(b[0]) if b else 0
    aug = [a[i][:] + b[i][:] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [row[n : n + ncols] for row in aug]


def is_symmetric(m: Matrix) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def row_sums(m: Matrix) -> Vector:
    return [sum(row, start=Fraction(0)) for row in m]

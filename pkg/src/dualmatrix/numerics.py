"""Exact rational linear algebra on plain Python lists.

Scalars are GMP rationals (``gmpy2.mpq``), which behave like
:class:`fractions.Fraction` but keep long runs affordable. Vectors are
lists, matrices are lists of row lists. Orientation is carried by the call
site: ``vec_mat`` treats its vector as a row, ``mat_vec`` as a column.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Sequence

from gmpy2 import mpq as Q

Vector = List[Q]
Matrix = List[List[Q]]


class Singular(ArithmeticError):
    """Raised when a matrix that must be invertible is not."""


def q(x) -> Q:
    if isinstance(x, str):
        return parse_q(x)
    return x if type(x) is type(_ZERO) else Q(x)


def vector(xs: Iterable) -> Vector:
    return [q(x) for x in xs]


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = [vector(r) for r in rows]
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def identity(n: int) -> Matrix:
    return [[Q(int(i == j)) for j in range(n)] for i in range(n)]


def shape(m: Sequence[Sequence]) -> tuple:
    return (len(m), len(m[0]) if m else 0)


def _check_len(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def qsum(xs: Iterable) -> Q:
    """Sum of rationals with a single reduction at the end.

    Terms that share a denominator (the common case for entries of one
    inverse matrix) add as plain integers.
    """
    num, den = 0, 1
    for x in xs:
        x = q(x)
        p, d = x.numerator, x.denominator
        if d == den:
            num += p
        else:
            num, den = num * d + p * den, den * d
    return Q(num, den)


def dot(a: Sequence, b: Sequence) -> Q:
    _check_len(a, b)
    return qsum(x * y for x, y in zip(a, b))


def norm2(a: Sequence) -> Q:
    return qsum(x * x for x in a)


def add(a: Sequence, b: Sequence) -> Vector:
    _check_len(a, b)
    return [x + y for x, y in zip(a, b)]


def sub(a: Sequence, b: Sequence) -> Vector:
    _check_len(a, b)
    return [x - y for x, y in zip(a, b)]


def scale(c, a: Sequence) -> Vector:
    return [c * x for x in a]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)]


def column(m: Sequence[Sequence], k: int) -> Vector:
    return [row[k] for row in m]


def mat_vec(m: Sequence[Sequence], x: Sequence) -> Vector:
    return [dot(row, x) for row in m]


def vec_mat(x: Sequence, m: Sequence[Sequence]) -> Vector:
    _check_len(x, m)
    ncols = len(m[0]) if m else 0
    live = [(xi, row) for xi, row in zip(x, m) if xi]
    return [qsum(xi * row[k] for xi, row in live) for k in range(ncols)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [vec_mat(row, b) for row in a]


def _eliminate(m: Matrix, ncols: int):
    """In-place Gauss-Jordan on the first ``ncols`` columns of ``m``.

    Partial pivoting by largest absolute value, ties to lowest row.
    Returns the list of (row, col) pivot positions.
    """
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        best = max(range(r, nrows), key=lambda i: (abs(m[i][c]), -i))
        if m[best][c] == 0:
            continue
        m[r], m[best] = m[best], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        prow = m[r]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], prow)]
        pivots.append((r, c))
        r += 1
    return pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    work = [vector(r) for r in m]
    return len(_eliminate(work, len(work[0])))


def invert(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("invert needs a square matrix")
    eye = identity(n)
    work = [vector(r) + eye[i] for i, r in enumerate(m)]
    if len(_eliminate(work, n)) < n:
        raise Singular("matrix is singular")
    return [row[n:] for row in work]


def det(m: Sequence[Sequence]) -> Q:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("det needs a square matrix")
    work = [vector(r) for r in m]
    result = Q(1)
    for c in range(n):
        best = max(range(c, n), key=lambda i: (abs(work[i][c]), -i))
        if work[best][c] == 0:
            return _ZERO
        if best != c:
            work[c], work[best] = work[best], work[c]
            result = -result
        p = work[c][c]
        result *= p
        for i in range(c + 1, n):
            f = work[i][c] / p
            if f:
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return result


def kernel_basis(m: Sequence[Sequence]) -> List[Vector]:
    """Row vectors f with ``f . m == 0``, one per unit of rank deficiency.

    Row-reduces ``[m | I]`` and reads the identity part of every row whose
    ``m`` part vanished.
    """
    r = len(m)
    if r == 0:
        return []
    ncols = len(m[0])
    eye = identity(r)
    work = [vector(row) + eye[i] for i, row in enumerate(m)]
    npiv = len(_eliminate(work, ncols))
    return [row[ncols:] for row in work[npiv:]]


def round_sig(x, bits: int) -> Q:
    """Nearest ``k * 2**e`` with ``|k| < 2**bits``; ties go to even ``k``."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    x = q(x)
    if x == 0:
        return _ZERO
    sign = -1 if x < 0 else 1
    a = abs(x)
    # choose e so that 2**(bits-1) <= a / 2**e < 2**bits
    e = a.numerator.bit_length() - a.denominator.bit_length() - bits
    while a / _pow2(e) >= 2 ** bits:
        e += 1
    while a / _pow2(e) < 2 ** (bits - 1):
        e -= 1
    k = round(a / _pow2(e))  # half-to-even
    return sign * k * _pow2(e)


def _pow2(e: int) -> Q:
    return Q(2 ** e) if e >= 0 else Q(1, 2 ** -e)


def _ilog2(k) -> float:
    shift = max(k.bit_length() - 64, 0)
    return math.log2(int(k >> shift)) + shift


def log2(x) -> float:
    """Approximate log2 of a positive rational of any size."""
    x = q(x)
    if x <= 0:
        raise ValueError("log2 of non-positive value")
    return _ilog2(x.numerator) - _ilog2(x.denominator)


def fmt(x) -> str:
    x = q(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(text: str) -> Q:
    """Parse ``"3/4"``, ``"-5"`` or a decimal such as ``"0.25"`` exactly."""
    return Q(Fraction(text.strip()))


_ZERO = Q(0)

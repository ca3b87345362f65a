"""Exact rational arithmetic, determinants and linear-system solving.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator) and integers are plain ``int``; both are arbitrary precision.
Nothing in this module touches floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Sequence

Matrix = list[list[Fraction]]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_DECIMAL_RE = re.compile(r"^\s*[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\s*$")


class ExactArithmeticError(ArithmeticError):
    pass


class SingularSystem(ExactArithmeticError):
    """Raised when a square system has no unique solution."""

    def __init__(self, rank: int, size: int):
        super().__init__(f"singular system: rank {rank} < {size}")
        self.rank = rank
        self.size = size


def parse_rational(text: str | int | Fraction, allow_decimal: bool = True) -> Fraction:
    """Parse ``"p"``, ``"p/q"`` or (optionally) a decimal literal exactly.

    >>> parse_rational("0.25")
    Fraction(1, 4)
    """
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"cannot parse {text!r} as a rational")
    m = _RATIONAL_RE.match(text)
    if m:
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return Fraction(num, den)
    if allow_decimal and _DECIMAL_RE.match(text):
        return Fraction(text.strip())
    raise ValueError(f"not an exact rational literal: {text!r}")


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_add(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a) + Fraction(b)


def rat_mul(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a) * Fraction(b)


def rat_div(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise ZeroDivisionError("rational division by zero")
    return Fraction(a) / Fraction(b)


def rat_cmp(a: Fraction, b: Fraction) -> int:
    """Three-way comparison: -1, 0 or +1."""
    return (a > b) - (a < b)


def sign(x) -> int:
    return (x > 0) - (x < 0)


def bit_size_telemetry(x: Fraction | int) -> tuple[int, int]:
    """Bit lengths of the reduced numerator and denominator (zero counts as 1 bit)."""
    x = Fraction(x)
    return max(1, abs(x.numerator).bit_length()), x.denominator.bit_length()


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = [[Fraction(v) for v in row] for row in rows]
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def scale_to_integers(row: Sequence[Rational]) -> tuple[list[int], int]:
    """Return ``(ints, s)`` with ``ints = s * row`` and ``s`` the positive lcm of denominators."""
    s = 1
    for v in row:
        s = lcm(s, Fraction(v).denominator)
    return [int(Fraction(v) * s) for v in row], s


def primitive(ints: Sequence[int]) -> list[int]:
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g <= 1:
        return list(ints)
    return [v // g for v in ints]


def _bareiss(m: list[list[int]], ncols_pivot: int) -> tuple[list[list[int]], int, int]:
    """In-place fraction-free elimination on the first ``ncols_pivot`` columns.

    Returns ``(m, rank, swap_sign)``; rows past ``rank`` are zero in the pivot
    columns.  Pivot choice is the first nonzero entry, so the result is
    deterministic.
    """
    rows = len(m)
    prev = 1
    r = 0
    swaps = 1
    for c in range(ncols_pivot):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            swaps = -swaps
        piv = m[r][c]
        width = len(m[r])
        for i in range(r + 1, rows):
            mi = m[i]
            f = mi[c]
            if f == 0:
                for j in range(c + 1, width):
                    mi[j] = (piv * mi[j]) // prev
            else:
                mr = m[r]
                for j in range(c + 1, width):
                    mi[j] = (piv * mi[j] - f * mr[j]) // prev
            mi[c] = 0
        prev = piv
        r += 1
    return m, r, swaps


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant via Bareiss elimination on an integer-scaled copy."""
    a = as_matrix(matrix)
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    ints = []
    scale = 1
    for row in a:
        r, s = scale_to_integers(row)
        ints.append(r)
        scale *= s
    m, rank, swaps = _bareiss(ints, n)
    if rank < n:
        return Fraction(0)
    return Fraction(swaps * m[n - 1][n - 1], scale)


def solve_linear_system(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique exact solution of ``a x = b`` (``a`` square).

    Fraction-free forward elimination on the integer-scaled augmented matrix,
    then exact back substitution.  Raises :class:`SingularSystem` with the
    rank of ``a`` when there is no unique solution.
    """
    a = as_matrix(a)
    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("solve_linear_system needs a square matrix and matching rhs")
    aug = []
    for row, rhs in zip(a, b):
        r, _ = scale_to_integers(list(row) + [Fraction(rhs)])
        aug.append(r)
    m, rank, _ = _bareiss(aug, n)
    if rank < n:
        raise SingularSystem(rank, n)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(m[i][n])
        row = m[i]
        for j in range(i + 1, n):
            if row[j]:
                acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return x


def rref(matrix: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (exact)."""
    m = as_matrix(matrix)
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                mr = m[r]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], mr)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    if not matrix:
        return 0
    ints = [scale_to_integers(row)[0] for row in matrix]
    return _bareiss(ints, len(ints[0]))[1]


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : matrix x = 0}``."""
    if not matrix:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(matrix)
    cols = len(m[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


def solve_consistent(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some exact solution of a possibly non-square system, or ``None`` if inconsistent."""
    a = as_matrix(a)
    if not a:
        return None
    cols = len(a[0])
    aug = [list(row) + [Fraction(v)] for row, v in zip(a, b)]
    m, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, p in enumerate(pivots):
        x[p] = m[r][cols]
    return x

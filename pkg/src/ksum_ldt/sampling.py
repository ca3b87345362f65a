"""Uniform sampling of canonical index tuples and epsilon-net drawing.

``omega(m, l)`` counts nondecreasing ``l``-tuples over ``m`` symbols and
satisfies ``omega(m, 0) = 1`` and ``omega(m, l) = sum(omega(i, l - 1) for i in 1..m)``.
The partial sums of column ``l - 1`` are column ``l`` itself, so the largest
entry of a uniform tuple can be drawn by bisecting column ``l`` with one
uniform integer, and the remainder of that integer is again uniform for the
rest of the tuple.  No floating point and no rejection is involved.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import KSumInstance


@dataclass(frozen=True)
class SamplingTable:
    n: int
    k: int
    # columns[l][m] == omega(m, l) for m in 0..n
    columns: tuple[tuple[int, ...], ...]

    def omega(self, m: int, l: int) -> int:
        return self.columns[l][m]


def build_table(n: int, k: int) -> SamplingTable:
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    cols = [tuple([1] * (n + 1))]
    for _ in range(k):
        prev = cols[-1]
        col = [0] * (n + 1)
        for m in range(1, n + 1):
            col[m] = col[m - 1] + prev[m]
        cols.append(tuple(col))
    return SamplingTable(n, k, tuple(cols))


def draw_sorted_tuple(table: SamplingTable, m: int, l: int, rng: random.Random) -> tuple[int, ...]:
    """Uniform nondecreasing ``l``-tuple over ``range(m)``."""
    if l == 0:
        return ()
    if m < 1 or m > table.n or l > table.k:
        raise ValueError("table too small for the requested draw")
    r = rng.randrange(table.omega(m, l))
    out = []
    while l > 0:
        col = table.columns[l]
        # smallest o with omega(o, l) > r; the last entry is o - 1 (0-based)
        o = bisect_right(col, r, 0, m + 1)
        r -= col[o - 1]
        out.append(o - 1)
        m = o
        l -= 1
    out.reverse()
    return tuple(out)


def draw_increasing_tuple(table: SamplingTable, m: int, l: int, rng: random.Random) -> tuple[int, ...]:
    """Uniform strictly increasing ``l``-tuple over ``range(m)`` via ``t_j + j``."""
    if l > m:
        raise ValueError("not enough symbols for a strictly increasing tuple")
    base = draw_sorted_tuple(table, m - l + 1, l, rng)
    return tuple(t + j for j, t in enumerate(base))


def draw_canonical(inst: KSumInstance, table: SamplingTable, rng: random.Random) -> tuple[int, ...]:
    """Uniform canonical tuple: one independent draw per coefficient class."""
    draw = draw_increasing_tuple if inst.distinct else draw_sorted_tuple
    while True:
        t: list[int] = []
        for lo, hi in inst.classes:
            t.extend(draw(table, inst.n, hi - lo, rng))
        if not inst.distinct or len(inst.classes) == 1 or len(set(t)) == inst.k:
            return tuple(t)


def draw_net(inst: KSumInstance, size: int, rng: random.Random,
             table: SamplingTable | None = None) -> list[tuple[int, ...]]:
    """``size`` independent uniform draws, duplicates dropped (first occurrence order)."""
    if size < 1:
        raise ValueError("net size must be positive")
    table = table or build_table(inst.n, inst.k)
    seen: dict[tuple[int, ...], None] = {}
    for _ in range(size):
        seen.setdefault(draw_canonical(inst, table, rng), None)
    return list(seen)


def draw_from(pool: Sequence, size: int, rng: random.Random) -> list:
    """``size`` uniform draws with replacement from an explicit list, deduplicated."""
    seen: dict[int, None] = {}
    for _ in range(size):
        seen.setdefault(rng.randrange(len(pool)), None)
    return [pool[i] for i in seen]


def net_size(n: int, epsilon: Fraction | float, constant: Fraction | float = 1) -> int:
    """``ceil(constant / epsilon * n^2 * log2(max(n, 2))^2)``."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    lg = math.log2(max(n, 2))
    return max(1, math.ceil(float(Fraction(constant) / Fraction(epsilon)) * n * n * lg * lg))

"""Public description of a k-SUM / k-LDT instance and its canonical tuples.

The hidden input vector never lives here; it is sealed inside a
:class:`~ksum_ldt.oracle.QueryOracle`.

A solution is identified by a canonical index tuple.  Coefficients ``alpha``
are stored sorted; positions with equal coefficient form a class, and the
indices within a class are nondecreasing (strictly increasing in distinct
mode, where additionally all k indices must differ).  For plain k-SUM there
is a single class, so canonical tuples are sorted multisets of ``[n]``.
Indices are 0-based throughout the library.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .exact import parse_rational

Tuple = tuple[int, ...]


@dataclass(frozen=True)
class KSumInstance:
    n: int
    k: int
    alpha: tuple[Fraction, ...] = ()
    c: Fraction = Fraction(0)
    distinct: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        # sub-instances built by blocking may be smaller than k when repetition is allowed
        if self.n < 1 or (self.distinct and self.n < self.k):
            raise ValueError(f"instance too small (n={self.n}, k={self.k}, distinct={self.distinct})")
        alpha = self.alpha or (Fraction(1),) * self.k
        alpha = tuple(sorted(parse_rational(a) for a in alpha))
        if len(alpha) != self.k:
            raise ValueError("alpha must have exactly k coefficients")
        if any(a == 0 for a in alpha):
            raise ValueError("alpha coefficients must be nonzero")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", parse_rational(self.c))

    @property
    def is_plain_ksum(self) -> bool:
        return self.c == 0 and all(a == 1 for a in self.alpha)

    @property
    def lifted(self) -> bool:
        """Nonzero constant: geometry lives in n+1 coordinates, coordinate 0 standing for 1/M."""
        return self.c != 0

    @property
    def dim(self) -> int:
        return self.n + int(self.lifted)

    def coord(self, i: int) -> int:
        return i + int(self.lifted)

    @cached_property
    def classes(self) -> tuple[tuple[int, int], ...]:
        """Half-open position ranges of equal-coefficient runs."""
        runs = []
        start = 0
        for j in range(1, self.k + 1):
            if j == self.k or self.alpha[j] != self.alpha[start]:
                runs.append((start, j))
                start = j
        return tuple(runs)

    @cached_property
    def scaled(self) -> tuple[tuple[int, ...], int]:
        """Integer coefficients ``(alpha, c)`` scaled by a common positive factor."""
        s = math.lcm(*(a.denominator for a in self.alpha), self.c.denominator)
        return tuple(int(a * s) for a in self.alpha), int(self.c * s)

    def with_n(self, n: int) -> "KSumInstance":
        return KSumInstance(n, self.k, self.alpha, self.c, self.distinct)

    # -- canonical tuples -------------------------------------------------

    def is_canonical(self, t: Sequence[int]) -> bool:
        if len(t) != self.k or any(not 0 <= i < self.n for i in t):
            return False
        for lo, hi in self.classes:
            for j in range(lo + 1, hi):
                if t[j] < t[j - 1] or (self.distinct and t[j] == t[j - 1]):
                    return False
        if self.distinct and len(set(t)) != self.k:
            return False
        return True

    def canonicalize(self, t: Sequence[int]) -> Tuple:
        """Sort indices within each coefficient class."""
        out = list(t)
        for lo, hi in self.classes:
            out[lo:hi] = sorted(out[lo:hi])
        return tuple(out)

    def tuples(self) -> Iterator[Tuple]:
        """All canonical tuples, lexicographic by class."""
        gen = itertools.combinations if self.distinct else itertools.combinations_with_replacement
        parts = [gen(range(self.n), hi - lo) for lo, hi in self.classes]
        for combo in itertools.product(*[list(p) for p in parts]):
            t = tuple(itertools.chain.from_iterable(combo))
            if self.distinct and len(self.classes) > 1 and len(set(t)) != self.k:
                continue
            yield t

    def count(self) -> int:
        if not self.distinct:
            return math.prod(math.comb(self.n + (hi - lo) - 1, hi - lo) for lo, hi in self.classes)
        if len(self.classes) == 1:
            return math.comb(self.n, self.k)
        return sum(1 for _ in self.tuples())

    # -- evaluation -------------------------------------------------------

    def tuple_value(self, t: Sequence[int], values: Sequence[Fraction]) -> Fraction:
        return self.c + sum((a * values[i] for a, i in zip(self.alpha, t)), Fraction(0))

    def hyperplane_terms(self, t: Sequence[int]) -> dict[int, Fraction]:
        """Sparse normal of the tuple's hyperplane in geometric coordinates (zeros dropped)."""
        terms: dict[int, Fraction] = {}
        if self.lifted:
            terms[0] = self.c
        for a, i in zip(self.alpha, t):
            j = self.coord(i)
            terms[j] = terms.get(j, Fraction(0)) + a
        return {j: v for j, v in terms.items() if v != 0}

    def vanishes(self, t: Sequence[int]) -> bool:
        """True when the tuple's form is identically zero (opposite coefficients on one index, c == 0)."""
        return not self.hyperplane_terms(t)

    def scaled_terms(self, t: Sequence[int]) -> list[tuple[int, int]]:
        """Integer-scaled version of :meth:`hyperplane_terms` as sorted pairs."""
        ia, ic = self.scaled
        terms: dict[int, int] = {}
        if self.lifted:
            terms[0] = ic
        for a, i in zip(ia, t):
            j = self.coord(i)
            terms[j] = terms.get(j, 0) + a
        return sorted((j, v) for j, v in terms.items() if v != 0)

    def witness_cell(self, t: Sequence[int], block_of: Sequence[int]) -> Tuple:
        """Block-id pattern of a tuple, canonical within classes."""
        out = [block_of[i] for i in t]
        for lo, hi in self.classes:
            out[lo:hi] = sorted(out[lo:hi])
        return tuple(out)


def instance_from_values(values: Iterable, k: int, alpha: Sequence | None = None, c=0,
                         distinct: bool = False) -> tuple[KSumInstance, list[Fraction]]:
    vals = [parse_rational(v) for v in values]
    if len(vals) < k:
        raise ValueError(f"need n >= k (n={len(vals)}, k={k})")
    inst = KSumInstance(len(vals), k, tuple(alpha or ()), parse_rational(c), distinct)
    return inst, vals

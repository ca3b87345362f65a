"""Query-free kernels on explicit data.

All kernels share one parameterization of a tuple's value::

    offset + sum(alpha[j] * values[t[j]])

over canonical tuples of a :class:`~ksum_ldt.instance.KSumInstance`.  Tuples
are split into a left part (the first ``ceil(k/2)`` positions) and a right
part; each part is canonical on its own, and a pair is kept only if the
class straddling the split stays nondecreasing (strictly increasing in
distinct mode) and, in distinct mode, all indices differ.  Every canonical
tuple arises from exactly one pair.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from sortedcontainers import SortedList

from .exact import parse_rational
from .instance import KSumInstance

Tuple = tuple[int, ...]


class CarryError(AssertionError):
    """Digit packing would overflow into a neighbouring digit."""


def _instance(n: int, k: int, alpha, c, distinct) -> KSumInstance:
    return KSumInstance(n, k, tuple(alpha or ()), parse_rational(c), distinct)


def _part_tuples(inst: KSumInstance, lo: int, hi: int) -> list[Tuple]:
    """Canonical fragments for positions ``lo..hi-1``."""
    gen = itertools.combinations if inst.distinct else itertools.combinations_with_replacement
    parts = []
    for a, b in inst.classes:
        a, b = max(a, lo), min(b, hi)
        if a < b:
            parts.append(list(gen(range(inst.n), b - a)))
    return [tuple(itertools.chain.from_iterable(p)) for p in itertools.product(*parts)]


def _pair_filter(inst: KSumInstance, split: int) -> Callable[[Tuple, Tuple], bool]:
    straddle = next(((a, b) for a, b in inst.classes if a < split < b), None)
    strict = inst.distinct
    check_all = inst.distinct and len(inst.classes) > 1
    k = inst.k

    def ok(left: Tuple, right: Tuple) -> bool:
        if straddle is not None:
            if left[-1] > right[0] or (strict and left[-1] == right[0]):
                return False
        if check_all and len(set(left + right)) != k:
            return False
        return True

    return ok


def _split(inst: KSumInstance) -> tuple[int, list[Tuple], list[Tuple]]:
    split = (inst.k + 1) // 2
    return split, _part_tuples(inst, 0, split), _part_tuples(inst, split, inst.k)


def _sums(parts: list[Tuple], weights: Sequence, values: Sequence) -> list:
    return [sum(w * values[i] for w, i in zip(weights, t)) for t in parts]


def _join_equal(left: list, right: list, target, accept) -> list[Tuple]:
    """All ``l + r`` with ``sum_l + sum_r == target`` via sort and a two-pointer sweep.

    ``left`` and ``right`` hold ``(sum, tuple)``.
    """
    left = sorted(left)
    right = sorted(right, reverse=True)
    out = []
    i = j = 0
    while i < len(left) and j < len(right):
        s = left[i][0] + right[j][0]
        if s < target:
            i += 1
        elif s > target:
            j += 1
        else:
            li = i
            while li < len(left) and left[li][0] == left[i][0]:
                li += 1
            rj = j
            while rj < len(right) and right[rj][0] == right[j][0]:
                rj += 1
            for _, lt in left[i:li]:
                for _, rt in right[j:rj]:
                    if accept(lt, rt):
                        out.append(lt + rt)
            i, j = li, rj
    return out


# -- baselines --------------------------------------------------------------


def brute_force_decide(values: Sequence, k: int, alpha=None, c=0, distinct: bool = False) -> tuple[bool, list[Tuple]]:
    vals = [parse_rational(v) for v in values]
    inst = _instance(len(vals), k, alpha, c, distinct)
    wit = [t for t in inst.tuples() if inst.tuple_value(t, vals) == 0]
    return bool(wit), wit


def meet_in_middle_decide(values: Sequence, k: int, alpha=None, c=0, distinct: bool = False) -> tuple[bool, list[Tuple]]:
    """Sorted half sums swept against each other; returns the answer and all witnesses."""
    vals = [parse_rational(v) for v in values]
    inst = _instance(len(vals), k, alpha, c, distinct)
    ia, ic = inst.scaled
    den = lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    split, lparts, rparts = _split(inst)
    left = list(zip(_sums(lparts, ia[:split], ints), lparts))
    right = list(zip(_sums(rparts, ia[split:], ints), rparts)) if rparts else [(0, ())]
    wit = _join_equal(left, right, -ic * den, _pair_filter(inst, split))
    wit.sort()
    return bool(wit), wit


def integer_ldt_enumerate(values: Sequence[int], k: int, alpha: Sequence[int] | None = None, c: int = 0,
                          distinct: bool = False) -> list[Tuple]:
    """Canonical tuples with ``c + sum(alpha_j * values[t_j]) == 0`` over big integers."""
    inst = _instance(len(values), k, alpha, c, distinct)
    ia, ic = inst.scaled
    split, lparts, rparts = _split(inst)
    left = list(zip(_sums(lparts, ia[:split], values), lparts))
    right = list(zip(_sums(rparts, ia[split:], values), rparts)) if rparts else [(0, ())]
    out = _join_equal(left, right, -ic, _pair_filter(inst, split))
    out.sort()
    return out


def integer_ksum(values: Sequence[int], k: int) -> bool:
    """Plain k-SUM (repetition allowed) on integers; sorted half sums and a two-pointer sweep."""
    if any(not isinstance(v, int) for v in values):
        raise TypeError("integer_ksum needs int inputs")
    n = len(values)
    split = (k + 1) // 2
    left = sorted(sum(values[i] for i in t) for t in itertools.combinations_with_replacement(range(n), split))
    right = sorted((sum(values[i] for i in t) for t in itertools.combinations_with_replacement(range(n), k - split)),
                   reverse=True)
    i = j = 0
    while i < len(left) and j < len(right):
        s = left[i] + right[j]
        if s == 0:
            return True
        if s < 0:
            i += 1
        else:
            j += 1
    return False


# -- double k-SUM -----------------------------------------------------------


def _alpha_scale(inst: KSumInstance) -> int:
    return lcm(*(a.denominator for a in inst.alpha))


def _scaled_values(values: Sequence, offset) -> tuple[list[int], int]:
    vals = [parse_rational(v) for v in values]
    off = parse_rational(offset)
    den = lcm(off.denominator, *(v.denominator for v in vals))
    return [int(v * den) for v in vals], int(off * den)


def double_ksum_enumerate(nu1: Sequence, nu2: Sequence, k: int, alpha=None, offsets=(0, 0),
                          distinct: bool = False, stats: dict | None = None) -> set[Tuple]:
    """Canonical tuples whose values at ``nu1`` and ``nu2`` have strictly opposite signs.

    ``nu1``/``nu2`` give one value per index; ``offsets`` are the per-point
    constants (``c * x_0`` for lifted instances).  Right halves are inserted
    into an ordered set keyed by their rank under the second point; for
    each left half the eligible right halves then form a prefix of that
    set.  ``stats`` (if given) receives ``insertions`` and ``half_tuples``.
    """
    if len(nu1) != len(nu2):
        raise ValueError("points must have the same dimension")
    n = len(nu1)
    inst = _instance(n, k, alpha, 0, distinct)
    ia, _ = inst.scaled
    s = _alpha_scale(inst)
    x1, o1 = _scaled_values(nu1, parse_rational(offsets[0]) * s)
    x2, o2 = _scaled_values(nu2, parse_rational(offsets[1]) * s)
    split, lparts, rparts = _split(inst)
    if not rparts:
        rparts = [()]
    accept = _pair_filter(inst, split)
    la1, la2 = _sums(lparts, ia[:split], x1), _sums(lparts, ia[:split], x2)
    rb1, rb2 = _sums(rparts, ia[split:], x1), _sums(rparts, ia[split:], x2)
    # the smaller table goes into the ordered set, so each pass inserts at most min(|L|, |R|) items
    if len(rparts) <= len(lparts):
        outer, inner = (lparts, la1, la2), (rparts, rb1, rb2)

        def emit(o, i):
            return o + i if accept(o, i) else None
    else:
        outer, inner = (rparts, rb1, rb2), (lparts, la1, la2)

        def emit(o, i):
            return i + o if accept(i, o) else None
    found: set[Tuple] = set()
    insertions = _sweep(outer, inner, o1, o2, emit, found)
    insertions += _sweep((outer[0], outer[2], outer[1]), (inner[0], inner[2], inner[1]), o2, o1, emit, found)
    if stats is not None:
        stats["insertions"] = stats.get("insertions", 0) + insertions
        stats["half_tuples"] = len(lparts) + len(rparts)
    return found


def _sweep(outer, inner, q1, q2, emit, found: set) -> int:
    """Pairs with value > 0 at the first point and < 0 at the second; returns the insertion count."""
    oparts, a1, a2 = outer
    iparts, b1, b2 = inner
    by_b2 = sorted(range(len(iparts)), key=lambda r: b2[r])
    sorted_b2 = [b2[r] for r in by_b2]
    rank2 = [0] * len(iparts)
    for pos, r in enumerate(by_b2):
        rank2[r] = pos
    by_b1 = sorted(range(len(iparts)), key=lambda r: -b1[r])
    # thresholds -q1 - a1 are visited in decreasing order, so the eligible set only grows
    order = sorted(range(len(oparts)), key=lambda l: a1[l])
    active = SortedList()
    ptr = insertions = 0
    for l in order:
        t1 = -q1 - a1[l]
        while ptr < len(by_b1) and b1[by_b1[ptr]] > t1:
            r = by_b1[ptr]
            active.add((rank2[r], r))
            insertions += 1
            ptr += 1
        # eligible inner halves (b2 < t2) are exactly those ranked below this cut
        cut = bisect_left(sorted_b2, -q2 - a2[l])
        stop = active.bisect_left((cut, -1))
        ot = oparts[l]
        for idx in range(stop):
            t = emit(ot, iparts[active[idx][1]])
            if t is not None:
                found.add(t)
    return insertions


# -- multiple k-SUM ---------------------------------------------------------


@dataclass(frozen=True)
class EncodedInstance:
    digits_base: int
    U: int
    d: int
    packed: tuple[int, ...]
    target: int

    def unpack(self, value: int) -> list[int]:
        """Unshifted digits of one packed number, least significant first."""
        out = []
        for _ in range(self.d):
            value, r = divmod(value, self.digits_base)
            out.append(r - self.U)
        return out


def encode_points(points: Sequence[Sequence], offsets: Sequence, alpha_ints: Sequence[int]) -> EncodedInstance:
    """Pack one base-``2(U*W + O) + 1`` digit per point into each index's integer.

    ``W = sum(|alpha|)`` and ``O`` bounds the scaled offsets; for plain
    k-SUM this base is ``2Uk + 1``.  Digits are stored shifted by ``U`` so
    they lie in ``[0, 2U]``.
    """
    d = len(points)
    n = len(points[0])
    zs, os_ = [], []
    for p, o in zip(points, offsets):
        ints, oi = _scaled_values(p, o)
        zs.append(ints)
        os_.append(oi)
    U = max(1, max(abs(v) for z in zs for v in z))
    O = max(abs(o) for o in os_)
    W = sum(abs(a) for a in alpha_ints)
    base = 2 * (U * W + O) + 1
    if max(abs(v) for z in zs for v in z) * W + O >= (base + 1) // 2:
        raise CarryError("digit sums could carry")
    packed = []
    for i in range(n):
        v = 0
        for p in reversed(range(d)):
            digit = zs[p][i] + U
            if not 0 <= digit <= 2 * U:
                raise CarryError("shifted digit out of range")
            v = v * base + digit
        packed.append(v)
    A = sum(alpha_ints)
    target = 0
    for p in reversed(range(d)):
        target = target * base + (U * A - os_[p])
    return EncodedInstance(base, U, d, tuple(packed), target)


def multiple_ksum_enumerate(points: Sequence[Sequence], k: int, alpha=None, offsets: Sequence | None = None,
                            distinct: bool = False) -> list[Tuple]:
    """Canonical tuples whose hyperplane contains every point."""
    if not points:
        raise ValueError("need at least one point")
    n = len(points[0])
    if any(len(p) != n for p in points):
        raise ValueError("points must have the same dimension")
    inst = _instance(n, k, alpha, 0, distinct)
    ia, _ = inst.scaled
    s = _alpha_scale(inst)
    offsets = [parse_rational(o) * s for o in offsets] if offsets is not None else [0] * len(points)
    enc = encode_points(points, offsets, ia)
    # sum(alpha_j * packed[t_j]) == target; unpacking the difference would give zero digits
    return integer_ldt_enumerate(list(enc.packed), k, ia, -enc.target, distinct)


def multiple_ksum_decide(points: Sequence[Sequence], k: int, alpha=None, offsets: Sequence | None = None,
                         distinct: bool = False) -> tuple[bool, Tuple | None]:
    wit = multiple_ksum_enumerate(points, k, alpha, offsets, distinct)
    return bool(wit), (wit[0] if wit else None)


def brute_force_segment(nu1: Sequence, nu2: Sequence, k: int, alpha=None, offsets=(0, 0),
                        distinct: bool = False) -> set[Tuple]:
    """Reference enumeration for :func:`double_ksum_enumerate`."""
    n = len(nu1)
    inst = _instance(n, k, alpha, 0, distinct)
    v1 = [parse_rational(v) for v in nu1]
    v2 = [parse_rational(v) for v in nu2]
    o1, o2 = (parse_rational(o) for o in offsets)
    out = set()
    for t in inst.tuples():
        a = o1 + sum((al * v1[i] for al, i in zip(inst.alpha, t)), Fraction(0))
        b = o2 + sum((al * v2[i] for al, i in zip(inst.alpha, t)), Fraction(0))
        if a * b < 0:
            out.add(t)
    return out


def brute_force_containing(points: Sequence[Sequence], k: int, alpha=None, offsets: Sequence | None = None,
                           distinct: bool = False) -> list[Tuple]:
    """Reference enumeration for :func:`multiple_ksum_enumerate`."""
    n = len(points[0])
    inst = _instance(n, k, alpha, 0, distinct)
    offsets = [parse_rational(o) for o in (offsets if offsets is not None else [0] * len(points))]
    pts = [[parse_rational(v) for v in p] for p in points]
    return [t for t in inst.tuples()
            if all(o + sum((al * p[i] for al, i in zip(inst.alpha, t)), Fraction(0)) == 0 for p, o in zip(pts, offsets))]

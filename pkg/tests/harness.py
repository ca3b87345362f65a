"""Shared drivers for tests that need a full run plus open-book post-checks."""

from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from math import comb

from ksum_ldt.geometry import Hyperplane, barycentric, boundary_set, sigma
from ksum_ldt.instance import KSumInstance
from ksum_ldt.kernels import CarryError, double_ksum_enumerate, multiple_ksum_decide
from ksum_ldt.oracle import NormalizedView, QueryOracle
from ksum_ldt.sampling import build_table, draw_sorted_tuple
from ksum_ldt.simplex_builder import build_simplex
from oracles import containing, segment_crossers

# build_simplex may spend at most this many queries per (dimension x |I|)
SIMPLEX_QUERY_CONSTANT = 2


def normalized_point(values, lifted):
    if lifted:
        m = max([Fraction(1)] + [abs(v) for v in values])
        return [Fraction(1) / m] + [v / m for v in values]
    m = max(abs(v) for v in values)
    return [v / m for v in values]


def simplex_run(seed: int) -> dict:
    """Build one simplex around a random input and check it against the open book.

    Returns the facts the callers assert on.
    """
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    k = rng.choice((2, 3))
    lifted = rng.random() < 0.3
    inst = KSumInstance(n, k, c=Fraction(rng.randint(-2, 2)) if lifted else Fraction(0))
    pool = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(3)]
    values = [rng.choice(pool) if rng.random() < 0.3 else Fraction(rng.randint(-9, 9)) for _ in range(n)]
    if not any(values):
        values[0] = Fraction(1)
    oracle = QueryOracle(values)
    cert = oracle.normalize(inst.lifted)
    view = NormalizedView(oracle, cert, inst.lifted)
    x = normalized_point(oracle.open_book_read("post-check"), inst.lifted)

    hyps = [Hyperplane.from_tuple(inst, t) for t in inst.tuples() if not inst.vanishes(t)]
    hyps += boundary_set(view.dim)
    I = [(h, sigma(h, x)) for h in hyps if sigma(h, x) != 0]
    E = [h for h in hyps if sigma(h, x) == 0]
    stats: dict = {}
    s = build_simplex(view, I, E, random.Random(seed), stats)

    lam = barycentric(s, x)
    vertices_ok = all(sigma(h, v) in (0, sg) for v in s.vertices for h, sg in I) and \
        all(sigma(h, v) == 0 for v in s.vertices for h in E)
    return {
        "dim": view.dim,
        "I": len(I),
        "queries": stats["queries"],
        "inside": lam is not None and all(a >= 0 for a in lam),
        "relative_interior": lam is not None and all(a > 0 for a in lam),
        "vertices_in_cell": vertices_ok,
        "levels": stats["levels"],
        "simplex": s,
    }


def uniformity_counts(n: int = 5, k: int = 3, draws: int = 70_000, seed: int = 2024) -> Counter:
    """Frequencies of ``draws`` seeded uniform nondecreasing ``k``-tuples over ``range(n)``."""
    table = build_table(n, k)
    rng = random.Random(seed)
    return Counter(draw_sorted_tuple(table, n, k, rng) for _ in range(draws))


def _value(rng: random.Random) -> Fraction:
    # small pool so that sums often vanish exactly
    return Fraction(rng.randint(-4, 4), rng.choice((1, 1, 2, 3)))


def half_tuple_count(n: int, k: int) -> int:
    """Sizes of the two half tables for plain k-SUM with repetition."""
    h1, h2 = (k + 1) // 2, k // 2
    return comb(n + h1 - 1, h1) + (comb(n + h2 - 1, h2) if h2 else 1)


def double_case(seed: int) -> dict:
    """One random double k-SUM case: kernel output, reference output and insertion counts."""
    rng = random.Random(seed)
    n = rng.randint(1, 10)
    k = rng.choice((2, 3, 4))
    nu1 = [_value(rng) for _ in range(n)]
    nu2 = [_value(rng) for _ in range(n)]
    stats: dict = {}
    got = double_ksum_enumerate(nu1, nu2, k, stats=stats)
    return {
        "n": n,
        "k": k,
        "got": got,
        "expected": segment_crossers(nu1, nu2, k),
        "insertions": stats["insertions"],
        "half_tuples": half_tuple_count(n, k),
    }


def multiple_case(seed: int) -> dict:
    """One random multiple k-SUM case; about half of them have a planted common hyperplane."""
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    k = rng.choice((2, 3, 4))
    d = rng.randint(1, 3)
    points = [[_value(rng) for _ in range(n)] for _ in range(d)]
    if rng.random() < 0.5:
        t = sorted(rng.choice(range(n)) for _ in range(k))
        last = t[-1]
        for p in points:
            # the last index absorbs the rest of the sum
            rest = sum(p[i] for i in t[:-1])
            reps = t.count(last)
            p[last] = -(rest - p[last] * (reps - 1)) / reps
    carry = False
    try:
        got = multiple_ksum_decide(points, k)[0]
    except CarryError:
        carry, got = True, None
    return {"n": n, "k": k, "d": d, "got": got, "expected": bool(containing(points, k)), "carry": carry}

"""Seeded instance generators for the CLI, the verifier and the tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .exact import format_rational
from .instance import KSumInstance
from .kernels import brute_force_decide

PROFILES = ("planted", "none", "zeros", "duplicates", "adversarial-near-degenerate")

# largest n for which the "none" profile is certified by brute force
NONE_CHECK_LIMIT = 16


class GenerationError(ValueError):
    pass


def _spread(n: int, rng: random.Random, magnitude: int) -> list[Fraction]:
    return [Fraction(rng.choice((-1, 1)) * rng.randint(1, magnitude)) for _ in range(n)]


def _plant(values: list[Fraction], inst: KSumInstance, rng: random.Random) -> tuple[int, ...]:
    """Overwrite one value so that a random tuple of distinct indices sums to zero."""
    n, k = inst.n, inst.k
    if n < k:
        raise GenerationError("planting needs n >= k")
    idx = rng.sample(range(n), k)
    alpha = inst.alpha
    rest = inst.c + sum((alpha[j] * values[idx[j]] for j in range(k - 1)), Fraction(0))
    values[idx[-1]] = -rest / alpha[-1]
    return tuple(idx)


def generate(n: int, k: int, profile: str, seed: int, alpha: Sequence | None = None, c=0,
             distinct: bool = False, magnitude: int | None = None, max_tries: int = 200) -> dict:
    """An instance document ``{"n", "k", "values", "alpha", "c", "distinct", "profile", "seed"}``.

    ``values`` are exact rational strings.
    """
    if profile not in PROFILES:
        raise GenerationError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    if n < 1 or k < 1:
        raise GenerationError("n and k must be positive")
    inst = KSumInstance(n, k, tuple(Fraction(a) for a in alpha) if alpha else (), Fraction(c), distinct)
    rng = random.Random(f"{profile}:{n}:{k}:{seed}")
    mag = magnitude or 10 ** 6

    if profile == "planted":
        values = _spread(n, rng, mag)
        _plant(values, inst, rng)
    elif profile == "none":
        if n > NONE_CHECK_LIMIT:
            raise GenerationError(f"the none profile is certified by brute force only up to n={NONE_CHECK_LIMIT}")
        for _ in range(max_tries):
            values = _spread(n, rng, mag)
            found, _ = brute_force_decide(values, k, list(inst.alpha), inst.c, distinct)
            if not found:
                break
        else:
            raise GenerationError("could not draw a solution-free instance")
    elif profile == "zeros":
        values = _spread(n, rng, mag)
        for i in rng.sample(range(n), rng.randint(1, max(1, n // 4))):
            values[i] = Fraction(0)
    elif profile == "duplicates":
        pool = _spread(max(2, n // 3), rng, max(2, mag // 10 ** 4))
        values = [rng.choice(pool) for _ in range(n)]
    else:
        # values cluster around a few centers whose k-combinations nearly cancel
        base = mag
        centers = [Fraction(base), Fraction(-base * (k - 1))]
        values = [rng.choice(centers) + rng.randint(-3, 3) * Fraction(1, 7) for _ in range(n)]
    return {
        "n": n,
        "k": k,
        "values": [format_rational(v) for v in values],
        "alpha": [format_rational(a) for a in inst.alpha],
        "c": format_rational(inst.c),
        "distinct": distinct,
        "profile": profile,
        "seed": seed,
    }

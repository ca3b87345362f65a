"""Hyperplanes, simplices and exact position predicates on explicit points.

Points are plain tuples of :class:`~fractions.Fraction`.  A hyperplane is
``constant + sum(terms) == 0`` with a sparse normal; its integer-scaled form
is cached so that sign evaluation on integer-scaled points stays in ``int``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from . import lp
from .exact import format_rational, nullspace, scale_to_integers, solve_consistent
from .instance import KSumInstance

Point = tuple[Fraction, ...]

CROSSES = "crosses_open_interior"
TOUCHES = "touches"
DISJOINT = "disjoint"
CONTAINS_BOTH = "contains_both"

CONTAINS_SIMPLEX = "contains_simplex"
CROSSES_INTERIOR = "crosses_interior"
AVOIDS_INTERIOR = "avoids_interior"


@dataclass(frozen=True)
class Hyperplane:
    """``constant + sum(a * x[i] for i, a in terms) == 0``.

    ``tag`` is ``("ksum", tuple)``, ``("boundary", i, s)`` for ``x_i = s`` or
    ``("derived",)``.
    """

    terms: tuple[tuple[int, Fraction], ...]
    constant: Fraction = Fraction(0)
    tag: tuple = ("derived",)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("hyperplane needs a nonzero normal")

    @classmethod
    def build(cls, terms: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]], constant=0,
              tag: tuple = ("derived",)) -> "Hyperplane":
        acc: dict[int, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for i, v in items:
            acc[i] = acc.get(i, Fraction(0)) + Fraction(v)
        return cls(tuple(sorted((i, v) for i, v in acc.items() if v != 0)), Fraction(constant), tag)

    @classmethod
    def from_tuple(cls, inst: KSumInstance, t: Sequence[int]) -> "Hyperplane":
        """The hyperplane of a canonical tuple, with integer-scaled coefficients.

        Lifted instances are homogeneous in ``dim`` coordinates.
        """
        terms = inst.scaled_terms(t)
        if not terms:
            raise ValueError("hyperplane needs a nonzero normal")
        return cls(tuple((i, Fraction(a)) for i, a in terms), Fraction(0), ("ksum", tuple(t)))

    @classmethod
    def boundary(cls, i: int, s: int) -> "Hyperplane":
        return cls(((i, Fraction(1)),), Fraction(-s), ("boundary", i, s))

    @property
    def is_ksum(self) -> bool:
        return self.tag[0] == "ksum"

    @cached_property
    def int_form(self) -> tuple[tuple[tuple[int, int], ...], int]:
        """Primitive integer multiple ``(terms, constant)`` with a positive scale."""
        vals = [v for _, v in self.terms] + [self.constant]
        ints, _ = scale_to_integers(vals)
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        return tuple((i, a) for (i, _), a in zip(self.terms, ints)), ints[-1]

    def normal(self, dim: int) -> list[Fraction]:
        v = [Fraction(0)] * dim
        for i, a in self.terms:
            v[i] = a
        return v

    def value(self, p: Sequence[Fraction]) -> Fraction:
        return self.constant + sum((a * p[i] for i, a in self.terms), Fraction(0))

    def to_json(self) -> dict:
        return {
            "terms": [[i, format_rational(a)] for i, a in self.terms],
            "constant": format_rational(self.constant),
            "tag": list(self.tag[:1]) + [list(x) if isinstance(x, tuple) else x for x in self.tag[1:]],
        }


@dataclass(frozen=True)
class Simplex:
    """Vertices of a (possibly lower-dimensional) simplex.

    ``flat`` optionally holds hyperplanes whose intersection is the affine
    hull the simplex was built in.
    """

    vertices: tuple[Point, ...]
    flat: tuple[Hyperplane, ...] = ()

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("simplex needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("simplex vertices must be pairwise distinct")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def to_json(self) -> dict:
        return {"vertices": [[format_rational(x) for x in v] for v in self.vertices]}


@dataclass
class HyperplaneSet:
    members: list[Hyperplane] = field(default_factory=list)
    provenance: tuple = ("explicit",)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sigma(h: Hyperplane, p: Sequence[Fraction]) -> int:
    return _sign(h.value(p))


def scaled_point(p: Sequence[Fraction]) -> tuple[list[int], int]:
    """``(nums, den)`` with ``p == nums / den`` and ``den > 0``."""
    den = lcm(*(Fraction(x).denominator for x in p)) if p else 1
    return [int(Fraction(x) * den) for x in p], den


def sigma_scaled(h: Hyperplane, nums: Sequence[int], den: int) -> int:
    terms, c = h.int_form
    total = c * den
    for i, a in terms:
        total += a * nums[i]
    return _sign(total)


def _constraint_rows(constraints: Sequence[tuple[Hyperplane, int]]):
    ineq, eq, where = [], [], []
    for h, s in constraints:
        terms, c = h.int_form
        if s == 0:
            eq.append((terms, -c))
            where.append(("eq", len(eq) - 1))
        elif s < 0:
            ineq.append((terms, -c))
            where.append(("ineq", len(ineq) - 1))
        else:
            ineq.append((tuple((i, -a) for i, a in terms), c))
            where.append(("ineq", len(ineq) - 1))
    return ineq, eq, where


def vertex_of_cell(constraints: Sequence[tuple[Hyperplane, int]], objective: Sequence, dim: int,
                   bound: int = 1) -> tuple[Point, list[int]]:
    """Optimal vertex of the closed cell ``{x : sigma(h, x) in {0, s}}`` intersected with the box.

    Returns the point and the indices of the constraints tight at it.
    Raises :class:`~ksum_ldt.lp.Infeasible` when the sign data is inconsistent.
    """
    ineq, eq, where = _constraint_rows(constraints)
    x, tight = lp.maximize_lazy(ineq, eq, objective, dim, bound)
    tight_set = set(tight)
    n_ineq = len(ineq)
    out = []
    for ci, (kind, r) in enumerate(where):
        if (r if kind == "ineq" else n_ineq + r) in tight_set:
            out.append(ci)
    return tuple(x), out


def pick_objective(normals: Sequence[Sequence[tuple[int, Fraction]]], dim: int,
                   rng: random.Random | None = None, tries_per_range: int = 16) -> tuple[int, ...]:
    """Small-integer vector with a nonzero dot product against every sparse normal.

    The all-ones vector is tried first; then random draws whose range widens
    after each batch of failures.
    """
    if dim < 1:
        raise ValueError("dim must be positive")

    def ok(v):
        return all(sum(a * v[i] for i, a in nrm) != 0 for nrm in normals)

    cand = (1,) * dim
    if ok(cand):
        return cand
    rng = rng or random.Random(0)
    width = 2
    while True:
        for _ in range(tries_per_range):
            cand = tuple(rng.randint(1, width) * rng.choice((-1, 1)) for _ in range(dim))
            if ok(cand):
                return cand
        width *= 2


def segment_crossing(h: Hyperplane, a: Sequence[Fraction], b: Sequence[Fraction]) -> str:
    if tuple(a) == tuple(b):
        raise ValueError("segment endpoints must differ")
    sa, sb = sigma(h, a), sigma(h, b)
    if sa == 0 and sb == 0:
        return CONTAINS_BOTH
    if sa == 0 or sb == 0:
        return TOUCHES
    return CROSSES if sa != sb else DISJOINT


def relation_from_signs(signs: Iterable[int]) -> str:
    pos = neg = nonzero = False
    for s in signs:
        if s > 0:
            pos = nonzero = True
        elif s < 0:
            neg = nonzero = True
        if pos and neg:
            return CROSSES_INTERIOR
    return AVOIDS_INTERIOR if nonzero else CONTAINS_SIMPLEX


def simplex_relation(h: Hyperplane, s: Simplex) -> str:
    return relation_from_signs(sigma(h, v) for v in s.vertices)


def enumerate_implicit(inst: KSumInstance) -> HyperplaneSet:
    if inst.k < 2:
        raise ValueError("implicit k-SUM sets need k >= 2")
    members = [Hyperplane.from_tuple(inst, t) for t in inst.tuples()]
    return HyperplaneSet(members, ("implicit-ksum", inst.n, inst.k, inst.alpha, inst.c, inst.distinct))


def boundary_set(dim: int) -> list[Hyperplane]:
    """``x_i = 1`` and ``x_i = -1`` for every coordinate."""
    out = []
    for i in range(dim):
        out.append(Hyperplane.boundary(i, 1))
        out.append(Hyperplane.boundary(i, -1))
    return out


def barycentric(s: Simplex, p: Sequence[Fraction]) -> list[Fraction] | None:
    """Affine coordinates of ``p`` with respect to the vertices, or ``None`` if outside the hull's span."""
    verts = s.vertices
    d = len(p)
    rows = [[v[j] for v in verts] for j in range(d)] + [[Fraction(1)] * len(verts)]
    rhs = list(p) + [Fraction(1)]
    sol = solve_consistent(rows, rhs)
    if sol is None:
        return None
    return sol


def in_relative_interior(s: Simplex, p: Sequence[Fraction]) -> bool:
    lam = barycentric(s, p)
    return lam is not None and all(x > 0 for x in lam)


def affine_hull_hyperplanes(s: Simplex) -> list[Hyperplane]:
    """Independent hyperplanes whose intersection is the affine hull of the vertices."""
    verts = s.vertices
    d = len(verts[0])
    base = verts[0]
    diffs = [[a - b for a, b in zip(v, base)] for v in verts[1:]]
    basis = nullspace(diffs, d) if diffs else [[Fraction(int(i == r)) for i in range(d)] for r in range(d)]
    out = []
    for normal in basis:
        const = -sum(a * b for a, b in zip(normal, base))
        out.append(Hyperplane.build(((i, a) for i, a in enumerate(normal) if a), const))
    return out


def facet_hyperplanes(s: Simplex) -> list[tuple[Hyperplane, int]]:
    """One separating hyperplane per vertex, through all the other vertices.

    Each comes with the sign of the omitted vertex, which is the side the
    simplex's relative interior lies on.  For lower-dimensional simplices
    the normal is any nullspace vector that separates the omitted vertex.
    """
    verts = s.vertices
    m = len(verts)
    if m < 2:
        return []
    d = len(verts[0])
    out = []
    for j in range(m):
        rest = [v for i, v in enumerate(verts) if i != j]
        base = rest[0]
        diffs = [[a - b for a, b in zip(v, base)] for v in rest[1:]]
        basis = nullspace(diffs, d) if diffs else [[Fraction(int(i == r)) for i in range(d)] for r in range(d)]
        off = [a - b for a, b in zip(verts[j], base)]
        normal = next((v for v in basis if sum(a * b for a, b in zip(v, off)) != 0), None)
        if normal is None:
            continue
        const = -sum(a * b for a, b in zip(normal, base))
        h = Hyperplane.build(((i, a) for i, a in enumerate(normal) if a), const)
        out.append((h, sigma(h, verts[j])))
    return out

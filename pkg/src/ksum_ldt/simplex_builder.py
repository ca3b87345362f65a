"""A simplex inside the cell of the hidden point, built with linear queries only.

Bottom-vertex construction: find a vertex ``nu`` of the current cell by LP,
shoot a ray from ``nu`` through the current point, move to the first
hyperplane(s) hit, add them to the equality set and recurse on the face.

The current point is never materialized.  It is kept as ``P / W`` where
``P`` is a vector of affine forms and ``W`` an affine form in the
normalized input ``x``, both with integer coefficients.  Every question
about it is a sign question about an affine form of ``x``, i.e. one linear
query on the original input.

Let ``nums / den`` be ``nu`` and ``R = den * P - W * nums`` (so
``q - nu = R / (den * W)``).  For a hyperplane ``h = c + d.x`` put
``p_h = den * h(nu)`` and ``a_h = d . R``.  The ray parameter where ``h``
is hit is ``lambda_h = -p_h * W / a_h``, so

* ``lambda_h > 0``  iff  ``sign(a_h) * sign(W) == -sign(p_h)``;
* ``sign(lambda_i - lambda_j) = -sign(W) * sign(p_i * p_j) * sign(p_i * a_j - p_j * a_i)``.

``sign(W)`` is known from the previous level's answers, so each level costs
one query per candidate hyperplane plus one per comparison.  The next point
is ``(a_t * nums - p_t * R) / (den * a_t)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .exact import rank, solve_linear_system
from .geometry import Hyperplane, Point, Simplex, pick_objective, scaled_point, vertex_of_cell
from .oracle import NormalizedView

Form = list[int]


class RayShootError(RuntimeError):
    """No hyperplane is hit at a positive distance: the sign data is inconsistent."""


@dataclass
class RayShootState:
    dim: int
    P: list[Form]
    W: Form
    w_sign: int = 1
    depth: int = 0
    known_signs: list[int] = field(default_factory=list)

    @classmethod
    def start(cls, dim: int) -> "RayShootState":
        P = []
        for j in range(dim):
            f = [0] * (dim + 1)
            f[j] = 1
            P.append(f)
        W = [0] * dim + [1]
        return cls(dim, P, W)


def _form_sign(view: NormalizedView, f: Form) -> int:
    d = len(f) - 1
    if any(f[:d]):
        return view.ask_dense(f)
    c = f[d]
    return (c > 0) - (c < 0)


def _reduce(state: RayShootState) -> None:
    g = 0
    for f in state.P + [state.W]:
        for v in f:
            g = gcd(g, v)
            if g == 1:
                return
    if g > 1:
        state.P = [[v // g for v in f] for f in state.P]
        state.W = [v // g for v in state.W]


def ray_shoot(view: NormalizedView, I: Sequence[tuple[Hyperplane, int]], nu: Point,
              state: RayShootState) -> tuple[list[int], RayShootState]:
    """Indices of ``I`` hit first on the ray from ``nu`` through the current point; advances ``state``."""
    nums, den = scaled_point(nu)
    W, sW = state.W, state.w_sign
    width = state.dim + 1
    R = [[den * pv - nj * wv for pv, wv in zip(Pj, W)] for Pj, nj in zip(state.P, nums)]
    cand: list[tuple[int, int, Form]] = []
    for idx, (h, _) in enumerate(I):
        terms, c = h.int_form
        p = c * den
        for i, a in terms:
            p += a * nums[i]
        if p == 0:
            continue  # passes through nu
        a_h = [0] * width
        for i, a in terms:
            Ri = R[i]
            for j in range(width):
                if Ri[j]:
                    a_h[j] += a * Ri[j]
        s = _form_sign(view, a_h)
        if s == 0 or s * sW != -((p > 0) - (p < 0)):
            continue
        cand.append((idx, p, a_h))
    if not cand:
        raise RayShootError("no hyperplane ahead of the ray")

    best = [cand[0]]
    for item in cand[1:]:
        _, pi, ai = item
        _, pb, ab = best[0]
        q = [pi * x - pb * y for x, y in zip(ab, ai)]
        # sign(lambda_i - lambda_best)
        s = -sW * ((pi * pb > 0) - (pi * pb < 0)) * _form_sign(view, q)
        if s < 0:
            best = [item]
        elif s == 0:
            best.append(item)

    _, pt, at = best[0]
    at_sign = -sW * ((pt > 0) - (pt < 0))
    new_P = [[a * nj - pt * r for a, r in zip(at, Rj)] for Rj, nj in zip(R, nums)]
    new_W = [den * a for a in at]
    nxt = RayShootState(state.dim, new_P, new_W, at_sign, state.depth + 1, state.known_signs + [at_sign])
    _reduce(nxt)
    return [b[0] for b in best], nxt


def extend_general_position(E: Sequence[Hyperplane], candidates: Sequence[Hyperplane], dim: int) -> list[Hyperplane]:
    """Greedily add candidates whose normals raise the rank (input order)."""
    out = list(E)
    rows = [h.normal(dim) for h in out]
    r = rank(rows) if rows else 0
    for h in candidates:
        if r == dim:
            break
        trial = rows + [h.normal(dim)]
        rt = rank(trial)
        if rt > r:
            out.append(h)
            rows, r = trial, rt
    return out


def build_simplex(view: NormalizedView, I: Sequence[tuple[Hyperplane, int]], E: Sequence[Hyperplane],
                  rng: random.Random | None = None, stats: dict | None = None) -> Simplex:
    """Simplex with vertices in the closed cell whose relative interior holds the hidden point.

    ``I`` pairs each hyperplane not through the point with its known sign;
    ``E`` holds hyperplanes in general position through the point.  The
    cell must be bounded (include the box hyperplanes in ``I`` or ``E``).
    """
    dim = view.dim
    rng = rng or random.Random(0)
    start_q = view.oracle.transcript.total_queries
    flat = tuple(E)
    E = extend_general_position([], E, dim)
    I = list(I)
    state = RayShootState.start(dim)
    verts: list[Point] = []
    objectives = []
    with view.phase("simplex"):
        while len(E) < dim:
            obj = pick_objective([h.int_form[0] for h, _ in I], dim, rng)
            objectives.append(obj)
            cons = list(I) + [(h, 0) for h in E]
            nu, _ = vertex_of_cell(cons, obj, dim)
            verts.append(nu)
            theta, state = ray_shoot(view, I, nu, state)
            hit = set(theta)
            E = extend_general_position(E, [I[i][0] for i in theta], dim)
            I = [x for i, x in enumerate(I) if i not in hit]
    a = [h.normal(dim) for h in E]
    b = [-h.constant for h in E]
    verts.append(tuple(solve_linear_system(a, b)))
    if stats is not None:
        stats["levels"] = state.depth
        stats["queries"] = view.oracle.transcript.total_queries - start_q
        stats["objectives"] = objectives
    return Simplex(tuple(verts), flat)

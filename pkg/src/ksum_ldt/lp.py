"""Exact rational linear programming over a small number of variables.

Problems have the shape::

    maximize  obj . x
    s.t.      a_i . x <= b_i      (inequality rows, integer coefficients)
              e_j . x == f_j      (equality rows)
              -bound <= x <= bound

The method walks vertices: a basis is a set of ``dim`` linearly independent
tight rows, the multipliers of the basis rows decide optimality, and Bland's
smallest-index rule picks both the leaving and the entering row, so the walk
cannot cycle.  A first phase with an extra slack variable ``t`` starts from
the box corner ``(-bound, ..., -bound)`` and minimizes ``t``.

Rows are sparse: sequences of ``(index, int coefficient)`` with an ``int``
right-hand side.  The current point is kept as exact fractions; ratio tests
run on integer-scaled copies.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


Row = tuple[tuple[tuple[int, int], ...], int]


class LPError(ArithmeticError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


def _scaled(vec: Sequence[Fraction]) -> tuple[list[int], int]:
    d = lcm(*(v.denominator for v in vec)) if vec else 1
    return [v.numerator * (d // v.denominator) for v in vec], d


def _dense(row: Row, nvars: int) -> list[Fraction]:
    v = [Fraction(0)] * nvars
    for i, a in row[0]:
        v[i] += a
    return v


def _tight(rows: Sequence[Row], x: Sequence[Fraction]) -> list[int]:
    xn, xd = _scaled(x)
    out = []
    for r, (terms, b) in enumerate(rows):
        v = -b * xd
        for i, a in terms:
            v += a * xn[i]
        if v == 0:
            out.append(r)
    return out


def _independent_subset(rows: list[Row], candidates: Sequence[int], nvars: int, first: Sequence[int] = ()) -> list[int]:
    """Greedy maximal independent subset, taking ``first`` before ``candidates``."""
    chosen: list[int] = []
    echelon: list[tuple[int, list[int]]] = []
    seen = set(first)
    for r in list(first) + [c for c in candidates if c not in seen]:
        v = [0] * nvars
        for i, a in rows[r][0]:
            v[i] += a
        for piv, er in echelon:
            f = v[piv]
            if f:
                p = er[piv]
                v = [p * a - f * b for a, b in zip(v, er)]
        piv = next((i for i, a in enumerate(v) if a), None)
        if piv is None:
            continue
        g = 0
        for a in v:
            g = gcd(g, a)
        echelon.append((piv, [a // g for a in v]))
        chosen.append(r)
        if len(chosen) == nvars:
            break
    return chosen


def _adjugate(rows: list[list[int]]) -> tuple[list[list[int]], int]:
    """``(adj, D)`` with ``inverse == adj / D`` and ``D == +-det``, by fraction-free Gauss-Jordan."""
    n = len(rows)
    m = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    prev = 1
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            raise LPError("singular basis")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        mc = m[c]
        for i in range(n):
            if i == c:
                continue
            mi = m[i]
            f = mi[c]
            m[i] = [(piv * a - f * b) // prev for a, b in zip(mi, mc)]
        prev = piv
    # the left block is now prev * identity
    return [r[n:] for r in m], prev


def _bland(rows: list[Row], nvars: int, obj: Sequence[Fraction], x: list[Fraction],
           basis: list[int], fixed: set[int], max_pivots: int) -> tuple[list[Fraction], list[int], int]:
    """Vertex walk with Bland's rule; ``fixed`` rows never leave the basis.

    The basis inverse is kept as an integer adjugate ``adj`` with common
    denominator ``D = det(basis)``; replacing a row multiplies ``D`` by the
    pivot entry and the update divides exactly, as in Bareiss elimination.
    """
    objn, _ = _scaled(obj)
    adj, D = _adjugate([[int(v) for v in _dense(rows[r], nvars)] for r in basis])
    in_basis = set(basis)
    xn, xd = _scaled(x)
    pivots = 0
    while True:
        sd = 1 if D > 0 else -1
        # multipliers y with y^T A_B = obj^T, up to the positive factor |D|
        leave_pos = None
        for p in sorted(range(nvars), key=lambda p: basis[p]):
            if basis[p] in fixed:
                continue
            y = 0
            for i in range(nvars):
                if objn[i]:
                    y += objn[i] * adj[i][p]
            if y * sd < 0:
                leave_pos = p
                break
        if leave_pos is None:
            return [Fraction(v, xd) for v in xn], basis, pivots
        if pivots >= max_pivots:
            raise LPError("pivot limit exceeded")
        direction = [-sd * adj[i][leave_pos] for i in range(nvars)]
        best = None
        best_slack = best_ad = 0
        for r, (terms, b) in enumerate(rows):
            if r in in_basis:
                continue
            ad = 0
            for i, a in terms:
                ad += a * direction[i]
            if ad <= 0:
                continue
            slack = b * xd
            for i, a in terms:
                slack -= a * xn[i]
            if best is None or slack * best_ad < best_slack * ad:
                best, best_slack, best_ad = r, slack, ad
        if best is None:
            raise Unbounded("objective unbounded")
        terms_e = rows[best][0]
        U = [0] * nvars
        for i, a in terms_e:
            ai = adj[i]
            for j in range(nvars):
                if ai[j]:
                    U[j] += a * ai[j]
        Up = U[leave_pos]
        col = [adj[i][leave_pos] for i in range(nvars)]
        U[leave_pos] -= D
        adj = [[(Up * adj[i][j] - col[i] * U[j]) // D for j in range(nvars)] for i in range(nvars)]
        D = Up
        in_basis.discard(basis[leave_pos])
        basis[leave_pos] = best
        in_basis.add(best)
        pivots += 1
        # the new vertex solves the basis rows exactly: x = adj . b_B / D
        rhs = [rows[r][1] for r in basis]
        xn = [sum(adj[i][j] * rhs[j] for j in range(nvars) if rhs[j]) for i in range(nvars)]
        xd = D
        if xd < 0:
            xn, xd = [-v for v in xn], -xd


def maximize(ineq: Sequence[Row], eq: Sequence[Row], obj: Sequence, dim: int, bound: int = 1,
             max_pivots: int = 100_000) -> tuple[list[Fraction], list[int]]:
    """Optimal vertex of the LP; returns ``(x, tight)``.

    ``tight`` lists the indices (into ``ineq + eq``) of given rows that are
    tight at ``x``.  Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    obj = [Fraction(v) for v in obj]
    if len(obj) != dim:
        raise ValueError("objective length must equal dim")
    n_ineq, n_eq = len(ineq), len(eq)
    given: list[Row] = [(tuple(t), b) for t, b in ineq] + [(tuple(t), b) for t, b in eq]
    box: list[Row] = []
    for i in range(dim):
        box.append((((i, 1),), bound))
        box.append((((i, -1),), bound))
    rows = given + box
    eq_ids = list(range(n_ineq, n_ineq + n_eq))

    corner = [Fraction(-bound)] * dim
    # phase 1: soft given rows (a.x - t <= b, equalities as two rows), hard box, t >= 0
    t = dim
    p1: list[Row] = []
    for r in range(n_ineq):
        terms, b = given[r]
        p1.append((terms + ((t, -1),), b))
    for r in eq_ids:
        terms, b = given[r]
        p1.append((terms + ((t, -1),), b))
        p1.append((tuple((i, -a) for i, a in terms) + ((t, -1),), -b))
    n_soft = len(p1)
    p1.extend(box)
    p1.append((((t, -1),), 0))

    worst = 0
    worst_row = None
    for r in range(n_soft):
        terms, b = p1[r]
        v = -b
        for i, a in terms:
            if i != t:
                v -= a * bound
        if v > worst:
            worst, worst_row = v, r

    if worst_row is None:
        x = list(corner)
        tight_rows = _tight(rows, x)
    else:
        x1 = corner + [Fraction(worst)]
        basis = [n_soft + 2 * i + 1 for i in range(dim)] + [worst_row]
        obj1 = [Fraction(0)] * dim + [Fraction(-1)]
        x1, basis, _ = _bland(p1, dim + 1, obj1, x1, basis, set(), max_pivots)
        if x1[t] > 0:
            raise Infeasible("cell is empty")
        x = x1[:dim]
        tight_rows = _tight(rows, x)

    if any(r not in tight_rows for r in eq_ids):
        raise Infeasible("equalities not satisfied at the phase-one vertex")
    basis = _independent_subset(rows, tight_rows, dim, first=eq_ids)
    if len(basis) < dim:
        raise LPError("phase one did not reach a vertex")
    x, basis, _ = _bland(rows, dim, obj, x, basis, set(eq_ids), max_pivots)
    tight = _tight(given, x)
    return x, tight


class _DualState:
    """Row basis with an integer adjugate inverse, kept dual feasible throughout."""

    def __init__(self, rows: list[Row], nvars: int, objn: list[int], basis: list[int]):
        self.rows = rows
        self.nvars = nvars
        self.objn = objn
        self.basis = basis
        self.fixed: set[int] = set()
        self.in_basis = set(basis)
        dense = []
        for r in basis:
            v = [0] * nvars
            for i, a in rows[r][0]:
                v[i] += a
            dense.append(v)
        self.adj, self.D = _adjugate(dense)
        self.pivots = 0
        self._solve_x()

    def _solve_x(self) -> None:
        adj, n = self.adj, self.nvars
        rhs = [self.rows[r][1] for r in self.basis]
        xn = [sum(adj[i][j] * rhs[j] for j in range(n) if rhs[j]) for i in range(n)]
        xd = self.D
        if xd < 0:
            xn, xd = [-v for v in xn], -xd
        self.xn, self.xd = xn, xd

    def residual(self, r: int) -> int:
        """``(a_r . x - b_r) * xd``; positive means violated."""
        terms, b = self.rows[r]
        v = -b * self.xd
        for i, a in terms:
            v += a * self.xn[i]
        return v

    def _coords(self, terms) -> list[int]:
        """``a . adj``: the row in basis coordinates, times ``D``."""
        n, adj = self.nvars, self.adj
        U = [0] * n
        for i, a in terms:
            ai = adj[i]
            for j in range(n):
                if ai[j]:
                    U[j] += a * ai[j]
        return U

    def leaving(self, U: list[int], orient: int) -> int | None:
        """Dual ratio test: basis position with ``orient * u_p > 0`` minimizing ``y_p / u_p``.

        Ties go to the smallest row index, which is Bland's rule for the dual.
        """
        sd = 1 if self.D > 0 else -1
        Y = self._coords(tuple(enumerate(self.objn)))
        best = None
        for p in sorted(range(self.nvars), key=lambda p: self.basis[p]):
            if self.basis[p] in self.fixed:
                continue
            up = orient * U[p]
            if up * sd <= 0:
                continue
            if best is None or Y[p] * best[1] < best[0] * up:
                best = (Y[p], up, p)
        return None if best is None else best[2]

    def pivot(self, p: int, r: int, U: list[int]) -> None:
        n, adj, D = self.nvars, self.adj, self.D
        Up = U[p]
        col = [adj[i][p] for i in range(n)]
        U = list(U)
        U[p] -= D
        self.adj = [[(Up * adj[i][j] - col[i] * U[j]) // D for j in range(n)] for i in range(n)]
        self.D = Up
        self.in_basis.discard(self.basis[p])
        self.basis[p] = r
        self.in_basis.add(r)
        self.pivots += 1
        self._solve_x()


def maximize_lazy(ineq: Sequence[Row], eq: Sequence[Row], obj: Sequence, dim: int, bound: int = 1,
                  batch: int | None = None, max_pivots: int = 100_000) -> tuple[list[Fraction], list[int]]:
    """Same contract as :func:`maximize`, by a dual simplex over a growing set of rows.

    The box rows picked by the objective's signs form a dual-feasible start.
    Equalities are pivoted in first and then held in the basis.  Inequality
    rows join in batches of the most violated ones (by violation per unit of
    L1 norm); each batch is absorbed by dual pivots from the current basis,
    with the smallest-index rule for both choices.  A dual-feasible basis
    whose vertex satisfies every row is optimal.
    """
    objn, _ = _scaled([Fraction(v) for v in obj])
    if len(objn) != dim:
        raise ValueError("objective length must equal dim")
    ineq = [(tuple(t), b) for t, b in ineq]
    eq = [(tuple(t), b) for t, b in eq]
    batch = batch or max(16, 4 * dim)
    rows: list[Row] = []
    basis = []
    for i in range(dim):
        rows.append((((i, 1),), bound))
        rows.append((((i, -1),), bound))
        basis.append(2 * i if objn[i] >= 0 else 2 * i + 1)
    st = _DualState(rows, dim, objn, basis)

    def check_pivots():
        if st.pivots > max_pivots:
            raise LPError("pivot limit exceeded")

    for terms, b in eq:
        res = None
        for orient in (1, -1):
            r = len(rows)
            rows.append((terms, b) if orient > 0 else (tuple((i, -a) for i, a in terms), -b))
            res = st.residual(r)
            if res < 0:
                rows.pop()
                continue
            U = st._coords(rows[r][0])
            p = st.leaving(U, 1)
            if p is None:
                rows.pop()
                if res > 0:
                    raise Infeasible("equality rows are inconsistent with the box")
                continue  # tight; either dependent on the fixed rows or enterable the other way
            st.pivot(p, r, U)
            st.fixed.add(r)
            check_pivots()
            break
        # a tight row that fits neither way lies in the span of the fixed rows

    for terms, b in eq:
        r = len(rows)
        rows.append((terms, b))
        if st.residual(r) != 0:
            raise Infeasible("equality rows are inconsistent")
        rows.pop()

    active_of: dict[int, int] = {}
    norms = [sum(abs(a) for _, a in t) or 1 for t, _ in ineq]
    while True:
        # restore primal feasibility on the active rows
        while True:
            enter = next((r for r in range(len(rows))
                          if r not in st.in_basis and st.residual(r) > 0), None)
            if enter is None:
                break
            U = st._coords(rows[enter][0])
            p = st.leaving(U, 1)
            if p is None:
                raise Infeasible("cell is empty")
            st.pivot(p, enter, U)
            check_pivots()
        violated = []
        xn, xd = st.xn, st.xd
        for r, (terms, b) in enumerate(ineq):
            if r in active_of:
                continue
            v = -b * xd
            for i, a in terms:
                v += a * xn[i]
            if v > 0:
                violated.append((v, r))
        if not violated:
            break
        # the order only decides which rows join first; exactness does not depend on it
        for _, r in heapq.nsmallest(batch, violated, key=lambda q: (-(q[0] / norms[q[1]]), q[1])):
            active_of[r] = len(rows)
            rows.append(ineq[r])
    x = [Fraction(v, st.xd) for v in st.xn]
    return x, _tight(ineq + eq, x)

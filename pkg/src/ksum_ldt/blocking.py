"""Blocking: trade query count for query size.

The input is sorted with 2-term comparisons and cut into ``b`` consecutive
blocks.  A cell is a block-id pattern (canonical within coefficient
classes); it can hold a solution only if the extreme corner sums of the
cell straddle zero, which is tested with queries of at most ``k`` terms on
block-extreme elements.  Each hit cell is solved on the union of its blocks
through a restricted oracle, and a witness is kept only in the cell that
matches its own block pattern, so every solution is reported exactly once.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from .instance import KSumInstance
from .oracle import LinearQuery
from .solver import SolveConfig, SolverReport, solve

Cell = tuple[int, ...]


@dataclass(frozen=True)
class BlockPartition:
    n: int
    k: int
    b: int
    order: tuple[int, ...]  # indices in nondecreasing value order
    block_of: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]  # sorted positions per block

    def block_min(self, j: int) -> int:
        return self.blocks[j][0]

    def block_max(self, j: int) -> int:
        return self.blocks[j][-1]


def build_partition(oracle, n: int, k: int, b: int) -> BlockPartition:
    """Sort by value (ties by index) with 2-term queries and cut into ``b`` blocks."""
    if not 1 <= b <= n:
        raise ValueError(f"need 1 <= b <= n (b={b}, n={n})")

    def cmp(i: int, j: int) -> int:
        s = oracle.ask(LinearQuery(((i, 1), (j, -1)) if i < j else ((j, -1), (i, 1)), 0))
        return s if s else (i > j) - (i < j)

    with oracle.phase("sort"):
        order = tuple(sorted(range(n), key=functools.cmp_to_key(cmp)))
    big, extra = divmod(n, b)
    blocks, block_of = [], [0] * n
    pos = 0
    for j in range(b):
        size = big + (1 if j < extra else 0)
        blk = order[pos:pos + size]
        for i in blk:
            block_of[i] = j
        blocks.append(blk)
        pos += size
    return BlockPartition(n, k, b, order, tuple(block_of), tuple(blocks))


def enumerate_hit_cells(part: BlockPartition, oracle, inst: KSumInstance) -> list[Cell]:
    """Cells whose min corner sum is <= 0 and max corner sum is >= 0.

    Cells are built position by position; a prefix is dropped as soon as
    the extreme completions of it cannot straddle zero, so the work tracks
    the number of hit cells rather than ``b ** k``.
    """
    ia, ic = inst.scaled
    k, b = inst.k, part.b
    class_start = [False] * k
    for lo, _ in inst.classes:
        class_start[lo] = True
    out: list[Cell] = []

    def corner(prefix: list[int], low: bool) -> int:
        # sign of the smallest (low) or largest corner sum over completions of prefix
        terms: dict[int, int] = {}
        for j in range(k):
            a = ia[j]
            want_min = (a > 0) == low
            if j < len(prefix):
                blk = prefix[j]
                i = part.block_min(blk) if want_min else part.block_max(blk)
            else:
                floor = _free_floor(prefix, j, class_start)
                i = part.block_min(floor) if want_min else part.block_max(b - 1)
            terms[i] = terms.get(i, 0) + a
        return oracle.ask(LinearQuery.build(terms, ic))

    def rec(prefix: list[int]) -> None:
        if corner(prefix, True) > 0 or corner(prefix, False) < 0:
            return
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        j = len(prefix)
        start = 0 if class_start[j] else prefix[-1]
        for blk in range(start, b):
            prefix.append(blk)
            rec(prefix)
            prefix.pop()

    with oracle.phase("cells"):
        rec([])
    return out


def _free_floor(prefix: list[int], j: int, class_start: list[bool]) -> int:
    """Lowest block allowed at free position ``j`` given the assigned prefix."""
    p = j
    while p > 0 and not class_start[p]:
        p -= 1
        if p < len(prefix):
            return prefix[p]
    return 0


@dataclass
class CellStat:
    cell: Cell
    size: int
    witnesses: list[tuple[int, ...]]
    discarded: int
    queries: int


def solve_blocked(oracle, inst: KSumInstance, b: int, inner: SolveConfig | None = None) -> SolverReport:
    """Solve every hit cell on the union of its blocks and keep the witnesses that belong to it.

    Cells with the same set of blocks have the same subinstance, which is
    solved once and shared.
    """
    inner = inner or SolveConfig()
    part = build_partition(oracle, inst.n, inst.k, b)
    cells = enumerate_hit_cells(part, oracle, inst)
    solved: dict[frozenset, list[tuple[int, ...]]] = {}
    witnesses: list[tuple[int, ...]] = []
    stats: list[CellStat] = []
    rounds = retries = 0
    per_round = []
    for cell in cells:
        key = frozenset(cell)
        members = sorted(i for blk in key for i in part.blocks[blk])
        if inst.distinct and len(members) < inst.k:
            continue
        spent = 0
        if key not in solved:
            before = oracle.transcript.total_queries
            rep = solve(oracle.restrict(members), inst.with_n(len(members)), inner)
            rounds += rep.rounds
            retries += rep.retries
            per_round.extend(rep.per_round)
            found = [tuple(members[i] for i in t) for t in rep.witnesses]
            spent = oracle.transcript.total_queries - before
            solved[key] = found
        kept = [g for g in solved[key] if inst.witness_cell(g, part.block_of) == cell]
        discarded = len(solved[key]) - len(kept)
        witnesses.extend(kept)
        stats.append(CellStat(cell, len(members), kept, discarded, spent))
    out = SolverReport(bool(witnesses), sorted(set(witnesses)), oracle.transcript, "blocked", inner.seed,
                       rounds=rounds, retries=retries, per_round=per_round)
    out.extra["blocks"] = {
        "b": b,
        "block_sizes": [len(x) for x in part.blocks],
        "term_cap": inst.k * math.ceil(inst.n / b),
        "subinstances": len(solved),
        "cells": [{"cell": [c + 1 for c in st.cell], "size": st.size,
                   "witnesses": [[i + 1 for i in w] for w in st.witnesses],
                   "discarded": st.discarded, "queries": st.queries} for st in stats],
    }
    return out


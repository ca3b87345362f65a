"""Point location in the k-SUM arrangement with verify-and-retry pruning.

Each round draws a random sample of the surviving hyperplanes, locates the
hidden point among the sample (one query per sample member and per box
hyperplane), builds a simplex around it and discards every surviving
hyperplane that does not cross the simplex's interior.  Hyperplanes that
contain the simplex are solutions.  A round whose survivors exceed an
``epsilon`` fraction is redrawn.  Small sets are finished by asking one
query per hyperplane.

The two-phase variant first locates the point in a large sample, builds a
single simplex from the facets of everything it saw, and then prunes the
full arrangement against that simplex with the double and multiple k-SUM
kernels, which need no queries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import sampling
from .geometry import (Hyperplane, Simplex, affine_hull_hyperplanes, boundary_set, facet_hyperplanes,
                       scaled_point)
from .instance import KSumInstance
from .kernels import double_ksum_enumerate, multiple_ksum_enumerate
from .oracle import LinearQuery, NormalizationCertificate, NormalizedView, QueryTranscript, normalize
from .simplex_builder import build_simplex

Tuple = tuple[int, ...]


class SolverError(RuntimeError):
    pass


class RetryLimitExceeded(SolverError):
    pass


class InstanceTooLarge(SolverError):
    pass


@dataclass(frozen=True)
class SolveConfig:
    mode: str = "naive"
    epsilon: Fraction = Fraction(1, 2)
    net_constant: Fraction = Fraction(1)
    base_case_threshold: int = 64
    max_retries: int = 25
    seed: int = 0
    enumerate: bool = True
    max_hyperplanes: int = 10 ** 7
    keep_geometry: bool = False

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "net_constant", Fraction(self.net_constant))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.net_constant <= 0:
            raise ValueError("net_constant must be positive")
        if self.base_case_threshold < 1:
            raise ValueError("base_case_threshold must be at least 1")
        if self.mode not in ("naive", "two_phase"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class RoundRecord:
    h_before: int
    h_after: int
    net_size: int
    retries: int
    phase: str = "rounds"
    # kept only with SolveConfig.keep_geometry, for open-book checks
    simplex: Simplex | None = None
    cell: list | None = None
    objectives: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"phase": self.phase, "h_before": self.h_before, "h_after": self.h_after,
                "net_size": self.net_size, "retries": self.retries,
                "objectives": [list(o) for o in self.objectives]}


@dataclass
class SolverReport:
    answer: bool
    witnesses: list[Tuple]
    transcript: QueryTranscript
    mode: str
    seed: int
    rounds: int = 0
    retries: int = 0
    per_round: list[RoundRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "answer": "YES" if self.answer else "NO",
            "mode": self.mode,
            "seed": self.seed,
            "witnesses": [[i + 1 for i in t] for t in self.witnesses],
            "rounds": self.rounds,
            "retries": self.retries,
            "per_round": [r.to_json() for r in self.per_round],
            "transcript": self.transcript.to_json(),
        }
        out.update(self.extra)
        return out


class _Run:
    """State shared by the phases of one solve."""

    def __init__(self, oracle, inst: KSumInstance, config: SolveConfig, mode: str):
        self.oracle = oracle
        self.inst = inst
        self.config = config
        self.rng = random.Random(config.seed)
        self.report = SolverReport(False, [], oracle.transcript, mode, config.seed)
        self.table = sampling.build_table(inst.n, inst.k)
        self.view: NormalizedView | None = None
        self.boundary = boundary_set(inst.dim)
        ia, ic = inst.scaled
        self.ia, self.ic = ia, ic

    # -- queries ----------------------------------------------------------

    def ask_tuple(self, t: Tuple) -> int:
        """One k-linear query on the original input: sign of ``c + sum(alpha * q)``."""
        terms: dict[int, int] = {}
        for a, i in zip(self.ia, t):
            terms[i] = terms.get(i, 0) + a
        return self.oracle.ask(LinearQuery.build(terms, self.ic))

    # -- classification against explicit simplices -------------------------

    def _scaled_vertices(self, s: Simplex) -> list[tuple[list[int], int]]:
        return [scaled_point(v) for v in s.vertices]

    def classify(self, H: Sequence[Tuple], s: Simplex) -> tuple[list[Tuple], list[Tuple]]:
        """Split ``H`` into (crossers, containers) of the simplex."""
        verts = self._scaled_vertices(s)
        ia, ic, lifted = self.ia, self.ic, self.inst.lifted
        off = 1 if lifted else 0
        crossers, containers = [], []
        for t in H:
            pos = neg = False
            for nums, _ in verts:
                v = ic * nums[0] if lifted else 0
                for a, i in zip(ia, t):
                    v += a * nums[i + off]
                if v > 0:
                    pos = True
                elif v < 0:
                    neg = True
                if pos and neg:
                    break
            if pos and neg:
                crossers.append(t)
            elif not (pos or neg):
                containers.append(t)
        return crossers, containers


def locate_in_net(view: NormalizedView, net: Sequence[Hyperplane], boundary: Sequence[Hyperplane] = ()) -> list[int]:
    """Sign of the hidden point against every net member, then every boundary member."""
    with view.phase("net-location"):
        return [view.ask(h.terms, h.constant) for h in list(net) + list(boundary)]


def _degenerate_report(run: _Run) -> SolverReport:
    """All-zero input: with c == 0 every tuple is a solution, otherwise none is."""
    rep = run.report
    if run.inst.c == 0:
        rep.witnesses = list(run.inst.tuples()) if run.config.enumerate else [next(run.inst.tuples())]
    rep.answer = bool(rep.witnesses)
    rep.extra["degenerate"] = True
    return rep


def _start(oracle, inst: KSumInstance, config: SolveConfig, mode: str) -> tuple[_Run, bool]:
    if oracle.n != inst.n:
        raise ValueError(f"oracle has {oracle.n} values but the instance expects {inst.n}")
    run = _Run(oracle, inst, config, mode)
    cert: NormalizationCertificate = normalize(oracle, inst.lifted)
    run.report.extra["normalization"] = {
        "argmax_index": None if cert.argmax_index is None else cert.argmax_index + 1,
        "argmax_sign": cert.argmax_sign,
        "queries": cert.queries_spent,
    }
    if cert.degenerate:
        return run, False
    run.view = NormalizedView(oracle, cert, inst.lifted)
    return run, True


def _base_case(run: _Run, H: Sequence[Tuple], witnesses: set, record: list | None = None) -> bool:
    """Ask every hyperplane directly; returns True on an early decision-mode exit."""
    with run.oracle.phase("base-case"):
        for t in H:
            s = run.ask_tuple(t)
            if record is not None:
                record.append((t, s))
            if s == 0:
                witnesses.add(t)
                if not run.config.enumerate:
                    return True
    return False


def _rounds(run: _Run, H: list[Tuple], epsilon: Fraction, implicit_first: bool, phase: str,
            saved: list | None = None, base_record: list | None = None) -> set[Tuple]:
    """Prune ``H`` round by round; returns the witnesses found."""
    cfg, inst, view, rng = run.config, run.inst, run.view, run.rng
    rep = run.report
    witnesses: set[Tuple] = set()
    first = implicit_first
    while H:
        size = sampling.net_size(inst.n, epsilon, cfg.net_constant)
        if len(H) <= cfg.base_case_threshold or size >= len(H):
            _base_case(run, H, witnesses, base_record)
            break
        retries = 0
        while True:
            if first:
                net = sampling.draw_net(inst, size, rng, run.table)
            else:
                net = sampling.draw_from(H, size, rng)
            # identically-zero forms contain every point and cut nothing
            net = [t for t in net if not inst.vanishes(t)]
            hyps = [Hyperplane.from_tuple(inst, t) for t in net]
            signs = locate_in_net(view, hyps, run.boundary)
            if not cfg.enumerate and any(s == 0 for s in signs[:len(hyps)]):
                witnesses.add(next(t for t, s in zip(net, signs) if s == 0))
                return witnesses
            cell = list(zip(hyps + run.boundary, signs))
            I = [(h, s) for h, s in cell if s]
            E = [h for h, s in cell if not s]
            stats: dict = {}
            simplex = build_simplex(view, I, E, rng, stats)
            crossers, containers = run.classify(H, simplex)
            if len(crossers) <= epsilon * len(H):
                break
            retries += 1
            rep.retries += 1
            if retries > cfg.max_retries:
                raise RetryLimitExceeded(f"{retries} failed draws in a round with |H| = {len(H)}")
        rec = RoundRecord(len(H), len(crossers), len(net), retries, phase, objectives=stats["objectives"])
        if cfg.keep_geometry:
            rec.simplex, rec.cell = simplex, cell
        rep.per_round.append(rec)
        rep.rounds += 1
        if saved is not None:
            saved.append(simplex)
        witnesses.update(containers)
        if containers and not cfg.enumerate:
            return witnesses
        H = crossers
        first = False
    return witnesses


def _finish(rep: SolverReport, witnesses: set[Tuple]) -> SolverReport:
    rep.witnesses = sorted(witnesses)
    rep.answer = bool(rep.witnesses)
    return rep


def solve(oracle, inst: KSumInstance, config: SolveConfig | None = None) -> SolverReport:
    config = config or SolveConfig()
    if config.mode == "two_phase":
        return solve_two_phase(oracle, inst, config)
    run, ok = _start(oracle, inst, config, "meiser")
    if not ok:
        return _degenerate_report(run)
    total = inst.count()
    if total > config.max_hyperplanes:
        raise InstanceTooLarge(f"{total} hyperplanes exceed the explicit limit {config.max_hyperplanes}")
    H = list(inst.tuples())
    witnesses = _rounds(run, H, config.epsilon, True, "rounds")
    return _finish(run.report, witnesses)


def _vertex_data(inst: KSumInstance, s: Simplex) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Per-index values and per-vertex offsets for the kernels."""
    if inst.lifted:
        return [list(v[1:]) for v in s.vertices], [inst.c * v[0] for v in s.vertices]
    return [list(v) for v in s.vertices], [Fraction(0)] * len(s.vertices)


def kernel_prune(inst: KSumInstance, s: Simplex, stats: dict | None = None) -> tuple[set[Tuple], list[Tuple]]:
    """Crossers of the simplex and the tuples containing it, without queries."""
    pts, offs = _vertex_data(inst, s)
    crossers: set[Tuple] = set()
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            crossers |= double_ksum_enumerate(pts[a], pts[b], inst.k, inst.alpha, (offs[a], offs[b]),
                                              inst.distinct, stats)
    containers = multiple_ksum_enumerate(pts, inst.k, inst.alpha, offs, inst.distinct)
    return crossers, containers


def solve_two_phase(oracle, inst: KSumInstance, config: SolveConfig | None = None) -> SolverReport:
    config = config or SolveConfig(mode="two_phase")
    run, ok = _start(oracle, inst, config, "two-phase")
    if not ok:
        return _degenerate_report(run)
    rep = run.report
    n, k = inst.n, inst.k
    total = inst.count()
    eps2 = n ** (-k / 2)
    size = sampling.net_size(n, eps2, config.net_constant)
    rep.extra["two_phase"] = {"epsilon": eps2, "net_request": size}
    attempts = 0
    while True:
        if size >= total:
            if total > config.max_hyperplanes:
                raise InstanceTooLarge(f"{total} hyperplanes exceed the explicit limit {config.max_hyperplanes}")
            N = list(inst.tuples())
        else:
            N = sampling.draw_net(inst, size, run.rng, run.table)
        saved: list[Simplex] = []
        base: list[tuple[Tuple, int]] = []
        early = _rounds(run, N, config.epsilon, size >= total, "phase-1", saved, base)
        if early and not config.enumerate:
            # phase 1 stops at its first solution, so the cell data is partial
            return _finish(rep, early)

        # phase 2: one simplex inside everything seen so far
        bsigns = locate_in_net(run.view, [], run.boundary)
        I: list[tuple[Hyperplane, int]] = []
        E: list[Hyperplane] = []
        for s in saved:
            # facets bound the simplex only inside its affine hull
            I.extend(facet_hyperplanes(s))
            E.extend(affine_hull_hyperplanes(s))
        for t, sg in base:
            if inst.vanishes(t):
                continue
            h = Hyperplane.from_tuple(inst, t)
            (I.append((h, sg)) if sg else E.append(h))
        for h, sg in zip(run.boundary, bsigns):
            (I.append((h, sg)) if sg else E.append(h))
        stats: dict = {}
        simplex = build_simplex(run.view, I, E, run.rng, stats)

        # phase 3: query-free pruning of the whole arrangement
        kstats: dict = {}
        with oracle.phase("kernel-prune"):
            before = oracle.transcript.total_queries
            crossers, containers = kernel_prune(inst, simplex, kstats)
            assert oracle.transcript.total_queries == before
        accepted = len(crossers) ** 2 * n ** k <= total ** 2
        rec = RoundRecord(total, len(crossers), len(N), attempts, "phase-3", objectives=stats["objectives"])
        if config.keep_geometry:
            rec.simplex = simplex
            rec.cell = I + [(h, 0) for h in E]
        if accepted:
            rep.per_round.append(rec)
            rep.rounds += 1
            break
        attempts += 1
        rep.retries += 1
        if attempts > config.max_retries:
            raise RetryLimitExceeded("two-phase pruning left too many crossers")

    rep.extra["two_phase"].update({"crossers": len(crossers), "kernel_insertions": kstats.get("insertions", 0)})
    witnesses = set(containers)
    witnesses |= _rounds(run, sorted(crossers), config.epsilon, False, "phase-4")
    return _finish(rep, witnesses)

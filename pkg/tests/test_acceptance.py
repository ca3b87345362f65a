"""The acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 2, 3, 4 and 8 are measured on the runs of criterion 1, which are
executed once per session.
"""

import math
import os
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import pytest

from ksum_ldt.cli import run_mode, verify_instances
from ksum_ldt.generate import generate
from ksum_ldt.instance import KSumInstance
from ksum_ldt.oracle import QueryOracle
from ksum_ldt.sampling import build_table
from ksum_ldt.solver import SolveConfig, solve
from harness import SIMPLEX_QUERY_CONSTANT, double_case, multiple_case, simplex_run, uniformity_counts

# a smaller size is handy for a quick look; criterion 4 then fails on its 200-run minimum
SUITE_SIZE = int(os.environ.get("KSUM_ACCEPTANCE_SIZE", "500"))
SUITE_SEED = 1
SUITE_BUDGET_S = 600
PROFILES = ("planted", "none", "zeros", "duplicates")
QUERY_MODES = ("meiser", "two-phase", "blocked")

# total_queries of meiser mode, k=4, planted instance with seed 1
BASELINE_DEFAULT = {8: 345, 12: 1388, 16: 3907, 20: 8894}
# the same at net constant 1/16, where nets are smaller than |H| and pruning rounds run
BASELINE_ROUNDS = {8: 830, 12: 4292, 16: 9818, 20: 25989}
BASELINE_SLACK = 1.2


@dataclass
class Run:
    seed: int
    n: int
    k: int
    mode: str
    b: int | None
    result: tuple
    open_book_reads: int
    capped_terms: int
    cell_witnesses: list = field(default_factory=list)
    rounds: list = field(default_factory=list)
    round_count: int = 0
    retries: int = 0


@dataclass
class Suite:
    runs: list
    mismatches: list
    seconds: float
    instances: int


@pytest.fixture(scope="session")
def suite() -> Suite:
    start = time.perf_counter()
    runs, mismatches = [], []
    for inst_seed, doc in verify_instances(SUITE_SIZE, (3, 4, 5), range(6, 15), PROFILES, SUITE_SEED):
        values, k = doc["values"], doc["k"]
        inst = KSumInstance(len(values), k)
        config = SolveConfig(seed=inst_seed)
        plan = [("brute", None), ("mim", None), ("meiser", None), ("two-phase", None), ("blocked", 2), ("blocked", 3)]
        results = []
        for mode, b in plan:
            rep = run_mode(values, inst, mode, config, b)
            t = rep.transcript
            cells = rep.extra.get("blocks", {}).get("cells", [])
            runs.append(Run(
                inst_seed, inst.n, k, mode, b, (rep.answer, list(rep.witnesses)), t.open_book_reads,
                t.max_terms_excluding("sort", "normalize"),
                [tuple(w) for c in cells for w in c["witnesses"]],
                [(r.phase, r.h_before, r.h_after) for r in rep.per_round], rep.rounds, rep.retries))
            results.append(runs[-1].result)
        if any(r != results[0] for r in results):
            mismatches.append(inst_seed)
    return Suite(runs, mismatches, time.perf_counter() - start, SUITE_SIZE)


def test_c1_oracle_equivalence(suite, acceptance_line):
    ok = not suite.mismatches and suite.seconds < SUITE_BUDGET_S
    acceptance_line("C1", ok, f"{suite.instances} instances x 6 runs (brute, mim, meiser, two-phase, blocked b=2,3); "
                              f"{len(suite.mismatches)} disagreements; {suite.seconds:.0f} s (budget {SUITE_BUDGET_S} s)")
    assert not suite.mismatches, suite.mismatches[:10]
    assert suite.seconds < SUITE_BUDGET_S


def test_c2_query_model_purity(suite, acceptance_line):
    runs = [r for r in suite.runs if r.mode in QUERY_MODES]
    bad = [(r.seed, r.mode, r.b) for r in runs if r.open_book_reads]
    refs = [r for r in suite.runs if r.mode in ("brute", "mim")]
    acceptance_line("C2", not bad, f"{len(runs)} query-model runs, {len(bad)} with open-book reads "
                                   f"(reference solvers read it in {sum(1 for r in refs if r.open_book_reads)}/{len(refs)})")
    assert not bad


def test_c3_query_size_caps(suite, acceptance_line):
    bad = []
    worst = 0.0
    for r in suite.runs:
        if r.mode not in QUERY_MODES:
            continue
        cap = r.k * math.ceil(r.n / r.b) if r.mode == "blocked" else r.n
        worst = max(worst, r.capped_terms / cap)
        if r.capped_terms > cap:
            bad.append((r.seed, r.mode, r.b, r.capped_terms, cap))
    acceptance_line("C3", not bad, f"{len(bad)} cap violations; largest query / cap = {worst:.2f}")
    assert not bad


def test_c4_exactly_once(suite, acceptance_line):
    blocked = [r for r in suite.runs if r.mode == "blocked"]
    dup = [(r.seed, r.b) for r in blocked if len(r.cell_witnesses) != len(set(r.cell_witnesses))]
    union_bad = [(r.seed, r.b) for r in blocked
                 if sorted(tuple(i - 1 for i in w) for w in r.cell_witnesses) != r.result[1]]
    ok = len(blocked) >= 200 and not dup and not union_bad
    acceptance_line("C4", ok, f"{len(blocked)} blocked runs; {len(dup)} with a duplicate attribution, "
                              f"{len(union_bad)} whose per-cell lists differ from the witness set")
    assert ok


def test_c5_double_ksum(acceptance_line):
    cases = [double_case(s) for s in range(200)]
    wrong = [i for i, c in enumerate(cases) if c["got"] != c["expected"]]
    over = [i for i, c in enumerate(cases) if c["insertions"] > c["half_tuples"]]
    found = sum(len(c["expected"]) for c in cases)
    acceptance_line("C5", not wrong and not over,
                    f"200 cases (n<=10, k in 2..4, {found} crossing tuples): {len(wrong)} set mismatches, "
                    f"{len(over)} insertion-bound violations")
    assert not wrong and not over


def test_c6_multiple_ksum(acceptance_line):
    cases = [multiple_case(s) for s in range(200)]
    wrong = [i for i, c in enumerate(cases) if c["got"] != c["expected"]]
    carry = [i for i, c in enumerate(cases) if c["carry"]]
    yes = sum(1 for c in cases if c["expected"])
    acceptance_line("C6", not wrong and not carry,
                    f"200 cases (n<=8, d<=3, {yes} YES): {len(wrong)} decision mismatches, {len(carry)} carry faults")
    assert not wrong and not carry


def test_c7_sampling(acceptance_line):
    counts = uniformity_counts(5, 3, 70_000)
    dev = max(abs(counts[t] - 2000) for t in counts) if counts else math.inf
    table = build_table(12, 6)
    omega_ok = all(table.omega(m, l) == math.comb(m + l - 1, l) for m in range(1, 13) for l in range(7))
    ok = len(counts) == 35 and dev <= 220 and omega_ok
    acceptance_line("C7", ok, f"{len(counts)}/35 multisets drawn, max |count - 2000| = {dev} (limit 220); "
                              f"omega table {'matches' if omega_ok else 'differs from'} C(n+k-1,k)")
    assert ok


def test_c8_las_vegas(suite, acceptance_line):
    rounds = 0
    violations = []
    for r in suite.runs:
        for phase, before, after in r.rounds:
            rounds += 1
            if phase == "phase-3":
                ok = after ** 2 * r.n ** r.k <= before ** 2
            else:
                ok = after <= Fraction(1, 2) * before
            if not ok:
                violations.append((r.seed, r.mode, phase, before, after))
    retries = sum(r.retries for r in suite.runs)
    rate = retries / rounds if rounds else 0.0
    acceptance_line("C8", not violations,
                    f"{rounds} accepted rounds, {len(violations)} over the fraction bound; "
                    f"retries {retries} = {rate:.1%} of rounds (target <= 5%)")
    assert not violations
    if rate > 0.05:
        # statistical target only: a miss calls for a net-constant retune, not a failed build
        warnings.warn(f"retry rate {rate:.1%} exceeds 5%; consider a larger net constant")


def test_c9_simplex_soundness(acceptance_line):
    runs = [simplex_run(s) for s in range(100)]
    outside = [i for i, r in enumerate(runs) if not r["inside"]]
    bad_vertices = [i for i, r in enumerate(runs) if not r["vertices_in_cell"]]
    ratio = max(r["queries"] / (r["dim"] * max(1, r["I"])) for r in runs)
    ok = not outside and not bad_vertices and ratio <= SIMPLEX_QUERY_CONSTANT
    acceptance_line("C9", ok, f"100 runs: {len(outside)} with q outside, {len(bad_vertices)} with a vertex "
                              f"outside the cell; max queries / (n|I|) = {ratio:.2f} (locked {SIMPLEX_QUERY_CONSTANT})")
    assert ok


def meiser_queries(n: int, net_constant: Fraction) -> int:
    values = generate(n, 4, "planted", 1)["values"]
    oracle = QueryOracle(values)
    solve(oracle, KSumInstance(n, 4), SolveConfig(seed=1, net_constant=net_constant))
    return oracle.transcript.total_queries


def test_c10_query_regression(acceptance_line):
    parts, ok = [], True
    for label, table, nc in (("default", BASELINE_DEFAULT, Fraction(1)), ("rounds", BASELINE_ROUNDS, Fraction(1, 16))):
        for n, base in table.items():
            got = meiser_queries(n, nc)
            ratio = got / base
            ok &= 1 / BASELINE_SLACK <= ratio <= BASELINE_SLACK
            parts.append(f"{label} n={n}: {got}/{base}")
    acceptance_line("C10", ok, "k=4 seed=1 meiser totals vs locked baseline (within 1.2x): " + "; ".join(parts))
    assert ok

"""Command-line harness: ``solve``, ``verify``, ``bench`` and ``gen``.

Exit codes: 0 ok, 1 verification failure, 2 usage or parse error, 3 internal
or solver error.  Reports are JSON, benches are CSV; both are byte-for-byte
deterministic for fixed flags and seed (bench timing can be switched off
with ``--no-timing``).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import random
import sys
import time
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .blocking import solve_blocked
from .exact import format_rational, parse_rational
from .generate import PROFILES, GenerationError, generate
from .instance import KSumInstance
from .kernels import brute_force_decide, meet_in_middle_decide
from .oracle import QueryOracle
from .solver import SolveConfig, SolverError, SolverReport, solve

MODES = ("brute", "mim", "meiser", "two-phase", "blocked")
BENCH_HEADER = ["n", "k", "mode", "b", "seed", "answer", "total_queries", "max_terms", "retries", "wall_ms"]
# 2-term phases that the blocked query-size cap does not cover
UNCAPPED_PHASES = ("sort", "normalize")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

_TRANSCRIPT_SCHEMA = {
    "type": "object",
    "required": ["total", "max_terms", "histogram", "open_book_reads", "phases"],
    "properties": {
        "total": {"type": "integer", "minimum": 0},
        "max_terms": {"type": "integer", "minimum": 0},
        "histogram": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "open_book_reads": {"type": "integer", "minimum": 0},
        "phases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "count"],
                "properties": {"name": {"type": "string"}, "count": {"type": "integer", "minimum": 0}},
            },
        },
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "k-SUM solver report",
    "type": "object",
    "required": ["answer", "mode", "seed", "witnesses", "rounds", "retries", "per_round", "transcript",
                 "instance"],
    "properties": {
        "answer": {"enum": ["YES", "NO"]},
        "mode": {"enum": list(MODES)},
        "seed": {"type": "integer"},
        "witnesses": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 1}}},
        "rounds": {"type": "integer", "minimum": 0},
        "retries": {"type": "integer", "minimum": 0},
        "per_round": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["phase", "h_before", "h_after", "net_size", "retries"],
                "properties": {
                    "phase": {"type": "string"},
                    "h_before": {"type": "integer", "minimum": 0},
                    "h_after": {"type": "integer", "minimum": 0},
                    "net_size": {"type": "integer", "minimum": 0},
                    "retries": {"type": "integer", "minimum": 0},
                },
            },
        },
        "transcript": _TRANSCRIPT_SCHEMA,
        "instance": {
            "type": "object",
            "required": ["n", "k", "alpha", "c", "distinct"],
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "k": {"type": "integer", "minimum": 1},
                "alpha": {"type": "array", "items": {"type": "string"}},
                "c": {"type": "string"},
                "distinct": {"type": "boolean"},
            },
        },
        "normalization": {"type": "object"},
        "two_phase": {"type": "object"},
        "degenerate": {"type": "boolean"},
        "blocks": {
            "type": "object",
            "required": ["b", "block_sizes", "term_cap", "cells"],
            "properties": {
                "b": {"type": "integer", "minimum": 1},
                "block_sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "term_cap": {"type": "integer", "minimum": 1},
                "cells": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["cell", "size", "witnesses", "discarded", "queries"],
                    },
                },
            },
        },
    },
}


class UsageError(ValueError):
    """Bad flags or an unreadable instance; exit code 2."""


# -- instances --------------------------------------------------------------

def load_instance(doc: Mapping, k: int | None = None, distinct: bool = False,
                  allow_decimal: bool = False) -> tuple[KSumInstance, list[Fraction]]:
    """Validate an instance document and build the public instance plus the hidden values."""
    if not isinstance(doc, Mapping) or "values" not in doc:
        raise UsageError("instance must be a JSON object with a 'values' list")

    def rat(v, what):
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise UsageError(f"{what}: expected an integer or a rational string, got {v!r}")
        try:
            return parse_rational(v, allow_decimal=allow_decimal)
        except (ValueError, ZeroDivisionError) as e:
            hint = " (pass --allow-decimal to convert decimal literals exactly)" if not allow_decimal else ""
            raise UsageError(f"{what}: {e}{hint}") from None

    values = [rat(v, f"values[{i}]") for i, v in enumerate(doc["values"])]
    n = doc.get("n", len(values))
    if n != len(values):
        raise UsageError(f"n={n} but {len(values)} values given")
    file_k = doc.get("k")
    if k is not None and file_k is not None and k != file_k:
        raise UsageError(f"--k {k} disagrees with the instance's k={file_k}")
    k = k if k is not None else file_k
    if k is None:
        raise UsageError("k is neither in the instance nor given with --k")
    alpha = doc.get("alpha") or []
    if alpha and len(alpha) != k:
        raise UsageError(f"alpha has {len(alpha)} entries, expected k={k}")
    alpha = tuple(rat(a, f"alpha[{j}]") for j, a in enumerate(alpha))
    c = rat(doc.get("c", 0), "c")
    distinct = bool(distinct or doc.get("distinct", False))
    try:
        inst = KSumInstance(len(values), int(k), alpha, c, distinct)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return inst, values


def instance_json(inst: KSumInstance) -> dict:
    return {"n": inst.n, "k": inst.k, "alpha": [format_rational(a) for a in inst.alpha],
            "c": format_rational(inst.c), "distinct": inst.distinct}


# -- running one mode -------------------------------------------------------

def _reference_report(values, inst: KSumInstance, mode: str, seed: int) -> SolverReport:
    oracle = QueryOracle(values)
    vals = oracle.open_book_read(mode)
    decide = brute_force_decide if mode == "brute" else meet_in_middle_decide
    found, wit = decide(vals, inst.k, list(inst.alpha), inst.c, inst.distinct)
    return SolverReport(found, sorted(wit), oracle.transcript, mode, seed)


def run_mode(values, inst: KSumInstance, mode: str, config: SolveConfig, blocks: int | None = None) -> SolverReport:
    """Solve with one of :data:`MODES` on a fresh oracle."""
    if mode in ("brute", "mim"):
        return _reference_report(values, inst, mode, config.seed)
    oracle = QueryOracle(values)
    if mode == "meiser":
        return solve(oracle, inst, dataclasses.replace(config, mode="naive"))
    if mode == "two-phase":
        return solve(oracle, inst, dataclasses.replace(config, mode="two_phase"))
    if mode == "blocked":
        return solve_blocked(oracle, inst, blocks or 2, dataclasses.replace(config, mode="naive"))
    raise UsageError(f"unknown mode {mode!r}")


def report_json(rep: SolverReport, inst: KSumInstance) -> dict:
    out = rep.to_json()
    out["instance"] = instance_json(inst)
    return out


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    """``"3,4"`` or ``"6..10"`` (inclusive) or a mix: ``"6..8,12"``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list or range: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _modes(text: str) -> list[str]:
    out = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in out if m not in MODES]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"modes must be among {', '.join(MODES)}")
    return out


def _solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--epsilon", type=_rational, default=Fraction(1, 2), help="pruning fraction per round")
    g.add_argument("--net-constant", type=_rational, default=Fraction(1), help="net size multiplier")
    g.add_argument("--base-case", type=int, default=64, help="hyperplane count answered directly")
    g.add_argument("--max-retries", type=int, default=25)
    g.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ksum-ldt", description="k-SUM / k-LDT through a sign-of-linear-form oracle.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance and print a JSON report")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="instance JSON file ('-' for stdin)")
    src.add_argument("--gen", choices=PROFILES, help="generate the instance instead")
    s.add_argument("--n", type=int, help="size for --gen")
    s.add_argument("--k", type=int)
    s.add_argument("--mode", choices=MODES)
    s.add_argument("--blocks", type=int, help="block count; implies --mode blocked")
    s.add_argument("--distinct", action="store_true", help="indices must be pairwise distinct")
    s.add_argument("--allow-decimal", action="store_true", help="accept decimal literals, converted exactly")
    s.add_argument("--emit", choices=("json", "csv"), default="json")
    _solver_flags(s)

    v = sub.add_parser("verify", help="cross-check every mode against brute force")
    v.add_argument("--count", type=int, default=100)
    v.add_argument("--k", type=_int_list, default=[3, 4])
    v.add_argument("--n", type=_int_list, default=list(range(6, 11)))
    v.add_argument("--profiles", default="planted,none,zeros,duplicates")
    v.add_argument("--blocks", type=_int_list, default=[2, 3])
    v.add_argument("--modes", type=_modes, default=list(MODES[1:]))
    v.add_argument("--distinct", action="store_true")
    _solver_flags(v)

    b = sub.add_parser("bench", help="CSV of query counts over a parameter grid")
    b.add_argument("--n", type=_int_list, required=True)
    b.add_argument("--k", type=_int_list, required=True)
    b.add_argument("--mode", type=_modes, default=["meiser"])
    b.add_argument("--blocks", type=_int_list, default=[2])
    b.add_argument("--profile", choices=PROFILES, default="none")
    b.add_argument("--distinct", action="store_true")
    b.add_argument("--no-timing", action="store_true", help="leave wall_ms empty for reproducible output")
    b.add_argument("--emit", choices=("csv", "json"), default="csv")
    _solver_flags(b)

    g = sub.add_parser("gen", help="emit an instance JSON document")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--profile", choices=PROFILES, default="planted")
    g.add_argument("--alpha", help="comma-separated coefficients")
    g.add_argument("--c", type=_rational, default=Fraction(0))
    g.add_argument("--distinct", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o", help="write to a file instead of stdout")
    return p


def _config(args) -> SolveConfig:
    try:
        return SolveConfig(epsilon=args.epsilon, net_constant=args.net_constant,
                           base_case_threshold=args.base_case, max_retries=args.max_retries, seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- commands ---------------------------------------------------------------

def _bench_row(inst: KSumInstance, mode: str, b, seed: int, rep: SolverReport, wall_ms) -> list:
    return [inst.n, inst.k, mode, "" if b is None else b, seed, "YES" if rep.answer else "NO",
            rep.transcript.total_queries, rep.transcript.max_terms, rep.retries, wall_ms]


def cmd_solve(args, out) -> int:
    if args.input is not None:
        try:
            if args.input == "-":
                doc = json.load(sys.stdin, parse_float=str)
            else:
                with open(args.input, encoding="utf-8") as fh:
                    doc = json.load(fh, parse_float=str)
        except OSError as e:
            raise UsageError(f"cannot read {args.input}: {e.strerror or e}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"{args.input}: invalid JSON ({e})") from None
    else:
        if args.n is None or args.k is None:
            raise UsageError("--gen needs --n and --k")
        try:
            doc = generate(args.n, args.k, args.gen, args.seed, distinct=args.distinct)
        except GenerationError as e:
            raise UsageError(str(e)) from None
    inst, values = load_instance(doc, args.k, args.distinct, args.allow_decimal)
    mode = args.mode or ("blocked" if args.blocks else "meiser")
    if args.blocks is not None and mode != "blocked":
        raise UsageError("--blocks only applies to --mode blocked")
    if mode == "blocked" and not 1 <= (args.blocks or 2) <= inst.n:
        raise UsageError(f"--blocks must lie in [1, n={inst.n}]")
    rep = run_mode(values, inst, mode, _config(args), args.blocks)
    if args.emit == "json":
        out.write(dumps(report_json(rep, inst)) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        w.writerow(_bench_row(inst, mode, args.blocks if mode == "blocked" else None, args.seed, rep, ""))
    return EXIT_OK


def _check_run(rep: SolverReport, inst: KSumInstance, mode: str, b: int | None, expected,
               epsilon: Fraction) -> list[str]:
    """Invariant violations of one run, as messages."""
    problems = []
    if (rep.answer, rep.witnesses) != expected:
        problems.append("answer or witnesses differ from brute force")
    if mode in ("brute", "mim"):
        return problems
    t = rep.transcript
    if t.open_book_reads:
        problems.append(f"{t.open_book_reads} open-book reads")
    if mode == "blocked":
        cap = inst.k * math.ceil(inst.n / b)
        if t.max_terms_excluding(*UNCAPPED_PHASES) > cap:
            problems.append(f"query of {t.max_terms_excluding(*UNCAPPED_PHASES)} terms exceeds cap {cap}")
        per_cell = [tuple(w) for c in rep.extra["blocks"]["cells"] for w in c["witnesses"]]
        if len(per_cell) != len(set(per_cell)):
            problems.append("a witness was attributed to two cells")
    elif t.max_terms > inst.n:
        problems.append(f"query of {t.max_terms} terms exceeds n")
    for r in rep.per_round:
        if r.phase == "phase-3":
            ok = r.h_after ** 2 * inst.n ** inst.k <= r.h_before ** 2
        else:
            ok = r.h_after <= epsilon * r.h_before
        if not ok:
            problems.append(f"accepted {r.phase} round kept {r.h_after} of {r.h_before}")
    return problems


Solver = Callable[[Sequence, KSumInstance, SolveConfig, "int | None"], SolverReport]


def default_solvers() -> dict[str, Solver]:
    return {m: (lambda values, inst, config, b, _m=m: run_mode(values, inst, _m, config, b)) for m in MODES}


def verify_instances(count: int, ks: Sequence[int], ns: Sequence[int], profiles: Sequence[str], seed: int,
                     distinct: bool = False):
    """The deterministic instance stream used by ``verify``: ``(instance_seed, doc)`` pairs."""
    rng = random.Random(seed)
    for i in range(count):
        k = rng.choice(list(ks))
        n = rng.choice([n for n in ns if not distinct or n >= k] or list(ns))
        profile = rng.choice(list(profiles))
        inst_seed = seed * 1_000_003 + i
        yield inst_seed, generate(n, k, profile, inst_seed, distinct=distinct)


def cmd_verify(args, out, solvers: Mapping[str, Solver] | None = None) -> int:
    solvers = {**default_solvers(), **(solvers or {})}
    profiles = [p.strip() for p in args.profiles.split(",") if p.strip()]
    bad = [p for p in profiles if p not in PROFILES]
    if bad:
        raise UsageError(f"unknown profiles: {', '.join(bad)}")
    if args.count <= 0:
        print("warning: --count is 0, nothing to verify", file=sys.stderr)
        return EXIT_OK
    base = _config(args)
    failures = []
    runs = 0
    for inst_seed, doc in verify_instances(args.count, args.k, args.n, profiles, args.seed, args.distinct):
        inst, values = load_instance(doc)
        config = dataclasses.replace(base, seed=inst_seed)
        expected = brute_force_decide(values, inst.k, list(inst.alpha), inst.c, inst.distinct)
        expected = (expected[0], sorted(expected[1]))
        plan = [(m, None) for m in args.modes if m != "blocked"]
        if "blocked" in args.modes:
            plan += [("blocked", b) for b in args.blocks if b <= inst.n]
        for mode, b in plan:
            runs += 1
            try:
                rep = solvers[mode](values, inst, config, b)
                problems = _check_run(rep, inst, mode, b, expected, base.epsilon)
            except SolverError as e:
                problems = [f"solver error: {e}"]
            for msg in problems:
                failures.append([inst_seed, doc["profile"], inst.n, inst.k, mode, "" if b is None else b, msg])
    if failures:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["seed", "profile", "n", "k", "mode", "b", "problem"])
        w.writerows(failures)
        return EXIT_VERIFY
    print(f"verified {args.count} instances, {runs} runs: all agree with brute force", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    base = _config(args)
    rows = []
    for n in args.n:
        for k in args.k:
            try:
                doc = generate(n, k, args.profile, args.seed, distinct=args.distinct)
            except GenerationError as e:
                raise UsageError(str(e)) from None
            inst, values = load_instance(doc)
            for mode in args.mode:
                for b in (args.blocks if mode == "blocked" else [None]):
                    if b is not None and not 1 <= b <= n:
                        continue
                    start = time.perf_counter()
                    rep = run_mode(values, inst, mode, base, b)
                    wall = "" if args.no_timing else f"{(time.perf_counter() - start) * 1000:.1f}"
                    rows.append(_bench_row(inst, mode, b, args.seed, rep, wall))
    if args.emit == "json":
        out.write(dumps([dict(zip(BENCH_HEADER, r)) for r in rows]) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        w.writerows(rows)
    return EXIT_OK


def cmd_gen(args, out) -> int:
    alpha = None
    if args.alpha:
        try:
            alpha = [parse_rational(a.strip()) for a in args.alpha.split(",")]
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"--alpha: {e}") from None
    try:
        doc = generate(args.n, args.k, args.profile, args.seed, alpha=alpha, c=args.c, distinct=args.distinct)
    except (GenerationError, ValueError) as e:
        raise UsageError(str(e)) from None
    text = dumps(doc) + "\n"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise UsageError(f"cannot write {args.output}: {e.strerror or e}") from None
    else:
        out.write(text)
    return EXIT_OK


def main(argv: Sequence[str] | None = None, out=None, solvers: Mapping[str, Solver] | None = None) -> int:
    """Entry point; ``solvers`` replaces mode implementations in ``verify`` (used to test the harness)."""
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command == "solve":
            return cmd_solve(args, out)
        if args.command == "verify":
            return cmd_verify(args, out, solvers)
        if args.command == "bench":
            return cmd_bench(args, out)
        return cmd_gen(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:  # noqa: BLE001 - the exit code contract covers every failure
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())

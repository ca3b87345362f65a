"""Sign-of-linear-form oracle over a sealed input vector.

Every access to the hidden input goes through :meth:`QueryOracle.ask`, which
records the query in a :class:`QueryTranscript`.  The only other door is
:meth:`QueryOracle.open_book_read`, which is counted so that solvers that
claim to respect the query model can be checked for ``open_book_reads == 0``.
"""

from __future__ import annotations

import contextlib
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .exact import parse_rational


class OracleError(RuntimeError):
    pass


class SealedOracleError(OracleError):
    pass


@dataclass(frozen=True)
class LinearQuery:
    """``constant + sum(coef * q[i])``; its sign is the answer.

    ``terms`` holds sorted ``(index, coefficient)`` pairs with zero
    coefficients stripped, so ``len(terms)`` is the query size.
    """

    terms: tuple[tuple[int, Rational], ...]
    constant: Rational = 0

    @classmethod
    def build(cls, terms: Mapping[int, Rational] | Iterable[tuple[int, Rational]] = (),
              constant: Rational = 0) -> "LinearQuery":
        acc: dict[int, Rational] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for i, v in items:
            acc[i] = acc.get(i, 0) + v
        return cls(tuple(sorted((i, v) for i, v in acc.items() if v != 0)), constant)

    @property
    def size(self) -> int:
        return len(self.terms)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.terms)


@dataclass
class QueryTranscript:
    total_queries: int = 0
    terms_histogram: Counter = field(default_factory=Counter)
    max_terms: int = 0
    open_book_reads: int = 0
    phases: dict[str, int] = field(default_factory=dict)
    # query sizes per phase, for caps that exclude some phases
    phase_max_terms: dict[str, int] = field(default_factory=dict)

    def record(self, size: int, phase: str) -> None:
        self.total_queries += 1
        self.terms_histogram[size] += 1
        if size > self.max_terms:
            self.max_terms = size
        self.phases[phase] = self.phases.get(phase, 0) + 1
        if size > self.phase_max_terms.get(phase, -1):
            self.phase_max_terms[phase] = size

    def max_terms_excluding(self, *phases: str) -> int:
        return max((m for p, m in self.phase_max_terms.items() if p not in phases), default=0)

    def to_json(self) -> dict:
        return {
            "total": self.total_queries,
            "max_terms": self.max_terms,
            "histogram": {str(s): c for s, c in sorted(self.terms_histogram.items())},
            "open_book_reads": self.open_book_reads,
            "phases": [{"name": p, "count": c} for p, c in self.phases.items()],
        }


@dataclass(frozen=True)
class NormalizationCertificate:
    """Where the largest absolute value sits.

    ``argmax_index`` is ``None`` when the winning coordinate is the implicit
    constant 1 (lifted normalization).  ``degenerate`` means the input is all
    zero, so no positive scale exists.
    """

    argmax_index: int | None
    argmax_sign: int
    queries_spent: int
    degenerate: bool = False


class QueryOracle:
    """Owns the hidden vector and the transcript."""

    def __init__(self, values: Sequence):
        vals = [parse_rational(v) for v in values]
        if not vals:
            raise ValueError("empty input")
        self._values = tuple(vals)
        den = lcm(*(v.denominator for v in vals))
        self._den = den
        self._num = tuple(int(v * den) for v in vals)
        self.transcript = QueryTranscript()
        self._phase = "unphased"
        self._sealed = False

    def __repr__(self):
        return f"QueryOracle(n={self.n}, queries={self.transcript.total_queries})"

    @property
    def n(self) -> int:
        return len(self._num)

    @contextlib.contextmanager
    def phase(self, name: str):
        prev = self._phase
        self._phase = name
        self.transcript.phases.setdefault(name, 0)
        try:
            yield
        finally:
            self._phase = prev

    def seal(self) -> None:
        self._sealed = True

    def ask(self, query: LinearQuery) -> int:
        if self._sealed:
            raise SealedOracleError("oracle sealed; no further queries allowed")
        num = self._num
        total = query.constant * self._den
        for i, v in query.terms:
            if not 0 <= i < len(num):
                raise IndexError(f"query index {i} out of range for n={len(num)}")
            total += v * num[i]
        self.transcript.record(len(query.terms), self._phase)
        return (total > 0) - (total < 0)

    def ask_terms(self, terms, constant=0) -> int:
        return self.ask(LinearQuery.build(terms, constant))

    def compare_abs(self, i: int, j: int) -> int:
        return compare_abs(self, i, j)

    def normalize(self, lifted: bool = False) -> NormalizationCertificate:
        return normalize(self, lifted)

    def open_book_read(self, reason: str = "") -> tuple[Fraction, ...]:
        self.transcript.open_book_reads += 1
        return self._values

    def restrict(self, indices: Sequence[int]) -> "OracleView":
        return OracleView(self, indices)


class OracleView:
    """The oracle seen through a subset of indices (local index -> global index).

    Shares the parent's transcript, phase and seal.
    """

    def __init__(self, parent: "QueryOracle | OracleView", indices: Sequence[int]):
        self._parent = parent
        self._map = tuple(indices)
        if len(set(self._map)) != len(self._map):
            raise ValueError("duplicate indices in view")
        for g in self._map:
            if not 0 <= g < parent.n:
                raise IndexError(f"view index {g} out of range")

    @property
    def n(self) -> int:
        return len(self._map)

    @property
    def indices(self) -> tuple[int, ...]:
        return self._map

    @property
    def transcript(self) -> QueryTranscript:
        return self._parent.transcript

    def phase(self, name: str):
        return self._parent.phase(name)

    def ask(self, query: LinearQuery) -> int:
        m = self._map
        for i, _ in query.terms:
            if not 0 <= i < len(m):
                raise IndexError(f"query index {i} out of range for n={len(m)}")
        return self._parent.ask(LinearQuery(tuple((m[i], v) for i, v in query.terms), query.constant))

    def ask_terms(self, terms, constant=0) -> int:
        return self.ask(LinearQuery.build(terms, constant))

    def compare_abs(self, i: int, j: int) -> int:
        return compare_abs(self, i, j)

    def normalize(self, lifted: bool = False) -> NormalizationCertificate:
        return normalize(self, lifted)

    def open_book_read(self, reason: str = "") -> tuple[Fraction, ...]:
        vals = self._parent.open_book_read(reason)
        return tuple(vals[g] for g in self._map)

    def restrict(self, indices: Sequence[int]) -> "OracleView":
        return OracleView(self, indices)


def compare_abs(oracle, i: int, j: int) -> int:
    """Order of ``|q_i|`` against ``|q_j|`` from the signs of ``q_i - q_j`` and ``q_i + q_j``.

    ``j`` may be ``None`` to compare against the constant 1.
    """
    if i == j:
        raise ValueError("compare_abs needs two distinct indices")
    if j is None:
        diff = oracle.ask(LinearQuery(((i, 1),), -1))
        if diff == 0:
            return 0
        return diff * oracle.ask(LinearQuery(((i, 1),), 1))
    lo, hi = (i, j) if i < j else (j, i)
    if i < j:
        diff = oracle.ask(LinearQuery(((i, 1), (j, -1)), 0))
    else:
        diff = oracle.ask(LinearQuery(((j, -1), (i, 1)), 0))
    if diff == 0:
        return 0
    return diff * oracle.ask(LinearQuery(((lo, 1), (hi, 1)), 0))


def normalize(oracle, lifted: bool = False) -> NormalizationCertificate:
    """Locate the coordinate of largest absolute value with 2-linear comparisons.

    Ties go to the lowest index; in lifted mode the implicit constant 1 comes
    first, so it wins ties.
    """
    start = oracle.transcript.total_queries
    with oracle.phase("normalize"):
        best: int | None = None if lifted else 0
        for i in range(0 if lifted else 1, oracle.n):
            if compare_abs(oracle, i, best) > 0:
                best = i
        if best is None:
            s = 1
        else:
            s = oracle.ask(LinearQuery(((best, 1),), 0))
    spent = oracle.transcript.total_queries - start
    if best is not None and s == 0:
        return NormalizationCertificate(best, 1, spent, degenerate=True)
    return NormalizationCertificate(best, s, spent)


class NormalizedView:
    """Ask sign questions about the normalized point ``x``.

    Plain mode: ``x = q / M`` with ``M = s * q[i*] > 0`` (``dim == n``).
    Lifted mode: ``x = (1, q) / M`` with ``M = max(1, |q_i|)`` (``dim == n + 1``).
    A form ``const + sum(a_j x_j)`` is multiplied by ``M`` to become a linear
    query on the original input, which preserves its sign.
    """

    def __init__(self, oracle, cert: NormalizationCertificate, lifted: bool):
        if cert.degenerate:
            raise OracleError("cannot normalize an all-zero input")
        self.oracle = oracle
        self.cert = cert
        self.lifted = lifted
        self.dim = oracle.n + int(lifted)

    def phase(self, name: str):
        return self.oracle.phase(name)

    def to_query(self, coeffs: Mapping[int, Rational] | Iterable[tuple[int, Rational]],
                 constant: Rational = 0) -> LinearQuery:
        acc: dict[int, Rational] = {}
        extra = 0
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        off = 1 if self.lifted else 0
        for j, v in items:
            if not v:
                continue
            if off and j == 0:
                extra += v
            else:
                acc[j - off] = acc.get(j - off, 0) + v
        if constant:
            if self.cert.argmax_index is None:
                extra += constant
            else:
                i = self.cert.argmax_index
                acc[i] = acc.get(i, 0) + constant * self.cert.argmax_sign
        return LinearQuery(tuple(sorted((i, v) for i, v in acc.items() if v != 0)), extra)

    def ask(self, coeffs, constant: Rational = 0) -> int:
        return self.oracle.ask(self.to_query(coeffs, constant))

    def ask_dense(self, form: Sequence[int]) -> int:
        """``form`` is ``[a_0, ..., a_{dim-1}, const]``."""
        d = self.dim
        if self.lifted:
            extra = form[0]
            coeffs = list(form[1:d])
        else:
            extra = 0
            coeffs = list(form[:d])
        c = form[d]
        if c:
            i = self.cert.argmax_index
            if i is None:
                extra += c
            else:
                coeffs[i] += c * self.cert.argmax_sign
        return self.oracle.ask(LinearQuery(tuple((i, v) for i, v in enumerate(coeffs) if v), extra))

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksum_ldt.oracle import (LinearQuery, NormalizedView, OracleError, QueryOracle, SealedOracleError)
from oracles import sign

values_st = st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=7), min_size=1, max_size=7)


def test_ask_examples():
    assert QueryOracle([5]).ask_terms({0: 1}) == 1
    assert QueryOracle([1, 2, -3]).ask_terms({0: 1, 1: 1, 2: 1}) == 0
    assert QueryOracle([1, 2]).ask_terms({0: 1}, -1) == 0


def test_transcript_counts():
    o = QueryOracle(["1/2", "3", "-4"])
    o.ask(LinearQuery.build({0: 1, 2: 2}))
    assert o.transcript.total_queries == 1
    assert o.transcript.max_terms == 2
    with o.phase("sort"):
        o.ask_terms({1: 1})
    assert o.transcript.phases["sort"] == 1
    assert o.transcript.open_book_reads == 0
    o.open_book_read("test")
    assert o.transcript.open_book_reads == 1


def test_zero_coefficients_are_stripped():
    q = LinearQuery.build([(0, 1), (1, 2), (0, -1)])
    assert q.terms == ((1, 2),)
    assert q.size == 1


def test_bad_index_and_seal():
    o = QueryOracle([1, 2])
    with pytest.raises(IndexError):
        o.ask_terms({2: 1})
    o.seal()
    with pytest.raises(SealedOracleError):
        o.ask_terms({0: 1})


def test_compare_abs_examples():
    assert QueryOracle([3, -5]).compare_abs(0, 1) == -1
    assert QueryOracle([2, -2]).compare_abs(0, 1) == 0
    assert QueryOracle([0, 1]).compare_abs(0, 1) == -1
    o = QueryOracle([3, -5])
    o.compare_abs(0, 1)
    assert o.transcript.total_queries <= 2


def test_normalize_examples():
    cert = QueryOracle([-7, 3]).normalize()
    assert (cert.argmax_index, cert.argmax_sign) == (0, -1)
    cert = QueryOracle([1, 1]).normalize()
    assert (cert.argmax_index, cert.argmax_sign) == (0, 1)
    assert QueryOracle([0, 0]).normalize().degenerate


def test_rewritten_boundary_query():
    o = QueryOracle([-7, 3])
    view = NormalizedView(o, o.normalize(), lifted=False)
    # x_2 <= 1 with M = 7: q_2 - 7 < 0
    assert view.ask({1: 1}, -1) == -1
    assert view.to_query({1: 1}, -1).terms == ((0, 1), (1, 1))


def test_degenerate_view_rejected():
    o = QueryOracle([0, 0])
    with pytest.raises(OracleError):
        NormalizedView(o, o.normalize(), lifted=False)


@settings(max_examples=100, deadline=None)
@given(values_st, st.fractions(min_value=F(1, 5), max_value=20, max_denominator=5), st.data())
def test_positive_scaling_preserves_signs(vals, lam, data):
    coeffs = data.draw(st.lists(st.integers(-3, 3), min_size=len(vals), max_size=len(vals)))
    a = QueryOracle(vals).ask_terms(dict(enumerate(coeffs)))
    b = QueryOracle([lam * v for v in vals]).ask_terms(dict(enumerate(coeffs)))
    assert a == b


@settings(max_examples=200, deadline=None)
@given(values_st, st.booleans(), st.data())
def test_rewrite_soundness(vals, lifted, data):
    if not lifted and not any(vals):
        return
    o = QueryOracle(vals)
    view = NormalizedView(o, o.normalize(lifted), lifted)
    dim = len(vals) + int(lifted)
    coeffs = data.draw(st.lists(st.integers(-4, 4), min_size=dim, max_size=dim))
    const = data.draw(st.integers(-4, 4))
    # the normalized point computed directly, with exact arithmetic
    if lifted:
        m = max([F(1)] + [abs(v) for v in vals])
        x = [F(1) / m] + [v / m for v in vals]
    else:
        m = max(abs(v) for v in vals)
        x = [v / m for v in vals]
    expected = sign(const + sum(a * xi for a, xi in zip(coeffs, x)))
    assert view.ask(dict(enumerate(coeffs)), const) == expected
    assert view.ask_dense(coeffs + [const]) == expected


@settings(max_examples=50, deadline=None)
@given(values_st, st.integers(1, 20))
def test_transcript_conservation(vals, asks):
    o = QueryOracle(vals)
    for j in range(asks):
        o.ask_terms({i: (i + j) % 3 - 1 for i in range(len(vals))})
    assert o.transcript.total_queries == asks
    assert o.transcript.max_terms <= len(vals)


def test_restricted_view_maps_indices():
    o = QueryOracle([4, -1, 7, 2])
    v = o.restrict([3, 1])
    assert v.n == 2
    assert v.ask_terms({0: 1, 1: 2}) == 0
    assert o.transcript.total_queries == 1
    with pytest.raises(IndexError):
        v.ask_terms({2: 1})

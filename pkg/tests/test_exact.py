from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksum_ldt.exact import (SingularSystem, bit_size_telemetry, determinant, format_rational, nullspace,
                            parse_rational, rank, rat_add, rat_cmp, rat_div, rat_mul, solve_consistent,
                            solve_linear_system)
from oracles import cofactor_det, cramer_solve

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=9)


def square(size):
    return st.lists(st.lists(rationals, min_size=size, max_size=size), min_size=size, max_size=size)


def test_arithmetic_examples():
    assert rat_add(F(1, 2), F(1, 3)) == F(5, 6)
    assert F(2, 4) == F(1, 2) and F(2, 4).denominator == 2
    assert rat_cmp(F(-3, 7), F(-2, 5)) == -1
    assert rat_mul(F(2, 3), F(3, 4)) == F(1, 2)
    with pytest.raises(ZeroDivisionError):
        rat_div(F(1), F(0))


def test_parse_and_format():
    assert parse_rational("0.25") == F(1, 4)
    assert parse_rational("-6/4") == F(-3, 2)
    assert parse_rational(" 7 ") == 7
    with pytest.raises(ValueError):
        parse_rational("0.25", allow_decimal=False)
    with pytest.raises(ValueError):
        parse_rational("1e3x")
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")
    assert format_rational(F(-3, 2)) == "-3/2"
    assert format_rational(4) == "4"


def test_determinant_examples():
    assert determinant([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 1
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[1, 2, 3], [4, 5, 6], [1, 2, 3]]) == 0
    with pytest.raises(ValueError):
        determinant([[1, 2, 3], [4, 5, 6]])


def test_solve_examples():
    assert solve_linear_system([[1, 0], [0, 1]], [F(3, 2), -4]) == [F(3, 2), -4]
    assert solve_linear_system([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    with pytest.raises(SingularSystem) as err:
        solve_linear_system([[1, 1], [2, 2]], [1, 5])
    assert err.value.rank == 1


def test_bit_sizes():
    assert bit_size_telemetry(F(1)) == (1, 1)
    assert bit_size_telemetry(F(5, 3)) == (3, 2)
    assert bit_size_telemetry(F(1024)) == (11, 1)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_determinant_matches_cofactor_expansion(m):
    d = determinant(m)
    assert d == cofactor_det(m)
    assert gcd(d.numerator, d.denominator) == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(square(n), st.lists(rationals, min_size=n, max_size=n))))
def test_solution_satisfies_system_and_cramer(data):
    a, b = data
    if cofactor_det(a) == 0 if len(a) <= 4 else determinant(a) == 0:
        with pytest.raises(SingularSystem):
            solve_linear_system(a, b)
        return
    x = solve_linear_system(a, b)
    for row, rhs in zip(a, b):
        assert sum(r * v for r, v in zip(row, x)) == rhs
    if len(a) <= 4:
        assert x == cramer_solve(a, b)
        det_a = cofactor_det(a)
        for i in range(len(a)):
            ai = [list(r[:i]) + [b[j]] + list(r[i + 1:]) for j, r in enumerate(a)]
            assert x[i] * det_a == cofactor_det(ai)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c),
                                                    min_size=1, max_size=5)))
def test_rank_nullity(m):
    cols = len(m[0])
    basis = nullspace(m, cols)
    assert rank(m) + len(basis) == cols
    for v in basis:
        for row in m:
            assert sum(a * b for a, b in zip(row, v)) == 0


def test_solve_consistent():
    assert solve_consistent([[1, 1]], [2]) is not None
    assert solve_consistent([[1, 1], [2, 2]], [1, 3]) is None

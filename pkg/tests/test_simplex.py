from fractions import Fraction

import pytest

from funcflow.errors import Infeasible
from funcflow.simplex import solve_lp


def test_single_bound():
    res = solve_lp(1, [1], [({0: 1}, "<=", 5)], maximize=True)
    assert res.status == "optimal"
    assert res.value == 5
    assert res.x == [Fraction(5)]
    assert res.duals == [Fraction(1)]


def test_two_variable_classic():
    # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
    rows = [({0: 1}, "<=", 4), ({1: 2}, "<=", 12), ({0: 3, 1: 2}, "<=", 18)]
    res = solve_lp(2, [3, 5], rows, maximize=True)
    assert res.value == 36
    assert res.x == [Fraction(2), Fraction(6)]
    # strong duality: y.b == optimum, complementary slackness on row 0
    assert sum(d * b for d, (_c, _s, b) in zip(res.duals, rows)) == 36
    assert res.duals[0] == 0


def test_equality_rows():
    # max x + y st x + y == 2, x - y == 0
    res = solve_lp(2, [1, 1], [({0: 1, 1: 1}, "==", 2), ({0: 1, 1: -1}, "==", 0)])
    assert res.value == 2
    assert res.x == [Fraction(1), Fraction(1)]


def test_geq_rows_and_min():
    # min 2x + 3y st x + y >= 4, x <= 3
    res = solve_lp(2, [2, 3], [({0: 1, 1: 1}, ">=", 4), ({0: 1}, "<=", 3)],
                   maximize=False)
    assert res.value == 9
    assert res.x == [Fraction(3), Fraction(1)]


def test_infeasible():
    with pytest.raises(Infeasible):
        solve_lp(1, [1], [({0: 1}, "<=", 1), ({0: 1}, ">=", 2)])


def test_unbounded():
    res = solve_lp(1, [1], [({0: -1}, "<=", 1)], maximize=True)
    assert res.status == "unbounded"


def test_negative_rhs_normalization():
    # x >= 2 written as -x <= -2
    res = solve_lp(1, [1], [({0: -1}, "<=", -2), ({0: 1}, "<=", 5)],
                   maximize=False)
    assert res.value == 2


def test_degenerate_rows_terminate():
    rows = [({0: 1, 1: -1}, "<=", 0), ({1: 1, 2: -1}, "<=", 0),
            ({2: 1, 0: -1}, "<=", 0), ({0: 1, 1: 1, 2: 1}, "<=", 3)]
    res = solve_lp(3, [1, 1, 1], rows, maximize=True)
    assert res.value == 3


def test_redundant_equalities_dropped():
    rows = [({0: 1, 1: 1}, "==", 2), ({0: 2, 1: 2}, "==", 4)]
    res = solve_lp(2, [1, 0], rows, maximize=True)
    assert res.value == 2


def test_exact_rationals_survive():
    res = solve_lp(1, [1], [({0: Fraction(3, 7)}, "<=", Fraction(5, 11))])
    assert res.value == Fraction(5, 11) * Fraction(7, 3)

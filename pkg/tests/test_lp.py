"""Exact simplex and the relaxation pair."""

from fractions import Fraction as F

import pytest

from pcover.errors import InfeasibleError
from pcover.generators import corpus_instance, gen_gap_family
from pcover.lp import (dual_value, is_dual_feasible, solve_dual,
                       solve_linear_program, solve_lp)
from pcover.model import make_instance
from pcover.pipeline import brute_force_partial


def test_simplex_small_known_lp():
    # min x + y  s.t.  x + 2y >= 4, 3x + y >= 6  ->  optimum at (8/5, 6/5)
    out = solve_linear_program([F(1), F(1)],
                               [([F(1), F(2)], ">=", F(4)),
                                ([F(3), F(1)], ">=", F(6))])
    assert out.value == F(14, 5)
    assert out.x == (F(8, 5), F(6, 5))


def test_simplex_equality_constraint():
    out = solve_linear_program([F(2), F(3)],
                               [([F(1), F(1)], "==", F(5)),
                                ([F(1), F(0)], "<=", F(3))])
    assert out.value == F(12)  # x=3, y=2


def test_simplex_infeasible():
    with pytest.raises(InfeasibleError):
        solve_linear_program([F(1)], [([F(1)], "<=", F(-1))])


def test_lp_zero_target():
    inst = make_instance([[1, 0], [0, 1]], [1, 1], [1, 1], 0)
    sol = solve_lp(inst)
    assert sol.value == 0
    assert all(x == 0 for x in sol.x)


def test_lp_gap_family_value():
    fam = gen_gap_family(1)
    assert solve_lp(fam.instance).value == 13
    assert solve_dual(fam.instance).value == 13


def test_embedded_gap_dual_is_feasible_and_optimal():
    fam = gen_gap_family(1)
    assert is_dual_feasible(fam.instance, fam.dual_y, fam.dual_lam)
    assert dual_value(fam.instance, fam.dual_y, fam.dual_lam) == 13


def test_strong_duality_and_ip_bound_random():
    for seed in range(12):
        inst = corpus_instance(seed)
        primal = solve_lp(inst)
        dual = solve_dual(inst)
        assert primal.value == dual.value
        _, ip = brute_force_partial(inst)
        assert primal.value <= ip


def test_dual_p_zero():
    inst = make_instance([[1]], [1], [1], 0)
    dual = solve_dual(inst)
    assert dual.value == 0

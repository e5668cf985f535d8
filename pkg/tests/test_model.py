"""Instances, covers, permutations."""

from fractions import Fraction as F

import pytest

from pcover.errors import InputError
from pcover.generators import Lcg, corpus_instance
from pcover.model import (Cover, PermutationPair, cover_cost, covered_profit,
                          make_instance, permute_instance)


def test_make_instance_minimal():
    inst = make_instance([[1, 0], [0, 1]], [1, 1], [1, 1], 1)
    assert inst.n == 2 and inst.m == 2
    assert inst.target == 1


def test_non_binary_entry_rejected():
    with pytest.raises(InputError, match="non-binary entry"):
        make_instance([[2]], [1], [1], 0)


def test_infeasible_target_rejected():
    with pytest.raises(InputError, match="infeasible target"):
        make_instance([[1]], [1], [1], 2)


def test_negative_cost_and_profit_rejected():
    with pytest.raises(InputError, match="negative cost"):
        make_instance([[1]], [-1], [1], 0)
    with pytest.raises(InputError, match="negative profit"):
        make_instance([[1]], [1], [-1], 0)


def test_dimension_mismatch_rejected():
    with pytest.raises(InputError):
        make_instance([[1, 0], [1]], [1, 1], [1, 1], 0)
    with pytest.raises(InputError, match="costs"):
        make_instance([[1, 0]], [1], [1], 0)


def test_covered_profit_examples():
    inst = make_instance([[1, 1], [0, 1]], [1, 1], [1, 1], 0)
    assert covered_profit(inst, Cover.of([])) == 0
    assert covered_profit(inst, Cover.of([0, 1])) == inst.total_profit()
    assert covered_profit(inst, Cover.of([1])) == 2  # second set covers both


def test_covered_profit_monotone_under_inclusion():
    rng = Lcg(5)
    for seed in range(10):
        inst = corpus_instance(seed)
        subset = [j for j in range(inst.m) if rng.below(2)]
        superset = sorted(set(subset) | {j for j in range(inst.m) if rng.below(2)})
        assert covered_profit(inst, Cover.of(subset)) <= covered_profit(
            inst, Cover.of(superset))


def test_cover_cost():
    inst = make_instance([[1, 1]], [F(1, 2), F(1, 3)], [1], 0)
    assert cover_cost(inst, Cover.of([0, 1])) == F(5, 6)


def test_cover_rejects_duplicates_and_out_of_range():
    with pytest.raises(InputError):
        Cover.of([1, 1])
    inst = make_instance([[1]], [1], [1], 0)
    with pytest.raises(InputError):
        covered_profit(inst, Cover.of([3]))


def test_permutation_round_trip():
    pair = PermutationPair((2, 0, 1), (1, 0))
    inv = pair.inverse()
    assert [inv.row_perm[pair.row_perm[i]] for i in range(3)] == [0, 1, 2]
    assert [inv.col_perm[pair.col_perm[j]] for j in range(2)] == [0, 1]


def test_permutation_rejects_non_bijection():
    with pytest.raises(InputError):
        PermutationPair((0, 0), (0, 1))


def test_permute_instance_moves_data_consistently():
    inst = make_instance([[1, 0], [1, 1]], [3, 4], [5, 6], 2)
    pair = PermutationPair((1, 0), (1, 0))
    out = permute_instance(inst, pair)
    assert out.rows == ((1, 1), (0, 1))
    assert out.costs == (F(4), F(3))
    assert out.profits == (F(6), F(5))
    back = permute_instance(out, pair.inverse())
    assert back == inst

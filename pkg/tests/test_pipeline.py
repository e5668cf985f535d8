"""End-to-end solvers, oracles, absorption, and the adversary simulation."""

from fractions import Fraction as F

import pytest

from pcover.errors import InfeasibleError, InputError, SizeGuardError
from pcover.generators import (corpus_instance, gen_blackbox_family,
                               gen_gap_family, gen_random_rectangles,
                               gen_random_tree_instance, reduce_multicut,
                               reduce_rectangle_stabbing)
from pcover.model import Cover, Decomposition, cover_cost, covered_profit, make_instance
from pcover.pipeline import (absorb_additive_error, brute_force_partial,
                             brute_force_prize_collecting,
                             equitable_coloring_check, simulate_blackbox_lb,
                             solve_partial_tbc, solve_rho_separable)

SINGLE_SET = make_instance([[1], [1]], [1], [1, 1], 1)


def test_brute_force_partial_zero_target():
    inst = make_instance([[1]], [2], [1], 0)
    cover, cost = brute_force_partial(inst)
    assert cover.sets == () and cost == 0


def test_brute_force_partial_gap_value():
    fam = gen_gap_family(1)
    _, cost = brute_force_partial(fam.instance)
    assert cost == 15  # dl + 2q; every cover pays a multiple of 3


def test_brute_force_partial_infeasible():
    inst = make_instance([[1], [0]], [1], [1, 1], F(3, 2))
    with pytest.raises(InfeasibleError):
        brute_force_partial(inst)


def test_brute_force_partial_size_guard():
    inst = make_instance([[1] * 25], [1] * 25, [1], 1)
    with pytest.raises(SizeGuardError):
        brute_force_partial(inst)


def test_brute_force_prize_collecting_examples():
    inst = make_instance([[1, 1], [0, 1]], [2, 3], [1, 1], 0)
    assert brute_force_prize_collecting(inst, 0) == 0
    assert brute_force_prize_collecting(inst, 10) == 3


def test_blackbox_prize_collecting_closed_forms():
    # the four candidate covers' closed-form values track the exhaustive
    # optimum across the multiplier axis
    fam = gen_blackbox_family(2, 2, "general")
    pu = fam.instance.total_profit()
    for lam in (F(1, 100), F(1, 20), F(1, 8), F(1, 4), F(1, 2), F(2)):
        closed = min(lam * pu, fam.cost_a + lam * fam.uncovered_a,
                     fam.cost_b, fam.opt_cost + lam * fam.uncovered_o)
        assert brute_force_prize_collecting(fam.instance, lam) == closed


def test_solve_single_set_fixture():
    report = solve_partial_tbc(SINGLE_SET, 3, with_lp=True, oracle=True)
    assert report.cover.sets == (0,)
    assert report.cost == 1
    assert report.dl_value == F(1, 2)
    assert report.lp_value == F(1, 2)
    assert report.ratio_vs_oracle == 1


def test_solve_rejects_non_totally_balanced():
    bad = make_instance([[1, 1, 0], [0, 1, 1], [1, 0, 1]], [1, 1, 1],
                        [1, 1, 1], 1)
    with pytest.raises(InputError, match="not totally balanced"):
        solve_partial_tbc(bad)


def test_solve_unattainable_target():
    inst = make_instance([[1], [0]], [1], [1, 1], F(3, 2))
    with pytest.raises(InfeasibleError):
        solve_partial_tbc(inst)


def test_solve_gap_family_bounds():
    fam = gen_gap_family(1)
    report = solve_partial_tbc(fam.instance, 3, with_lp=True, oracle=True)
    assert report.oracle_cost == 15
    assert report.cost >= 15
    for k in range(1, 11):
        assert report.cost <= (1 + F(1, 3 ** (k - 1))) * report.dl_value + 3 * k


def test_solve_exact_hit_cost_equals_dual_value():
    # target equal to full coverage forces an exact hit at the threshold
    inst = make_instance([[1], [1]], [1], [1, 1], 2)
    report = solve_partial_tbc(inst)
    assert report.exact_hit
    assert report.cost == report.dl_value == 1


def test_solve_permutation_invariance():
    # solving a permuted instance gives the same cost and the permuted cover
    from pcover.model import PermutationPair, permute_instance
    inst = corpus_instance(4)
    pair = PermutationPair(tuple(reversed(range(inst.n))),
                           tuple(reversed(range(inst.m))))
    permuted = permute_instance(inst, pair)
    a = solve_partial_tbc(inst)
    b = solve_partial_tbc(permuted)
    assert a.cost == b.cost
    assert a.covered == b.covered
    mapped = Cover.of(pair.col_perm[j] for j in a.cover.sets)
    assert cover_cost(permuted, mapped) == b.cost


def test_rho_separable_single_part_reduces_to_plain_solve():
    inst = corpus_instance(2)
    dec = Decomposition(1, (inst.rows,))
    a = solve_rho_separable(inst, dec, 4)
    b = solve_partial_tbc(inst, 4)
    assert a.cover == b.cover and a.cost == b.cost


def test_rho_separable_multicut_bound():
    for seed in (1, 2, 3, 4):
        tree = gen_random_tree_instance(seed)
        inst, dec = reduce_multicut(tree)
        report = solve_rho_separable(inst, dec, 4, oracle=True)
        assert covered_profit(inst, report.cover) >= inst.target
        bound = (1 + F(1, 27)) * 2 * report.lp_value + 4 * inst.max_cost()
        assert report.cost <= bound


def test_absorb_k0_is_plain_solve():
    inst = corpus_instance(5)
    cover = absorb_additive_error(inst, 0, F(3, 2))
    assert cover == solve_partial_tbc(inst, 0).cover


def test_absorb_never_worse_than_plain():
    for seed in (1, 2, 3):
        tree = gen_random_tree_instance(seed)
        inst, dec = reduce_multicut(tree)
        plain = solve_rho_separable(inst, dec, 4)
        absorbed = absorb_additive_error(inst, 4, F(56, 27), dec)
        assert cover_cost(inst, absorbed) <= plain.cost
        assert covered_profit(inst, absorbed) >= inst.target


def test_absorb_recovers_single_expensive_set_optimum():
    # one expensive set covers everything; four cheap sets cover a sliver.
    inst = make_instance(
        [[1, 1, 0, 0, 0],
         [1, 0, 1, 0, 0],
         [1, 0, 0, 1, 0],
         [1, 0, 0, 0, 1]],
        [10, 1, 1, 1, 1], [1, 1, 1, 1], 4)
    _, opt = brute_force_partial(inst)
    assert opt == 4  # the four cheap sets
    cover = absorb_additive_error(inst, 1, F(2))
    assert cover_cost(inst, cover) == opt


def test_absorb_alpha_bound_on_small_instances():
    alpha = F(2)
    for seed in (1, 2, 3, 4, 5):
        tree = gen_random_tree_instance(seed, max_edges=8, max_demands=5)
        inst, dec = reduce_multicut(tree)
        cover = absorb_additive_error(inst, 2, alpha, dec)
        _, opt = brute_force_partial(inst)
        assert cover_cost(inst, cover) <= alpha * opt


def test_absorb_rejects_alpha_at_most_one():
    with pytest.raises(InputError):
        absorb_additive_error(SINGLE_SET, 1, 1)


def test_blackbox_simulation_tu():
    t = simulate_blackbox_lb(3, 1, variant="tu")
    assert t.lmp_all_ok
    assert t.ratio == F(4, 3)
    assert t.opt_cost == 3
    assert t.best_cost == 4
    kinds = {e.kind for e in t.entries}
    assert {"A", "B"} <= kinds


def test_blackbox_simulation_general_alpha2():
    t = simulate_blackbox_lb(3, 2, variant="general")
    assert t.lmp_all_ok
    assert t.opt_cost == 1
    assert t.best_cost == F(8, 3)


def test_blackbox_entries_satisfy_lmp_exactly():
    for variant, alpha in (("general", 1), ("general", 2), ("tu", 1)):
        t = simulate_blackbox_lb(2, alpha, variant=variant)
        for entry in t.entries:
            assert entry.lmp_lhs <= entry.lmp_rhs


def test_blackbox_custom_schedule():
    t = simulate_blackbox_lb(2, 1, lambda_schedule=[F(1, 100), F(1, 6), F(10)],
                             variant="general")
    assert t.lmp_all_ok
    assert len(t.entries) == 3


def test_equitable_coloring_tu_family():
    for q in (2, 3):
        fam = gen_blackbox_family(q, 1, "tu")
        assert equitable_coloring_check(fam.instance.rows, roles=fam.roles)


def test_equitable_coloring_a_columns_only():
    fam = gen_blackbox_family(2, 1, "tu")
    rows = tuple(tuple(row[j] for j in fam.a_cols) for row in fam.instance.rows)
    roles = tuple(fam.roles[j] for j in fam.a_cols)
    assert equitable_coloring_check(rows, roles=roles)


def test_equitable_coloring_exhaustive_rejects_odd_cycle():
    assert not equitable_coloring_check([[1, 1, 0], [0, 1, 1], [1, 0, 1]])


def test_interval_stabbing_strong_bound():
    for seed in (1, 2, 3, 4, 5):
        rect = gen_random_rectangles(seed, 1)
        inst, dec, flag = reduce_rectangle_stabbing(rect)
        assert flag
        report = solve_rho_separable(inst, dec, 4)
        assert report.single_block
        assert report.cost <= report.lp_value + inst.max_cost()
        assert report.splits <= 1

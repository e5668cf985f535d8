"""Merger graph construction and the combining procedures."""

from fractions import Fraction as F

import pytest

from pcover.arith import DeltaRational
from pcover.errors import InternalInvariantError
from pcover.generators import corpus_instance, gen_gap_family
from pcover.kolen import DualSolution
from pcover.merger import (MergeContext, MergeTrace, absolute_benefits,
                           audit_merge_bound, build_merger_graph, decrease,
                           increase, merge, relative_benefit)
from pcover.model import Cover, cover_cost, covered_profit, make_instance
from pcover.pipeline import _threshold_dl, to_greedy_form
from pcover.threshold import find_threshold


def _dual(y_values, lam=0):
    y = tuple(DeltaRational(v) for v in y_values)
    return DualSolution(y, DeltaRational(lam), ())


THREE_SET = make_instance([[1, 0, 1], [0, 1, 1]], [1, 1, 1], [1, 1], 0)


def three_set_graph():
    pruned_minus = Cover.of([2])
    pruned = Cover.of([0, 1])
    dual_minus = _dual([1, 1])
    dual_plus = _dual([1, 1])
    return build_merger_graph(THREE_SET, pruned_minus, pruned, dual_minus, dual_plus)


def test_empty_graph_when_covers_equal():
    cover = Cover.of([0])
    g = build_merger_graph(THREE_SET, cover, cover, _dual([1, 1]), _dual([1, 1]))
    assert g.vertices == () and g.edges == () and g.roots == ()


def test_single_vertex_graph():
    g = build_merger_graph(THREE_SET, Cover.of([]), Cover.of([0]),
                           _dual([0, 0]), _dual([1, 0]))
    assert g.vertices == (0,)
    assert g.edges == ()
    assert g.roots == (0,)


def test_hand_built_domination_edges():
    g = three_set_graph()
    assert g.edges == ((2, 0), (2, 1))
    assert g.roots == (2,)
    assert g.children[2] == (0, 1)
    assert g.subtree(2) == frozenset({0, 1, 2})


def test_in_degree_two_fails_loudly():
    # Two later sets both dominating an earlier one from the same side
    # would need in-degree two on the earlier set.
    inst = make_instance([[1, 1, 0], [1, 0, 1]], [1, 1, 1], [1, 1], 0)
    with pytest.raises(InternalInvariantError, match="two dominators"):
        build_merger_graph(inst, Cover.of([1, 2]), Cover.of([0]),
                           _dual([1, 1]), _dual([1, 1]))


def test_absolute_benefits_examples():
    disjoint = make_instance([[1, 0], [0, 1]], [1, 1], [2, 3], 0)
    assert absolute_benefits(disjoint, Cover.of([0, 1])) == {0: F(2), 1: F(3)}

    identical = make_instance([[1, 1]], [1, 1], [5], 0)
    assert absolute_benefits(identical, Cover.of([0, 1])) == {0: F(0), 1: F(0)}

    nested = make_instance([[1, 1], [0, 1]], [1, 1], [1, 1], 0)
    assert absolute_benefits(nested, Cover.of([0, 1])) == {0: F(0), 1: F(1)}


def test_relative_benefit_signs():
    g = three_set_graph()
    benefits = {0: F(2), 1: F(3), 2: F(5)}
    # single-vertex subtrees
    assert relative_benefit(g, 0, frozenset(), benefits) == 2
    assert relative_benefit(g, 0, frozenset({0}), benefits) == -2
    # subtree with mixed membership
    assert relative_benefit(g, 2, frozenset({0}), benefits) == 5 + 3 - 2


def test_merge_single_set_fixture():
    inst = make_instance([[1], [1]], [1], [1, 1], 1)
    thr = find_threshold(inst)
    low, high = thr.merge_pair(inst.target)
    g = build_merger_graph(inst, low.pruned, high.pruned, low.dual, high.dual)
    final, trace = merge(g, low.pruned, high.pruned, inst)
    assert final.sets == (0,)
    assert trace.splits == []
    assert cover_cost(inst, final) == 1


def test_merge_returns_lower_cover_when_already_feasible():
    inst = make_instance([[1], [1]], [1], [1, 1], 1)
    cover = Cover.of([0])
    g = build_merger_graph(inst, cover, cover, _dual([1, 1]), _dual([1, 1]))
    final, trace = merge(g, cover, cover, inst)
    assert final == cover
    assert trace.immediate == "lower cover already feasible"


def test_merge_on_corpus_runs():
    for seed in range(30):
        work, _ = to_greedy_form(corpus_instance(seed))
        thr = find_threshold(work)
        if thr.exact_hit is not None:
            continue
        low, high = thr.merge_pair(work.target)
        g = build_merger_graph(work, low.pruned, high.pruned, low.dual, high.dual)
        final, trace = merge(g, low.pruned, high.pruned, work)
        assert covered_profit(work, final) >= work.target
        assert final.as_set() <= low.pruned.as_set() | high.pruned.as_set()
        dl = _threshold_dl(work, thr)
        audit = audit_merge_bound(trace, work, dl, k_max=10)
        assert audit.ok
        # determinism
        final2, _ = merge(g, low.pruned, high.pruned, work)
        assert final2 == final


def test_merge_gap_family_exercises_splits():
    fam = gen_gap_family(1)
    work, _ = to_greedy_form(fam.instance)
    thr = find_threshold(work)
    assert thr.exact_hit is None
    low, high = thr.merge_pair(work.target)
    g = build_merger_graph(work, low.pruned, high.pruned, low.dual, high.dual)
    final, trace = merge(g, low.pruned, high.pruned, work)
    assert len(trace.splits) >= 1
    for record in trace.splits:
        if record.children_processed >= 2:
            assert record.offset_before >= 3 * min(record.offset_infeasible,
                                                   record.offset_feasible)
    dl = _threshold_dl(work, thr)
    assert audit_merge_bound(trace, work, dl, k_max=10).ok


def test_increase_immediate_exit_via_public_wrapper():
    # Adding the root alone reaches the target: first exit branch.
    inst = make_instance([[1], [1]], [1], [1, 1], 1)
    thr = find_threshold(inst)
    low, high = thr.merge_pair(inst.target)
    g = build_merger_graph(inst, low.pruned, high.pruned, low.dual, high.dual)
    ctx = MergeContext(g, inst, inst.target,
                       absolute_benefits(inst, Cover.of([0])))
    out = increase(0, frozenset(), ctx)
    assert out.sets == (0,)


def test_decrease_precondition_enforced():
    inst = make_instance([[1], [1]], [1], [1, 1], 1)
    thr = find_threshold(inst)
    low, high = thr.merge_pair(inst.target)
    g = build_merger_graph(inst, low.pruned, high.pruned, low.dual, high.dual)
    ctx = MergeContext(g, inst, inst.target,
                       absolute_benefits(inst, Cover.of([0])))
    with pytest.raises(InternalInvariantError, match="precondition"):
        decrease(0, frozenset(), ctx)  # empty cover is not feasible


def test_split_fixture_bound_arithmetic():
    # Hand-checked single-set fixture numbers: dl = 1/2, cost 1, c_max 1.
    inst = make_instance([[1], [1]], [1], [1, 1], 1)
    trace = MergeTrace(target=F(1), final=Cover.of([0]))
    audit = audit_merge_bound(trace, inst, F(1, 2), k_max=3)
    assert audit.ok
    k1 = audit.per_k[0]
    assert k1 == (1, F(2), True)  # 2 * 1/2 + 1 * 1


def test_tampered_cover_breaks_bound():
    inst = make_instance([[1] * 12], [1] * 12, [1], 1)
    trace = MergeTrace(target=F(1), final=Cover.of(range(12)))
    audit = audit_merge_bound(trace, inst, F(1, 10), k_max=3)
    assert not audit.ok

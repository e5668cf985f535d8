"""Combining the two bracketing covers through the merger graph.

The two pruned covers produced just below and just above the threshold
multiplier are structurally related: directed domination edges between
their symmetric difference form a forest of out-branchings.  Walking that
forest, `merge` flips whole subtrees while the working cover stays short
of the target, then hands over to the mutually recursive `increase` /
`decrease` pair, which either finish cheaply or split a subtree, paying
one extra set but shrinking the coverage offset at least threefold.

Every structural fact the analysis relies on is asserted at runtime:
graph shape, alternating edge occupancy, entry preconditions, the
coverage-change identity at each subtree flip, and the factor-3 offset
decay at multi-child splits.  The final cost bound is re-checked by
`audit_merge_bound`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, InternalInvariantError
from .kolen import DualSolution
from .model import Cover, Instance, cover_cost, covered_profit


@dataclass(frozen=True)
class MergerGraph:
    """Forest of out-branchings over the symmetric difference of two covers.

    `minus_only` and `plus_only` tag each vertex's side; every edge joins
    opposite sides and points from the larger to the smaller set index.
    """

    vertices: tuple[int, ...]
    minus_only: frozenset[int]
    plus_only: frozenset[int]
    edges: tuple[tuple[int, int], ...]
    parent: dict[int, int]
    children: dict[int, tuple[int, ...]]
    roots: tuple[int, ...]
    subtrees: dict[int, frozenset[int]]

    def subtree(self, j: int) -> frozenset[int]:
        return self.subtrees[j]


def _dominates(instance: Instance, pos_mask: int, j1: int, j2: int) -> bool:
    return j1 > j2 and bool(instance.col_masks[j1] & instance.col_masks[j2] & pos_mask)


def build_merger_graph(instance: Instance,
                       pruned_minus: Cover, pruned: Cover,
                       dual_minus: DualSolution, dual: DualSolution) -> MergerGraph:
    """Construct and validate the merger graph of the two pruned covers.

    Fails loudly (InternalInvariantError) on in-degree two or a cycle;
    either would contradict the forest guarantee and signals an upstream
    bug, not bad input.
    """
    minus_set = pruned_minus.as_set()
    plus_set = pruned.as_set()
    minus_only = frozenset(minus_set - plus_set)
    plus_only = frozenset(plus_set - minus_set)
    vertices = tuple(sorted(minus_only | plus_only))

    pos_minus = dual_minus.positive_y_mask()
    pos_plus = dual.positive_y_mask()

    edges = []
    parent: dict[int, int] = {}
    for j1 in vertices:
        for j2 in vertices:
            if j1 == j2:
                continue
            if j1 in minus_only and j2 in plus_only:
                hit = _dominates(instance, pos_minus, j1, j2)
            elif j1 in plus_only and j2 in minus_only:
                hit = _dominates(instance, pos_plus, j1, j2)
            else:
                continue
            if hit:
                if j2 in parent:
                    raise InternalInvariantError(
                        f"vertex {j2} has two dominators: {parent[j2]} and {j1}")
                parent[j2] = j1
                edges.append((j1, j2))

    for j1, j2 in edges:
        if j1 <= j2:
            raise InternalInvariantError(f"edge ({j1}, {j2}) does not decrease")

    children: dict[int, list[int]] = {v: [] for v in vertices}
    for j1, j2 in edges:
        children[j1].append(j2)
    for v in children:
        children[v].sort()

    roots = tuple(v for v in vertices if v not in parent)

    subtrees: dict[int, frozenset[int]] = {}

    def collect(v: int, seen: set[int]) -> frozenset[int]:
        if v in seen:
            raise InternalInvariantError(f"cycle through vertex {v}")
        seen.add(v)
        acc = {v}
        for c in children[v]:
            acc |= collect(c, seen)
        sub = frozenset(acc)
        subtrees[v] = sub
        return sub

    visited: set[int] = set()
    for r in roots:
        collect(r, visited)
    if len(visited) != len(vertices):
        raise InternalInvariantError("merger graph contains a cycle")

    return MergerGraph(vertices=vertices, minus_only=minus_only,
                       plus_only=plus_only, edges=tuple(sorted(edges)),
                       parent=parent,
                       children={v: tuple(c) for v, c in children.items()},
                       roots=roots, subtrees=subtrees)


def absolute_benefits(instance: Instance, union_cover: Cover) -> dict[int, Fraction]:
    """Per-set profit of elements only that set covers within the union."""
    table: dict[int, Fraction] = {j: Fraction(0) for j in union_cover.sets}
    for i in range(instance.n):
        owners = [j for j in union_cover.sets if instance.rows[i][j]]
        if len(owners) == 1:
            table[owners[0]] += instance.profits[i]
    return table


def relative_benefit(graph: MergerGraph, j: int, D, benefits) -> Fraction:
    """Signed coverage change of flipping the subtree at j against D."""
    total = Fraction(0)
    for v in graph.subtree(j):
        total += -benefits[v] if v in D else benefits[v]
    return total


@dataclass(frozen=True)
class SplitRecord:
    root: int
    children_processed: int
    offset_before: Fraction
    offset_infeasible: Fraction
    offset_feasible: Fraction


@dataclass(frozen=True)
class CallRecord:
    kind: str
    vertex: int
    coverage: Fraction
    benefit: Fraction


@dataclass
class MergeTrace:
    """Everything needed to audit a merge run after the fact."""

    target: Fraction
    calls: list[CallRecord] = field(default_factory=list)
    splits: list[SplitRecord] = field(default_factory=list)
    split_vertices: list[int] = field(default_factory=list)
    root_flips: int = 0
    immediate: str = ""
    final: Cover | None = None


class MergeContext:
    """Shared state for one combining run: graph, instance, target, benefits.

    `increase` and `decrease` mutate nothing outside the trace; covers are
    passed and returned as frozensets of set indices.
    """

    def __init__(self, graph: MergerGraph, instance: Instance, target: Fraction,
                 benefits: dict[int, Fraction]):
        self.graph = graph
        self.instance = instance
        self.target = target
        self.benefits = benefits
        self.trace = MergeTrace(target=target)

    def coverage(self, D) -> Fraction:
        return covered_profit(self.instance, Cover.of(D))

    def cost(self, D) -> Fraction:
        return cover_cost(self.instance, Cover.of(D))

    def benefit(self, j: int, D) -> Fraction:
        return relative_benefit(self.graph, j, D, self.benefits)

    def flip(self, D: frozenset[int], j: int) -> frozenset[int]:
        """Symmetric difference with the subtree at j, identity-checked."""
        after = D ^ self.graph.subtree(j)
        gain = self.coverage(after) - self.coverage(D)
        expected = self.benefit(j, D)
        if gain != expected:
            raise InternalInvariantError(
                f"coverage change {gain} of subtree {j} disagrees with "
                f"relative benefit {expected}")
        return after

    def check_alternating(self, D: frozenset[int]) -> None:
        split_so_far = set(self.trace.split_vertices)
        for a, b in self.graph.edges:
            in_a, in_b = a in D, b in D
            if not in_a and not in_b:
                raise InternalInvariantError(f"edge ({a}, {b}) has no endpoint in D")
            if in_a and in_b and not ({a, b} & split_so_far):
                raise InternalInvariantError(
                    f"edge ({a}, {b}) fully inside D without a prior split")

    def pick_cheaper(self, first: frozenset[int], second: frozenset[int]) -> frozenset[int]:
        ca, cb = self.cost(first), self.cost(second)
        if ca != cb:
            return first if ca < cb else second
        return first if tuple(sorted(first)) <= tuple(sorted(second)) else second

    def increase(self, j: int, D: frozenset[int]) -> frozenset[int]:
        P = self.target
        pD = self.coverage(D)
        b = self.benefit(j, D)
        self.trace.calls.append(CallRecord("increase", j, pD, b))
        if not (pD <= P < pD + b):
            raise InternalInvariantError(
                f"increase({j}) precondition broken: p(D)={pD}, benefit={b}, P={P}")
        self.check_alternating(D)

        with_j = D | {j}
        if self.coverage(with_j) >= P:
            return with_j

        kids = self.graph.children[j]
        for c in kids:
            if pD + self.benefit(c, D) > P:
                return self.increase(c, D)

        # Split: add j, then flip children subtrees by descending benefit
        # until coverage crosses the target.
        entry_offset = abs(pD - P)
        current = with_j
        remaining = list(kids)
        processed = 0
        last = None
        while self.coverage(current) <= P:
            if not remaining:
                raise InternalInvariantError(f"split at {j} exhausted its children")
            best = max(remaining, key=lambda c: (self.benefit(c, current), -c))
            current = self.flip(current, best)
            remaining.remove(best)
            processed += 1
            last = best
        feasible = current
        infeasible = feasible ^ self.graph.subtree(last)
        self._record_split("increase", j, processed, entry_offset, infeasible, feasible)
        if P - self.coverage(infeasible) < self.coverage(feasible) - P:
            other = self.increase(last, infeasible)
        else:
            other = self.decrease(last, feasible)
        return self.pick_cheaper(feasible, other)

    def decrease(self, j: int, D: frozenset[int]) -> frozenset[int]:
        P = self.target
        pD = self.coverage(D)
        b = self.benefit(j, D)
        self.trace.calls.append(CallRecord("decrease", j, pD, b))
        if not (pD >= P > pD + b):
            raise InternalInvariantError(
                f"decrease({j}) precondition broken: p(D)={pD}, benefit={b}, P={P}")
        self.check_alternating(D)

        flipped_plus_j = (D ^ self.graph.subtree(j)) | {j}
        if self.coverage(flipped_plus_j) >= P:
            return flipped_plus_j

        kids = self.graph.children[j]
        for c in kids:
            if pD + self.benefit(c, D) < P:
                return self.decrease(c, D)

        entry_offset = abs(pD - P)
        current = D | {j}
        remaining = list(kids)
        processed = 0
        last = None
        while self.coverage(current) >= P:
            if not remaining:
                raise InternalInvariantError(f"split at {j} exhausted its children")
            best = min(remaining, key=lambda c: (self.benefit(c, current), c))
            current = self.flip(current, best)
            remaining.remove(best)
            processed += 1
            last = best
        infeasible = current
        feasible = infeasible ^ self.graph.subtree(last)
        self._record_split("decrease", j, processed, entry_offset, infeasible, feasible)
        if self.coverage(feasible) - P < P - self.coverage(infeasible):
            other = self.increase(last, infeasible)
        else:
            other = self.decrease(last, feasible)
        return self.pick_cheaper(feasible, other)

    def _record_split(self, kind: str, j: int, processed: int,
                      entry_offset: Fraction, infeasible, feasible) -> None:
        self.trace.split_vertices.append(j)
        off_in = abs(self.coverage(infeasible) - self.target)
        off_fe = abs(self.coverage(feasible) - self.target)
        record = SplitRecord(j, processed, entry_offset, off_in, off_fe)
        self.trace.splits.append(record)
        if processed >= 2 and entry_offset < 3 * min(off_in, off_fe):
            raise InternalInvariantError(
                f"multi-child split at {j} shrank the offset only from "
                f"{entry_offset} to {min(off_in, off_fe)}")


def increase(j: int, D, context: MergeContext) -> Cover:
    """Grow an infeasible cover using the subtree at j (entry contract
    asserted): returns a feasible cover inside the union."""
    return Cover.of(context.increase(j, frozenset(D)))


def decrease(j: int, D, context: MergeContext) -> Cover:
    """Shrink an overshooting cover using the subtree at j (entry contract
    asserted): returns a feasible cover inside the union."""
    return Cover.of(context.decrease(j, frozenset(D)))


def merge(graph: MergerGraph, pruned_minus: Cover, pruned: Cover,
          instance: Instance, target=None) -> tuple[Cover, MergeTrace]:
    """Produce a feasible cover inside the union of the two pruned covers.

    Precondition: covered(pruned_minus) < P <= covered(pruned).  If the
    lower cover already reaches the target it is returned unchanged.
    """
    P = Fraction(instance.target if target is None else target)
    union = Cover.of(pruned_minus.as_set() | pruned.as_set())
    benefits = absolute_benefits(instance, union)
    run = MergeContext(graph, instance, P, benefits)
    trace = run.trace

    low = frozenset(pruned_minus.as_set())
    high = frozenset(pruned.as_set())
    if covered_profit(instance, pruned_minus) >= P:
        trace.immediate = "lower cover already feasible"
        trace.final = pruned_minus
        return pruned_minus, trace
    if covered_profit(instance, pruned) < P:
        raise InputError(f"upper cover misses the target: "
                         f"{covered_profit(instance, pruned)} < {P}")

    D = low
    ordered_roots = sorted(graph.roots, key=lambda r: min(graph.subtree(r)))
    for r in ordered_roots:
        flipped = run.flip(D, r)
        if covered_profit(instance, Cover.of(flipped)) <= P:
            D = flipped
            trace.root_flips += 1
        else:
            final = Cover.of(run.increase(r, D))
            trace.final = final
            _check_final(instance, final, union, P)
            return final, trace

    if D != high:
        raise InternalInvariantError("all roots flipped but D differs from the upper cover")
    if covered_profit(instance, Cover.of(D)) < P:
        raise InternalInvariantError("merge exhausted all roots while infeasible")
    trace.immediate = "all roots flipped (exact boundary)"
    final = Cover.of(D)
    trace.final = final
    _check_final(instance, final, union, P)
    return final, trace


def _check_final(instance: Instance, final: Cover, union: Cover, P: Fraction) -> None:
    if covered_profit(instance, final) < P:
        raise InternalInvariantError("merge returned an infeasible cover")
    if not final.as_set() <= union.as_set():
        raise InternalInvariantError("merge returned sets outside the union")


@dataclass(frozen=True)
class MergeBoundAudit:
    ok: bool
    per_k: tuple[tuple[int, Fraction, bool], ...]  # (k, bound, holds)
    tightest_k: int | None
    detail: str = ""


def audit_merge_bound(trace: MergeTrace, instance: Instance, dual_value_dl,
                      k_max: int = 10) -> MergeBoundAudit:
    """Check cost(final) <= (1 + 3**(1-k)) * DL + k * c_max for k = 1..k_max.

    Exact rational arithmetic; reports the k with the smallest right-hand
    side among those that hold.
    """
    if trace.final is None:
        raise InputError("trace has no final cover")
    dl = Fraction(dual_value_dl)
    cost = cover_cost(instance, trace.final)
    c_max = instance.max_cost()
    per_k = []
    ok = True
    tightest = None
    tightest_bound = None
    for k in range(1, k_max + 1):
        bound = (1 + Fraction(1, 3 ** (k - 1))) * dl + k * c_max
        holds = cost <= bound
        per_k.append((k, bound, holds))
        ok = ok and holds
        if holds and (tightest_bound is None or bound < tightest_bound):
            tightest_bound = bound
            tightest = k
    detail = "" if ok else f"cost {cost} breaks the bound at some k <= {k_max}"
    return MergeBoundAudit(ok, tuple(per_k), tightest, detail)

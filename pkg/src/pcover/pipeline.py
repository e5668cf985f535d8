"""End-to-end solvers, exhaustive oracles, and the black-box adversary.

`solve_partial_tbc` chains the full machinery: reorder into greedy
standard form, locate the threshold multiplier, build the merger graph,
and combine the two bracketing covers, auditing every certificate along
the way.  `solve_rho_separable` reduces a decomposable instance to a
totally balanced one through the fractional optimum, and
`absorb_additive_error` removes the additive cost term by enumerating
small set prefixes.  The exhaustive oracles are deliberately independent
of the solver path so they can referee it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

from .arith import as_rational
from .errors import (AuditError, InfeasibleError, InputError,
                     InternalInvariantError, check_guard)
from .generators import BlackboxFamily, gen_blackbox_family, Lcg
from .kolen import KolenResult, audit_optimality, kolen
from .lp import dual_value, is_dual_feasible, solve_dual, solve_lp
from .merger import (MergerGraph, audit_merge_bound, build_merger_graph,
                     merge)
from .model import (Cover, Decomposition, Instance, cover_cost,
                    covered_profit, permute_instance, sub_instance)
from .tb import standard_greedy_form
from .threshold import ThresholdResult, find_threshold, kolen_call_budget

BRUTE_FORCE_LIMIT = 24
ABSORB_ENUM_LIMIT = 10 ** 6


def to_greedy_form(instance: Instance):
    """Permute an instance into greedy standard form.

    Returns (permuted instance, permutation).  Raises InputError when the
    matrix is not totally balanced.
    """
    sgf = standard_greedy_form(instance.rows)
    if not sgf.ok:
        raise InputError("matrix is not totally balanced: no greedy standard "
                         f"form exists (search mode: {sgf.mode})")
    return permute_instance(instance, sgf.perm), sgf.perm


@dataclass
class SolveReport:
    """Everything a solve run produced, audits included."""

    cover: Cover
    cost: Fraction
    covered: Fraction
    dl_value: Fraction
    lp_value: Fraction | None
    k_used: int
    splits: int
    exact_hit: bool
    lambda_star: Fraction
    kolen_calls: int
    single_block: bool
    audits: dict[str, bool]
    ratio_vs_oracle: Fraction | None = None
    oracle_cost: Fraction | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def payload(self) -> dict:
        """Deterministic JSON-able view; timings deliberately excluded."""
        return {
            "cover": list(self.cover.sets),
            "cost": str(self.cost),
            "covered": str(self.covered),
            "dl_value": str(self.dl_value),
            "lp_value": None if self.lp_value is None else str(self.lp_value),
            "k_used": self.k_used,
            "splits": self.splits,
            "exact_hit": self.exact_hit,
            "lambda_star": str(self.lambda_star),
            "kolen_calls": self.kolen_calls,
            "single_block": self.single_block,
            "audits": dict(sorted(self.audits.items())),
            "ratio_vs_oracle": None if self.ratio_vs_oracle is None else str(self.ratio_vs_oracle),
            "oracle_cost": None if self.oracle_cost is None else str(self.oracle_cost),
        }


def _threshold_dl(instance: Instance, thr: ThresholdResult) -> Fraction:
    """Dual objective of the threshold run's value components."""
    run = thr.exact_hit if thr.exact_hit is not None else thr.at_star
    total = sum((yi.value for yi in run.dual.y), Fraction(0))
    budget = instance.total_profit() - instance.target
    return total - budget * thr.lambda_star


def _single_blocks(rows) -> bool:
    for row in rows:
        mask = 0
        for j, v in enumerate(row):
            if v:
                mask |= 1 << j
        if mask:
            low = mask & -mask
            shifted = mask // low
            if shifted & (shifted + 1):
                return False
    return True


def lemma_witness_check(instance: Instance, graph: MergerGraph,
                        below: KolenResult, above: KolenResult) -> bool:
    """Cross-solution witness for under-capped elements.

    Every element whose dual value sits strictly below its penalty cap
    must see a set from each pruned cover that are equal or joined by a
    merger edge.
    """
    lam_value = above.dual.lam.value
    edge_set = set(graph.edges)
    pm = below.pruned.as_set()
    pp = above.pruned.as_set()
    for i in range(instance.n):
        if above.dual.y[i].value >= lam_value * instance.profits[i]:
            continue
        sets_i = instance.sets_of_element(i)
        plus_hits = [j for j in sets_i if j in pp]
        minus_hits = [j for j in sets_i if j in pm]
        ok = False
        for j1 in plus_hits:
            for j2 in minus_hits:
                if j1 == j2 or (j1, j2) in edge_set or (j2, j1) in edge_set:
                    ok = True
                    break
            if ok:
                break
        if not ok:
            return False
    return True


def solve_partial_tbc(instance: Instance, k: int = 4, *, with_lp: bool = False,
                      oracle: bool = False) -> SolveReport:
    """Solve a totally balanced partial-cover instance with audits.

    Raises InputError when the matrix is not totally balanced,
    InfeasibleError when the target is unattainable, and AuditError if any
    runtime certificate fails (which would signal a bug, not bad input).
    """
    t0 = time.perf_counter()
    work, perm = to_greedy_form(instance)
    t_sgf = time.perf_counter()

    thr = find_threshold(work)
    t_thr = time.perf_counter()

    audits: dict[str, bool] = {}
    if thr.exact_hit is not None:
        run = thr.exact_hit
        audits["dual_optimality"] = audit_optimality(work, run.dual.lam, run).ok
        dl = _threshold_dl(work, thr)
        final_work = run.pruned
        audits["exact_hit_identity"] = cover_cost(work, final_work) == dl
        splits = 0
    else:
        low_run, high_run = thr.merge_pair(work.target)
        perturbed = thr.below if low_run is thr.below else thr.at_or_above
        audits["dual_optimality_low"] = audit_optimality(work, low_run.dual.lam, low_run).ok
        audits["dual_optimality_high"] = audit_optimality(work, high_run.dual.lam, high_run).ok
        audits["tight_inclusion"] = perturbed.tight.as_set() <= thr.at_star.tight.as_set()
        audits["value_parts_match"] = all(
            yl.value == yh.value for yl, yh in zip(low_run.dual.y, high_run.dual.y))
        graph = build_merger_graph(work, low_run.pruned, high_run.pruned,
                                   low_run.dual, high_run.dual)
        audits["coverage_witness"] = lemma_witness_check(work, graph, low_run, high_run)
        final_work, trace = merge(graph, low_run.pruned, high_run.pruned, work)
        dl = _threshold_dl(work, thr)
        bound = audit_merge_bound(trace, work, dl, k_max=10)
        audits["merge_bound"] = bound.ok
        splits = len(trace.splits)
    t_merge = time.perf_counter()

    inv = perm.inverse()
    cover = Cover.of(inv.col_perm[j] for j in final_work.sets)
    cost = cover_cost(instance, cover)
    covered = covered_profit(instance, cover)
    audits["feasible"] = covered >= instance.target

    lp_value = None
    if with_lp:
        primal = solve_lp(instance)
        dual = solve_dual(instance)
        lp_value = primal.value
        audits["strong_duality"] = primal.value == dual.value
        audits["dl_le_lp"] = dl <= lp_value

    single_block = _single_blocks(work.rows)
    if single_block and lp_value is not None:
        audits["single_block_bound"] = cost <= lp_value + instance.max_cost()

    ratio = None
    oracle_cost = None
    if oracle:
        _, oracle_cost = brute_force_partial(instance)
        ratio = cost / oracle_cost if oracle_cost else None
        audits["at_least_oracle"] = cost >= oracle_cost

    failed = sorted(name for name, ok in audits.items() if not ok)
    if failed:
        raise AuditError(f"solve audits failed: {', '.join(failed)}")

    t_end = time.perf_counter()
    return SolveReport(
        cover=cover, cost=cost, covered=covered, dl_value=dl,
        lp_value=lp_value, k_used=k, splits=splits,
        exact_hit=thr.exact_hit is not None, lambda_star=thr.lambda_star,
        kolen_calls=thr.kolen_calls, single_block=single_block,
        audits=audits, ratio_vs_oracle=ratio, oracle_cost=oracle_cost,
        timings={"greedy_form": t_sgf - t0, "threshold": t_thr - t_sgf,
                 "merge": t_merge - t_thr, "total": t_end - t0})


def solve_rho_separable(instance: Instance, decomposition: Decomposition,
                        k: int = 4, *, oracle: bool = False) -> SolveReport:
    """Reduce through the fractional optimum to one totally balanced row set.

    For each element, some decomposition part must carry at least a 1/rho
    share of its fractional coverage; the row-induced matrix built from
    those parts is solved instead, and its cover is feasible for the
    original matrix.
    """
    decomposition.validate_against(instance.rows)
    rho = decomposition.rho
    primal = solve_lp(instance)
    dual = solve_dual(instance)
    if primal.value != dual.value:
        raise AuditError("strong duality failed on the original relaxation")

    b_rows = []
    for i in range(instance.n):
        need = (1 - primal.r[i]) / rho
        pick = None
        for q, part in enumerate(decomposition.parts):
            share = sum((primal.x[j] for j in range(instance.m) if part[i][j]),
                        Fraction(0))
            if share >= need:
                pick = q
                break
        if pick is None:
            raise InternalInvariantError(
                f"no decomposition part reaches the 1/{rho} share at element {i}")
        b_rows.append(tuple(decomposition.parts[pick][i]))

    reduced = Instance(tuple(b_rows), instance.costs, instance.profits,
                       instance.target)
    report = solve_partial_tbc(reduced, k)

    covered_original = covered_profit(instance, report.cover)
    audits = dict(report.audits)
    audits["feasible_for_original"] = covered_original >= instance.target
    audits["rho_lp_bound"] = report.cost <= (
        (1 + Fraction(1, 3 ** (k - 1))) * rho * primal.value
        + k * instance.max_cost())
    single_block = _single_blocks(b_rows)
    if single_block and reduced.rows == instance.rows:
        audits["single_block_bound"] = report.cost <= primal.value + instance.max_cost()

    ratio = None
    oracle_cost = None
    if oracle:
        _, oracle_cost = brute_force_partial(instance)
        ratio = report.cost / oracle_cost if oracle_cost else None

    failed = sorted(name for name, ok in audits.items() if not ok)
    if failed:
        raise AuditError(f"separable solve audits failed: {', '.join(failed)}")

    return SolveReport(
        cover=report.cover, cost=report.cost, covered=covered_original,
        dl_value=report.dl_value, lp_value=primal.value, k_used=k,
        splits=report.splits, exact_hit=report.exact_hit,
        lambda_star=report.lambda_star, kolen_calls=report.kolen_calls,
        single_block=single_block, audits=audits, ratio_vs_oracle=ratio,
        oracle_cost=oracle_cost, timings=report.timings)


def absorb_additive_error(instance: Instance, k: int, alpha,
                          decomposition: Decomposition | None = None) -> Cover:
    """Trade the additive c_max term for enumeration of small set prefixes.

    Runs the base solver on every reduced instance obtained by committing
    to a size-s subset X of sets (s = ceil(k / (alpha - 1))), dropping the
    sets costlier than X's cheapest member, the elements X covers, and
    X's profit from the target.  The cheapest feasible combination wins;
    the plain solve always participates, so the result never costs more
    than it.
    """
    alpha = as_rational(alpha)
    if alpha <= 1:
        raise InputError(f"alpha must exceed 1, got {alpha}")
    ratio = Fraction(k) / (alpha - 1)
    s = -((-ratio.numerator) // ratio.denominator)  # exact ceiling
    check_guard(comb(instance.m, s) <= ABSORB_ENUM_LIMIT,
                f"absorption would enumerate C({instance.m}, {s}) subsets")

    def base_solve(inst: Instance, dec: Decomposition | None) -> SolveReport:
        if dec is None:
            return solve_partial_tbc(inst, k)
        return solve_rho_separable(inst, dec, k)

    plain = base_solve(instance, decomposition)
    best_cost = plain.cost
    best_sets = tuple(plain.cover.sets)

    if s == 0:
        return plain.cover

    memo: dict = {}
    for X in combinations(range(instance.m), s):
        cost_x = sum((instance.costs[j] for j in X), Fraction(0))
        if cost_x >= best_cost:
            continue
        threshold_cost = min(instance.costs[j] for j in X)
        keep_cols = tuple(j for j in range(instance.m)
                          if j not in X and instance.costs[j] <= threshold_cost)
        covered_x = 0
        for j in X:
            covered_x |= instance.col_masks[j]
        keep_rows = tuple(i for i in range(instance.n)
                          if not (covered_x >> i & 1))
        profit_x = instance.profit_of_element_mask(covered_x)
        new_target = instance.target - profit_x

        if new_target <= 0:
            candidate_cost = cost_x
            candidate_sets = tuple(sorted(X))
        else:
            key = (keep_cols, keep_rows, new_target)
            if key not in memo:
                reduced = sub_instance(instance, keep_rows, keep_cols, new_target)
                dec = (decomposition.restrict(keep_rows, keep_cols)
                       if decomposition is not None else None)
                try:
                    rep = base_solve(reduced, dec)
                    memo[key] = (rep.cost, rep.cover.sets)
                except InfeasibleError:
                    memo[key] = None
            cached = memo[key]
            if cached is None:
                continue
            inner_cost, inner_sets = cached
            candidate_cost = cost_x + inner_cost
            candidate_sets = tuple(sorted(set(X) | {keep_cols[j] for j in inner_sets}))

        if (candidate_cost, candidate_sets) < (best_cost, best_sets):
            best_cost = candidate_cost
            best_sets = candidate_sets

    best = Cover.of(best_sets)
    if covered_profit(instance, best) < instance.target:
        raise InternalInvariantError("absorption produced an infeasible cover")
    return best


# ---------------------------------------------------------------------------
# Exhaustive oracles.
# ---------------------------------------------------------------------------


def _scaled_ints(values) -> tuple[list[int], int]:
    denom = 1
    for v in values:
        denom = denom * v.denominator // _gcd(denom, v.denominator)
    return [int(v * denom) for v in values], denom


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def brute_force_partial(instance: Instance) -> tuple[Cover, Fraction]:
    """Exhaustive minimum-cost feasible cover; ties break lexicographically."""
    m = instance.m
    check_guard(m <= BRUTE_FORCE_LIMIT,
                f"brute force limited to {BRUTE_FORCE_LIMIT} sets, got {m}")
    profit_scaled, p_denom = _scaled_ints(list(instance.profits) + [instance.target])
    target_scaled = profit_scaled[-1]
    profit_scaled = profit_scaled[:-1]
    cost_scaled, c_denom = _scaled_ints(list(instance.costs))

    profit_of: dict[int, int] = {}

    def mask_profit(mask: int) -> int:
        if mask not in profit_of:
            total = 0
            rest = mask
            while rest:
                low = rest & -rest
                total += profit_scaled[low.bit_length() - 1]
                rest ^= low
            profit_of[mask] = total
        return profit_of[mask]

    suffix_mask = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        suffix_mask[j] = suffix_mask[j + 1] | instance.col_masks[j]

    best: list = [None, None]  # scaled cost, sorted sets tuple

    def dfs(j: int, cost: int, covered: int, chosen: list[int]) -> None:
        if best[0] is not None and cost > best[0]:
            return
        if mask_profit(covered) >= target_scaled:
            key = (cost, tuple(chosen))
            if best[0] is None or key < (best[0], best[1]):
                best[0], best[1] = key
            return
        if j == m:
            return
        if mask_profit(covered | suffix_mask[j]) < target_scaled:
            return
        chosen.append(j)
        dfs(j + 1, cost + cost_scaled[j], covered | instance.col_masks[j], chosen)
        chosen.pop()
        dfs(j + 1, cost, covered, chosen)

    dfs(0, 0, 0, [])
    if best[0] is None:
        raise InfeasibleError("no subset of sets reaches the target")
    return Cover.of(best[1]), Fraction(best[0], c_denom)


def brute_force_prize_collecting(instance: Instance, lam) -> Fraction:
    """Exact minimum of cost plus lam-weighted uncovered profit."""
    m = instance.m
    check_guard(m <= BRUTE_FORCE_LIMIT,
                f"brute force limited to {BRUTE_FORCE_LIMIT} sets, got {m}")
    lam = as_rational(lam)
    penalties = [lam * p for p in instance.profits]
    scaled, denom = _scaled_ints(list(instance.costs) + penalties)
    cost_scaled = scaled[:m]
    pen_scaled = scaled[m:]

    pen_of: dict[int, int] = {}
    total_pen = sum(pen_scaled)

    def mask_pen(mask: int) -> int:
        if mask not in pen_of:
            total = 0
            rest = mask
            while rest:
                low = rest & -rest
                total += pen_scaled[low.bit_length() - 1]
                rest ^= low
            pen_of[mask] = total
        return pen_of[mask]

    best = [total_pen]  # empty cover

    def dfs(j: int, cost: int, covered: int) -> None:
        if cost >= best[0]:
            return
        value = cost + total_pen - mask_pen(covered)
        if value < best[0]:
            best[0] = value
        if j == m:
            return
        dfs(j + 1, cost + cost_scaled[j], covered | instance.col_masks[j])
        dfs(j + 1, cost, covered)

    dfs(0, 0, 0)
    return Fraction(best[0], denom)


# ---------------------------------------------------------------------------
# Black-box lower-bound simulation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlackBoxEntry:
    lam: Fraction
    kind: str  # "empty" | "A" | "B"
    sets: tuple[int, ...]
    lmp_lhs: Fraction
    lmp_rhs: Fraction
    lmp_ok: bool


@dataclass(frozen=True)
class BlackBoxTranscript:
    q: int
    alpha: Fraction
    variant: str
    schedule: tuple[Fraction, ...]
    entries: tuple[BlackBoxEntry, ...]
    union_sets: tuple[int, ...]
    best_cost: Fraction
    best_sets: tuple[int, ...]
    opt_cost: Fraction
    ratio: Fraction
    lmp_all_ok: bool


def _blackbox_boundaries(fam: BlackboxFamily) -> dict[str, Fraction]:
    pu = fam.instance.total_profit()
    c_a, c_b, c_o = fam.cost_a, fam.cost_b, fam.opt_cost
    u_a, u_o = fam.uncovered_a, fam.uncovered_o
    out = {
        "ea": c_a / (pu - u_a),
        "ao": (c_o - c_a) / (u_a - u_o),
        "ob": (c_b - c_o) / u_o,
        "eo": c_o / (pu - u_o),
        "tie": (fam.alpha * c_o - c_a) / (fam.alpha * (u_a - u_o)),
    }
    return out


def default_blackbox_schedule(fam: BlackboxFamily) -> tuple[Fraction, ...]:
    b = _blackbox_boundaries(fam)
    points = {
        b["ea"] / 2, b["ea"], (b["ea"] + b["ao"]) / 2, b["ao"],
        b["eo"], (b["eo"] + b["tie"]) / 2, b["tie"],
        (b["tie"] + b["ob"]) / 2, b["ob"], 2 * b["ob"],
    }
    return tuple(sorted(p for p in points if p >= 0))


def simulate_blackbox_lb(q: int, alpha, lambda_schedule=None,
                         variant: str = "general") -> BlackBoxTranscript:
    """Adversarial multiplier-preserving oracle plus exhaustive combination.

    For every scheduled multiplier the adversary answers with the empty
    cover, the A-sets, or the B-sets, never a set from the optimum, while
    exactly satisfying the multiplier-preserving inequality.  The best
    cover assembled from everything it ever returned is then found by
    exhaustive search and compared against the true optimum.
    """
    fam = gen_blackbox_family(q, alpha, variant)
    inst = fam.instance
    alpha = fam.alpha
    pu = inst.total_profit()
    boundaries = _blackbox_boundaries(fam)
    tie = boundaries["tie"]
    if lambda_schedule is None:
        schedule = default_blackbox_schedule(fam)
    else:
        schedule = tuple(sorted({as_rational(l) for l in lambda_schedule}))
        if any(l < 0 for l in schedule):
            raise InputError("negative multiplier in schedule")

    entries = []
    union: set[int] = set()
    for lam in schedule:
        values = {
            "empty": lam * pu,
            "A": fam.cost_a + lam * fam.uncovered_a,
            "B": fam.cost_b,
            "O": fam.opt_cost + lam * fam.uncovered_o,
        }
        opt_pc = min(values.values())
        if values["empty"] == opt_pc:
            kind = "empty"
        elif values["A"] == opt_pc:
            kind = "A"
        elif values["B"] == opt_pc:
            kind = "B"
        else:
            kind = "A" if lam <= tie else "B"
        if kind == "empty":
            sets: tuple[int, ...] = ()
            covered = Fraction(0)
            cost = Fraction(0)
        elif kind == "A":
            sets = fam.a_cols
            covered = pu - fam.uncovered_a
            cost = fam.cost_a
        else:
            sets = fam.b_cols
            covered = pu
            cost = fam.cost_b
        lhs = cost + alpha * lam * (pu - covered)
        rhs = alpha * opt_pc
        entries.append(BlackBoxEntry(lam, kind, sets, lhs, rhs, lhs <= rhs))
        union.update(sets)

    union_sets = tuple(sorted(union))
    best_cost = None
    best_sets: tuple[int, ...] | None = None
    for r in range(len(union_sets) + 1):
        for combo in combinations(union_sets, r):
            if covered_profit(inst, Cover.of(combo)) >= inst.target:
                cost = cover_cost(inst, Cover.of(combo))
                key = (cost, combo)
                if best_cost is None or key < (best_cost, best_sets):
                    best_cost, best_sets = key
    if best_cost is None:
        raise InfeasibleError("the returned sets cannot reach the target")

    _, opt_cost = brute_force_partial(inst)
    if opt_cost != fam.opt_cost:
        raise InternalInvariantError(
            f"exhaustive optimum {opt_cost} differs from the construction's "
            f"{fam.opt_cost}")

    return BlackBoxTranscript(
        q=q, alpha=alpha, variant=variant, schedule=schedule,
        entries=tuple(entries), union_sets=union_sets,
        best_cost=best_cost, best_sets=best_sets, opt_cost=opt_cost,
        ratio=best_cost / opt_cost,
        lmp_all_ok=all(e.lmp_ok for e in entries))


# ---------------------------------------------------------------------------
# Equitable coloring.
# ---------------------------------------------------------------------------


def equitable_coloring_check(matrix, samples: int = 20, roles=None,
                             seed: int = 0) -> bool:
    """Red/blue column balance check on sampled submatrices.

    With `roles` (per-column ("O"|"A"|"B", index) tags) the constructive
    coloring is used: A columns blue; for each index with both its B and O
    column present, B red and O blue; a lone survivor red.  Without roles,
    all 2**m colorings are tried (guarded).  Returns False as report
    content, never raises for imbalance.
    """
    rows = tuple(tuple(int(v) for v in row) for row in matrix)
    n = len(rows)
    m = len(rows[0]) if rows else 0

    def balanced(row_idx, col_idx, red: set[int]) -> bool:
        for i in row_idx:
            blue_ones = sum(1 for j in col_idx if rows[i][j] and j not in red)
            red_ones = sum(1 for j in col_idx if rows[i][j] and j in red)
            if abs(blue_ones - red_ones) > 1:
                return False
        return True

    if roles is None:
        check_guard(m <= 20, f"exhaustive coloring limited to 20 columns, got {m}")
        all_rows = tuple(range(n))
        all_cols = tuple(range(m))
        for bits in range(1 << m):
            red = {j for j in range(m) if bits >> j & 1}
            if balanced(all_rows, all_cols, red):
                return True
        return False

    def constructive(col_idx) -> set[int]:
        present: dict[int, dict[str, int]] = {}
        red: set[int] = set()
        for j in col_idx:
            kind, idx = roles[j]
            if kind in ("B", "O"):
                present.setdefault(idx, {})[kind] = j
        for idx, pair in present.items():
            if "B" in pair and "O" in pair:
                red.add(pair["B"])
            else:
                red.add(next(iter(pair.values())))
        return red

    rng = Lcg(seed ^ 0xC010)
    samples_list = [(tuple(range(n)), tuple(range(m)))]
    for _ in range(samples):
        row_idx = tuple(i for i in range(n) if rng.below(2))
        col_idx = tuple(j for j in range(m) if rng.below(2))
        if row_idx and col_idx:
            samples_list.append((row_idx, col_idx))
    for row_idx, col_idx in samples_list:
        if not balanced(row_idx, col_idx, constructive(col_idx)):
            return False
    return True


# ---------------------------------------------------------------------------
# Shared corpus auditor (randomized acceptance checks and experiments).
# ---------------------------------------------------------------------------

CORPUS_LAMBDAS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1),
                  Fraction(2), Fraction(10))


def audit_corpus_entry(seed: int) -> dict:
    """Run the full audit battery on one seeded corpus instance.

    Returns a deterministic, JSON-able dict of check outcomes; every
    boolean in it is expected to be True.
    """
    from .generators import corpus_instance
    from .kolen import prize_collecting_value

    instance = corpus_instance(seed)
    work, _perm = to_greedy_form(instance)
    out: dict = {"seed": seed, "n": instance.n, "m": instance.m,
                 "target": str(instance.target)}
    checks: dict[str, bool] = {}

    exact_flags = []
    for lam in CORPUS_LAMBDAS:
        run = kolen(work, lam)
        value = prize_collecting_value(work, lam, run)
        oracle = brute_force_prize_collecting(work, lam)
        exact_flags.append(value.delta == 0 and value.value == oracle)
    checks["kolen_exact"] = all(exact_flags)

    thr = find_threshold(work)
    out["kolen_calls"] = thr.kolen_calls
    out["lambda_star"] = str(thr.lambda_star)
    out["exact_hit"] = thr.exact_hit is not None
    checks["calls_within_budget"] = thr.kolen_calls <= kolen_call_budget(work)

    if thr.exact_hit is not None:
        run = thr.exact_hit
        dl = _threshold_dl(work, thr)
        cov = covered_profit(work, run.pruned)
        checks["threshold_contract"] = (cov >= work.target
                                        and cover_cost(work, run.pruned) == dl)
        checks["opt_audit"] = audit_optimality(work, run.dual.lam, run).ok
        out["splits"] = 0
        final = run.pruned
    else:
        below, above = thr.below, thr.at_or_above
        cov_below = covered_profit(work, below.pruned)
        cov_above = covered_profit(work, above.pruned)
        checks["threshold_contract"] = cov_below < work.target <= cov_above
        low_run, high_run = thr.merge_pair(work.target)
        perturbed = thr.below if low_run is thr.below else thr.at_or_above
        checks["opt_audit"] = (audit_optimality(work, low_run.dual.lam, low_run).ok
                               and audit_optimality(work, high_run.dual.lam, high_run).ok)
        checks["tight_inclusion"] = perturbed.tight.as_set() <= thr.at_star.tight.as_set()
        checks["value_parts_match"] = all(
            yl.value == yh.value for yl, yh in zip(low_run.dual.y, high_run.dual.y))
        graph = build_merger_graph(work, low_run.pruned, high_run.pruned,
                                   low_run.dual, high_run.dual)
        checks["merger_graph_ok"] = True  # construction validates shape
        checks["coverage_witness"] = lemma_witness_check(work, graph, low_run, high_run)
        final, trace = merge(graph, low_run.pruned, high_run.pruned, work)
        out["splits"] = len(trace.splits)
        dl = _threshold_dl(work, thr)
        checks["merge_bound"] = audit_merge_bound(trace, work, dl, k_max=10).ok

    out["cost"] = str(cover_cost(work, final))
    out["dl_value"] = str(dl)
    primal = solve_lp(work)
    dual = solve_dual(work)
    out["lp_value"] = str(primal.value)
    checks["strong_duality"] = primal.value == dual.value
    checks["dl_le_lp"] = dl <= primal.value
    y_values = [yi.value for yi in (thr.exact_hit or thr.at_star).dual.y]
    checks["threshold_dual_feasible"] = is_dual_feasible(work, y_values, thr.lambda_star)
    checks["threshold_dual_value_matches"] = dual_value(work, y_values, thr.lambda_star) == dl
    out["final_cover"] = list(final.sets)
    checks["feasible"] = covered_profit(work, final) >= work.target

    out["checks"] = dict(sorted(checks.items()))
    out["all_ok"] = all(checks.values())
    return out

"""Totally balanced matrices and their greedy standard form.

A 0/1 matrix is totally balanced when it has no square submatrix of order
at least 3 whose row and column sums are all 2 and whose columns are
pairwise distinct.  Such matrices, and only such matrices, can be reordered
so that no ordered pair of rows i1 < i2 and columns j1 < j2 induces the
2x2 pattern

    1 1
    1 0

An ordering with this property is called greedy standard form here, and a
matrix already free of the pattern is called gamma-free.

The reordering algorithm used is a simple nest-point elimination:

* A row is *simple* when the columns containing it, restricted to the rows
  not yet placed, form a chain under inclusion.  Placing a simple row next
  and ordering its columns by that chain makes the pattern impossible at
  that row.  The chain constraints collected over all steps are mutually
  consistent and acyclic, so a column order always exists once every row
  has been placed.
* Totally balanced matrices always contain a simple row, and the property
  is hereditary, so elimination runs to completion exactly on totally
  balanced inputs.  The cross-validation against the definitional check is
  part of the test suite.

Two cheap fast paths run first (an already-gamma-free matrix keeps the
identity ordering; a matrix whose rows are single contiguous blocks is
sorted by block endpoints), and an exhaustive search over row orders backs
the elimination up at very small sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

from .errors import InternalInvariantError, check_guard
from .model import MatrixRows, PermutationPair, col_bitmasks, row_bitmasks

EXHAUSTIVE_LIMIT = 8
TB_CHECK_LIMIT = 12


def _freeze(matrix) -> MatrixRows:
    return tuple(tuple(int(v) for v in row) for row in matrix)


@dataclass(frozen=True)
class GammaWitness:
    """Positions (i1 < i2, j1 < j2) inducing the forbidden 2x2 pattern."""

    rows: tuple[int, int]
    cols: tuple[int, int]


def gamma_witness(matrix) -> GammaWitness | None:
    """First (lexicographically smallest) occurrence of the pattern, if any."""
    rows = _freeze(matrix)
    masks = row_bitmasks(rows)
    n = len(rows)
    for i1 in range(n):
        for i2 in range(i1 + 1, n):
            common = masks[i1] & masks[i2]
            only_upper = masks[i1] & ~masks[i2]
            if not common or not only_upper:
                continue
            j1 = (common & -common).bit_length() - 1
            rest = only_upper >> (j1 + 1)
            if rest:
                j2 = j1 + 1 + (rest & -rest).bit_length() - 1
                return GammaWitness((i1, i2), (j1, j2))
    return None


def is_gamma_free(matrix) -> bool:
    return gamma_witness(matrix) is None


def is_totally_balanced(matrix, limit: int = TB_CHECK_LIMIT) -> bool:
    """Definitional check by direct submatrix search.

    Searches all square submatrices of order >= 3 for one with every row
    and column sum equal to 2 and pairwise distinct columns.  Exponential;
    guarded to dimensions <= `limit` and meant as a desk-scale oracle.
    """
    rows = _freeze(matrix)
    n = len(rows)
    m = len(rows[0]) if rows else 0
    check_guard(n <= limit and m <= limit,
                f"totally-balanced check limited to {limit}x{limit}, got {n}x{m}")
    row_masks = row_bitmasks(rows)
    col_masks = col_bitmasks(rows, m)
    for k in range(3, min(n, m) + 1):
        for row_subset in combinations(range(n), k):
            rmask = 0
            for i in row_subset:
                rmask |= 1 << i
            candidate_cols = [j for j in range(m)
                              if bin(col_masks[j] & rmask).count("1") == 2]
            if len(candidate_cols) < k:
                continue
            for col_subset in combinations(candidate_cols, k):
                cmask = 0
                for j in col_subset:
                    cmask |= 1 << j
                if any(bin(row_masks[i] & cmask).count("1") != 2 for i in row_subset):
                    continue
                supports = {col_masks[j] & rmask for j in col_subset}
                if len(supports) == k:
                    return False
    return True


@dataclass(frozen=True)
class SgfResult:
    """Outcome of the greedy-standard-form search.

    On success `perm` maps original to permuted indices and `matrix` is the
    permuted (gamma-free) matrix.  On failure `stuck_rows` names the row set
    at which nest-point elimination jammed, or is empty when the exhaustive
    search ran out of orderings.
    """

    ok: bool
    perm: PermutationPair | None = None
    matrix: MatrixRows | None = None
    mode: str = ""
    stuck_rows: tuple[int, ...] = ()


def _is_chain(supports: list[int]) -> bool:
    supports = sorted(supports, key=lambda s: bin(s).count("1"))
    return all(a & ~b == 0 for a, b in zip(supports, supports[1:]))


def _column_order(m: int, edges: set[tuple[int, int]]) -> list[int] | None:
    """Topological order of columns honoring strict chain edges.

    Ties break toward the smallest original index.  Returns None on a cycle
    (impossible for consistent chain constraints; treated as failure).
    """
    succ: dict[int, set[int]] = {j: set() for j in range(m)}
    indeg = [0] * m
    for a, b in edges:
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    import heapq

    heap = [j for j in range(m) if indeg[j] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        j = heapq.heappop(heap)
        order.append(j)
        for k in sorted(succ[j]):
            indeg[k] -= 1
            if indeg[k] == 0:
                heapq.heappush(heap, k)
    if len(order) != m:
        return None
    return order


def _chain_edges_for_row(i: int, cols: list[int], col_masks, suffix_mask: int,
                         edges: set[tuple[int, int]]) -> bool:
    """Check the chain condition for row i over `suffix_mask` rows.

    On success, record the strict-inclusion orderings the chain forces.
    """
    restricted = [(col_masks[j] & suffix_mask, j) for j in cols]
    restricted.sort(key=lambda t: (bin(t[0]).count("1"), t[1]))
    for (sa, ja), (sb, jb) in zip(restricted, restricted[1:]):
        if sa & ~sb:
            return False
    for idx, (sa, ja) in enumerate(restricted):
        for sb, jb in restricted[idx + 1:]:
            if sa != sb:
                edges.add((ja, jb))
            # equal restrictions leave the pair unconstrained
    return True


def _eliminate(rows: MatrixRows, n: int, m: int):
    """Nest-point elimination; returns (row_order, col_order) or stuck rows."""
    col_masks = list(col_bitmasks(rows, m))
    cols_of = [tuple(j for j, v in enumerate(row) if v) for row in rows]
    alive = set(range(n))
    alive_mask = (1 << n) - 1
    row_order: list[int] = []
    edges: set[tuple[int, int]] = set()
    while alive:
        chosen = -1
        for i in sorted(alive):
            supports = [col_masks[j] & alive_mask for j in cols_of[i]]
            if _is_chain(supports):
                chosen = i
                break
        if chosen < 0:
            return None, tuple(sorted(alive))
        _chain_edges_for_row(chosen, list(cols_of[chosen]), col_masks,
                             alive_mask, edges)
        alive.remove(chosen)
        alive_mask &= ~(1 << chosen)
        row_order.append(chosen)
    col_order = _column_order(m, edges)
    if col_order is None:
        raise InternalInvariantError("chain constraints formed a cycle")
    return (row_order, col_order), ()


def _exhaustive_row_search(rows: MatrixRows, n: int, m: int):
    """Try every row order; for each, chain conditions decide feasibility."""
    col_masks = list(col_bitmasks(rows, m))
    cols_of = [tuple(j for j, v in enumerate(row) if v) for row in rows]
    full = (1 << n) - 1
    for row_order in permutations(range(n)):
        edges: set[tuple[int, int]] = set()
        suffix = full
        ok = True
        for i in row_order:
            suffix &= ~(1 << i)
            if not _chain_edges_for_row(i, list(cols_of[i]), col_masks,
                                        suffix | (1 << i), edges):
                ok = False
                break
        if not ok:
            continue
        col_order = _column_order(m, edges)
        if col_order is not None:
            return list(row_order), col_order
    return None


def _perm_from_orders(row_order, col_order) -> PermutationPair:
    n, m = len(row_order), len(col_order)
    row_perm = [0] * n
    col_perm = [0] * m
    for pos, i in enumerate(row_order):
        row_perm[i] = pos
    for pos, j in enumerate(col_order):
        col_perm[j] = pos
    return PermutationPair(tuple(row_perm), tuple(col_perm))


def _single_blocks(rows: MatrixRows) -> bool:
    for mask in row_bitmasks(rows):
        if mask:
            low = mask & -mask
            shifted = mask // low
            if shifted & (shifted + 1):
                return False
    return True


def _block_sorted_order(rows: MatrixRows, n: int):
    masks = row_bitmasks(rows)

    def key(i):
        mask = masks[i]
        if not mask:
            return (-1, -1, i)
        right = mask.bit_length() - 1
        left = (mask & -mask).bit_length() - 1
        return (right, left, i)

    return sorted(range(n), key=key)


def standard_greedy_form(matrix) -> SgfResult:
    """Reorder into greedy standard form, or report that none exists.

    Deterministic: fast paths (identity ordering if already gamma-free,
    block-endpoint sort for interval-like rows), then nest-point
    elimination, then exhaustive row-order search for dimensions <= 8.
    Every success is certified gamma-free before returning.
    """
    rows = _freeze(matrix)
    n = len(rows)
    m = len(rows[0]) if rows else 0

    if gamma_witness(rows) is None:
        return SgfResult(True, PermutationPair.identity(n, m), rows, "identity")

    if _single_blocks(rows):
        perm = _perm_from_orders(_block_sorted_order(rows, n), list(range(m)))
        permuted = perm.apply_to_matrix(rows)
        if gamma_witness(permuted) is not None:
            raise InternalInvariantError("block-sorted interval matrix not gamma-free")
        return SgfResult(True, perm, permuted, "blocks")

    result, stuck = _eliminate(rows, n, m)
    if result is not None:
        perm = _perm_from_orders(*result)
        permuted = perm.apply_to_matrix(rows)
        if gamma_witness(permuted) is not None:
            raise InternalInvariantError("elimination ordering not gamma-free")
        return SgfResult(True, perm, permuted, "elimination")

    if min(n, m) <= EXHAUSTIVE_LIMIT:
        if m < n:
            transposed = tuple(tuple(rows[i][j] for i in range(n)) for j in range(m))
            sub = _exhaustive_row_search(transposed, m, n)
            if sub is not None:
                perm = _perm_from_orders(sub[1], sub[0])
                permuted = perm.apply_to_matrix(rows)
                if gamma_witness(permuted) is not None:
                    raise InternalInvariantError("exhaustive ordering not gamma-free")
                return SgfResult(True, perm, permuted, "exhaustive")
        else:
            found = _exhaustive_row_search(rows, n, m)
            if found is not None:
                perm = _perm_from_orders(*found)
                permuted = perm.apply_to_matrix(rows)
                if gamma_witness(permuted) is not None:
                    raise InternalInvariantError("exhaustive ordering not gamma-free")
                return SgfResult(True, perm, permuted, "exhaustive")
        return SgfResult(False, mode="exhausted", stuck_rows=())

    return SgfResult(False, mode="stuck", stuck_rows=stuck)

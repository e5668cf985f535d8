"""Line-oriented text formats for instances, decompositions, and trees.

All rationals render as 'num' or 'num/den'; parsing round-trips exactly.
Error messages carry 1-based line numbers.

Instance (.pcov):         Decomposition (.dec):      Tree (.tree):
    PCOV 1                     PCOVDEC 1                  TREE 1
    n m                        rho                        node_count
    P                          rho * n matrix lines       parent list (root = 0)
    m costs                                               edge costs
    n profits                                             s t profit   (per line)
    n matrix lines
Node ids in tree files are 1-based with parent 0 marking the root.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arith import format_rational, parse_rational
from .errors import InputError
from .generators import TreeInstance
from .model import Decomposition, Instance, make_instance

INSTANCE_MAGIC = "PCOV 1"
DECOMPOSITION_MAGIC = "PCOVDEC 1"
TREE_MAGIC = "TREE 1"
REPORT_SCHEMA = 1


class _Lines:
    def __init__(self, text: str):
        self.raw = text.splitlines()
        self.pos = 0

    def next(self, what: str) -> tuple[str, int]:
        while self.pos < len(self.raw):
            line = self.raw[self.pos].strip()
            self.pos += 1
            if line and not line.startswith("#"):
                return line, self.pos
        raise InputError(f"unexpected end of file, expected {what}",
                         line=len(self.raw) + 1)

    def rest(self):
        while self.pos < len(self.raw):
            line = self.raw[self.pos].strip()
            self.pos += 1
            if line and not line.startswith("#"):
                yield line, self.pos


def _rational(token: str, lineno: int) -> Fraction:
    try:
        return parse_rational(token)
    except ValueError as exc:
        raise InputError(str(exc), line=lineno) from exc


def _rationals(line: str, lineno: int, count: int, what: str) -> list[Fraction]:
    tokens = line.split()
    if len(tokens) != count:
        raise InputError(f"expected {count} {what}, found {len(tokens)}", line=lineno)
    return [_rational(t, lineno) for t in tokens]


def _int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError as exc:
        raise InputError(f"bad {what}: {token!r}", line=lineno) from exc


def _matrix_row(line: str, lineno: int, m: int) -> tuple[int, ...]:
    if len(line) != m:
        raise InputError(f"matrix row has {len(line)} characters, expected {m}",
                         line=lineno)
    row = []
    for col, ch in enumerate(line):
        if ch not in "01":
            raise InputError(f"matrix entry {ch!r}", line=lineno, column=col + 1)
        row.append(int(ch))
    return tuple(row)


def parse_instance(text: str) -> Instance:
    lines = _Lines(text)
    magic, lineno = lines.next("header")
    if magic != INSTANCE_MAGIC:
        raise InputError(f"bad header {magic!r}, expected {INSTANCE_MAGIC!r}",
                         line=lineno)
    dims, lineno = lines.next("dimensions")
    tokens = dims.split()
    if len(tokens) != 2:
        raise InputError("expected 'n m'", line=lineno)
    n = _int(tokens[0], lineno, "element count")
    m = _int(tokens[1], lineno, "set count")
    target_line, lineno = lines.next("target")
    target = _rational(target_line, lineno)
    costs_line, lineno = lines.next("costs")
    costs = _rationals(costs_line, lineno, m, "costs")
    profits_line, lineno = lines.next("profits")
    profits = _rationals(profits_line, lineno, n, "profits")
    rows = []
    for _ in range(n):
        line, lineno = lines.next("matrix row")
        rows.append(_matrix_row(line, lineno, m))
    return make_instance(rows, costs, profits, target)


def render_instance(instance: Instance) -> str:
    out = [INSTANCE_MAGIC,
           f"{instance.n} {instance.m}",
           format_rational(instance.target),
           " ".join(format_rational(c) for c in instance.costs),
           " ".join(format_rational(p) for p in instance.profits)]
    for row in instance.rows:
        out.append("".join(str(v) for v in row))
    return "\n".join(out) + "\n"


def parse_decomposition(text: str, n: int, m: int) -> Decomposition:
    lines = _Lines(text)
    magic, lineno = lines.next("header")
    if magic != DECOMPOSITION_MAGIC:
        raise InputError(f"bad header {magic!r}, expected {DECOMPOSITION_MAGIC!r}",
                         line=lineno)
    rho_line, lineno = lines.next("rho")
    rho = _int(rho_line, lineno, "rho")
    if rho < 1:
        raise InputError(f"rho must be positive, got {rho}", line=lineno)
    parts = []
    for _ in range(rho):
        rows = []
        for _ in range(n):
            line, lineno = lines.next("part row")
            rows.append(_matrix_row(line, lineno, m))
        parts.append(tuple(rows))
    return Decomposition(rho, tuple(parts))


def render_decomposition(dec: Decomposition) -> str:
    out = [DECOMPOSITION_MAGIC, str(dec.rho)]
    for part in dec.parts:
        for row in part:
            out.append("".join(str(v) for v in row))
    return "\n".join(out) + "\n"


def parse_tree(text: str) -> TreeInstance:
    lines = _Lines(text)
    magic, lineno = lines.next("header")
    if magic != TREE_MAGIC:
        raise InputError(f"bad header {magic!r}, expected {TREE_MAGIC!r}", line=lineno)
    count_line, lineno = lines.next("node count")
    count = _int(count_line, lineno, "node count")
    parents_line, lineno = lines.next("parent list")
    tokens = parents_line.split()
    if len(tokens) != count:
        raise InputError(f"expected {count} parents, found {len(tokens)}", line=lineno)
    raw_parents = [_int(t, lineno, "parent") for t in tokens]
    if raw_parents[0] != 0:
        raise InputError("first node must be the root (parent 0)", line=lineno)
    parents = [-1] + [p - 1 for p in raw_parents[1:]]
    for v, p in enumerate(parents[1:], start=1):
        if not 0 <= p < count:
            raise InputError(f"node {v + 1} has parent {p + 1} out of range",
                             line=lineno)
    costs_line, lineno = lines.next("edge costs")
    costs = _rationals(costs_line, lineno, count - 1, "edge costs")
    demands = []
    for line, lineno in lines.rest():
        tokens = line.split()
        if len(tokens) != 3:
            raise InputError("expected 's t profit'", line=lineno)
        s = _int(tokens[0], lineno, "endpoint") - 1
        t = _int(tokens[1], lineno, "endpoint") - 1
        profit = _rational(tokens[2], lineno)
        if not (0 <= s < count and 0 <= t < count):
            raise InputError("endpoint out of range", line=lineno)
        demands.append((s, t, profit))
    return TreeInstance(tuple(parents), tuple(costs), tuple(demands))


def render_tree(tree: TreeInstance) -> str:
    count = len(tree.parents)
    parents = ["0"] + [str(p + 1) for p in tree.parents[1:]]
    out = [TREE_MAGIC, str(count), " ".join(parents),
           " ".join(format_rational(c) for c in tree.edge_costs)]
    for s, t, profit in tree.demands:
        out.append(f"{s + 1} {t + 1} {format_rational(profit)}")
    return "\n".join(out) + "\n"


def render_report(payload: dict, timings: dict | None = None) -> str:
    """Stable JSON: schema tag, sorted keys, timings outside the payload."""
    doc = {"schema": REPORT_SCHEMA, "payload": payload}
    if timings is not None:
        doc["timings"] = timings
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def render_payload(payload: dict) -> str:
    """The comparison payload alone, byte-stable across runs."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"

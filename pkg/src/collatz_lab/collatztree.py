"""Finite pieces of the Collatz tree, the strata ``W_x`` and the Hotel graph.

The tree is grown from 1 by the inverse map: every ``v`` has the child
``2v`` and, when ``(v - 1) / 3`` is an odd integer other than 1, the child
``(v - 1) / 3``.  A node's depth is its Cl step count.

Stratum ``W_0`` is the powers of two; ``n`` lies in ``W_{x+1}`` when
``3 * oddpart(n) + 1`` lies in ``W_x``.  ``stratum`` follows that recursion
with a memo table and never consults the certificate code.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .numdomain import expo

__all__ = [
    "DEFAULT_MAX_DEPTH",
    "max_depth_limit",
    "children",
    "parent",
    "CollatzTree",
    "build_tree",
    "stratum",
    "StrataUnbounded",
    "StrataReport",
    "in_stratum",
    "check_strata_properties",
    "hotel_coords",
    "HotelGraph",
    "build_hotel",
    "tree_to_dot",
    "tree_to_json",
    "hotel_to_dot",
    "hotel_to_json",
    "export_graph",
]

DEFAULT_MAX_DEPTH = 30
MAX_DEPTH_ENV = "COLLATZ_LAB_MAX_DEPTH"


def max_depth_limit() -> int:
    raw = os.environ.get(MAX_DEPTH_ENV)
    if raw is None:
        return DEFAULT_MAX_DEPTH
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{MAX_DEPTH_ENV} must be an integer, got {raw!r}") from None


def children(v: int) -> list[int]:
    """Inverse-Collatz children of ``v``, even child first."""
    out = [2 * v]
    q, r = divmod(v - 1, 3)
    if r == 0 and q & 1 and q != 1:
        out.append(q)
    return out


def parent(v: int) -> int:
    """Image of ``v`` under the Collatz function (undefined at 1)."""
    if v <= 1:
        raise ValueError(f"{v} has no parent in the tree")
    return v >> 1 if v % 2 == 0 else 3 * v + 1


@dataclass
class CollatzTree:
    levels: list[list[int]]
    depth: dict[int, int]
    parent_of: dict[int, int]

    @property
    def max_depth(self) -> int:
        return len(self.levels) - 1

    def edges(self) -> list[tuple[int, int]]:
        """``(child, parent)`` pairs, i.e. edges pointing towards 1."""
        return sorted(self.parent_of.items(), key=lambda e: (self.depth[e[0]], e[0]))

    def children_of(self, v: int) -> list[int]:
        if self.depth[v] >= self.max_depth:
            return []
        return children(v)


def build_tree(max_depth: int, limit: int | None = None) -> CollatzTree:
    """Breadth-first expansion from 1 down to ``max_depth`` levels."""
    limit = max_depth_limit() if limit is None else limit
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    if max_depth > limit:
        raise ValueError(f"max_depth {max_depth} exceeds the limit {limit} "
                         f"(raise {MAX_DEPTH_ENV} to allow it)")
    levels = [[1]]
    depth = {1: 0}
    parent_of: dict[int, int] = {}
    for d in range(1, max_depth + 1):
        nxt = []
        for v in levels[-1]:
            for c in children(v):
                if c in depth:
                    raise AssertionError(f"{c} reached twice: the edge set is not a tree")
                depth[c] = d
                parent_of[c] = v
                nxt.append(c)
        levels.append(sorted(nxt))
    return CollatzTree(levels, depth, parent_of)


class StrataUnbounded(RuntimeError):
    """``n`` did not reach ``W_0`` within the stratum bound."""


_STRATUM_MEMO: dict[int, int] = {1: 0}


def stratum(n: int, bound: int = 10_000) -> int:
    """Index ``x`` with ``n`` in ``W_x``, by the defining recursion."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"stratum needs n >= 1, got {n!r}")
    memo = _STRATUM_MEMO
    chain = []
    v = n
    while True:
        m = v >> expo(v)
        hit = memo.get(m)
        if hit is not None:
            break
        if m == 1:
            hit = 0
            break
        chain.append(m)
        if len(chain) > bound:
            raise StrataUnbounded(f"n={n} needs more than {bound} odd steps")
        v = 3 * m + 1
    for m in reversed(chain):
        hit += 1
        memo[m] = hit
    return hit


@dataclass
class StrataReport:
    range_max: int
    passed: dict[str, int] = field(default_factory=dict)
    failed: dict[str, int] = field(default_factory=dict)
    witnesses: dict[str, int] = field(default_factory=dict)
    # the 3n+1 closure property is stated for j > 1; j = 1 is counted apart
    three_n_plus_one_j1: int = 0

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def _tally(self, name: str, good: bool, witness: int):
        if good:
            self.passed[name] = self.passed.get(name, 0) + 1
        else:
            self.failed[name] = self.failed.get(name, 0) + 1
            self.witnesses.setdefault(name, witness)


CHECKS = ("doubling", "four_a_plus_one", "disjoint", "three_n_plus_one", "partition")


def in_stratum(n: int, x: int) -> bool:
    """Literal membership test ``n in W_x``.

    ``W_{x+1}`` is only consulted for ``n`` outside ``W_0``; otherwise every
    power of two would also land in ``W_1`` through ``1 -> 4``.
    """
    v = n
    for _ in range(x):
        if v & (v - 1) == 0:
            return False
        v = 3 * (v >> expo(v)) + 1
    return v & (v - 1) == 0


def check_strata_properties(range_max: int, bound: int = 10_000) -> StrataReport:
    """Closure, disjointness and partition checks for the strata on ``1..range_max``.

    ``four_a_plus_one`` is checked for odd ``a`` in strata ``i >= 1``; the
    odd member of ``W_0`` (the number 1) is excluded since ``4*1+1 = 5`` is
    in ``W_1``.  ``three_n_plus_one`` is checked for ``j >= 1`` and the
    ``j = 1`` cases are counted separately.
    """
    rep = StrataReport(range_max)
    for name in CHECKS:
        rep.passed[name] = 0
        rep.failed[name] = 0
    for n in range(1, range_max + 1):
        try:
            s = stratum(n, bound)
        except StrataUnbounded:
            rep._tally("partition", False, n)
            continue
        is_pow2 = n & (n - 1) == 0
        rep._tally("partition", (s == 0) == is_pow2 and in_stratum(n, s), n)
        # neighbours of s and W_0 are the only candidates for a second home
        others = {0, s - 1, s + 1} - {s, -1}
        rep._tally("disjoint", not any(in_stratum(n, x) for x in others), n)
        rep._tally("doubling", stratum(2 * n, bound) == s, n)
        if n & 1 and s >= 1:
            rep._tally("four_a_plus_one", stratum(4 * n + 1, bound) == s, n)
            t = stratum(3 * n + 1, bound)
            rep._tally("three_n_plus_one", t == s - 1, n)
            if s == 1 and t == 0:
                rep.three_n_plus_one_j1 += 1
    return rep


# -- Hotel Collatz ----------------------------------------------------------

def hotel_coords(n: int) -> tuple[int, int]:
    """``(tower, floor)`` with ``n = 2**floor * (2*tower + 1)``."""
    floor = expo(n)
    return (n >> floor) >> 1, floor


@dataclass
class HotelGraph:
    n_max: int
    green: list[tuple[int, int]]
    red: list[tuple[int, int]]

    @property
    def vertices(self) -> range:
        return range(1, self.n_max + 1)

    def out_edges(self, v: int) -> list[tuple[int, int, str]]:
        out = [(a, b, "green") for a, b in self.green if a == v]
        out += [(a, b, "red") for a, b in self.red if a == v]
        return out


def build_hotel(n_max: int) -> HotelGraph:
    """Vertices ``1..n_max``; green ``2p -> p``, red ``k -> 3k+1`` for odd ``k != 1``.

    The red target may lie above ``n_max``; it is kept so that every vertex
    but 1 has exactly one outgoing edge.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    green = [(v, v // 2) for v in range(2, n_max + 1, 2)]
    red = [(v, 3 * v + 1) for v in range(3, n_max + 1, 2)]
    return HotelGraph(n_max, green, red)


# -- exporters --------------------------------------------------------------

def _edge_color(child: int) -> str:
    return "green" if child % 2 == 0 else "red"


def tree_to_dot(tree: CollatzTree) -> str:
    lines = ["digraph collatz_tree {", "  rankdir=BT;"]
    for d, level in enumerate(tree.levels):
        for v in level:
            lines.append(f'  "{v}" [depth={d}, stratum={stratum(v)}];')
    for c, p in tree.edges():
        lines.append(f'  "{c}" -> "{p}" [color={_edge_color(c)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_json(tree: CollatzTree) -> str:
    doc = {
        "kind": "tree",
        "max_depth": tree.max_depth,
        "levels": [[str(v) for v in level] for level in tree.levels],
        "adjacency": {str(v): [str(c) for c in tree.children_of(v)]
                      for level in tree.levels for v in level},
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def hotel_to_dot(g: HotelGraph) -> str:
    lines = ["digraph hotel_collatz {"]
    for v in g.vertices:
        tower, floor = hotel_coords(v)
        lines.append(f'  "{v}" [tower={tower}, floor={floor}];')
    edges = sorted([(a, b, "green") for a, b in g.green] + [(a, b, "red") for a, b in g.red])
    for a, b, color in edges:
        lines.append(f'  "{a}" -> "{b}" [color={color}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def hotel_to_json(g: HotelGraph) -> str:
    adjacency = {str(v): [] for v in g.vertices}
    for a, b in sorted(g.green + g.red):
        adjacency[str(a)].append({"to": str(b), "color": "green" if a % 2 == 0 else "red"})
    doc = {
        "kind": "hotel",
        "n_max": g.n_max,
        "coords": {str(v): dict(zip(("tower", "floor"), hotel_coords(v))) for v in g.vertices},
        "adjacency": adjacency,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def export_graph(kind: str, bound: int, fmt: str) -> str:
    """Render a tree (``bound`` = depth) or Hotel graph (``bound`` = n_max)."""
    if fmt not in ("dot", "json"):
        raise ValueError(f"unsupported format {fmt!r}")
    if kind == "tree":
        tree = build_tree(bound)
        return tree_to_dot(tree) if fmt == "dot" else tree_to_json(tree)
    if kind == "hotel":
        g = build_hotel(bound)
        return hotel_to_dot(g) if fmt == "dot" else hotel_to_json(g)
    raise ValueError(f"unsupported graph kind {kind!r}")

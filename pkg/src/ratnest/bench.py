"""Rows touched by inserts and moves: integer LV/RV nested sets vs rational keys.

"Rows touched" counts records whose persisted values change, new rows
included for rational inserts (always exactly one) and excluded for LV/RV
inserts, where the number reported is how many *existing* rows had to be
renumbered. The report also records the largest ``nv`` bit length seen at
each depth, which is the price the rational scheme pays.
"""

from __future__ import annotations

import io
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .core import ROOT_KEY, NodeKey, apply_relocation, relocation_map, sort_key
from .errors import InvalidOrdinalError, MissingParentError, WorkloadError
from .oracle import NaiveTree
from .store import TreeStore

Path = tuple[int, ...]


@dataclass(frozen=True)
class LvRvNode:
    lv: int
    rv: int
    path: Path


def lvrv_encode(tree: NaiveTree) -> dict[Path, LvRvNode]:
    """Classic nested-set numbering: one counter bumped on entering and leaving each node."""
    out: dict[Path, LvRvNode] = {}
    counter = 0
    # (path, entering?)
    stack: list[tuple[Path, bool]] = [((c,), True) for c in range(tree.children[()], 0, -1)]
    lv: dict[Path, int] = {}
    while stack:
        path, entering = stack.pop()
        counter += 1
        if entering:
            lv[path] = counter
            stack.append((path, False))
            stack.extend((path + (c,), True) for c in range(tree.children[path], 0, -1))
        else:
            out[path] = LvRvNode(lv.pop(path), counter, path)
    return out


def lvrv_insert(
    tree: NaiveTree,
    numbering: dict[Path, LvRvNode],
    parent_path: Path,
    position: Optional[int] = None,
) -> int:
    """Insert a node under *parent_path* at *position* (default: last), updating both in place.

    The new node takes the value just after its left neighbour (or the
    parent's LV) and every existing LV/RV at or above that value is bumped
    by two. Returns the number of existing nodes whose LV or RV changed.
    """
    parent_path = tuple(parent_path)
    if parent_path not in tree:
        raise MissingParentError(f"no node at {parent_path}")
    k = tree.children[parent_path]
    if position is None:
        position = k + 1
    if not 1 <= position <= k + 1:
        raise InvalidOrdinalError(f"position {position} outside 1..{k + 1}")

    if position > 1:
        at = numbering[parent_path + (position - 1,)].rv + 1
    elif parent_path:
        at = numbering[parent_path].lv + 1
    else:
        at = 1

    depth = len(parent_path)
    changed = 0
    updated: dict[Path, LvRvNode] = {}
    for path, node in numbering.items():
        lv = node.lv + 2 if node.lv >= at else node.lv
        rv = node.rv + 2 if node.rv >= at else node.rv
        if (lv, rv) != (node.lv, node.rv):
            changed += 1
        if len(path) > depth and path[:depth] == parent_path and path[depth] >= position:
            path = path[:depth] + (path[depth] + 1,) + path[depth + 1:]
        updated[path] = LvRvNode(lv, rv, path)
    new = tree.insert_child(parent_path, position)
    updated[new] = LvRvNode(at, at + 1, new)
    numbering.clear()
    numbering.update(updated)
    return changed


PLACEMENTS = ("uniform", "leftmost", "chain")


@dataclass(frozen=True)
class WorkloadSpec:
    """*nodes* are built up front and not measured; then *inserts* and *moves* run in shuffled order.

    placement: ``uniform`` picks insert parents at random, ``leftmost`` only
    among the earliest nodes in preorder, ``chain`` always under the most
    recently inserted node.
    """

    nodes: int = 0
    inserts: int = 0
    moves: int = 0
    seed: int = 0
    placement: str = "uniform"

    def validate(self) -> None:
        for name in ("nodes", "inserts", "moves", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise WorkloadError(f"{name} must be a non-negative integer, got {v!r}")
        if self.placement not in PLACEMENTS:
            raise WorkloadError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")
        if self.moves and self.nodes + self.inserts < 2:
            raise WorkloadError("moves need at least two nodes")


@dataclass
class BenchReport:
    spec: WorkloadSpec
    # (operation, encoding) -> Counter(rows touched -> occurrences)
    rows_touched: dict[tuple[str, str], Counter] = field(default_factory=dict)
    max_bits_by_depth: dict[int, int] = field(default_factory=dict)
    preorder_agrees: bool = True

    def record(self, op: str, encoding: str, rows: int) -> None:
        self.rows_touched.setdefault((op, encoding), Counter())[rows] += 1

    def mean(self, op: str, encoding: str) -> float:
        hist = self.rows_touched.get((op, encoding), Counter())
        total = sum(hist.values())
        return sum(r * n for r, n in hist.items()) / total if total else 0.0

    def is_empty(self) -> bool:
        return not self.rows_touched and not self.max_bits_by_depth

    def to_tsv(self) -> str:
        out = io.StringIO()
        s = self.spec
        out.write(
            f"# workload\tnodes={s.nodes}\tinserts={s.inserts}\tmoves={s.moves}"
            f"\tseed={s.seed}\tplacement={s.placement}\n"
        )
        out.write("section\toperation\tencoding\tvalue\tcount\n")
        for (op, enc) in sorted(self.rows_touched):
            hist = self.rows_touched[(op, enc)]
            for rows in sorted(hist):
                out.write(f"rows_touched\t{op}\t{enc}\t{rows}\t{hist[rows]}\n")
        for (op, enc) in sorted(self.rows_touched):
            hist = self.rows_touched[(op, enc)]
            out.write(f"mean\t{op}\t{enc}\t{self.mean(op, enc):.6f}\t{sum(hist.values())}\n")
            out.write(f"max\t{op}\t{enc}\t{max(hist)}\t{sum(hist.values())}\n")
        for depth in sorted(self.max_bits_by_depth):
            out.write(f"nv_bits\tdepth={depth}\trational\t{self.max_bits_by_depth[depth]}\t1\n")
        if not self.is_empty():
            out.write(f"check\tpreorder\tboth\t{'agree' if self.preorder_agrees else 'DIFFER'}\t1\n")
        return out.getvalue()

    def to_text(self) -> str:
        rows = [line.split("\t") for line in self.to_tsv().splitlines()[1:]]
        head = self.to_tsv().splitlines()[0].replace("\t", " ")
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        body = "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
        return f"{head}\n{body}\n"


class _Forest:
    """Id-based tree used by the workload so node identity survives moves."""

    def __init__(self) -> None:
        self.parent: dict[int, int] = {}
        self.kids: dict[int, list[int]] = {0: []}
        self.next_id = 1

    def add(self, parent: int) -> int:
        nid = self.next_id
        self.next_id += 1
        self.parent[nid] = parent
        self.kids[parent].append(nid)
        self.kids[nid] = []
        return nid

    def preorder(self, top: int = 0) -> list[int]:
        out, stack = [], list(reversed(self.kids[top]))
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(self.kids[n]))
        return out

    def lvrv(self) -> dict[int, tuple[int, int]]:
        out: dict[int, tuple[int, int]] = {}
        counter = 0
        lv: dict[int, int] = {}
        stack: list[tuple[int, bool]] = [(n, True) for n in reversed(self.kids[0])]
        while stack:
            n, entering = stack.pop()
            counter += 1
            if entering:
                lv[n] = counter
                stack.append((n, False))
                stack.extend((c, True) for c in reversed(self.kids[n]))
            else:
                out[n] = (lv.pop(n), counter)
        return out

    def depth(self, n: int) -> int:
        d = 0
        while n:
            n = self.parent[n]
            d += 1
        return d


def run_workload(spec: WorkloadSpec) -> BenchReport:
    """Drive the same insert/move sequence through LV/RV numbering and a :class:`TreeStore`."""
    spec.validate()
    rng = random.Random(spec.seed)
    report = BenchReport(spec)
    forest = _Forest()
    store = TreeStore()
    key_of: dict[int, NodeKey] = {0: ROOT_KEY}

    def insert(parent: int) -> int:
        nid = forest.add(parent)
        key_of[nid] = store.insert_child(key_of[parent]).key
        return nid

    for _ in range(spec.nodes):
        insert(rng.choice([0, *forest.parent]))

    ops = ["insert"] * spec.inserts + ["move"] * spec.moves
    rng.shuffle(ops)
    last = forest.next_id - 1
    for op in ops:
        before = forest.lvrv()
        if op == "insert":
            parent = _pick_parent(spec.placement, forest, rng, last)
            w0 = store.writes
            last = insert(parent)
            report.record("insert", "rational", store.writes - w0)
            after = forest.lvrv()
            report.record("insert", "lvrv", sum(1 for n, v in before.items() if after[n] != v))
        else:
            node, dest = _pick_move(forest, rng)
            old_parent = forest.parent[node]
            n = _ordinal(key_of[old_parent], key_of[node])
            m = store.child_count(key_of[dest]) + 1
            rmap = relocation_map(key_of[old_parent], n, key_of[dest], m)
            rewritten = store.move_subtree(key_of[old_parent], n, key_of[dest], m)
            moved_ids = [node, *forest.preorder(node)]
            for moved in moved_ids:
                key_of[moved] = apply_relocation(rmap, key_of[moved])
            report.record("move", "subtree_size", len(moved_ids))
            forest.kids[old_parent].remove(node)
            forest.kids[dest].append(node)
            forest.parent[node] = dest
            report.record("move", "rational", rewritten)
            after = forest.lvrv()
            report.record("move", "lvrv", sum(1 for n_, v in before.items() if after[n_] != v))

    for nid, key in key_of.items():
        if nid:
            d = forest.depth(nid)
            report.max_bits_by_depth[d] = max(report.max_bits_by_depth.get(d, 0), key.nv.bit_length())
    lv = forest.lvrv()
    by_lv = sorted(forest.parent, key=lambda n: lv[n][0])
    by_key = sorted(forest.parent, key=lambda n: sort_key(key_of[n]))
    report.preorder_agrees = by_lv == by_key == forest.preorder()
    return report


def _ordinal(parent: NodeKey, child: NodeKey) -> int:
    # child = parent + c*s in both coordinates
    if parent.snv:
        return (child.nv - parent.nv) // parent.snv
    return (child.dv - parent.dv) // parent.sdv


def _pick_parent(placement: str, forest: _Forest, rng: random.Random, last: int) -> int:
    if placement == "chain":
        return last
    candidates = [0, *forest.preorder()]
    if placement == "leftmost":
        width = max(1, int(len(candidates) ** 0.5))
        candidates = candidates[1:width + 1] or [0]
    return rng.choice(candidates)


def _pick_move(forest: _Forest, rng: random.Random) -> tuple[int, int]:
    nodes = forest.preorder()
    node = rng.choice(nodes)
    inside = {node, *forest.preorder(node)}
    dests = [0, *(n for n in nodes if n not in inside)]
    return node, rng.choice(dests)


def nested_set_example() -> NaiveTree:
    """The eleven-node example forest used throughout the docs and tests."""
    return NaiveTree.from_counts(
        {
            (): 3,
            (1,): 0,
            (2,): 5,
            (2, 1): 0,
            (2, 2): 0,
            (2, 3): 0,
            (2, 4): 3,
            (2, 4, 1): 0,
            (2, 4, 2): 0,
            (2, 4, 3): 0,
            (2, 5): 0,
            (3,): 0,
        }
    )


__all__ = [
    "LvRvNode",
    "lvrv_encode",
    "lvrv_insert",
    "WorkloadSpec",
    "BenchReport",
    "run_workload",
    "nested_set_example",
]

"""File-backed node table keyed by rational quadruples.

Records are kept sorted by key, which is the tree's depth-first preorder.
Inserting a node writes exactly one record; moving a subtree rewrites the
records of that subtree and nothing else.

Concurrency contract: any number of readers may share a store, but a
mutation (``insert_child``, ``move_subtree``, ``load``) needs exclusive
access. The store itself takes no locks.

On-disk format, one record per LF-terminated UTF-8 line::

    nv<TAB>dv<TAB>snv<TAB>sdv<TAB>payload

with TAB, LF and backslash in the payload written as ``\\t``, ``\\n``
and ``\\\\``.
"""

from __future__ import annotations

import bisect
import os
import re
import tempfile
from dataclasses import dataclass
from os import PathLike
from typing import Iterator, Literal, Union

from .core import (
    ROOT_KEY,
    NodeKey,
    Ordering,
    apply_relocation,
    child_key,
    compare_keys,
    decode_key,
    is_descendant,
    next_sibling_key,
    relocation_map,
    sort_key,
)
from .errors import (
    CorruptKeyError,
    MalformedInputError,
    MissingParentError,
    NodeNotFoundError,
    NoPredicateError,
    RelocationDomainError,
    SlotConflictError,
)

StrPath = Union[str, "PathLike[str]"]


@dataclass(frozen=True, slots=True)
class NodeRecord:
    key: NodeKey
    payload: str = ""

    def to_line(self) -> str:
        k = self.key
        return f"{k.nv}\t{k.dv}\t{k.snv}\t{k.sdv}\t{escape_payload(self.payload)}\n"

    @classmethod
    def from_line(cls, line: str) -> "NodeRecord":
        parts = line.split("\t", 4)
        if len(parts) != 5:
            raise MalformedInputError(f"expected 5 tab-separated fields: {line!r}")
        nums = parts[:4]
        if not all(_DECIMAL.fullmatch(p) for p in nums):
            raise MalformedInputError(f"bad key fields: {line!r}")
        return cls(NodeKey(*(int(p) for p in nums)), unescape_payload(parts[4]))


_DECIMAL = re.compile(r"0|[1-9][0-9]*")
_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n"}


def escape_payload(payload: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in payload)


def unescape_payload(text: str) -> str:
    out = []
    it = iter(text)
    for ch in it:
        if ch != "\\":
            out.append(ch)
            continue
        nxt = next(it, None)
        if nxt not in _UNESCAPES:
            raise MalformedInputError(f"bad escape sequence in payload {text!r}")
        out.append(_UNESCAPES[nxt])
    return "".join(out)


def _rec_key(r: NodeRecord):
    return sort_key(r.key)


class TreeStore:
    """Ordered collection of :class:`NodeRecord` with per-node child counts.

    ``writes`` counts every record written (inserted or rewritten) since the
    store was created or loaded.
    """

    def __init__(self) -> None:
        self._records: list[NodeRecord] = []
        self._by_key: dict[NodeKey, NodeRecord] = {}
        # next ordinal to hand out is count + 1; ordinals vacated by moves are not reused
        self._child_count: dict[NodeKey, int] = {ROOT_KEY: 0}
        self.writes = 0

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[NodeRecord]:
        return iter(self._records)

    def __contains__(self, key: object) -> bool:
        return key in self._by_key

    def get(self, key: NodeKey) -> NodeRecord:
        try:
            return self._by_key[key]
        except KeyError:
            raise NodeNotFoundError(f"no record with key {key}") from None

    def child_count(self, key: NodeKey) -> int:
        if key not in self._child_count:
            raise NodeNotFoundError(f"no record with key {key}")
        return self._child_count[key]

    def keys(self) -> list[NodeKey]:
        return [r.key for r in self._records]

    def _put(self, rec: NodeRecord) -> None:
        bisect.insort(self._records, rec, key=_rec_key)
        self._by_key[rec.key] = rec
        self._child_count.setdefault(rec.key, 0)
        self.writes += 1

    def insert_child(self, parent_key: NodeKey, payload: str = "") -> NodeRecord:
        """Append a new last child under *parent_key* (``ROOT_KEY`` for a top-level node)."""
        if parent_key not in self._child_count:
            raise MissingParentError(f"parent {parent_key} is not stored")
        c = self._child_count[parent_key] + 1
        rec = NodeRecord(child_key(parent_key, c), payload)
        self._child_count[parent_key] = c
        self._put(rec)
        return rec

    def _span(self, key: NodeKey) -> tuple[int, int]:
        """Index range of records strictly inside *key*'s interval."""
        if key.is_root:
            return 0, len(self._records)
        lo = bisect.bisect_right(self._records, sort_key(key), key=_rec_key)
        hi = bisect.bisect_left(self._records, sort_key(next_sibling_key(key)), key=_rec_key)
        return lo, max(lo, hi)

    def subtree(self, key: NodeKey) -> list[NodeRecord]:
        """Descendants of *key* in preorder (the node itself excluded)."""
        lo, hi = self._span(key)
        return self._records[lo:hi]

    def ancestors(self, key: NodeKey) -> list[NodeKey]:
        """Ancestor keys, root-most first; computed from the key alone, no record is read."""
        return ancestors(key)

    def move_subtree(
        self, p0: NodeKey, n: int, p1: NodeKey, m: int, *, shift: bool = False
    ) -> int:
        """Relocate child *n* of *p0*, with its whole subtree, to child slot *m* of *p1*.

        By default *m* must be the next free ordinal under *p1*. With
        ``shift=True`` *m* may also name an occupied slot; the children of
        *p1* at ordinals ``>= m`` are then moved one place right first.
        Returns the number of records rewritten.
        """
        src = child_key(p0, n)
        if src not in self._by_key:
            raise NodeNotFoundError(f"child {n} of {p0} is not stored")
        if p1 not in self._child_count:
            raise MissingParentError(f"destination parent {p1} is not stored")
        if p0 == p1 and n == m:
            return 0
        if p1 == src or (not p1.is_root and is_descendant(src, p1)):
            raise RelocationDomainError("cannot move a subtree beneath itself")

        count = self._child_count[p1]
        nxt = count + 1
        if m != nxt:
            if not shift:
                raise SlotConflictError(f"slot {m} under {p1} is not the next free ordinal {nxt}")
            if not 1 <= m <= nxt:
                raise SlotConflictError(f"slot {m} under {p1} is outside 1..{nxt}")

        moved = self._extract(src)
        rewritten = 0
        if shift and m < nxt:
            for c in range(count, m - 1, -1):
                k = child_key(p1, c)
                if k in self._by_key:
                    rewritten += self._relocate(self._extract(k), relocation_map(p1, c, p1, c + 1))
            count += 1
        rmap = relocation_map(p0, n, p1, m)
        rewritten += self._relocate(moved, rmap)
        self._child_count[p1] = max(count, m)
        return rewritten

    def _extract(self, top: NodeKey) -> list[tuple[NodeRecord, int]]:
        """Remove *top* and its descendants; return them with their child counts."""
        lo = bisect.bisect_left(self._records, sort_key(top), key=_rec_key)
        _, hi = self._span(top)
        out = []
        for rec in self._records[lo:hi]:
            del self._by_key[rec.key]
            out.append((rec, self._child_count.pop(rec.key)))
        del self._records[lo:hi]
        return out

    def _relocate(self, recs: list[tuple[NodeRecord, int]], rmap) -> int:
        for rec, children in recs:
            new = NodeRecord(apply_relocation(rmap, rec.key), rec.payload)
            self._put(new)
            self._child_count[new.key] = children
        return len(recs)

    def check(self) -> None:
        """Raise if the ordering or parent-closure invariants are broken."""
        for a, b in zip(self._records, self._records[1:]):
            if compare_keys(a.key, b.key) is not Ordering.LESS:
                raise CorruptKeyError(f"records out of order: {a.key} then {b.key}")
        for rec in self._records:
            chain = ancestors(rec.key)
            if chain and chain[-1] not in self._by_key:
                raise CorruptKeyError(f"parent of {rec.key} is not stored")

    # persistence

    def dumps(self) -> str:
        return "".join(r.to_line() for r in self._records)

    def save(self, path: StrPath) -> None:
        """Write the whole store, replacing ``path`` atomically."""
        target = os.fspath(path)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target) or ".", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(self.dumps())
            os.replace(tmp, target)
        except BaseException:
            os.unlink(tmp)
            raise

    @classmethod
    def loads(cls, text: str) -> "TreeStore":
        store = cls()
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        recs = [NodeRecord.from_line(line) for line in lines]
        for rec in recs:
            if rec.key.is_root:
                raise MalformedInputError("the super-root cannot be stored")
            if rec.key in store._by_key:
                raise MalformedInputError(f"duplicate key {rec.key}")
            store._by_key[rec.key] = rec
            store._child_count.setdefault(rec.key, 0)
        store._records = sorted(recs, key=_rec_key)
        for rec in recs:
            path, chain = decode_key(rec.key.nv, rec.key.dv)
            if chain[-1] != rec.key:
                raise CorruptKeyError(f"{rec.key} is not a tree position")
            parent = chain[-2] if len(chain) > 1 else ROOT_KEY
            if parent not in store._child_count:
                raise CorruptKeyError(f"parent of {rec.key} is not stored")
            store._child_count[parent] = max(store._child_count[parent], path[-1])
        return store

    @classmethod
    def load(cls, path: StrPath) -> "TreeStore":
        with open(path, encoding="utf-8", newline="") as fh:
            return cls.loads(fh.read())

    @staticmethod
    def append(path: StrPath, rec: NodeRecord) -> None:
        """Append one record line to a store file."""
        with open(path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(rec.to_line())


def insert_child(store: TreeStore, parent_key: NodeKey, payload: str = "") -> NodeRecord:
    return store.insert_child(parent_key, payload)


def subtree(store: TreeStore, key: NodeKey) -> list[NodeRecord]:
    return store.subtree(key)


def ancestors(key: NodeKey) -> list[NodeKey]:
    """Keys of every proper ancestor of *key*, root-most first."""
    if key.is_root:
        return []
    _, chain = decode_key(key.nv, key.dv)
    return chain[:-1]


def move_subtree(store: TreeStore, p0: NodeKey, n: int, p1: NodeKey, m: int, *, shift: bool = False) -> int:
    return store.move_subtree(p0, n, p1, m, shift=shift)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)?")


def emit_sql_predicate(
    kind: Literal["ancestors", "descendants"],
    key: NodeKey,
    nv_col: str = "nv",
    dv_col: str = "dv",
    snv_col: str = "snv",
    sdv_col: str = "sdv",
) -> str:
    """Integer-only SQL condition selecting the ancestors or descendants of *key*.

    Only filtering is expressed; order rows by key in the application, since
    ``ORDER BY nv/dv`` would need exact rational division.
    """
    for col in (nv_col, dv_col, snv_col, sdv_col):
        if not _IDENT.fullmatch(col):
            raise MalformedInputError(f"bad column name {col!r}")
    nv, dv, snv, sdv = key.nv, key.dv, key.snv, key.sdv
    if kind == "descendants":
        return f"({nv_col} * {dv} > {nv} * {dv_col}) AND ({nv_col} * {sdv} < {snv} * {dv_col})"
    if kind == "ancestors":
        if key.is_root:
            raise NoPredicateError("the super-root has no ancestors")
        return f"({nv_col} * {dv} < {nv} * {dv_col}) AND ({snv_col} * {dv} > {nv} * {sdv_col})"
    raise NoPredicateError(f"unknown predicate kind {kind!r}")


__all__ = [
    "NodeRecord",
    "TreeStore",
    "escape_payload",
    "unescape_payload",
    "insert_child",
    "subtree",
    "ancestors",
    "move_subtree",
    "emit_sql_predicate",
]

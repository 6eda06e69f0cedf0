"""Exact integer key algebra for rational nested-set keys.

A tree position is a sequence of 1-based sibling ordinals. Each position is
keyed by a quadruple ``(nv, dv, snv, sdv)``: the reduced fraction ``nv/dv``
for the node itself and ``snv/sdv`` for its next sibling. Written as the
matrix ``[[nv, snv], [dv, sdv]]`` every key is the product

    [[0, 1], [1, 0]] @ F(N_1) @ F(N_2) @ ... @ F(N_m),   F(c) = [[1, 1], [c, c + 1]]

so the determinant is always -1 and every operation below stays in integer
arithmetic. Python integers are unbounded; ``encode_path_checked`` offers an
explicit fixed-width variant that raises instead of wrapping.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import (
    CorruptKeyError,
    InvalidOrdinalError,
    KeyOverflowError,
    MalformedInputError,
    NonCanonicalKeyError,
    NoSiblingError,
    NotANodeError,
    RelocationDomainError,
)

__all__ = [
    "TreePath",
    "NodeKey",
    "Mat2",
    "RelocationMap",
    "Ordering",
    "ROOT_KEY",
    "IDENTITY",
    "validate_path",
    "parse_path",
    "format_path",
    "parse_key",
    "format_key",
    "root_key",
    "child_key",
    "next_sibling_key",
    "encode_path",
    "encode_path_checked",
    "decode_key",
    "is_tree_key",
    "compare_keys",
    "sort_key",
    "is_descendant",
    "is_ancestor",
    "key_matrix",
    "child_factor",
    "invert_key",
    "relocation_map",
    "apply_relocation",
]

TreePath = tuple[int, ...]


def validate_path(path: Iterable[int]) -> TreePath:
    """Return *path* as a tuple, raising if any ordinal is not a positive int."""
    out = tuple(path)
    for c in out:
        _check_ordinal(c)
    return out


def _check_ordinal(c: object) -> None:
    if isinstance(c, bool) or not isinstance(c, int) or c < 1:
        raise InvalidOrdinalError(f"ordinal must be a positive integer, got {c!r}")


_DOTTED = re.compile(r"[1-9][0-9]*(?:\.[1-9][0-9]*)*")
_BRACKET_SEP = re.compile(r"[◦∘o*]")


def parse_path(text: str) -> TreePath:
    """Parse ``2.4.3`` or the bracket form ``[◦ 2 ◦ 4 ◦ 3]``.

    The empty string and ``[]`` denote the super-root.
    """
    s = text.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise MalformedInputError(f"unterminated bracket path: {text!r}")
        parts = [p for p in _BRACKET_SEP.split(s[1:-1]) if p.strip()]
        if not parts:
            return ()
        try:
            ordinals = [int(p.strip(), 10) for p in parts]
        except ValueError:
            raise MalformedInputError(f"bad bracket path: {text!r}") from None
        if any(c < 1 for c in ordinals):
            raise MalformedInputError(f"ordinals must be positive: {text!r}")
        return tuple(ordinals)
    if s == "":
        return ()
    if not _DOTTED.fullmatch(s):
        raise MalformedInputError(f"bad path {text!r}; expected dotted ordinals like 2.4.3")
    return tuple(int(p) for p in s.split("."))


def format_path(path: Sequence[int]) -> str:
    return ".".join(str(c) for c in path)


@dataclass(frozen=True, slots=True)
class NodeKey:
    """A node's rational key ``nv/dv`` plus its next sibling's ``snv/sdv``.

    Construction validates the key invariants: non-negative components,
    determinant ``nv*sdv - dv*snv == -1`` (which implies all four gcd
    conditions), and either the exact super-root ``(0, 1, 1, 0)`` or
    positive denominators.
    """

    nv: int
    dv: int
    snv: int
    sdv: int

    def __post_init__(self) -> None:
        problem = _key_problem(self.nv, self.dv, self.snv, self.sdv)
        if problem:
            raise CorruptKeyError(f"{self.nv}/{self.dv}:{self.snv}/{self.sdv}: {problem}")

    @property
    def is_root(self) -> bool:
        return self.nv == 0 and self.dv == 1 and self.snv == 1 and self.sdv == 0

    def __str__(self) -> str:
        return format_key(self)

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.nv, self.dv, self.snv, self.sdv)


def _key_problem(nv: int, dv: int, snv: int, sdv: int) -> str | None:
    for v in (nv, dv, snv, sdv):
        if isinstance(v, bool) or not isinstance(v, int):
            return "components must be integers"
    if min(nv, dv, snv, sdv) < 0:
        return "components must be non-negative"
    if nv * sdv - dv * snv != -1:
        return "determinant is not -1"
    if (nv, dv, snv, sdv) == (0, 1, 1, 0):
        return None
    if dv < 1 or sdv < 1:
        return "denominators of a non-root key must be positive"
    return None


ROOT_KEY = NodeKey(0, 1, 1, 0)

_KEY_TEXT = re.compile(r"(0|[1-9][0-9]*)/(0|[1-9][0-9]*):(0|[1-9][0-9]*)/(0|[1-9][0-9]*)")


def format_key(k: NodeKey) -> str:
    """Canonical text form ``nv/dv:snv/sdv``."""
    return f"{k.nv}/{k.dv}:{k.snv}/{k.sdv}"


def parse_key(text: str) -> NodeKey:
    """Inverse of :func:`format_key`. Leading zeros and whitespace are rejected."""
    m = _KEY_TEXT.fullmatch(text)
    if not m:
        raise MalformedInputError(f"bad key {text!r}; expected nv/dv:snv/sdv")
    return NodeKey(*(int(g) for g in m.groups()))


def root_key() -> NodeKey:
    return ROOT_KEY


def child_key(parent: NodeKey, c: int) -> NodeKey:
    """Key of the *c*-th child (1-based) of *parent*."""
    _check_ordinal(c)
    nv, dv, snv, sdv = parent.nv, parent.dv, parent.snv, parent.sdv
    return NodeKey(nv + c * snv, dv + c * sdv, nv + (c + 1) * snv, dv + (c + 1) * sdv)


def next_sibling_key(k: NodeKey) -> NodeKey:
    if k.is_root:
        raise NoSiblingError("the super-root has no sibling")
    # child c of p -> child c+1 of p: (snv, sdv) moves up and the new sibling
    # is p + (c+2)*s = 2*snv - nv.
    return NodeKey(k.snv, k.sdv, 2 * k.snv - k.nv, 2 * k.sdv - k.dv)


def encode_path(path: Iterable[int]) -> NodeKey:
    k = ROOT_KEY
    for c in path:
        k = child_key(k, c)
    return k


def encode_path_checked(path: Iterable[int], bits: int = 64) -> NodeKey:
    """Like :func:`encode_path` but every component must fit a signed *bits*-wide integer.

    Mirrors what a database ``bigint`` column can hold; raises
    :class:`KeyOverflowError` rather than silently wrapping.
    """
    limit = (1 << (bits - 1)) - 1
    k = ROOT_KEY
    for depth, c in enumerate(path, 1):
        k = child_key(k, c)
        if max(k.snv, k.sdv) > limit:
            raise KeyOverflowError(f"key at depth {depth} exceeds {bits}-bit signed range: {k}")
    return k


def decode_key(nv: int, dv: int) -> tuple[TreePath, list[NodeKey]]:
    """Walk from the root to the node with rational key ``nv/dv``.

    Returns the ordinal path and the key of every node on it, root-most
    first and the node itself last. No lookup is needed: each step peels
    the integer part off the remaining fraction, and a fractional tail
    ``r/d`` continues as ``r/(d - r)`` because ``r/d = 1/(1 + 1/(r/(d-r)))``.
    """
    for v in (nv, dv):
        if isinstance(v, bool) or not isinstance(v, int):
            raise MalformedInputError(f"numerator and denominator must be integers, got {v!r}")
    if dv < 1 or nv < 1:
        raise NotANodeError(f"{nv}/{dv}: node keys have positive numerator and denominator")
    if gcd(nv, dv) != 1:
        raise NonCanonicalKeyError(f"{nv}/{dv} is not in lowest terms")
    if nv < dv:
        raise NotANodeError(f"{nv}/{dv} is below 1; every node key is at least 1")

    path: list[int] = []
    chain: list[NodeKey] = []
    anc = ROOT_KEY
    num, den = nv, dv
    while num > 0 and den > 0:
        div, mod = divmod(num, den)
        if div == 0:
            raise NotANodeError(f"{nv}/{dv} does not encode a tree position")
        anc = child_key(anc, div)
        path.append(div)
        chain.append(anc)
        num = mod
        if num != 0:
            den -= mod
    return tuple(path), chain


def is_tree_key(k: NodeKey) -> bool:
    """True when *k* is exactly the key of some tree position (root included)."""
    if k.is_root:
        return True
    try:
        _, chain = decode_key(k.nv, k.dv)
    except (NotANodeError, NonCanonicalKeyError):
        return False
    return chain[-1] == k


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _require_node(*keys: NodeKey) -> None:
    for k in keys:
        if k.is_root:
            raise NotANodeError("the super-root has no rational value")


def compare_keys(a: NodeKey, b: NodeKey) -> Ordering:
    """Order two keys by their rationals ``nv/dv`` using cross-multiplication."""
    _require_node(a, b)
    lhs, rhs = a.nv * b.dv, b.nv * a.dv
    if lhs < rhs:
        return Ordering.LESS
    if lhs > rhs:
        return Ordering.GREATER
    return Ordering.EQUAL


class _SortKey:
    __slots__ = ("k",)

    def __init__(self, k: NodeKey) -> None:
        self.k = k

    def __lt__(self, other: "_SortKey") -> bool:
        return compare_keys(self.k, other.k) is Ordering.LESS

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _SortKey) and compare_keys(self.k, other.k) is Ordering.EQUAL


def sort_key(k: NodeKey) -> _SortKey:
    """Key function for ``sorted``/``bisect`` that orders by :func:`compare_keys`."""
    return _SortKey(k)


def _strictly_between(lo_n: int, lo_d: int, x_n: int, x_d: int, hi_n: int, hi_d: int) -> bool:
    return lo_n * x_d < x_n * lo_d and x_n * hi_d < hi_n * x_d


def is_descendant(me: NodeKey, candidate: NodeKey) -> bool:
    """True iff ``me.nv/me.dv < candidate.nv/candidate.dv < me.snv/me.sdv``."""
    _require_node(me, candidate)
    return _strictly_between(me.nv, me.dv, candidate.nv, candidate.dv, me.snv, me.sdv)


def is_ancestor(me: NodeKey, candidate: NodeKey) -> bool:
    """True iff ``candidate.nv/candidate.dv < me.nv/me.dv < candidate.snv/candidate.sdv``."""
    _require_node(me, candidate)
    return _strictly_between(candidate.nv, candidate.dv, me.nv, me.dv, candidate.snv, candidate.sdv)


@dataclass(frozen=True, slots=True)
class Mat2:
    """Integer 2x2 matrix ``[[a, b], [c, d]]`` with determinant +1 or -1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.det not in (1, -1):
            raise CorruptKeyError(f"matrix {self.rows()} is not unimodular (det={self.det})")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "Mat2":
        # det is +-1, so the adjugate divided by det stays integral
        s = self.det
        return Mat2(s * self.d, -s * self.b, -s * self.c, s * self.a)


RelocationMap = Mat2
IDENTITY = Mat2(1, 0, 0, 1)


def key_matrix(k: NodeKey) -> Mat2:
    return Mat2(k.nv, k.snv, k.dv, k.sdv)


def child_factor(c: int) -> Mat2:
    """The right factor ``[[1, 1], [c, c + 1]]`` that steps from a parent to child *c*."""
    _check_ordinal(c)
    return Mat2(1, 1, c, c + 1)


def invert_key(k: NodeKey) -> Mat2:
    """Inverse of the key's matrix, ``[[-sdv, snv], [dv, -nv]]``."""
    if k.nv * k.sdv - k.dv * k.snv != -1:
        raise CorruptKeyError(f"{k}: determinant is not -1")
    return Mat2(-k.sdv, k.snv, k.dv, -k.nv)


def relocation_map(p0: NodeKey, n: int, p1: NodeKey, m: int) -> Mat2:
    """Map that rewrites keys under child *n* of *p0* to sit under child *m* of *p1*.

    ``p1 @ [[1, 0], [m - n, 1]] @ p0^-1``; the shear in the middle is
    ``F(m) @ F(n)^-1``.
    """
    _check_ordinal(n)
    _check_ordinal(m)
    shear = Mat2(1, 0, m - n, 1)
    return key_matrix(p1) @ shear @ invert_key(p0)


def apply_relocation(rmap: Mat2, k: NodeKey) -> NodeKey:
    """Left-multiply *k*'s matrix by *rmap* and return the resulting key.

    Raises :class:`RelocationDomainError` when the product is not the key of
    a tree position, which happens when *k* did not lie in the moved subtree.
    """
    nv = rmap.a * k.nv + rmap.b * k.dv
    snv = rmap.a * k.snv + rmap.b * k.sdv
    dv = rmap.c * k.nv + rmap.d * k.dv
    sdv = rmap.c * k.snv + rmap.d * k.sdv
    if _key_problem(nv, dv, snv, sdv):
        raise RelocationDomainError(f"{k} maps outside the key domain ({nv}/{dv}:{snv}/{sdv})")
    out = NodeKey(nv, dv, snv, sdv)
    if out.is_root or not is_tree_key(out):
        raise RelocationDomainError(f"{k} maps to {out}, which is not a tree position")
    return out

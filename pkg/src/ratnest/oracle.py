"""Independent ground truth: direct continued-fraction evaluation and an explicit tree.

Nothing here touches the matrix/quadruple arithmetic in :mod:`ratnest.core`;
the tests lean on that separation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Iterator, Sequence, Union

from .errors import InvalidOrdinalError, MissingParentError, NoValueError

Term = Union[int, Fraction]


def _check_terms(terms: Sequence[Term]) -> None:
    if not terms:
        raise NoValueError("an empty path has no value")
    for t in terms:
        if isinstance(t, bool) or not isinstance(t, (int, Fraction)) or t <= 0:
            raise InvalidOrdinalError(f"terms must be positive integers or rationals, got {t!r}")


def eval_cf(terms: Sequence[Term]) -> Fraction:
    """``N1 + 1/(1 + 1/(N2 + ... + 1/(1 + 1/Nm)))``, folded bottom-up.

    Terms are normally positive integers; positive rationals are accepted so
    the tail identity can be exercised.
    """
    _check_terms(terms)
    value = Fraction(terms[-1])
    for t in reversed(terms[:-1]):
        value = t + 1 / (1 + 1 / value)
    return value


def trop_eval(terms: Sequence[Term]) -> Fraction:
    """Plain simple continued fraction ``N1 + 1/(N2 + ... + 1/Nm)``."""
    _check_terms(terms)
    value = Fraction(terms[-1])
    for t in reversed(terms[:-1]):
        value = t + 1 / value
    return value


@dataclass
class NaiveTree:
    """Explicit tree: each stored path maps to its number of children.

    The empty path is the virtual super-root and is always present. Children
    of every node are numbered contiguously ``1..k``.
    """

    children: dict[tuple[int, ...], int] = field(default_factory=lambda: {(): 0})

    @classmethod
    def from_counts(cls, counts: dict[tuple[int, ...], int]) -> "NaiveTree":
        tree = cls(dict(counts))
        tree.children.setdefault((), 0)
        tree.check()
        return tree

    def check(self) -> None:
        for path, k in self.children.items():
            if path and path[:-1] not in self.children:
                raise MissingParentError(f"parent of {path} missing")
            if path and not (1 <= path[-1] <= self.children[path[:-1]]):
                raise InvalidOrdinalError(f"{path} outside its parent's child range")
            for c in range(1, k + 1):
                if path + (c,) not in self.children:
                    raise MissingParentError(f"child {path + (c,)} missing")

    def __contains__(self, path: object) -> bool:
        return path in self.children

    def __len__(self) -> int:
        """Number of real nodes (the super-root is not counted)."""
        return len(self.children) - 1

    def add_child(self, parent: tuple[int, ...]) -> tuple[int, ...]:
        """Append a new last child under *parent* and return its path."""
        if parent not in self.children:
            raise MissingParentError(f"no node at {parent}")
        self.children[parent] += 1
        path = parent + (self.children[parent],)
        self.children[path] = 0
        return path

    def insert_child(self, parent: tuple[int, ...], position: int) -> tuple[int, ...]:
        """Insert a child at *position*, shifting later siblings (and their subtrees) right."""
        if parent not in self.children:
            raise MissingParentError(f"no node at {parent}")
        k = self.children[parent]
        if not 1 <= position <= k + 1:
            raise InvalidOrdinalError(f"position {position} outside 1..{k + 1}")
        depth = len(parent)
        renamed = {}
        for path, cnt in self.children.items():
            if len(path) > depth and path[:depth] == parent and path[depth] >= position:
                path = path[:depth] + (path[depth] + 1,) + path[depth + 1:]
            renamed[path] = cnt
        self.children = renamed
        self.children[parent] = k + 1
        new = parent + (position,)
        self.children[new] = 0
        return new

    @classmethod
    def random(cls, size: int, rng: Random) -> "NaiveTree":
        """Random tree of *size* nodes, each attached under a uniformly chosen existing node."""
        tree = cls()
        nodes = [()]
        for _ in range(size):
            nodes.append(tree.add_child(rng.choice(nodes)))
        return tree


def _walk(tree: NaiveTree, path: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    stack = [path + (c,) for c in range(tree.children[path], 0, -1)]
    while stack:
        p = stack.pop()
        yield p
        stack.extend(p + (c,) for c in range(tree.children[p], 0, -1))


def naive_preorder(tree: NaiveTree) -> list[tuple[int, ...]]:
    """Depth-first preorder of every real node, siblings by ascending ordinal."""
    return list(_walk(tree, ()))

"""Rational nested-set keys: encode tree positions as integer quadruples,
decode ancestors arithmetically, filter subtrees with integer predicates and
move subtrees with unimodular 2x2 maps."""

from .core import (
    IDENTITY,
    ROOT_KEY,
    Mat2,
    NodeKey,
    Ordering,
    RelocationMap,
    TreePath,
    apply_relocation,
    child_key,
    compare_keys,
    decode_key,
    encode_path,
    encode_path_checked,
    format_key,
    format_path,
    invert_key,
    is_ancestor,
    is_descendant,
    is_tree_key,
    next_sibling_key,
    parse_key,
    parse_path,
    relocation_map,
    root_key,
    sort_key,
)
from .errors import *  # noqa: F401,F403
from .oracle import NaiveTree, eval_cf, naive_preorder, trop_eval
from .store import NodeRecord, TreeStore, emit_sql_predicate

__version__ = "0.1.0"

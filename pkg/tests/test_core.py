from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from ratnest.core import (
    IDENTITY,
    ROOT_KEY,
    Mat2,
    NodeKey,
    Ordering,
    apply_relocation,
    child_factor,
    child_key,
    compare_keys,
    decode_key,
    encode_path,
    encode_path_checked,
    format_key,
    invert_key,
    is_ancestor,
    is_descendant,
    is_tree_key,
    key_matrix,
    next_sibling_key,
    parse_key,
    parse_path,
    relocation_map,
    root_key,
    sort_key,
)
from ratnest.errors import (
    CorruptKeyError,
    InvalidOrdinalError,
    KeyOverflowError,
    MalformedInputError,
    NonCanonicalKeyError,
    NoSiblingError,
    NotANodeError,
    RelocationDomainError,
)
from ratnest.oracle import eval_cf

from conftest import KEY_TABLE, explicit_product, matmul, paths, paths0


def K(*q):
    return NodeKey(*q)


class TestRootAndChildren:
    def test_root(self):
        assert root_key() == K(0, 1, 1, 0)
        assert root_key().is_root

    @pytest.mark.parametrize(
        "parent, c, expected",
        [
            ((14, 5, 17, 6), 3, (65, 23, 82, 29)),
            ((2, 1, 3, 1), 4, (14, 5, 17, 6)),
            ((0, 1, 1, 0), 1, (1, 1, 2, 1)),
            ((0, 1, 1, 0), 2, (2, 1, 3, 1)),
            # first child of [2] is 5/2
            ((2, 1, 3, 1), 1, (5, 2, 8, 3)),
        ],
    )
    def test_child_key(self, parent, c, expected):
        assert child_key(K(*parent), c).astuple() == expected

    @pytest.mark.parametrize("c", [0, -1, 1.0, True, "2"])
    def test_child_key_rejects_bad_ordinal(self, c):
        with pytest.raises(InvalidOrdinalError):
            child_key(ROOT_KEY, c)

    @pytest.mark.parametrize(
        "key, expected",
        [
            ((65, 23, 82, 29), (82, 29, 99, 35)),
            ((2, 1, 3, 1), (3, 1, 4, 1)),
            ((1, 1, 2, 1), (2, 1, 3, 1)),
        ],
    )
    def test_next_sibling(self, key, expected):
        assert next_sibling_key(K(*key)).astuple() == expected

    def test_next_sibling_matches_parent_arithmetic(self):
        assert next_sibling_key(K(65, 23, 82, 29)) == child_key(K(14, 5, 17, 6), 4)
        # 99 = 14 + 5*17, 35 = 5 + 5*6
        assert (99, 35) == (14 + 5 * 17, 5 + 5 * 6)

    def test_root_has_no_sibling(self):
        with pytest.raises(NoSiblingError):
            next_sibling_key(ROOT_KEY)

    @given(paths)
    def test_next_sibling_is_next_child(self, p):
        parent = encode_path(p[:-1])
        assert next_sibling_key(encode_path(p)) == child_key(parent, p[-1] + 1)


class TestEncode:
    @pytest.mark.parametrize("row", KEY_TABLE, ids=lambda r: ".".join(map(str, r[0])))
    def test_key_table_rows(self, row):
        path, *quad = row
        assert encode_path(path).astuple() == tuple(quad)

    def test_empty_path_is_root(self):
        assert encode_path([]) == ROOT_KEY

    def test_bad_ordinal(self):
        with pytest.raises(InvalidOrdinalError):
            encode_path([2, 0, 1])

    @given(paths0)
    def test_matches_explicit_matrix_product(self, p):
        (nv, snv), (dv, sdv) = explicit_product(p)
        assert encode_path(p).astuple() == (nv, dv, snv, sdv)

    def test_checked_fast_path(self):
        assert encode_path_checked([2, 4, 3]) == encode_path([2, 4, 3])
        deep = [10] * 40
        with pytest.raises(KeyOverflowError):
            encode_path_checked(deep)
        assert encode_path(deep).snv.bit_length() > 64

    def test_checked_fast_path_boundary(self):
        # smallest bit width that still holds 65/23:82/29 is 8 (82 < 127)
        encode_path_checked([2, 4, 3], bits=8)
        with pytest.raises(KeyOverflowError):
            encode_path_checked([2, 4, 3], bits=7)


class TestDecode:
    def test_golden(self):
        path, chain = decode_key(65, 23)
        assert path == (2, 4, 3)
        assert [k.astuple() for k in chain] == [(2, 1, 3, 1), (14, 5, 17, 6), (65, 23, 82, 29)]

    def test_single_step(self):
        assert decode_key(1, 1) == ((1,), [K(1, 1, 2, 1)])

    def test_derived(self):
        path, chain = decode_key(40, 11)
        assert path == (3, 1, 3)
        assert chain[-1] == encode_path([3, 1, 3])
        assert eval_cf([3, 1, 3]) == Fraction(40, 11)
        assert [k.astuple() for k in chain] == [(3, 1, 4, 1), (7, 2, 11, 3), (40, 11, 51, 14)]

    def test_non_canonical(self):
        with pytest.raises(NonCanonicalKeyError):
            decode_key(130, 46)

    def test_below_one(self):
        with pytest.raises(NotANodeError):
            decode_key(23, 65)

    def test_unreachable_rational(self):
        # 4/3 = 1 + 1/3 and the tail 1/3 is below the smallest admissible tail 1/2
        with pytest.raises(NotANodeError):
            decode_key(4, 3)

    @pytest.mark.parametrize("nv, dv", [(0, 1), (1, 0), (-3, 1)])
    def test_degenerate(self, nv, dv):
        with pytest.raises(NotANodeError):
            decode_key(nv, dv)

    @given(paths)
    def test_round_trip(self, p):
        k = encode_path(p)
        path, chain = decode_key(k.nv, k.dv)
        assert path == p
        assert chain == [encode_path(p[:i]) for i in range(1, len(p) + 1)]

    @given(st.integers(1, 400), st.integers(1, 400))
    def test_any_rational_decodes_or_is_rejected(self, a, b):
        nv, dv = max(a, b), min(a, b)
        if gcd(nv, dv) != 1:
            with pytest.raises(NonCanonicalKeyError):
                decode_key(nv, dv)
            return
        value = Fraction(nv, dv)
        if value not in _NODES_UP_TO_400:
            with pytest.raises(NotANodeError):
                decode_key(nv, dv)
            return
        path, chain = decode_key(nv, dv)
        assert path == _NODES_UP_TO_400[value]
        assert (chain[-1].nv, chain[-1].dv) == (nv, dv)


def _nodes_up_to(limit):
    """Every tree position whose value has numerator <= limit, found by direct CF evaluation.

    Numerators grow strictly with depth and with ordinal, so pruning is exact.
    """
    out, stack = {}, [()]
    while stack:
        p = stack.pop()
        c = 1
        while True:
            q = p + (c,)
            v = eval_cf(q)
            if v.numerator > limit:
                break
            assert v not in out
            out[v] = q
            stack.append(q)
            c += 1
    return out


_NODES_UP_TO_400 = _nodes_up_to(400)


class TestKeyInvariants:
    @pytest.mark.parametrize(
        "quad",
        [(1, 1, 3, 1), (2, 1, 3, 2), (-1, 0, 1, 1), (5, 0, 1, 1), (5, 1, 1, 0)],
    )
    def test_corrupt_rejected(self, quad):
        with pytest.raises(CorruptKeyError):
            NodeKey(*quad)

    @given(paths)
    def test_determinant(self, p):
        k = encode_path(p)
        assert k.nv * k.sdv - k.dv * k.snv == -1

    @given(paths)
    def test_gcds(self, p):
        k = encode_path(p)
        assert gcd(k.nv, k.dv) == gcd(k.snv, k.sdv) == gcd(k.nv, k.snv) == gcd(k.dv, k.sdv) == 1

    def test_root_gcd_convention(self):
        assert gcd(0, 1) == 1 and gcd(1, 0) == 1

    @given(paths)
    def test_cf_correspondence(self, p):
        k = encode_path(p)
        assert Fraction(k.nv, k.dv) == eval_cf(p)
        assert Fraction(k.snv, k.sdv) == eval_cf(p[:-1] + (p[-1] + 1,))

    @given(paths)
    def test_sibling_order(self, p):
        k = encode_path(p)
        assert k.nv * k.sdv < k.snv * k.dv

    @given(paths, st.integers(1, 10))
    def test_nesting(self, p, i):
        parent = encode_path(p)
        assert is_descendant(parent, child_key(parent, i))

    @given(paths0, st.integers(1, 10))
    def test_children_strictly_inside_parent_interval(self, p, i):
        parent = encode_path(p)
        c = child_key(parent, i)
        lo = Fraction(parent.nv, parent.dv)
        hi = Fraction(parent.snv, parent.sdv) if parent.sdv else None
        v = Fraction(c.nv, c.dv)
        assert lo < v and (hi is None or v < hi)

    @given(paths)
    def test_is_tree_key(self, p):
        assert is_tree_key(encode_path(p))

    def test_not_tree_key(self):
        # determinant -1 but snv/sdv is not the next sibling of 1/1
        assert not is_tree_key(K(1, 1, 3, 2))


class TestTextForm:
    def test_format(self):
        assert format_key(K(65, 23, 82, 29)) == "65/23:82/29"
        assert str(ROOT_KEY) == "0/1:1/0"

    @pytest.mark.parametrize(
        "text", ["65/23:82/29 ", "065/23:82/29", "65/23/82/29", "+65/23:82/29", "", "a/b:c/d"]
    )
    def test_parse_rejects(self, text):
        with pytest.raises(MalformedInputError):
            parse_key(text)

    def test_parse_validates(self):
        with pytest.raises(CorruptKeyError):
            parse_key("65/23:82/30")

    @given(paths0)
    def test_round_trip(self, p):
        k = encode_path(p)
        s = format_key(k)
        assert parse_key(s) == k
        assert format_key(parse_key(s)) == s

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("2.4.3", (2, 4, 3)),
            ("1", (1,)),
            ("", ()),
            ("[◦ 2 ◦ 4 ◦ 3]", (2, 4, 3)),
            ("[∘2∘4]", (2, 4)),
            ("[]", ()),
        ],
    )
    def test_parse_path(self, text, expected):
        assert parse_path(text) == expected

    @pytest.mark.parametrize("text", ["2..3", "2.0", "2.x", "0", "[◦ 2 ◦ 0]", "[◦ 2", "-1"])
    def test_parse_path_rejects(self, text):
        with pytest.raises(MalformedInputError):
            parse_path(text)


class TestOrdering:
    @pytest.mark.parametrize(
        "a, b, expected",
        [
            ((2, 1, 3, 1), (14, 5, 17, 6), Ordering.LESS),
            ((65, 23, 82, 29), (65, 23, 82, 29), Ordering.EQUAL),
            ((14, 5, 17, 6), (17, 6, 20, 7), Ordering.LESS),
            ((17, 6, 20, 7), (14, 5, 17, 6), Ordering.GREATER),
        ],
    )
    def test_compare(self, a, b, expected):
        assert compare_keys(K(*a), K(*b)) is expected

    def test_root_rejected(self):
        with pytest.raises(NotANodeError):
            compare_keys(ROOT_KEY, K(1, 1, 2, 1))
        with pytest.raises(NotANodeError):
            is_descendant(ROOT_KEY, K(1, 1, 2, 1))
        with pytest.raises(NotANodeError):
            is_ancestor(K(1, 1, 2, 1), ROOT_KEY)

    @given(paths, paths)
    def test_compare_agrees_with_fractions(self, p, q):
        a, b = encode_path(p), encode_path(q)
        fa, fb = Fraction(a.nv, a.dv), Fraction(b.nv, b.dv)
        expected = Ordering.LESS if fa < fb else Ordering.GREATER if fa > fb else Ordering.EQUAL
        assert compare_keys(a, b) is expected
        assert (p == q) == (expected is Ordering.EQUAL)

    def test_sort_key(self):
        keys = [encode_path(p) for p in [(3,), (2, 4, 3), (2,), (2, 5), (1,)]]
        assert [k.nv for k in sorted(keys, key=sort_key)] == [1, 2, 65, 17, 3]


class TestPredicates:
    @pytest.mark.parametrize(
        "me, cand, expected",
        [
            ((2, 1, 3, 1), (65, 23, 82, 29), True),
            ((65, 23, 82, 29), (65, 23, 82, 29), False),
            ((14, 5, 17, 6), (17, 6, 20, 7), False),
        ],
    )
    def test_is_descendant(self, me, cand, expected):
        assert is_descendant(K(*me), K(*cand)) is expected

    @pytest.mark.parametrize(
        "me, cand, expected",
        [
            ((65, 23, 82, 29), (14, 5, 17, 6), True),
            ((65, 23, 82, 29), (65, 23, 82, 29), False),
            ((31, 11, 48, 17), (2, 1, 3, 1), True),
            ((2, 1, 3, 1), (31, 11, 48, 17), False),
        ],
    )
    def test_is_ancestor(self, me, cand, expected):
        assert is_ancestor(K(*me), K(*cand)) is expected

    @given(paths, paths)
    def test_predicates_match_path_prefixes(self, p, q):
        a, b = encode_path(p), encode_path(q)
        prefix = len(p) < len(q) and q[: len(p)] == p
        assert is_descendant(a, b) is prefix
        assert is_ancestor(b, a) is prefix


class TestMatrices:
    @pytest.mark.parametrize(
        "key, expected",
        [
            ((2, 1, 3, 1), ((-1, 3), (1, -2))),
            ((0, 1, 1, 0), ((0, 1), (1, 0))),
            ((14, 5, 17, 6), ((-6, 17), (5, -14))),
        ],
    )
    def test_invert_key(self, key, expected):
        inv = invert_key(K(*key))
        assert inv.rows() == expected
        m = [[key[0], key[2]], [key[1], key[3]]]
        assert matmul(m, [list(r) for r in expected]) == [[1, 0], [0, 1]]

    def test_invert_corrupt(self):
        # bypass the constructor to model a damaged row read from elsewhere
        k = object.__new__(NodeKey)
        object.__setattr__(k, "nv", 2)
        object.__setattr__(k, "dv", 1)
        object.__setattr__(k, "snv", 3)
        object.__setattr__(k, "sdv", 2)
        with pytest.raises(CorruptKeyError):
            invert_key(k)

    def test_non_unimodular(self):
        with pytest.raises(CorruptKeyError):
            Mat2(2, 0, 0, 1)

    @given(paths0)
    def test_inverse_identity(self, p):
        k = encode_path(p)
        assert key_matrix(k) @ invert_key(k) == IDENTITY
        assert invert_key(k) @ key_matrix(k) == IDENTITY

    def test_factor_form(self):
        # M[2,4,3] = M[2,4] * [[1,1],[3,4]]
        assert key_matrix(K(14, 5, 17, 6)) @ child_factor(3) == key_matrix(K(65, 23, 82, 29))
        assert child_factor(3).det == 1
        assert Mat2(0, 1, 1, 0).det == -1

    def test_mat_inverse_generic(self):
        m = Mat2(13, -35, 3, -8)
        assert m @ m.inverse() == IDENTITY


class TestRelocation:
    def test_worked_map(self):
        rmap = relocation_map(K(2, 1, 3, 1), 4, K(3, 1, 4, 1), 1)
        assert rmap.rows() == ((13, -35), (3, -8))
        assert rmap.det == 1
        # independent: p1 * [[1,0],[m-n,1]] * p0^-1 with plain lists
        p0inv = [[-1, 3], [1, -2]]
        p1 = [[3, 4], [1, 1]]
        assert matmul(matmul(p1, [[1, 0], [1 - 4, 1]]), p0inv) == [[13, -35], [3, -8]]

    def test_identity_move(self):
        p = K(14, 5, 17, 6)
        assert relocation_map(p, 2, p, 2) == IDENTITY

    def test_shift_right(self):
        p0 = K(2, 1, 3, 1)
        rmap = relocation_map(p0, 4, p0, 5)
        expected = key_matrix(p0) @ Mat2(1, 0, 1, 1) @ invert_key(p0)
        assert rmap == expected
        assert apply_relocation(rmap, K(65, 23, 82, 29)) == encode_path([2, 5, 3])

    def test_apply_worked(self):
        rmap = relocation_map(K(2, 1, 3, 1), 4, K(3, 1, 4, 1), 1)
        assert apply_relocation(rmap, K(65, 23, 82, 29)).astuple() == (40, 11, 51, 14)
        assert eval_cf([3, 1, 3]) == Fraction(40, 11)
        out = apply_relocation(rmap, K(31, 11, 48, 17))
        assert out == encode_path([3, 1, 1])
        # (7,2,11,3) child 1 by hand: (7+11, 2+3, 7+22, 2+6)
        assert out.astuple() == (18, 5, 29, 8)
        # the moved node itself
        assert apply_relocation(rmap, K(14, 5, 17, 6)).astuple() == (7, 2, 11, 3)

    def test_apply_identity(self):
        assert apply_relocation(IDENTITY, K(65, 23, 82, 29)) == K(65, 23, 82, 29)

    def test_domain_error(self):
        rmap = relocation_map(K(2, 1, 3, 1), 4, K(3, 1, 4, 1), 1)
        # [1] lies outside the moved subtree
        with pytest.raises(RelocationDomainError):
            apply_relocation(rmap, K(1, 1, 2, 1))

    def test_bad_ordinals(self):
        with pytest.raises(InvalidOrdinalError):
            relocation_map(ROOT_KEY, 0, ROOT_KEY, 1)

    @given(paths0, st.integers(1, 10), paths0, st.integers(1, 10), paths0)
    def test_consistency(self, a, n, b, m, s):
        rmap = relocation_map(encode_path(a), n, encode_path(b), m)
        assert rmap.det == 1
        old = encode_path(a + (n,) + s)
        assert apply_relocation(rmap, old) == encode_path(b + (m,) + s)

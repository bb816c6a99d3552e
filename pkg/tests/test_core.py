import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vbraid.core import (
    RELATION_NAMES,
    BraidWord,
    Category,
    Kind,
    S,
    all_relation_sites,
    apply_relation,
    c,
    compose,
    cycle_count,
    format_word,
    free_reduce,
    include_right,
    insert_pair,
    invert,
    parse_word,
    random_word,
    relation,
    relations_at,
    s,
    shift_left,
    underlying_permutation,
    v,
    writhe,
)
from vbraid.errors import CategoryViolation, IndexOutOfRange, NoMatch, ParseError, StrandMismatch

P = parse_word


def perm_oracle(w):
    """Follow each top endpoint down through the word, swapping adjacent positions."""
    pos = list(range(1, w.strands + 1))  # pos[k] = current position of strand starting at k+1
    for g in w.letters:
        i = g.index
        for k, p in enumerate(pos):
            if p == i:
                pos[k] = i + 1
            elif p == i + 1:
                pos[k] = i
    return tuple(pos)


def cycles_oracle(perm):
    seen, count = set(), 0
    for start in range(1, len(perm) + 1):
        if start in seen:
            continue
        count += 1
        x = start
        while x not in seen:
            seen.add(x)
            x = perm[x - 1]
    return count


words = st.integers(1, 5).flatmap(
    lambda n: st.lists(
        st.tuples(st.sampled_from("sSv"), st.integers(1, max(1, n - 1))), max_size=10
    ).map(lambda toks: P(f"n={n} " + " ".join(f"{k}{i}" for k, i in toks) if n > 1 else f"n={n}"))
)


class TestParsing:
    def test_basic(self):
        w = P("n=3 s1 v2 S1")
        assert w.letters == (s(1), v(2), S(1))
        assert w.strands == 3 and w.category is Category.VIRTUAL

    def test_flat(self):
        w = P("n=2 c1 cat=flat")
        assert w.category is Category.FLAT and w.letters == (c(1),)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            P("n=2 s5")

    @pytest.mark.parametrize("text,offset", [("n=3 s1 x2", 7), ("m=3", 0), ("n=2 s1 cat=bogus", 7), ("", 0)])
    def test_parse_error_offsets(self, text, offset):
        with pytest.raises(ParseError) as e:
            P(text)
        assert e.value.offset == offset

    def test_category_letter_mismatch(self):
        with pytest.raises(CategoryViolation):
            P("n=2 s1 cat=flat")
        with pytest.raises(CategoryViolation):
            P("n=2 c1")

    def test_whitespace_normalized(self):
        assert format_word(P("  n=3   s1\tv2  ")) == "n=3 s1 v2"
        assert format_word(P("n=2 c1 v1 cat=flat")) == "n=2 c1 v1 cat=flat"

    @given(words)
    def test_roundtrip(self, w):
        assert P(format_word(w)) == w


class TestWordAlgebra:
    def test_free_reduce_examples(self):
        assert free_reduce(P("n=2 s1 S1")).letters == ()
        assert free_reduce(P("n=2 v1 v1")).letters == ()
        w = P("n=3 s1 v2 S1")
        assert free_reduce(w) == w
        assert free_reduce(P("n=3 s1 v2 v2 S1 s2")) == P("n=3 s2")

    def test_permutation_examples(self):
        assert underlying_permutation(P("n=3")) == (1, 2, 3)
        assert underlying_permutation(P("n=2 s1")) == (2, 1)
        assert underlying_permutation(P("n=3 s1 v2")) == (3, 1, 2)

    @given(words)
    def test_permutation_matches_oracle(self, w):
        perm = underlying_permutation(w)
        assert perm == perm_oracle(w)
        assert cycle_count(w) == cycles_oracle(perm)

    def test_writhe(self):
        assert writhe(P("n=3 s1 S2 v1 s1")) == 1
        assert writhe(P("n=3 v1 v2 v1")) == 0
        assert writhe(P("n=2 S1 S1")) == -2

    def test_include_and_shift(self):
        assert include_right(P("n=2 s1")) == P("n=3 s1")
        assert shift_left(P("n=3 s1 v2")) == P("n=4 s2 v3")
        assert shift_left(P("n=1")) == P("n=2")

    def test_compose_invert(self):
        assert compose(P("n=2 s1"), P("n=2 v1")) == P("n=2 s1 v1")
        assert invert(P("n=3 s1 v1 S2")) == P("n=3 s2 v1 S1")
        with pytest.raises(StrandMismatch):
            compose(P("n=2 s1"), P("n=3 s1"))

    @given(words)
    def test_invert_involution_and_cancellation(self, w):
        assert invert(invert(w)) == w
        assert free_reduce(compose(w, invert(w))).letters == ()


class TestRelations:
    def test_special_detour(self):
        w = P("n=3 v1 s2 v1")
        assert apply_relation(w, relation("special-detour", 1), 0) == P("n=3 v2 s1 v2")
        assert apply_relation(P("n=3 v2 s1 v2"), relation("special-detour", 1), 0, "backward") == w

    def test_forbidden_moves_by_category(self):
        f1 = relation("F1", 1)
        assert apply_relation(P("n=3 v1 s2 s1 cat=welded"), f1, 0) == P("n=3 s2 s1 v2 cat=welded")
        with pytest.raises(CategoryViolation):
            apply_relation(P("n=3 v1 s2 s1"), f1, 0)
        f2 = relation("F2", 1)
        with pytest.raises(CategoryViolation):
            apply_relation(P("n=3 s1 s2 v1 cat=welded"), f2, 0)
        assert apply_relation(P("n=3 s1 s2 v1 cat=unrestricted"), f2, 0) == P("n=3 v2 s1 s2 cat=unrestricted")

    def test_no_match(self):
        with pytest.raises(NoMatch):
            apply_relation(P("n=3 s1 s2 s2"), relation("braid-rel", 1), 0)

    def test_category_tables_nest(self):
        v_, w_, u_ = (set(RELATION_NAMES[c]) for c in (Category.VIRTUAL, Category.WELDED, Category.UNRESTRICTED))
        assert v_ < w_ < u_
        assert "F1" in w_ and "F2" not in w_ and "F2" in u_
        assert "c-braid" in RELATION_NAMES[Category.FLAT]

    def test_insert_pair_and_cancel(self):
        w = insert_pair(P("n=3 s1"), s(2), 1)
        assert w == P("n=3 s1 s2 S2")
        assert free_reduce(w) == P("n=3 s1")

    def test_every_site_applies_and_preserves_permutation(self):
        rng = random.Random(7)
        for _ in range(200):
            w = random_word(rng, rng.randint(2, 4), rng.randint(0, 8))
            for pos, rel, direction in all_relation_sites(w):
                out = apply_relation(w, rel, pos, direction)
                assert underlying_permutation(out) == underlying_permutation(w)
                assert (rel, direction) in relations_at(w, pos)

    def test_relations_json_roundtrip(self):
        from vbraid.core import Relation

        r = relation("mixed-flat", 2)
        assert Relation.from_json(r.to_json()) == r

    def test_flat_random_words(self):
        rng = random.Random(1)
        w = random_word(rng, 3, 20, Category.FLAT)
        assert {g.kind for g in w.letters} <= {Kind.C, Kind.V}
        with pytest.raises(IndexOutOfRange):
            BraidWord(0)

import random

import pytest

from vbraid.core import Category, parse_word, random_word
from vbraid.errors import BudgetExceeded, CategoryMismatch
from vbraid.invariants import bracket_of_closure
from vbraid.search import (
    NotFoundWithinBounds,
    SearchConfig,
    bfs_connect,
    canonicalize,
    canonicalize_path,
    real_conjugate_pair,
    distinct_words_flat,
    flat_power,
)

P = parse_word


class TestCanonicalize:
    def test_examples(self):
        assert canonicalize(P("n=2 v1 v1 s1")) == P("n=2 s1")
        assert canonicalize(P("n=3 v1 s2 v1 v2 S1 v2")) == P("n=3")

    def test_commuting_cancellation(self):
        assert canonicalize(P("n=4 s1 v3 S1")) == P("n=4 v3")

    def test_idempotent_and_sound(self):
        rng = random.Random(4)
        for _ in range(150):
            w = random_word(rng, rng.randint(2, 4), rng.randint(0, 9))
            c1 = canonicalize(w)
            assert canonicalize(c1) == c1
            assert len(c1) <= len(w)
            assert bracket_of_closure(c1) == bracket_of_closure(w)

    def test_path_validates(self):
        rng = random.Random(9)
        for _ in range(50):
            w = random_word(rng, rng.randint(2, 4), rng.randint(0, 8))
            path = canonicalize_path(w)
            assert path.validate() and path.end == canonicalize(w)
            assert all(st.move.kind == "relation" for st in path.steps)

    def test_budget_zero_is_commutation_normal_form(self):
        assert canonicalize(P("n=4 v3 s1"), 0) == P("n=4 s1 v3")


class TestBfs:
    def test_equal_words(self):
        w = P("n=2 s1")
        path = bfs_connect(w, w)
        assert path.steps == [] and path.end == w

    def test_stabilization_one_step(self):
        path = bfs_connect(P("n=2 s1"), P("n=3 s1 s2"))
        assert len(path.steps) == 1 and path.steps[0].move.kind == "stabilize"

    def test_real_conjugate_pair_under_markov_set(self):
        a, b = real_conjugate_pair()
        path = bfs_connect(a, b, SearchConfig(moves="markov"))
        assert len(path.steps) == 1 and path.steps[0].move.kind == "conjugate"

    def test_paths_preserve_bracket(self):
        cases = [
            (P("n=2 v1"), P("n=3 v1 S2 v1 s2")),
            (P("n=3 s1 s2 S1"), P("n=3 S1 s2 s1")),
            (P("n=2 s1 v1"), P("n=2 v1 s1")),
        ]
        for a, b in cases:
            res = bfs_connect(a, b, SearchConfig(max_depth=4))
            assert not isinstance(res, NotFoundWithinBounds)
            assert res.validate()
            assert bracket_of_closure(a) == bracket_of_closure(b)

    def test_lv_only_excludes_conjugation(self):
        a, b = real_conjugate_pair()
        res = bfs_connect(a, b, SearchConfig(moves="lv-only", max_depth=3))
        assert isinstance(res, NotFoundWithinBounds)
        assert res.to_json()["result"] == "not-found-within-bounds"
        assert "not a proof" in res.note

    def test_lv_only_finds_lv_moves(self):
        w = P("n=2 s1")
        from vbraid.moves import lv_insert

        target = lv_insert(w, (1, 2), "virtual", "right")
        res = bfs_connect(w, target, SearchConfig(moves="lv-only", max_depth=2))
        assert not isinstance(res, NotFoundWithinBounds) and res.validate()

    def test_exchange_set(self):
        a, b = P("n=3 s1 S2 v1 s2"), P("n=3 s1 v2 v1 v2")
        res = bfs_connect(a, b, SearchConfig(moves="exchange", max_depth=2))
        assert not isinstance(res, NotFoundWithinBounds)

    def test_flat_set(self):
        a = P("n=2 c1 v1 cat=flat")
        b = P("n=3 c1 v1 c2 cat=flat")
        res = bfs_connect(a, b, SearchConfig(moves="flat", max_depth=2))
        assert not isinstance(res, NotFoundWithinBounds)

    def test_budget_exceeded(self):
        a, b = real_conjugate_pair()
        with pytest.raises(BudgetExceeded) as e:
            bfs_connect(a, b, SearchConfig(moves="lv-only", max_depth=6, node_budget=50))
        assert e.value.nodes > 50

    def test_category_mismatch(self):
        with pytest.raises(CategoryMismatch):
            bfs_connect(P("n=2 v1"), P("n=2 v1 cat=welded"))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SearchConfig(max_depth=0)
        with pytest.raises(ValueError):
            SearchConfig(moves="nope")

    def test_deterministic(self):
        a, b = P("n=2 v1"), P("n=3 v1 S2 v1 s2")
        cfg = SearchConfig(max_depth=3)
        assert bfs_connect(a, b, cfg).to_json() == bfs_connect(a, b, cfg).to_json()


class TestFlat:
    def test_power_words(self):
        assert flat_power(0) == P("n=2 cat=flat")
        assert flat_power(2) == P("n=2 c1 v1 c1 v1 cat=flat")
        assert flat_power(1).category is Category.FLAT

    def test_small_case(self):
        rep = distinct_words_flat(3, depth=6)
        assert rep.all_distinct and rep.normal_forms_distinct
        assert len(rep.pairs) == 6  # pairs among k = 0..3, k = 0 being the empty word
        assert rep.to_json()["all_distinct"] is True

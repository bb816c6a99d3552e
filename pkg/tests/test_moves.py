import json

import pytest

from vbraid import fixture_path
from vbraid.core import (
    Category,
    c,
    cycle_count,
    free_reduce,
    parse_word,
    random_word,
    s,
    underlying_permutation,
    v,
)
from vbraid.diagram import closure, parity_signature
from vbraid.errors import BadSite, CategoryViolation, ScriptInapplicable, TooFewStrands
from vbraid.invariants import bracket_of_closure
from vbraid.moves import (
    MovePath,
    Step,
    apply_move,
    conjugate,
    deconjugate,
    destabilize,
    exchange_left,
    exchange_move,
    exchange_right,
    inverse_move,
    lv_insert,
    lv_remove,
    mk,
    replay_derivation,
    stabilize_right,
    thread_left_flat,
    thread_left_under,
    thread_right_flat,
    thread_right_under,
    unthread_left_under,
    unthread_right_under,
)

P = parse_word


def inv(w):
    return bracket_of_closure(w)


class TestConjugation:
    def test_form(self):
        assert conjugate(P("n=2 v1"), s(1)) == P("n=2 S1 v1 s1")
        assert deconjugate(P("n=2 S1 v1 s1"), s(1)) == P("n=2 v1")

    def test_virtual_involution(self, rng):
        for _ in range(20):
            w = random_word(rng, 3, 5)
            assert free_reduce(conjugate(conjugate(w, v(2)), v(2))) == free_reduce(w)

    def test_bracket(self, rng):
        for _ in range(100):
            w = random_word(rng, rng.randint(2, 4), rng.randint(0, 8))
            g = random_word(rng, w.strands, 1).letters[0]
            assert inv(conjugate(w, g)) == inv(w)

    def test_guards(self):
        with pytest.raises(CategoryViolation):
            conjugate(P("n=2 c1 cat=flat"), s(1))
        with pytest.raises(CategoryViolation):
            conjugate(P("n=2 s1"), c(1))
        assert conjugate(P("n=2 c1 cat=flat"), c(1)) == P("n=2 c1 c1 c1 cat=flat")


class TestStabilization:
    def test_examples(self):
        assert stabilize_right(P("n=1"), "virtual") == P("n=2 v1")
        w = stabilize_right(P("n=2 s1"), "real+")
        assert w == P("n=3 s1 s2") and inv(w) == inv(P("n=2 s1"))
        assert destabilize(P("n=3 s1 v2")) == P("n=2 s1")
        with pytest.raises(Exception):
            destabilize(P("n=3 s2 v2"))

    def test_properties(self, rng):
        for _ in range(100):
            w = random_word(rng, rng.randint(1, 4), rng.randint(0, 8))
            for kind in ("real+", "real-", "virtual"):
                out = stabilize_right(w, kind)
                assert out.strands == w.strands + 1
                assert cycle_count(out) == cycle_count(w)
                assert inv(out) == inv(w)
                assert destabilize(out) == w

    def test_flat(self):
        assert stabilize_right(P("n=1 cat=flat"), "flat") == P("n=2 c1 cat=flat")
        with pytest.raises(CategoryViolation):
            stabilize_right(P("n=1"), "flat")
        with pytest.raises(CategoryViolation):
            stabilize_right(P("n=1 cat=flat"), "real+")


class TestThreading:
    def test_examples(self):
        w = thread_right_under(P("n=2"))
        assert w == P("n=3 S2 v1 s2") and cycle_count(w) == 2
        assert inv(w) == inv(P("n=2"))
        assert thread_right_under(P("n=2 v1")) == P("n=3 v1 S2 v1 s2")
        assert thread_right_under(P("n=2"), -1) == P("n=3 s2 v1 S2")
        assert thread_left_under(P("n=2")) == P("n=3 v2 v1 s1 v2 S1 v1 v2")
        t = thread_left_under(P("n=2 s1"))
        assert len(t) == 8 and inv(t) == inv(P("n=2 s1"))
        assert thread_right_flat(P("n=2 cat=flat")) == P("n=3 c2 v1 c2 cat=flat")
        assert thread_left_flat(P("n=2 cat=flat")) == P("n=3 v2 v1 c1 v2 c1 v1 v2 cat=flat")

    def test_inverse(self, rng):
        for _ in range(50):
            w = random_word(rng, rng.randint(2, 4), rng.randint(0, 6))
            for sign in (1, -1):
                assert unthread_right_under(thread_right_under(w, sign), sign) == w
                assert unthread_left_under(thread_left_under(w, sign), sign) == w
                assert inv(thread_right_under(w, sign)) == inv(w)
                assert inv(thread_left_under(w, sign)) == inv(w)

    def test_guards(self):
        with pytest.raises(TooFewStrands):
            thread_right_under(P("n=1"))
        for cat in ("welded", "unrestricted", "flat"):
            with pytest.raises(CategoryViolation):
                thread_right_under(P(f"n=2 cat={cat}"))
            with pytest.raises(CategoryViolation):
                thread_left_under(P(f"n=2 cat={cat}"))
        with pytest.raises(CategoryViolation):
            thread_right_flat(P("n=2"))


class TestLv:
    def test_basic_on_empty(self):
        w = lv_insert(P("n=1"), (0, 1), "basic", "right")
        assert w.strands == 2 and all(g.kind.value == "v" for g in w.letters)
        assert cycle_count(w) == 1 and inv(w) == 1

    def test_random_insertions(self, rng):
        kinds = [("basic", "right"), ("virtual", "right"), ("virtual", "left"),
                 ("real+", "right"), ("real+", "left"), ("real-", "right"), ("real-", "left")]
        for _ in range(100):
            w = random_word(rng, rng.randint(1, 4), rng.randint(0, 7))
            site = (rng.randint(0, len(w)), rng.randint(1, w.strands))
            kind, side = rng.choice(kinds)
            out = lv_insert(w, site, kind, side)
            assert out.strands == w.strands + 1
            assert inv(out) == inv(w)
            assert lv_remove(out, site, kind, side) == w

    def test_bad_site(self):
        with pytest.raises(BadSite):
            lv_insert(P("n=2 s1"), (5, 1))
        with pytest.raises(BadSite):
            lv_insert(P("n=2 s1"), (0, 3))


class TestExchange:
    def test_examples(self):
        a, b = exchange_right(P("n=1"), P("n=1"))
        assert a == P("n=2 S1 s1") and b == P("n=2 v1 v1")
        assert free_reduce(a).letters == free_reduce(b).letters == ()
        a, b = exchange_right(P("n=2 s1"), P("n=2 v1"))
        assert a.strands == 3 and inv(a) == inv(b)
        a, b = exchange_left(P("n=2 s1"), P("n=2 v1"))
        assert a == P("n=3 s2 S1 v2 s1") and b == P("n=3 s2 v1 v2 v1")

    def test_permutations_and_bracket(self, rng):
        for _ in range(60):
            n = rng.randint(1, 3)
            b1, b2 = random_word(rng, n, rng.randint(0, 4)), random_word(rng, n, rng.randint(0, 4))
            for fn in (exchange_right, exchange_left):
                a, b = fn(b1, b2)
                assert underlying_permutation(a) == underlying_permutation(b)
                assert inv(a) == inv(b)

    def test_exchange_move_in_place(self):
        a, b = exchange_right(P("n=2 s1"), P("n=2 v1"))
        assert exchange_move(a, 1, 3, "right") == b
        assert exchange_move(b, 1, 3, "right") == a


class TestMovePath:
    def test_apply_and_inverse(self, rng):
        moves = [
            mk("conjugate", gen=s(1)), mk("stabilize", kind="real-"), mk("thread-right-under", sign=1),
            mk("thread-left-under", sign=-1), mk("lv-insert", site=(0, 1), kind="virtual", side="left"),
            mk("insert-pair", gen=v(1), pos=0),
        ]
        for _ in range(30):
            w = random_word(rng, rng.randint(2, 3), rng.randint(0, 5))
            for mv in moves:
                out = apply_move(w, mv)
                assert apply_move(out, inverse_move(mv, w)) == w

    def test_json_roundtrip_and_validation(self):
        w = P("n=2 v1")
        steps = [Step(mk("conjugate", gen=s(1)), P("n=2 S1 v1 s1"))]
        path = MovePath(w, steps, "demo")
        assert path.validate()
        again = MovePath.from_json(json.loads(path.dumps()))
        assert again == path and again.end == path.end
        bad = MovePath(w, [Step(mk("conjugate", gen=s(1)), P("n=2 s1 v1 S1"))])
        with pytest.raises(ScriptInapplicable) as e:
            bad.validate()
        assert e.value.step == 0
        assert path.reversed().end == w and path.reversed().validate()


class TestScripts:
    @pytest.mark.parametrize("text", ["n=2 s1", "n=1", "n=3 s1 v2 S1", "n=2 v1 v1 s1"])
    def test_fig37(self, text):
        w = P(text)
        for p in range(1, w.strands + 1):
            path = replay_derivation("fig37", w, strand=p)
            assert path.start == w and path.validate()
            assert inv(path.end) == inv(w)

    def test_fig37_endpoint_is_stabilization(self):
        path = replay_derivation("fig37-real-Lv-to-stabilization", P("n=2 s1"))
        end = path.end
        assert end.letters[-1] == s(2) and destabilize(end, "real+") == P("n=2 v1 s1 v1")

    def test_threading_script(self):
        path = replay_derivation("threading-from-kamada", P("n=2"))
        assert path.start == P("n=3 S2 v1 s2") and path.end == P("n=2")
        assert {st.move.kind for st in path.steps} >= {"exchange", "destabilize"}

    def test_exchange_empty_and_fixtures(self):
        path = replay_derivation("exchange-from-theorem3", P("n=1"), P("n=1"))
        assert path.validate()
        data = json.loads(fixture_path("exchange_instances.json").read_text())
        for a, b in data["instances"]:
            b1, b2 = P(a), P(b)
            path = replay_derivation("exchange-from-theorem3", b1, b2)
            left, right = exchange_right(b1, b2)
            assert path.start == left and path.end == right

    def test_bottom_left_threading(self, rng):
        for _ in range(10):
            w = random_word(rng, 2, rng.randint(0, 5))
            for sign in (1, -1):
                path = replay_derivation("remark6-bottom-left", w, sign=sign)
                assert inv(path.end) == inv(path.start)

    def test_inapplicable(self):
        with pytest.raises(ScriptInapplicable):
            replay_derivation("nope", P("n=2"))
        with pytest.raises(ScriptInapplicable):
            replay_derivation("exchange-from-theorem3", P("n=2"), P("n=2 s1 s1"))


def test_flat_moves_preserve_parity(rng):
    for _ in range(60):
        w = random_word(rng, rng.randint(2, 3), rng.randint(0, 6), Category.FLAT)
        ref = parity_signature(closure(w))
        for out in (conjugate(w, c(1)), conjugate(w, v(1)), stabilize_right(w, "flat"),
                    stabilize_right(w, "virtual"), thread_right_flat(w), thread_left_flat(w)):
            assert parity_signature(closure(out)) == ref

import random

import pytest

from conftest import diagram_fixtures, load_diagram
from vbraid.core import cycle_count, parse_word, random_word
from vbraid.diagram import (
    GaussCode,
    MorsePresentation,
    cap,
    closure,
    components,
    cross,
    cup,
    gauss_from_morse,
    parity_signature,
    random_morse,
    render_closure,
    vcross,
    virtual_parity_between_components,
)
from vbraid.errors import MalformedDiagram, MissingVirtualRecord

P = parse_word


def test_closure_examples():
    g = closure(P("n=2"))
    assert components(g) == 2 and g.crossing_ids() == []
    g = closure(P("n=2 s1"))
    assert components(g) == 1
    (comp,) = g.components
    assert [(x.role, x.sign) for x in comp] == [("over", "+"), ("under", "+")]
    g = closure(P("n=2 v1"))
    assert components(g) == 1 and g.crossing_ids() == [] and len(g.virtual_record) == 1
    (rec,) = g.virtual_record
    assert rec.incidences[0][0] == rec.incidences[1][0] == 1


@pytest.mark.parametrize("text,k", [("n=3", 3), ("n=3 s1 s2", 1), ("n=2 v1 v1", 2)])
def test_component_counts(text, k):
    assert components(closure(P(text))) == k


def test_components_equal_permutation_cycles(rng):
    for _ in range(200):
        w = random_word(rng, rng.randint(1, 5), rng.randint(0, 10))
        assert components(closure(w)) == cycle_count(w)


def test_gauss_from_morse_examples():
    round_unknot = MorsePresentation(0, (cup(1), cap(1)))
    g = gauss_from_morse(round_unknot)
    assert components(g) == 1 and g.crossing_ids() == []
    two = MorsePresentation(0, (cup(1), cup(3), cap(1), cap(1)))
    assert components(gauss_from_morse(two)) == 2
    g = gauss_from_morse(load_diagram("virtual_trefoil.json"))
    assert len(g.crossing_ids()) == 2 and len(g.virtual_record) == 1 and components(g) == 1


def test_closure_agrees_with_rendered_diagram(rng):
    for _ in range(300):
        w = random_word(rng, rng.randint(1, 4), rng.randint(0, 8))
        direct = closure(w)
        for explicit in (False, True):
            assert gauss_from_morse(render_closure(w, explicit)) == direct


def test_morse_json_roundtrip():
    for name in diagram_fixtures():
        m = load_diagram(name)
        assert MorsePresentation.loads(m.dumps()) == m


def test_gauss_json_roundtrip(rng):
    for _ in range(50):
        g = closure(random_word(rng, 3, 6))
        assert GaussCode.from_json(g.to_json()) == g


@pytest.mark.parametrize(
    "slices,strands",
    [
        ((cap(1),), 0),  # nothing to cap
        ((cup(1, "rl"), cross(3)), 0),  # crossing out of range
        ((cup(1, "rl"),), 0),  # unclosed
        ((cup(1, "lr"), cup(1, "lr"), cap(2)), 0),  # cap on two columns of equal orientation
    ],
)
def test_malformed(slices, strands):
    with pytest.raises(MalformedDiagram):
        MorsePresentation(strands, slices).validate()


def test_malformed_json_format():
    with pytest.raises(MalformedDiagram):
        MorsePresentation.from_json({"format": "other", "strands": 0, "slices": []})


def test_parity():
    g = closure(P("n=2 c1 v1 cat=flat"))  # the flat H link
    assert virtual_parity_between_components(g) == {(1, 2): 1}
    assert virtual_parity_between_components(closure(P("n=2 v1 c1 v1 c1 cat=flat"))) == {(1, 2): 0}
    assert set(virtual_parity_between_components(closure(P("n=3 s1 S1"))).values()) == {0}


def test_parity_oracle(rng):
    """Parity equals the count of virtual letters joining different cycles, mod 2."""
    from vbraid.core import Category, Kind, underlying_permutation

    for _ in range(200):
        w = random_word(rng, rng.randint(2, 4), rng.randint(0, 8), Category.FLAT)
        perm = underlying_permutation(w)
        label, k = {}, 0
        for start in range(1, w.strands + 1):
            if start not in label:
                k += 1
                x = start
                while x not in label:
                    label[x] = k
                    x = perm[x - 1]
        # follow strand labels through the word
        at = {p: label[p] for p in range(1, w.strands + 1)}
        counts = {}
        for g_ in w.letters:
            a, b = at[g_.index], at[g_.index + 1]
            if g_.kind is Kind.V and a != b:
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) ^ 1
            at[g_.index], at[g_.index + 1] = b, a
        par = virtual_parity_between_components(closure(w))
        assert sorted(v for v in par.values() if v) == sorted(v for v in counts.values() if v)


def test_parity_requires_virtual_record():
    with pytest.raises(MissingVirtualRecord):
        virtual_parity_between_components(GaussCode(((),), None))


def test_parity_signature_is_relabeling_invariant():
    a = parity_signature(closure(P("n=3 v1 s2 s2 cat=virtual")))
    b = parity_signature(closure(P("n=3 v2 s1 s1")))
    assert a == b


def test_random_morse_is_valid():
    r = random.Random(3)
    for _ in range(100):
        m = random_morse(r, strands=r.randint(0, 2))
        m.validate()
        gauss_from_morse(m)


def test_vcross_event_ok():
    m = MorsePresentation(2, (vcross(1),))
    assert gauss_from_morse(m) == closure(P("n=2 v1"))

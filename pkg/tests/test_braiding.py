import json
import random
import time

import pytest

from conftest import diagram_fixtures, load_diagram
from vbraid import fixture_path
from vbraid.braiding import (
    boxes_needed,
    braid,
    braid_crossing_box,
    braid_diagram,
    eliminate_up_arc,
    find_up_arcs,
    read_word,
)
from vbraid.core import free_reduce, parse_word, random_word
from vbraid.diagram import (
    MorsePresentation,
    cap,
    closure,
    cross,
    cup,
    gauss_from_morse,
    random_morse,
    render_closure,
    vcross,
)
from vbraid.errors import MalformedDiagram, NotFreeArc, NoUpArc
from vbraid.invariants import bracket_state_sum

P = parse_word
ROUND = MorsePresentation(0, (cup(1, "rl"), cap(1)))


def same_bracket(m, w):
    return bracket_state_sum(gauss_from_morse(m)) == bracket_state_sum(closure(w))


def test_up_arcs_of_braid_renderings_and_round_unknot(rng):
    for _ in range(30):
        assert find_up_arcs(render_closure(random_word(rng, 3, 5))) == []
    (a,) = find_up_arcs(ROUND)
    assert a.is_free and a.classification == "free"


def test_virtual_trefoil_up_arcs():
    # the explicit closure has one return arc per strand
    arcs = find_up_arcs(load_diagram("virtual_trefoil.json"))
    assert len(arcs) == 2 and all(a.is_free for a in arcs)


def test_round_unknot_braids_to_trivial():
    (a,) = find_up_arcs(ROUND)
    assert eliminate_up_arc(ROUND, a) == MorsePresentation(1, ())
    assert braid(ROUND) == P("n=1")


def test_free_arc_over_two_strands_adds_four_vcrossings():
    # a round circle to the right of... here: strands pass through the circle's up side
    m = MorsePresentation(2, (cup(1, "rl"), vcross(2), vcross(3), vcross(3), vcross(2), cap(1)))
    m.validate()
    arcs = find_up_arcs(m)
    assert len(arcs) == 1
    out = eliminate_up_arc(m, arcs[0])
    before = sum(e.event == "vcross" for e in m.slices)
    after = sum(e.event == "vcross" for e in out.slices)
    assert out.strands == 3
    assert not any(e.event in ("cup", "cap") for e in out.slices)
    assert bracket_state_sum(gauss_from_morse(out)) == bracket_state_sum(gauss_from_morse(m))
    assert after >= before


def test_not_free_arc():
    m = load_diagram("up_up_kink.json")
    blocked = [a for a in find_up_arcs(m) if not a.is_free]
    assert blocked
    with pytest.raises(NotFreeArc):
        eliminate_up_arc(m, blocked[0])
    free = find_up_arcs(braid_diagram(load_diagram("virtual_hopf.json")))
    assert free == []


def test_crossing_box_cases():
    w = P("n=2 s1")
    m = render_closure(w)
    assert braid_crossing_box(m, 0) == m
    with pytest.raises(NoUpArc):
        braid_crossing_box(m, 0, strict=True)
    with pytest.raises(NoUpArc):
        braid_crossing_box(ROUND, 0)
    m = load_diagram("up_up_kink.json")
    t = boxes_needed(m)[0]
    out = braid_crossing_box(m, t)
    assert sum(e.event == "cup" for e in out.slices) - sum(e.event == "cup" for e in m.slices) == 2
    assert gauss_from_morse(out).components == gauss_from_morse(m).components


def test_crossing_box_one_up_virtual_and_classical(rng):
    for _ in range(100):
        m = random_morse(rng, strands=rng.randint(0, 2), steps=9)
        g = gauss_from_morse(m)
        for t in boxes_needed(m):
            assert gauss_from_morse(braid_crossing_box(m, t)).components == g.components


def test_fixtures_braid_and_match_golden():
    golden = json.loads(fixture_path("golden_braiding.json").read_text())
    names = diagram_fixtures()
    assert len(names) >= 10
    for name in names:
        m = load_diagram(name)
        t0 = time.perf_counter()
        w = braid(m)
        assert time.perf_counter() - t0 < 1.0
        key = name[:-5]
        assert str(w) == golden[key]["braid"]
        assert str(bracket_state_sum(gauss_from_morse(m))) == golden[key]["bracket"]
        assert same_bracket(m, w)


def test_random_elimination_orders(rng):
    for name in diagram_fixtures():
        m = load_diagram(name)
        a = braid(m, random.Random(1))
        b = braid(m, random.Random(2))
        assert bracket_state_sum(closure(a)) == bracket_state_sum(closure(b))


def test_rendered_closures_braid_back(rng):
    for _ in range(60):
        w = random_word(rng, rng.randint(1, 3), rng.randint(0, 6))
        m = render_closure(w, explicit=True)
        out = braid(m)
        assert same_bracket(m, out)
    assert free_reduce(braid(render_closure(P("n=2 s1")))) == P("n=2 s1")


def test_flat_diagram_reads_flat():
    m = render_closure(P("n=2 c1 v1 cat=flat"), explicit=True)
    w = braid(m)
    assert w.category.value == "flat"


def test_read_word_rejects_cups():
    with pytest.raises(MalformedDiagram):
        read_word(ROUND)
    with pytest.raises(MalformedDiagram):
        read_word(MorsePresentation(3, (cross(1, "+"), cross(2, "flat"))))


def test_up_arc_json():
    (a,) = find_up_arcs(ROUND)
    d = a.to_json()
    assert d["classification"] == "free" and d["crossings"] == []


def test_vcross_on_free_arc_is_absorbed():
    m = MorsePresentation(0, (cup(1, "rl"), cup(3, "rl"), vcross(2), vcross(2), cap(1), cap(1)))
    m.validate()
    out = braid_diagram(m)
    assert not any(e.event in ("cup", "cap") for e in out.slices)
    assert same_bracket(m, read_word(out))


def test_arc_across_two_strands_becomes_one_boundary_strand():
    # the up-arc climbs across both vertical strands; it is replaced by a single
    # new downward strand that crosses each of them once
    m = MorsePresentation(2, (cup(3, "lr"), vcross(2), vcross(1), cap(1)))
    (a,) = find_up_arcs(m)
    assert a.vcrossings == (2, 1)
    out = eliminate_up_arc(m, a)
    assert out.strands == 3
    assert [e.event for e in out.slices] == ["vcross", "vcross"]
    assert bracket_state_sum(gauss_from_morse(out)) == bracket_state_sum(gauss_from_morse(m))

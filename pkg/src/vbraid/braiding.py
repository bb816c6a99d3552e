"""Turning a Morse presentation into a virtual braid.

Two local operations do all the work:

* :func:`braid_crossing_box` rewrites a crossing that has an upward strand so
  that the crossing itself is traversed downward. Each upward strand gets a
  cup above and a cap below the crossing, and the columns are reordered with
  virtual crossings. The classical crossing keeps its sign and over strand, so
  the Gauss code does not change.
* :func:`eliminate_up_arc` removes a free up-arc (one that meets only virtual
  crossings): the strand arriving at its bottom is sent right to a new
  boundary column and comes back from the top, crossing everything virtually.

Both only add or remove virtual crossings, which never change the Gauss code.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import BraidWord, Category, Generator, Kind
from .diagram import Event, MorsePresentation, cap, cup, vcross
from .errors import MalformedDiagram, NoUpArc, NotFreeArc


@dataclass(frozen=True)
class UpArc:
    bottom_slice: int  # the cap where the arc starts
    top_slice: int  # the cup where it ends
    columns: tuple[tuple[int, int], ...]  # (level, column) from bottom to top
    crossings: tuple[int, ...]  # slices of classical/flat crossings on the arc
    vcrossings: tuple[int, ...]

    @property
    def classification(self) -> str:
        return "free" if not self.crossings else "within-crossing-box"

    @property
    def is_free(self) -> bool:
        return not self.crossings

    def to_json(self) -> dict:
        return {
            "bottom_slice": self.bottom_slice,
            "top_slice": self.top_slice,
            "columns": [list(x) for x in self.columns],
            "classification": self.classification,
            "crossings": list(self.crossings),
            "vcrossings": list(self.vcrossings),
        }


def find_up_arcs(m: MorsePresentation) -> list[UpArc]:
    """Every maximal upward run, ordered leftmost-topmost (by top slice, then column)."""
    levels = m.levels()
    arcs = []
    for tb, ev in enumerate(m.slices):
        if ev.event != "cap":
            continue
        p = ev.pos
        j = p if levels[tb][p - 1] == "u" else p + 1
        L = tb
        cols = [(L, j)]
        xs, vxs = [], []
        while True:
            t = L - 1
            e = m.slices[t]
            q = e.pos
            if e.event == "cup":
                if j in (q, q + 1):
                    break
                j = j if j < q else j - 2
            elif e.event == "cap":
                j = j if j < q else j + 2
            elif j in (q, q + 1):
                (vxs if e.event == "vcross" else xs).append(t)
                j = q + 1 if j == q else q
            L = t
            cols.append((L, j))
        arcs.append(UpArc(tb, L - 1, tuple(cols), tuple(xs), tuple(vxs)))
    arcs.sort(key=lambda a: (a.top_slice, a.columns[-1][1]))
    return arcs


def eliminate_up_arc(m: MorsePresentation, a: UpArc) -> MorsePresentation:
    """The basic braiding move on a free up-arc."""
    if not a.is_free:
        raise NotFreeArc(f"up-arc from slice {a.bottom_slice} to {a.top_slice} passes a classical crossing")
    levels = m.levels()
    if a not in find_up_arcs(m):
        raise NotFreeArc("the given arc is not an up-arc of this diagram")
    tt, tb = a.top_slice, a.bottom_slice
    arc_col = {L: j for L, j in a.columns}
    out: list[Event] = []
    for t, ev in enumerate(m.slices):
        if t < tt or t > tb:
            out.append(ev)
            continue
        if t == tt:
            # the new column enters from the top right and moves left into the cup's down strand
            w = len(levels[t])
            out.extend(vcross(q) for q in range(w, ev.pos - 1, -1))
            continue
        if t == tb:
            # the strand reaching the cap moves right to become a new boundary column
            W = len(levels[t])
            out.extend(vcross(q) for q in range(ev.pos, W - 1))
            continue
        j = arc_col[t]
        if ev.event in ("cross", "vcross") and j in (ev.pos, ev.pos + 1):
            if ev.event == "cross":
                raise NotFreeArc(f"slice {t} is a classical crossing on the arc")
            continue
        shift = 1 if j < ev.pos else 0
        out.append(Event(ev.event, ev.pos - shift, ev.sign, ev.orient))
    return MorsePresentation(m.strands + 1, tuple(out)).validate()


def braid_crossing_box(m: MorsePresentation, t: int, strict: bool = False) -> MorsePresentation:
    """Rewrite the crossing at slice ``t`` so that both of its strands run downward.

    A crossing whose strands already both run down is returned unchanged, or
    raises :class:`NoUpArc` when ``strict`` is set.
    """
    levels = m.levels()
    if not 0 <= t < len(m.slices):
        raise NoUpArc(f"no slice {t}")
    ev = m.slices[t]
    if ev.event not in ("cross", "vcross"):
        raise NoUpArc(f"slice {t} is a {ev.event}, not a crossing")
    p = ev.pos
    o1, o2 = levels[t][p - 1], levels[t][p]
    if o1 == "d" and o2 == "d":
        if strict:
            raise NoUpArc(f"both strands of the crossing at slice {t} run downward")
        return m
    # S1 joins top-left to bottom-right, S2 joins top-right to bottom-left
    up = {"S1": o1 == "u", "S2": o2 == "u"}
    top = {"S1": "T1", "S2": "T2"}
    events: list[Event] = []
    row = ["T1", "T2"]

    def route(target: list[str]) -> None:
        cur = row
        for goal_idx, lab in enumerate(target):
            k = cur.index(lab)
            while k > goal_idx:
                events.append(vcross(p + k - 1))
                cur[k - 1], cur[k] = cur[k], cur[k - 1]
                k -= 1

    descending = {}
    for S in ("S1", "S2"):
        if up[S]:
            events.append(cup(p + len(row), "rl"))
            row.extend([f"D{S}", f"U{S}"])
            descending[S] = f"D{S}"
        else:
            descending[S] = top[S]
    if ev.event == "cross" and ev.sign != "flat":
        s1_over = (ev.sign == "+") != (o1 != o2)
        over, under = ("S1", "S2") if s1_over else ("S2", "S1")
        left = over if ev.sign == "+" else under
    else:
        left = "S1"
    right = "S2" if left == "S1" else "S1"
    pair = [descending[left], descending[right]]
    route(pair + [x for x in row if x not in pair])
    events.append(Event(ev.event, p, ev.sign))
    row[0], row[1] = row[1], row[0]
    capping = []
    for S in ("S1", "S2"):
        if up[S]:
            capping += [descending[S], top[S]]
    route(capping + [x for x in row if x not in capping])
    for _ in range(len(capping) // 2):
        events.append(cap(p, "lr"))
        del row[:2]
    bottom = {S: (f"U{S}" if up[S] else descending[S]) for S in ("S1", "S2")}
    route([bottom["S2"], bottom["S1"]])
    new = m.slices[:t] + tuple(events) + m.slices[t + 1:]
    return MorsePresentation(m.strands, new).validate()


def boxes_needed(m: MorsePresentation) -> list[int]:
    """Classical or flat crossings with an upward strand. Virtual ones may stay on free arcs."""
    levels = m.levels()
    return [
        t for t, ev in enumerate(m.slices)
        if ev.event == "cross" and "u" in (levels[t][ev.pos - 1], levels[t][ev.pos])
    ]


def braid_diagram(m: MorsePresentation, rng: random.Random | None = None) -> MorsePresentation:
    """Box every crossing with an up strand, then eliminate up-arcs until none remain.

    Deterministic leftmost-topmost order unless ``rng`` is given, in which case
    both the boxing order and the elimination order are random.
    """
    m.validate()
    while True:
        todo = boxes_needed(m)
        if not todo:
            break
        t = rng.choice(todo) if rng else todo[0]
        m = braid_crossing_box(m, t)
    while True:
        arcs = find_up_arcs(m)
        if not arcs:
            break
        a = rng.choice(arcs) if rng else arcs[0]
        m = eliminate_up_arc(m, a)
    return m


def read_word(m: MorsePresentation) -> BraidWord:
    """Read a cup/cap-free, all-downward diagram as a braid word."""
    letters = []
    flat = classical = False
    for t, ev in enumerate(m.slices):
        if ev.event in ("cup", "cap"):
            raise MalformedDiagram("diagram still has cups or caps", t)
        if ev.event == "vcross":
            letters.append(Generator(Kind.V, ev.pos))
        elif ev.sign == "flat":
            flat = True
            letters.append(Generator(Kind.C, ev.pos))
        else:
            classical = True
            letters.append(Generator(Kind.SIGMA_POS if ev.sign == "+" else Kind.SIGMA_NEG, ev.pos))
        if flat and classical:
            raise MalformedDiagram("diagram mixes flat and classical crossings", t)
    if m.strands < 1:
        raise MalformedDiagram("empty diagram has no braid form", 0)
    return BraidWord(m.strands, tuple(letters), Category.FLAT if flat else Category.VIRTUAL)


def braid(m: MorsePresentation, rng: random.Random | None = None) -> BraidWord:
    return read_word(braid_diagram(m, rng))

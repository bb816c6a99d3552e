"""Morse (slice) presentations of oriented virtual link diagrams and Gauss codes.

A :class:`MorsePresentation` is read top to bottom. It starts with ``strands``
downward boundary columns; top column ``j`` is joined to bottom column ``j`` by
an implicit closure arc running around the right of the picture, so the
boundary form of a braid closure is just its braid box. Each slice holds one
event:

* ``cup``   two new columns appear at ``pos, pos+1``, joined above (a maximum)
* ``cap``   columns ``pos, pos+1`` are joined below (a minimum) and vanish
* ``cross`` classical (``+``/``-``) or flat crossing of columns ``pos, pos+1``
* ``vcross`` virtual crossing of columns ``pos, pos+1``

``orient`` on a cup/cap is the direction of travel through the extremum:
``"rl"`` (right to left) or ``"lr"``. A cup with ``"rl"`` therefore has its
left column going down.

Crossing sign is the usual oriented sign. When both strands run downward a
``+`` crossing has the strand entering from the upper left on top, matching
the braid generator ``s<i>``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator

from .core import BraidWord, Kind
from .errors import MalformedDiagram, MissingVirtualRecord

FORMAT = "vbraid-1"
EVENTS = ("cup", "cap", "cross", "vcross")
SIGNS = ("+", "-", "flat")


@dataclass(frozen=True)
class Event:
    event: str
    pos: int
    sign: str | None = None
    orient: str | None = None

    def to_json(self) -> dict:
        d: dict = {"event": self.event, "pos": self.pos}
        if self.sign is not None:
            d["sign"] = self.sign
        if self.orient is not None:
            d["orient"] = self.orient
        return d


def cup(pos: int, orient: str = "rl") -> Event:
    return Event("cup", pos, orient=orient)


def cap(pos: int, orient: str | None = None) -> Event:
    return Event("cap", pos, orient=orient)


def cross(pos: int, sign: str = "+") -> Event:
    return Event("cross", pos, sign=sign)


def vcross(pos: int) -> Event:
    return Event("vcross", pos)


@dataclass(frozen=True)
class MorsePresentation:
    strands: int = 0
    slices: tuple[Event, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))

    # -- structure ---------------------------------------------------------
    def levels(self) -> list[list[str]]:
        """Column orientations (``'d'``/``'u'``) at every level; level t sits above slice t.

        Validates the diagram and raises :class:`MalformedDiagram` at the first bad slice.
        """
        cols = ["d"] * self.strands
        out = [list(cols)]
        for t, ev in enumerate(self.slices):
            cols = _apply_event(cols, ev, t)
            out.append(list(cols))
        if len(cols) != self.strands or any(o != "d" for o in cols):
            raise MalformedDiagram(
                f"diagram does not close: final columns {''.join(cols) or 'none'} "
                f"but {self.strands} downward boundary strands expected",
                len(self.slices),
            )
        return out

    def validate(self) -> MorsePresentation:
        self.levels()
        return self

    def to_json(self) -> dict:
        return {"format": FORMAT, "strands": self.strands, "slices": [e.to_json() for e in self.slices]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> MorsePresentation:
        if not isinstance(d, dict):
            raise MalformedDiagram("top-level JSON value must be an object", 0)
        if d.get("format", FORMAT) != FORMAT:
            raise MalformedDiagram(f"unsupported format {d.get('format')!r}", 0)
        strands = d.get("strands", 0)
        if not isinstance(strands, int) or strands < 0:
            raise MalformedDiagram("'strands' must be a non-negative integer", 0)
        raw = d.get("slices")
        if not isinstance(raw, list):
            raise MalformedDiagram("'slices' must be a list", 0)
        events = []
        for t, s in enumerate(raw):
            if not isinstance(s, dict):
                raise MalformedDiagram("slice must be an object", t)
            unknown = set(s) - {"event", "pos", "sign", "orient"}
            if unknown:
                raise MalformedDiagram(f"unknown keys {sorted(unknown)}", t)
            events.append(Event(s.get("event"), s.get("pos"), s.get("sign"), s.get("orient")))
        m = cls(strands, tuple(events))
        m.validate()
        return m

    @classmethod
    def loads(cls, text: str) -> MorsePresentation:
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedDiagram(f"invalid JSON: {exc.msg}", 0) from None
        return cls.from_json(d)


def _apply_event(cols: list[str], ev: Event, t: int) -> list[str]:
    w = len(cols)
    if ev.event not in EVENTS:
        raise MalformedDiagram(f"unknown event {ev.event!r}", t)
    if not isinstance(ev.pos, int) or isinstance(ev.pos, bool):
        raise MalformedDiagram("pos must be an integer", t)
    p = ev.pos
    if ev.event == "cup":
        if not 1 <= p <= w + 1:
            raise MalformedDiagram(f"cup position {p} outside 1..{w + 1}", t)
        if ev.orient not in ("lr", "rl"):
            raise MalformedDiagram("cup needs orient 'lr' or 'rl'", t)
        if ev.sign is not None:
            raise MalformedDiagram("cup takes no sign", t)
        pair = ["d", "u"] if ev.orient == "rl" else ["u", "d"]
        return cols[:p - 1] + pair + cols[p - 1:]
    if not 1 <= p <= w - 1:
        raise MalformedDiagram(f"{ev.event} position {p} outside 1..{w - 1}", t)
    a, b = cols[p - 1], cols[p]
    if ev.event == "cap":
        if a == b:
            raise MalformedDiagram("cap joins two columns with the same orientation", t)
        actual = "lr" if a == "d" else "rl"
        if ev.orient is not None and ev.orient != actual:
            raise MalformedDiagram(f"cap orient {ev.orient!r} contradicts column orientations", t)
        if ev.sign is not None:
            raise MalformedDiagram("cap takes no sign", t)
        return cols[:p - 1] + cols[p + 1:]
    if ev.event == "cross":
        if ev.sign not in SIGNS:
            raise MalformedDiagram(f"cross sign must be one of {SIGNS}", t)
    elif ev.sign is not None:
        raise MalformedDiagram("vcross takes no sign", t)
    if ev.orient is not None:
        raise MalformedDiagram(f"{ev.event} takes no orient", t)
    return cols[:p - 1] + [b, a] + cols[p + 1:]


def render_closure(w: BraidWord, explicit: bool = False) -> MorsePresentation:
    """Morse presentation of the closure of ``w``.

    The default boundary form is just the braid box. ``explicit=True`` draws the
    closure arcs as nested cups and caps on the right, which gives ``n`` free
    up-arcs.
    """
    body = [letter_event(g) for g in w.letters]
    if not explicit:
        return MorsePresentation(w.strands, tuple(body))
    n = w.strands
    tops = [cup(k, "rl") for k in range(1, n + 1)]
    bottoms = [cap(k, "lr") for k in range(n, 0, -1)]
    return MorsePresentation(0, tuple(tops + body + bottoms))


def letter_event(g) -> Event:
    if g.kind is Kind.V:
        return vcross(g.index)
    if g.kind is Kind.C:
        return cross(g.index, "flat")
    return cross(g.index, "+" if g.kind is Kind.SIGMA_POS else "-")


# ---------------------------------------------------------------- Gauss codes

@dataclass(frozen=True)
class Visit:
    id: int
    role: str  # "over" | "under" | "flat"
    sign: str  # "+" | "-" | "flat"

    def to_json(self) -> dict:
        return {"id": self.id, "role": self.role, "sign": self.sign}


@dataclass(frozen=True)
class VirtualCrossing:
    id: int
    incidences: tuple[tuple[int, int], tuple[int, int]]  # (component, classical visits before it)

    def to_json(self) -> dict:
        return {"id": self.id, "incidences": [list(x) for x in self.incidences]}


@dataclass(frozen=True)
class GaussCode:
    components: tuple[tuple[Visit, ...], ...]
    virtual_record: tuple[VirtualCrossing, ...] | None = field(default=())

    def crossing_ids(self) -> list[int]:
        return sorted({x.id for comp in self.components for x in comp})

    def signs(self) -> dict[int, str]:
        return {x.id: x.sign for comp in self.components for x in comp}

    def writhe(self) -> int:
        return sum({"+": 1, "-": -1}.get(sg, 0) for sg in self.signs().values())

    def to_json(self) -> dict:
        d: dict = {
            "format": FORMAT,
            "components": [[x.to_json() for x in comp] for comp in self.components],
        }
        if self.virtual_record is not None:
            d["virtual_record"] = [r.to_json() for r in self.virtual_record]
        return d

    @classmethod
    def from_json(cls, d: dict) -> GaussCode:
        if d.get("format", FORMAT) != FORMAT:
            raise MalformedDiagram(f"unsupported format {d.get('format')!r}", 0)
        comps = tuple(tuple(Visit(x["id"], x["role"], x["sign"]) for x in comp) for comp in d["components"])
        rec = d.get("virtual_record")
        if rec is not None:
            rec = tuple(
                VirtualCrossing(r["id"], tuple(tuple(i) for i in r["incidences"])) for r in rec
            )
        g = cls(comps, rec)
        _check_gauss(g)
        return g


def _check_gauss(g: GaussCode) -> None:
    seen: dict[int, list[Visit]] = {}
    for comp in g.components:
        for x in comp:
            seen.setdefault(x.id, []).append(x)
    for cid, vs in seen.items():
        if len(vs) != 2:
            raise MalformedDiagram(f"crossing {cid} visited {len(vs)} times", 0)
        roles = sorted(x.role for x in vs)
        if vs[0].sign != vs[1].sign:
            raise MalformedDiagram(f"crossing {cid} has inconsistent signs", 0)
        want = ["flat", "flat"] if vs[0].sign == "flat" else ["over", "under"]
        if roles != want:
            raise MalformedDiagram(f"crossing {cid} has roles {roles}", 0)


def components(g: GaussCode) -> int:
    return len(g.components)


class _Builder:
    """Collects raw traversals and relabels crossings by first visit."""

    def __init__(self):
        self.comps: list[list[tuple]] = []

    def start(self):
        self.comps.append([])

    def classical(self, key, role, sign):
        self.comps[-1].append(("c", key, role, sign))

    def virtual(self, key):
        self.comps[-1].append(("v", key))

    def build(self) -> GaussCode:
        cid: dict = {}
        vid: dict = {}
        vinc: dict = {}
        out = []
        for ci, comp in enumerate(self.comps, start=1):
            seq = []
            for item in comp:
                if item[0] == "c":
                    _, key, role, sign = item
                    cid.setdefault(key, len(cid) + 1)
                    seq.append(Visit(cid[key], role, sign))
                else:
                    key = item[1]
                    vid.setdefault(key, len(vid) + 1)
                    vinc.setdefault(key, []).append((ci, len(seq)))
            out.append(tuple(seq))
        rec = tuple(
            VirtualCrossing(vid[k], (vinc[k][0], vinc[k][1])) for k in sorted(vid, key=vid.get)
        )
        return GaussCode(tuple(out), rec)


def _roles(sign: str, first_is_s1: bool, s1_over: bool) -> str:
    if sign == "flat":
        return "flat"
    return "over" if first_is_s1 == s1_over else "under"


def closure(w: BraidWord) -> GaussCode:
    """Gauss code of the closed braid, traced directly on the word."""
    n = w.strands
    b = _Builder()
    seen_top = set()
    for start in range(1, n + 1):
        if start in seen_top:
            continue
        b.start()
        p = start
        while p not in seen_top:
            seen_top.add(p)
            for k, g in enumerate(w.letters):
                i = g.index
                if p == i or p == i + 1:
                    from_left = p == i
                    if g.kind is Kind.V:
                        b.virtual(k)
                    else:
                        sign = {Kind.SIGMA_POS: "+", Kind.SIGMA_NEG: "-", Kind.C: "flat"}[g.kind]
                        # the strand entering from the left is on top for s<i>
                        b.classical(k, _roles(sign, from_left, sign == "+"), sign)
                    p = i + 1 if from_left else i
    return b.build()


def gauss_from_morse(m: MorsePresentation) -> GaussCode:
    levels = m.levels()
    b = _Builder()
    visited: set[tuple[int, int]] = set()
    for L, cols in enumerate(levels):
        for j in range(1, len(cols) + 1):
            if (L, j) in visited:
                continue
            b.start()
            for seg, hit in _walk(m, levels, (L, j)):
                visited.add(seg)
                if hit is not None:
                    kind, t, role, sign = hit
                    if kind == "v":
                        b.virtual(t)
                    else:
                        b.classical(t, role, sign)
    return b.build()


def _walk(m: MorsePresentation, levels, start) -> Iterator[tuple[tuple[int, int], tuple | None]]:
    """Traverse the component through segment ``start`` along its orientation.

    Yields each segment together with the crossing (if any) passed on leaving it.
    """
    T = len(m.slices)
    L, j = start
    while True:
        yield_hit = None
        down = levels[L][j - 1] == "d"
        if down:
            if L == T:
                nxt = (0, j)
            else:
                ev = m.slices[L]
                p = ev.pos
                if ev.event == "cup":
                    nxt = (L + 1, j if j < p else j + 2)
                elif ev.event == "cap":
                    if j in (p, p + 1):
                        nxt = (L, p + 1 if j == p else p)
                    else:
                        nxt = (L + 1, j if j < p else j - 2)
                elif j in (p, p + 1):
                    yield_hit = _crossing_hit(ev, L, levels, s1=(j == p))
                    nxt = (L + 1, p + 1 if j == p else p)
                else:
                    nxt = (L + 1, j)
        else:
            if L == 0:
                raise MalformedDiagram("upward boundary column", 0)
            t = L - 1
            ev = m.slices[t]
            p = ev.pos
            if ev.event == "cup":
                if j in (p, p + 1):
                    nxt = (L, p + 1 if j == p else p)
                else:
                    nxt = (t, j if j < p else j - 2)
            elif ev.event == "cap":
                nxt = (t, j if j < p else j + 2)
            elif j in (p, p + 1):
                yield_hit = _crossing_hit(ev, t, levels, s1=(j == p + 1))
                nxt = (t, p + 1 if j == p else p)
            else:
                nxt = (t, j)
        yield (L, j), yield_hit
        if nxt == start:
            return
        L, j = nxt


def _crossing_hit(ev: Event, t: int, levels, s1: bool):
    if ev.event == "vcross":
        return ("v", t, None, None)
    p = ev.pos
    o1, o2 = levels[t][p - 1], levels[t][p]
    differ = o1 != o2
    s1_over = (ev.sign == "+") != differ
    return ("c", t, _roles(ev.sign, s1, s1_over), ev.sign)


# ---------------------------------------------------------------- flat parity

def virtual_parity_between_components(g: GaussCode) -> dict[tuple[int, int], int]:
    if g.virtual_record is None:
        raise MissingVirtualRecord("Gauss code carries no virtual crossing record")
    k = len(g.components)
    out = {(a, b): 0 for a in range(1, k + 1) for b in range(a + 1, k + 1)}
    for rec in g.virtual_record:
        (a, _), (b, _) = rec.incidences
        if a != b:
            key = (min(a, b), max(a, b))
            out[key] ^= 1
    return out


def parity_signature(g: GaussCode) -> tuple:
    """Parity map up to relabeling of components (a canonical isomorphism-class key)."""
    par = virtual_parity_between_components(g)
    k = len(g.components)
    best = None
    for perm in itertools.permutations(range(1, k + 1)):
        key = tuple(
            sorted((min(perm[a - 1], perm[b - 1]), max(perm[a - 1], perm[b - 1]), val) for (a, b), val in par.items())
        )
        if best is None or key < best:
            best = key
    return (k, best or ())


def random_morse(rng, strands: int = 0, steps: int = 8, crossing_kinds=("+", "-", "v")) -> MorsePresentation:
    """A random valid closed Morse presentation (used by tests and benchmarks)."""
    cols = ["d"] * strands
    events: list[Event] = []
    for _ in range(steps):
        options = ["cup"] if len(cols) < 6 else []
        if len(cols) >= 2:
            options += ["cross", "cross"]
            if any(cols[i] != cols[i + 1] for i in range(len(cols) - 1)):
                options.append("cap")
        if not options:
            break
        kind = rng.choice(options)
        if kind == "cup":
            ev = cup(rng.randint(1, len(cols) + 1), rng.choice(["lr", "rl"]))
        elif kind == "cap":
            p = rng.choice([i + 1 for i in range(len(cols) - 1) if cols[i] != cols[i + 1]])
            ev = cap(p)
        else:
            k = rng.choice(crossing_kinds)
            p = rng.randint(1, len(cols) - 1)
            ev = vcross(p) if k == "v" else cross(p, k)
        cols = _apply_event(cols, ev, len(events))
        events.append(ev)
    while "u" in cols:
        p = rng.choice([i + 1 for i in range(len(cols) - 1) if cols[i] != cols[i + 1]])
        ev = cap(p)
        cols = _apply_event(cols, ev, len(events))
        events.append(ev)
    if not events and strands == 0:
        events = [cup(1, "rl"), cap(1)]
    return MorsePresentation(strands, tuple(events)).validate()

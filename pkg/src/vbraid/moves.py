"""Markov-type moves on braid words, move paths, and scripted derivations.

Every move has a computable inverse, so a :class:`MovePath` can be replayed
forwards or backwards. Moves are plain data (:class:`Move`) interpreted by
:func:`apply_move`; the named functions below are the same operations with a
direct call signature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .core import (
    BraidWord,
    Category,
    Generator,
    Kind,
    Relation,
    S,
    apply_relation,
    c,
    cancel_relation,
    far_commute,
    include_right,
    insert_pair,
    parse_token,
    parse_word,
    relation,
    s,
    shift_left,
    v,
)
from .errors import (
    BadSite,
    CategoryViolation,
    IndexOutOfRange,
    NoMatch,
    ScriptInapplicable,
    StrandMismatch,
    TooFewStrands,
    VBraidError,
)

V_, F_, W_, U_ = Category.VIRTUAL, Category.FLAT, Category.WELDED, Category.UNRESTRICTED

STAB_KINDS = ("real+", "real-", "virtual", "flat")
LV_KINDS = ("basic", "virtual", "real+", "real-", "flat")


def _need(cat: Category, allowed: tuple[Category, ...], what: str) -> None:
    if cat not in allowed:
        raise CategoryViolation(f"{what} is not licensed in the {cat.value} category")


def _kind_letter(kind: str, i: int) -> Generator:
    return {"real+": s, "real-": S, "virtual": v, "flat": c}[kind](i)


def _check_kind(cat: Category, kind: str, table: tuple[str, ...], what: str) -> None:
    if kind not in table:
        raise ValueError(f"unknown {what} kind {kind!r}")
    if cat is F_ and kind.startswith("real"):
        raise CategoryViolation(f"{what} of kind {kind} is not licensed for flat braids")
    if cat is not F_ and kind == "flat":
        raise CategoryViolation(f"{what} of kind flat needs the flat category")


def _top_free(w: BraidWord, prefix_len: int) -> bool:
    """True if no letter of the prefix touches the last strand."""
    return all(g.index <= w.strands - 2 for g in w.letters[:prefix_len])


# ---------------------------------------------------------------- conjugation

def conjugate(w: BraidWord, g: Generator) -> BraidWord:
    """``g^-1 w g``."""
    if g.index > w.strands - 1:
        raise IndexOutOfRange(f"{g.token} out of range for {w.strands} strands")
    if g.is_real:
        _need(w.category, (V_, W_, U_), "real conjugation")
    elif g.kind is Kind.C:
        _need(w.category, (F_,), "flat conjugation")
    return w.with_letters((g.inverse(),) + w.letters + (g,))


def deconjugate(w: BraidWord, g: Generator) -> BraidWord:
    """Inverse of :func:`conjugate`: strip a leading ``g^-1`` and trailing ``g``."""
    if len(w) < 2 or w.letters[0] != g.inverse() or w.letters[-1] != g:
        raise NoMatch(f"word is not of the form {g.inverse().token} ... {g.token}")
    conjugate(w.with_letters(w.letters[1:-1]), g)  # category check
    return w.with_letters(w.letters[1:-1])


# ---------------------------------------------------------------- stabilization

def stabilize_right(w: BraidWord, kind: str = "virtual") -> BraidWord:
    _check_kind(w.category, kind, STAB_KINDS, "stabilization")
    n = w.strands
    return include_right(w).with_letters(w.letters + (_kind_letter(kind, n),), strands=n + 1)


def destabilize(w: BraidWord, kind: str | None = None) -> BraidWord:
    if w.strands < 2 or not w.letters:
        raise NoMatch("nothing to destabilize")
    last = w.letters[-1]
    n = w.strands - 1
    inferred = {Kind.SIGMA_POS: "real+", Kind.SIGMA_NEG: "real-", Kind.V: "virtual", Kind.C: "flat"}[last.kind]
    if last.index != n or not _top_free(w, len(w) - 1) or (kind is not None and kind != inferred):
        raise NoMatch("word does not end in a stabilization letter on a free last strand")
    _check_kind(w.category, inferred, STAB_KINDS, "destabilization")
    return w.with_letters(w.letters[:-1], strands=n)


# ---------------------------------------------------------------- threading

def _right_under_suffix(n: int, sign: int) -> tuple[Generator, ...]:
    return (S(n), v(n - 1), s(n)) if sign > 0 else (s(n), v(n - 1), S(n))


def _left_under_suffix(n: int, sign: int) -> tuple[Generator, ...]:
    a, b = (s(n - 1), S(n - 1)) if sign > 0 else (S(n - 1), s(n - 1))
    return (v(n), v(n - 1), a, v(n), b, v(n - 1), v(n))


def _right_flat_suffix(n: int) -> tuple[Generator, ...]:
    return (c(n), v(n - 1), c(n))


def _left_flat_suffix(n: int) -> tuple[Generator, ...]:
    return (v(n), v(n - 1), c(n - 1), v(n), c(n - 1), v(n - 1), v(n))


def _thread(w: BraidWord, suffix_fn: Callable[[int], tuple], cats, what: str) -> BraidWord:
    _need(w.category, cats, what)
    if w.strands < 2:
        raise TooFewStrands(f"{what} needs at least 2 strands")
    return w.with_letters(w.letters + suffix_fn(w.strands), strands=w.strands + 1)


def _unthread(w: BraidWord, suffix_fn: Callable[[int], tuple], cats, what: str) -> BraidWord:
    _need(w.category, cats, what)
    n = w.strands - 1
    if n < 2:
        raise NoMatch(f"{what}: too few strands")
    suf = suffix_fn(n)
    k = len(w) - len(suf)
    if k < 0 or w.letters[k:] != suf or not _top_free(w, k):
        raise NoMatch(f"word does not end in the {what} pattern")
    return w.with_letters(w.letters[:k], strands=n)


def thread_right_under(w: BraidWord, sign: int = 1) -> BraidWord:
    """``w s_n^-1 v_(n-1) s_n`` (``sign=-1``: ``w s_n v_(n-1) s_n^-1``)."""
    return _thread(w, lambda n: _right_under_suffix(n, sign), (V_,), "right under-threading")


def unthread_right_under(w: BraidWord, sign: int = 1) -> BraidWord:
    return _unthread(w, lambda n: _right_under_suffix(n, sign), (V_,), "right under-threading")


def thread_left_under(w: BraidWord, sign: int = 1) -> BraidWord:
    return _thread(w, lambda n: _left_under_suffix(n, sign), (V_,), "left under-threading")


def unthread_left_under(w: BraidWord, sign: int = 1) -> BraidWord:
    return _unthread(w, lambda n: _left_under_suffix(n, sign), (V_,), "left under-threading")


def thread_right_flat(w: BraidWord) -> BraidWord:
    return _thread(w, _right_flat_suffix, (F_,), "flat right threading")


def unthread_right_flat(w: BraidWord) -> BraidWord:
    return _unthread(w, _right_flat_suffix, (F_,), "flat right threading")


def thread_left_flat(w: BraidWord) -> BraidWord:
    return _thread(w, _left_flat_suffix, (F_,), "flat left threading")


def unthread_left_flat(w: BraidWord) -> BraidWord:
    return _unthread(w, _left_flat_suffix, (F_,), "flat left threading")


# ---------------------------------------------------------------- L_v insertion

def lv_segment(n: int, p: int, kind: str, side: str) -> tuple[Generator, ...]:
    """Letters inserted by an L_v-move cutting strand ``p`` of an ``n``-strand braid.

    The new braid has ``n + 1`` strands; every crossing with the new strand is
    virtual apart from the optional in-box crossing.
    """
    if kind == "basic":
        return tuple(v(i) for i in range(p, n)) + (v(n),) + tuple(v(i) for i in range(n - 1, p - 1, -1))
    x = _kind_letter(kind, p)
    if side == "right":
        fan = tuple(v(i) for i in range(n, p, -1))
    elif side == "left":
        fan = tuple(v(i) for i in range(n, p - 1, -1))
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return fan + (x,) + tuple(reversed(fan))


def lv_insert(w: BraidWord, site: tuple[int, int], kind: str = "basic", side: str = "right") -> BraidWord:
    gap, p = site
    _need(w.category, (V_, F_), "L_v insertion")
    _check_kind(w.category, kind, LV_KINDS, "L_v insertion")
    n = w.strands
    if not 0 <= gap <= len(w) or not 1 <= p <= n:
        raise BadSite(f"site {site} is not a (gap, strand) pair for a word of length {len(w)} on {n} strands")
    seg = lv_segment(n, p, kind, side)
    return w.with_letters(w.letters[:gap] + seg + w.letters[gap:], strands=n + 1)


def lv_remove(w: BraidWord, site: tuple[int, int], kind: str = "basic", side: str = "right") -> BraidWord:
    gap, p = site
    _need(w.category, (V_, F_), "L_v removal")
    n = w.strands - 1
    if n < 1 or not 1 <= p <= n:
        raise BadSite(f"bad site {site}")
    seg = lv_segment(n, p, kind, side)
    if w.letters[gap:gap + len(seg)] != seg:
        raise NoMatch("L_v pattern not found at the site")
    rest = w.letters[:gap] + w.letters[gap + len(seg):]
    if any(g.index >= n for g in rest):
        raise NoMatch("other letters use the last strand")
    return w.with_letters(rest, strands=n)


# ---------------------------------------------------------------- exchange

def exchange_right(b1: BraidWord, b2: BraidWord) -> tuple[BraidWord, BraidWord]:
    """``(b1 s_n^-1 b2 s_n, b1 v_n b2 v_n)`` in ``n+1`` strands."""
    if b1.strands != b2.strands:
        raise StrandMismatch(f"{b1.strands} vs {b2.strands} strands")
    n = b1.strands
    a = BraidWord(n + 1, b1.letters + (S(n),) + b2.letters + (s(n),), b1.category)
    b = BraidWord(n + 1, b1.letters + (v(n),) + b2.letters + (v(n),), b1.category)
    return a, b


def exchange_left(b1: BraidWord, b2: BraidWord) -> tuple[BraidWord, BraidWord]:
    """``(i(b1) s_1^-1 i(b2) s_1, i(b1) v_1 i(b2) v_1)`` where ``i`` adds a strand on the left."""
    if b1.strands != b2.strands:
        raise StrandMismatch(f"{b1.strands} vs {b2.strands} strands")
    i1, i2 = shift_left(b1), shift_left(b2)
    a = i1.with_letters(i1.letters + (S(1),) + i2.letters + (s(1),))
    b = i1.with_letters(i1.letters + (v(1),) + i2.letters + (v(1),))
    return a, b


def exchange_move(w: BraidWord, i: int, j: int, side: str = "right") -> BraidWord:
    """Swap the two sides of an exchange pair in place, given the two special letter positions."""
    _need(w.category, (V_,), "exchange move")
    idx = w.strands - 1 if side == "right" else 1
    if not (0 <= i < j < len(w)):
        raise NoMatch("bad exchange positions")
    others = [g for k, g in enumerate(w.letters) if k not in (i, j)]
    if side == "right":
        if any(g.index >= idx for g in others):
            raise NoMatch("another letter touches the last strand")
    elif any(g.index <= 1 for g in others):
        raise NoMatch("another letter touches the first strand")
    a, b = w.letters[i], w.letters[j]
    if (a, b) == (S(idx), s(idx)):
        new = (v(idx), v(idx))
    elif (a, b) == (v(idx), v(idx)):
        new = (S(idx), s(idx))
    else:
        raise NoMatch("letters at the positions do not form an exchange pair")
    L = list(w.letters)
    L[i], L[j] = new
    return w.with_letters(L)


# ---------------------------------------------------------------- move objects

@dataclass(frozen=True)
class Move:
    kind: str
    params: tuple = ()

    @property
    def p(self) -> dict:
        return dict(self.params)

    def to_json(self) -> dict:
        return {"move": self.kind, "params": _jsonable(self.p)}

    @classmethod
    def from_json(cls, d: dict) -> Move:
        return mk(d["move"], **_unjson(d.get("params", {})))

    def __str__(self):
        inner = ", ".join(f"{k}={_fmt(v_)}" for k, v_ in self.params)
        return f"{self.kind}({inner})"


def _fmt(x):
    if isinstance(x, Generator):
        return x.token
    if isinstance(x, Relation):
        return x.name
    return x


def _jsonable(d: dict) -> dict:
    out = {}
    for k, x in d.items():
        if isinstance(x, Generator):
            out[k] = x.token
        elif isinstance(x, Relation):
            out[k] = x.to_json()
        elif isinstance(x, tuple):
            out[k] = list(x)
        else:
            out[k] = x
    return out


_GEN_KEYS = ("gen",)


def _unjson(d: dict) -> dict:
    out = {}
    for k, x in d.items():
        if k in _GEN_KEYS:
            out[k] = parse_token(x)
        elif k == "rel":
            out[k] = Relation.from_json(x)
        elif k == "site":
            out[k] = tuple(x)
        else:
            out[k] = x
    return out


def mk(move_kind: str, /, **params) -> Move:
    return Move(move_kind, tuple(sorted(params.items())))


def apply_move(w: BraidWord, mv: Move) -> BraidWord:
    p = mv.p
    k = mv.kind
    if k == "relation":
        return apply_relation(w, p["rel"], p["pos"], p["direction"])
    if k == "insert-pair":
        _need_cancel(w)
        return insert_pair(w, p["gen"], p["pos"])
    if k == "conjugate":
        return conjugate(w, p["gen"])
    if k == "deconjugate":
        return deconjugate(w, p["gen"])
    if k == "stabilize":
        return stabilize_right(w, p["kind"])
    if k == "destabilize":
        return destabilize(w, p["kind"])
    if k == "thread-right-under":
        return thread_right_under(w, p.get("sign", 1))
    if k == "unthread-right-under":
        return unthread_right_under(w, p.get("sign", 1))
    if k == "thread-left-under":
        return thread_left_under(w, p.get("sign", 1))
    if k == "unthread-left-under":
        return unthread_left_under(w, p.get("sign", 1))
    if k == "thread-right-flat":
        return thread_right_flat(w)
    if k == "unthread-right-flat":
        return unthread_right_flat(w)
    if k == "thread-left-flat":
        return thread_left_flat(w)
    if k == "unthread-left-flat":
        return unthread_left_flat(w)
    if k == "lv-insert":
        return lv_insert(w, tuple(p["site"]), p["kind"], p["side"])
    if k == "lv-remove":
        return lv_remove(w, tuple(p["site"]), p["kind"], p["side"])
    if k == "exchange":
        return exchange_move(w, p["i"], p["j"], p["side"])
    raise ValueError(f"unknown move {k!r}")


def _need_cancel(w: BraidWord) -> None:
    from .core import RELATION_NAMES

    if "cancel" not in RELATION_NAMES[w.category]:
        raise CategoryViolation("cancellation not licensed")


_INVERSE_KIND = {
    "conjugate": "deconjugate",
    "deconjugate": "conjugate",
    "stabilize": "destabilize",
    "destabilize": "stabilize",
    "thread-right-under": "unthread-right-under",
    "unthread-right-under": "thread-right-under",
    "thread-left-under": "unthread-left-under",
    "unthread-left-under": "thread-left-under",
    "thread-right-flat": "unthread-right-flat",
    "unthread-right-flat": "thread-right-flat",
    "thread-left-flat": "unthread-left-flat",
    "unthread-left-flat": "thread-left-flat",
    "lv-insert": "lv-remove",
    "lv-remove": "lv-insert",
    "exchange": "exchange",
}


def inverse_move(mv: Move, before: BraidWord) -> Move:
    """The move taking ``apply_move(before, mv)`` back to ``before``."""
    p = mv.p
    if mv.kind == "relation":
        rel: Relation = p["rel"]
        if rel.name == "cancel" and p["direction"] == "forward":
            return mk("insert-pair", gen=rel.lhs[0], pos=p["pos"])
        back = "backward" if p["direction"] == "forward" else "forward"
        return mk("relation", rel=rel, pos=p["pos"], direction=back)
    if mv.kind == "insert-pair":
        return mk("relation", rel=cancel_relation(p["gen"]), pos=p["pos"], direction="forward")
    if mv.kind == "destabilize":
        kind = p.get("kind") or {Kind.SIGMA_POS: "real+", Kind.SIGMA_NEG: "real-",
                                 Kind.V: "virtual", Kind.C: "flat"}[before.letters[-1].kind]
        return mk("stabilize", kind=kind)
    return Move(_INVERSE_KIND[mv.kind], mv.params)


# ---------------------------------------------------------------- paths

@dataclass
class Step:
    move: Move
    result: BraidWord

    def to_json(self) -> dict:
        d = self.move.to_json()
        d["result"] = str(self.result)
        return d


@dataclass
class MovePath:
    start: BraidWord
    steps: list[Step] = field(default_factory=list)
    name: str = ""

    @property
    def end(self) -> BraidWord:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def words(self) -> list[BraidWord]:
        return [self.start] + [st.result for st in self.steps]

    def validate(self) -> bool:
        """Replay every step; raises :class:`ScriptInapplicable` at the first bad one."""
        cur = self.start
        for i, st in enumerate(self.steps):
            try:
                nxt = apply_move(cur, st.move)
            except VBraidError as exc:
                raise ScriptInapplicable(f"{st.move}: {exc}", i) from None
            if nxt != st.result:
                raise ScriptInapplicable(f"{st.move} gives {nxt}, recorded {st.result}", i)
            cur = nxt
        return True

    def reversed(self) -> MovePath:
        words = self.words()
        steps = []
        for i in range(len(self.steps) - 1, -1, -1):
            steps.append(Step(inverse_move(self.steps[i].move, words[i]), words[i]))
        return MovePath(self.end, steps, self.name)

    def extend(self, other: MovePath) -> MovePath:
        if other.start != self.end:
            raise ValueError("paths do not join")
        return MovePath(self.start, self.steps + other.steps, self.name)

    def to_json(self) -> dict:
        return {
            "format": "vbraid-1",
            "name": self.name,
            "start": str(self.start),
            "end": str(self.end),
            "steps": [st.to_json() for st in self.steps],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> MovePath:
        start = parse_word(d["start"])
        steps = [Step(Move.from_json(x), parse_word(x["result"])) for x in d["steps"]]
        return cls(start, steps, d.get("name", ""))


class Script:
    """Records a path while applying moves; any failure becomes ScriptInapplicable."""

    def __init__(self, start: BraidWord, name: str = ""):
        self.path = MovePath(start, [], name)
        self.w = start

    def do(self, mv: Move) -> BraidWord:
        try:
            nxt = apply_move(self.w, mv)
        except VBraidError as exc:
            raise ScriptInapplicable(f"{mv}: {exc}", len(self.path.steps)) from None
        self.path.steps.append(Step(mv, nxt))
        self.w = nxt
        return nxt

    def rel(self, rel: Relation, pos: int, direction: str = "forward") -> BraidWord:
        return self.do(mk("relation", rel=rel, pos=pos, direction=direction))

    def cancel(self, pos: int) -> BraidWord:
        if pos + 1 >= len(self.w):
            raise ScriptInapplicable(f"no pair to cancel at {pos}", len(self.path.steps))
        return self.rel(cancel_relation(self.w.letters[pos]), pos)

    def commute(self, pos: int) -> BraidWord:
        """Swap the far-apart letters at ``pos`` and ``pos + 1``."""
        a, b = self.w.letters[pos], self.w.letters[pos + 1]
        try:
            r = far_commute(a, b)
        except NoMatch as exc:
            raise ScriptInapplicable(str(exc), len(self.path.steps)) from None
        return self.rel(r, pos)

    def move_letter(self, src: int, dst: int) -> None:
        """Carry a letter from ``src`` to ``dst`` by far-commutations."""
        while src < dst:
            self.commute(src)
            src += 1
        while src > dst:
            self.commute(src - 1)
            src -= 1

    def insert(self, g: Generator, pos: int) -> BraidWord:
        return self.do(mk("insert-pair", gen=g, pos=pos))

    def free_reduce(self) -> BraidWord:
        while True:
            L = self.w.letters
            for k in range(len(L) - 1):
                if L[k + 1] == L[k].inverse():
                    self.cancel(k)
                    break
            else:
                return self.w


# ---------------------------------------------------------------- derivation scripts

def _rotate_last(sc: Script) -> None:
    """Move the last letter ``g`` to the front: conjugate by ``g^-1`` then cancel."""
    g = sc.w.letters[-1]
    sc.do(mk("conjugate", gen=g.inverse()))  # g X g g^-1
    sc.cancel(len(sc.w) - 2)


def _rotate_first(sc: Script) -> None:
    """Move the first letter ``g`` to the back."""
    g = sc.w.letters[0]
    sc.do(mk("conjugate", gen=g))
    sc.cancel(0)


def script_fig37(w: BraidWord, strand: int = 1) -> MovePath:
    """A right real L_v-move at the bottom of strand ``p`` reduces to a right stabilization.

    Path: w -> w F s_p F^-1 (the L_v-move, F a virtual fan) -> w G s_n G^-1 by
    detours -> G^-1 w G s_n by conjugation, a right stabilization form.
    """
    if w.category is not V_:
        raise ScriptInapplicable("needs a virtual braid", 0)
    n = w.strands
    p = strand
    if not 1 <= p <= n:
        raise ScriptInapplicable(f"strand {p} out of range", 0)
    sc = Script(w, "fig37-real-Lv-to-stabilization")
    sc.do(mk("lv-insert", site=(len(w), p), kind="real+", side="right"))
    base = len(w)
    # the fan v_n .. v_(p+1) s_p v_(p+1) .. v_n becomes v_p .. v_(n-1) s_n v_(n-1) .. v_p
    for k in range(p, n):
        # current: [done: v_p .. v_(k-1)] v_n .. v_(k+1) s_k v_(k+1) .. v_n [v_(k-1) .. v_p]
        lead = k - p
        fan = n - k  # letters v_n .. v_(k+1)
        mid = base + lead + fan - 1  # position of v_(k+1) just before s_k
        sc.rel(relation("special-detour", k), mid, "backward")
        # now ... v_k s_(k+1) v_k ...; carry the two v_k outward
        sc.move_letter(mid, base + lead)
        right = base + lead + fan + 1  # position of the right v_k after the left one moved
        sc.move_letter(right, right + fan - 1)
    k_g = n - p  # length of G
    for _ in range(k_g):
        _rotate_last(sc)
    expected = stabilize_right(
        w.with_letters(
            tuple(v(i) for i in range(n - 1, p - 1, -1)) + w.letters + tuple(v(i) for i in range(p, n))
        ),
        "real+",
    )
    if sc.w != expected:
        raise ScriptInapplicable(f"endpoint {sc.w} differs from stabilization form {expected}", len(sc.path))
    return sc.path


def script_threading_from_exchange(w: BraidWord) -> MovePath:
    """Right under-threading from exchange, v-braid, virtual conjugation and destabilization."""
    if w.category is not V_ or w.strands < 2:
        raise ScriptInapplicable("needs a virtual braid on at least 2 strands", 0)
    n = w.strands
    start = thread_right_under(w)
    sc = Script(start, "threading-from-kamada")
    L = len(w)
    sc.do(mk("exchange", i=L, j=L + 2, side="right"))  # w v_n v_(n-1) v_n
    sc.rel(relation("v-braid", n - 1), L, "backward")  # w v_(n-1) v_n v_(n-1)
    _rotate_last(sc)  # v_(n-1) w v_(n-1) v_n
    sc.do(mk("destabilize", kind="virtual"))  # v_(n-1) w v_(n-1)
    _rotate_last(sc)  # v_(n-1) v_(n-1) w
    sc.cancel(0)
    if sc.w != w:
        raise ScriptInapplicable(f"endpoint {sc.w} differs from {w}", len(sc.path))
    return sc.path


def _reduce_exchange_side(sc: Script, L1: int, b2: BraidWord, real: bool) -> None:
    """Reduce ``b1 X b2 X'`` to ``z b1 x`` in ``n`` strands (see script_exchange)."""
    n = b2.strands
    letters = b2.letters
    top = [k for k, g in enumerate(letters) if g.index == n - 1]
    # positions in the full word: b1 occupies [0, L1), then the first special letter
    first = L1
    m = len(letters)
    if not top:
        # both special letters commute through b2 and cancel
        sc.move_letter(first, first + m)
        sc.cancel(first + m)
        return
    (t,) = top
    x_len, z_len = t, m - t - 1
    # carry the first special letter right past x, and the last one left past z
    sc.move_letter(first, first + x_len)
    last = first + m + 1
    sc.move_letter(last, last - z_len)
    # word: b1 x A y B z with A, B the special letters
    a = first + x_len
    y = letters[t]
    if real:
        # s_n^-1 y s_n; with y virtual this is already a threading suffix
        if y.kind is Kind.V:
            pass
        elif y.kind is Kind.SIGMA_POS:
            # b^-1 a b -> b^-1 a b a a^-1 -> b^-1 b a b a^-1 -> a b a^-1
            sc.insert(y, a + 3)
            sc.rel(relation("braid-rel", n - 1), a + 1, "forward")
            sc.cancel(a)
        else:
            # b^-1 a^-1 b -> a a^-1 b^-1 a^-1 b -> a b^-1 a^-1 b^-1 b -> a b^-1 a^-1
            sc.insert(y.inverse(), a)
            sc.rel(relation("braid-rel-inv", n - 1), a + 1, "forward")
            sc.cancel(a + 3)
    else:
        if y.kind is Kind.V:
            sc.rel(relation("v-braid", n - 1), a, "backward")  # v_n v_(n-1) v_n -> v_(n-1) v_n v_(n-1)
        elif y.kind is Kind.SIGMA_POS:
            sc.rel(relation("special-detour", n - 1), a, "backward")
        else:
            sc.rel(relation("special-detour-inv", n - 1), a, "backward")
    for _ in range(z_len):
        _rotate_last(sc)
    # word: z b1 x [three letters]
    if real and y.kind is Kind.V:
        sc.do(mk("unthread-right-under", sign=1))
        sc.free_reduce()
        return
    # three letters are g s_n^e g^-1 or g v_n g: rotate g^-1 to the front, destabilize, rotate back
    _rotate_last(sc)
    last_kind = {Kind.SIGMA_POS: "real+", Kind.SIGMA_NEG: "real-", Kind.V: "virtual"}[sc.w.letters[-1].kind]
    sc.do(mk("destabilize", kind=last_kind))
    _rotate_first(sc)
    sc.free_reduce()


def script_exchange(b1: BraidWord, b2: BraidWord) -> MovePath:
    """Right exchange move derived from conjugation, stabilization and threading.

    Supported when ``b2`` has at most one letter of index ``n-1``; both sides are
    reduced to a common word and the second reduction is reversed.
    """
    if b1.category is not V_ or b2.category is not V_:
        raise ScriptInapplicable("needs virtual braids", 0)
    if b1.strands != b2.strands:
        raise ScriptInapplicable("b1 and b2 have different strand counts", 0)
    n = b1.strands
    if sum(1 for g in b2.letters if g.index == n - 1) > 1:
        raise ScriptInapplicable("b2 has more than one letter on the last strand pair; not supported", 0)
    left, right = exchange_right(b1, b2)
    s1 = Script(left)
    _reduce_exchange_side(s1, len(b1), b2, real=True)
    s2 = Script(right)
    _reduce_exchange_side(s2, len(b1), b2, real=False)
    if s1.w != s2.w:
        raise ScriptInapplicable(f"sides reduce to {s1.w} and {s2.w}", len(s1.path))
    path = s1.path.extend(s2.path.reversed())
    path.name = "exchange-from-theorem3"
    return path


def _shift_through(sc: Script, k: int) -> None:
    """``v_1 v_2 x_1 -> x_2 v_1 v_2`` at position ``k`` (n=3 strands)."""
    x = sc.w.letters[k + 2]
    if x.index != 1:
        raise ScriptInapplicable(f"letter {x.token} is not on the first strand pair", len(sc.path))
    sc.insert(v(2), k + 3)
    name = {Kind.SIGMA_POS: "special-detour", Kind.SIGMA_NEG: "special-detour-inv", Kind.V: "v-braid"}[x.kind]
    sc.rel(relation(name, 1), k + 1, "backward")
    sc.cancel(k)


def script_bottom_left(w: BraidWord, sign: int = 1) -> MovePath:
    """Left under-threading equals the bottom-left form ``i(w) s_1^e v_2 s_1^-e`` up to conjugation."""
    if w.category is not V_ or w.strands != 2:
        raise ScriptInapplicable("implemented for virtual braids on 2 strands", 0)
    sc = Script(thread_left_under(w, sign), "remark6-bottom-left")
    # w v2 v1 Y v1 v2 with Y = s1^e v2 s1^-e; bring P = v1 v2 to the front
    _rotate_last(sc)
    _rotate_last(sc)
    # P w P^-1 Y: push P through w one letter at a time
    for k in range(len(w)):
        _shift_through(sc, k)
    sc.cancel(len(w) + 1)
    sc.cancel(len(w))
    e = s(1) if sign > 0 else S(1)
    target = shift_left(w)
    target = target.with_letters(target.letters + (e, v(2), e.inverse()))
    if sc.w != target:
        raise ScriptInapplicable(f"endpoint {sc.w} differs from {target}", len(sc.path))
    return sc.path


SCRIPTS = {
    "fig37-real-Lv-to-stabilization": "fig37",
    "fig37": "fig37",
    "threading-from-kamada": "threading",
    "exchange-from-theorem3": "exchange",
    "remark6-bottom-left": "bottom-left",
}


def replay_derivation(name: str, word: BraidWord, extra: BraidWord | None = None, **opts) -> MovePath:
    key = SCRIPTS.get(name)
    if key is None:
        raise ScriptInapplicable(f"unknown script {name!r}", 0)
    if key == "fig37":
        path = script_fig37(word, **opts)
    elif key == "threading":
        path = script_threading_from_exchange(word)
    elif key == "exchange":
        path = script_exchange(word, extra if extra is not None else word.with_letters(()))
    else:
        path = script_bottom_left(word, **opts)
    path.validate()
    return path

"""Canonicalization, bounded move-graph search, and the flat FV_2 experiment."""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .core import (
    RELATION_NAMES,
    BraidWord,
    Category,
    Generator,
    Kind,
    S,
    c,
    cancel_relation,
    far_commute,
    relations_at,
    s,
    v,
)
from .errors import BudgetExceeded, CategoryMismatch, VBraidError
from .moves import Move, MovePath, Step, apply_move, mk

# ---------------------------------------------------------------- canonical forms


def _commute(a: Generator, b: Generator) -> bool:
    return abs(a.index - b.index) >= 2


class _Rec:
    """Mutable letter list that optionally records each elementary relation step."""

    def __init__(self, w: BraidWord, record: bool):
        self.w0 = w
        self.L = list(w.letters)
        self.record = record
        self.steps: list[Step] = []

    def _word(self) -> BraidWord:
        return BraidWord(self.w0.strands, tuple(self.L), self.w0.category)

    def _log(self, mv: Move) -> None:
        if self.record:
            self.steps.append(Step(mv, self._word()))

    def commute(self, k: int) -> None:
        a, b = self.L[k], self.L[k + 1]
        self.L[k], self.L[k + 1] = b, a
        self._log(mk("relation", rel=far_commute(a, b), pos=k, direction="forward"))

    def cancel(self, k: int) -> None:
        a = self.L[k]
        del self.L[k:k + 2]
        self._log(mk("relation", rel=cancel_relation(a), pos=k, direction="forward"))

    def relation(self, rel, pos: int, direction: str) -> None:
        src, dst = rel.side(direction)
        self.L[pos:pos + len(src)] = list(dst)
        self._log(mk("relation", rel=rel, pos=pos, direction=direction))


def _trace_reduce(r: _Rec) -> None:
    """Cancel ``x ... x^-1`` whenever every letter in between commutes with ``x``."""
    while True:
        L = r.L
        hit = None
        for i in range(len(L)):
            inv = L[i].inverse()
            for j in range(i + 1, len(L)):
                if L[j] == inv:
                    hit = (i, j)
                    break
                if not _commute(L[i], L[j]):
                    break
            if hit:
                break
        if not hit:
            return
        i, j = hit
        for k in range(i, j - 1):
            r.commute(k)
        r.cancel(j - 1)


def _lex_normal(r: _Rec) -> None:
    """Lexicographic normal form for the far-commutation relations."""
    L = r.L
    for out in range(len(L)):
        best = None
        for k in range(out, len(L)):
            if all(_commute(L[k], L[m]) for m in range(out, k)):
                if best is None or L[k].sort_key() < L[best].sort_key():
                    best = k
        for k in range(best - 1, out - 1, -1):
            r.commute(k)


def _key(letters) -> tuple:
    return tuple(g.sort_key() for g in letters)


def _has_trace_cancel(letters) -> bool:
    for i in range(len(letters)):
        inv = letters[i].inverse()
        for j in range(i + 1, len(letters)):
            if letters[j] == inv:
                return True
            if not _commute(letters[i], letters[j]):
                break
    return False


def _length_preserving_moves(w: BraidWord):
    for pos in range(len(w)):
        for rel, direction in relations_at(w, pos):
            if rel.name != "cancel" and rel.name != "far-commute":
                yield rel, pos, direction


def _explore_class(w: BraidWord, budget: int):
    """BFS over three-letter relations (modulo commutation normal form).

    Returns ``("reducible", path)``, ``("exhausted", path to lex-min)`` or ``("budget", None)``.
    Paths are lists of (rel, pos, direction, normal-form steps) hops.
    """
    start = w.letters
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        cw = BraidWord(w.strands, cur, w.category)
        for rel, pos, direction in _length_preserving_moves(cw):
            r = _Rec(cw, False)
            r.relation(rel, pos, direction)
            _lex_normal(r)
            nxt = tuple(r.L)
            if nxt in parent:
                continue
            parent[nxt] = (cur, rel, pos, direction)
            if _has_trace_cancel(nxt):
                return "reducible", _chain(parent, nxt)
            if len(parent) > budget:
                return "budget", None
            queue.append(nxt)
    best = min(parent, key=_key)
    return "exhausted", _chain(parent, best)


def _chain(parent, node):
    hops = []
    while parent[node] is not None:
        prev, rel, pos, direction = parent[node]
        hops.append((rel, pos, direction))
        node = prev
    return hops[::-1]


def canonicalize_path(w: BraidWord, budget: int = 200, record: bool = True) -> MovePath:
    """Deterministic simplification: commutation-aware free reduction, lexicographic
    commutation normal form, then a bounded search over the remaining
    length-preserving relations for a further cancellation.

    If the relation class is exhausted within ``budget`` nodes the lexicographically
    least word of the class is returned, otherwise the current word; either way
    canonicalizing the result again returns it unchanged.
    """
    r = _Rec(w, record)
    while True:
        _trace_reduce(r)
        _lex_normal(r)
        if budget <= 0 or len(r.L) < 3:
            break
        cur = r._word()
        status, hops = _explore_class(cur, budget)
        if status == "budget":
            break
        for rel, pos, direction in hops:
            r.relation(rel, pos, direction)
            _lex_normal(r)
        if status == "exhausted":
            break
    return MovePath(w, r.steps, "canonicalize") if record else r._word()


def canonicalize(w: BraidWord, budget: int = 200) -> BraidWord:
    return canonicalize_path(w, budget, record=False)


# ---------------------------------------------------------------- move sets

MOVE_SETS = ("markov", "lv-only", "l-equivalence", "exchange", "flat", "welded", "unrestricted")


@dataclass
class SearchConfig:
    moves: str = "markov"
    max_depth: int = 6
    max_strands: int = 4
    max_length: int = 10
    node_budget: int = 1_000_000
    canon_budget: int = 0
    include_relations: bool = True

    def __post_init__(self):
        if self.moves not in MOVE_SETS:
            raise ValueError(f"unknown move set {self.moves!r}; choose from {MOVE_SETS}")
        for name in ("max_depth", "max_strands", "max_length", "node_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _gens(n: int, kinds: tuple[Kind, ...]) -> list[Generator]:
    return [Generator(k, i) for i in range(1, n) for k in kinds]


def candidate_moves(w: BraidWord, moveset: str) -> Iterator[Move]:
    """All moves of the set that could apply to ``w``; inapplicable ones fail in apply_move."""
    n = w.strands
    L = len(w)
    real_conj = moveset in ("markov", "l-equivalence", "exchange", "welded", "unrestricted")
    if moveset == "flat":
        for g in _gens(n, (Kind.C, Kind.V)):
            yield mk("conjugate", gen=g)
    elif real_conj:
        for g in _gens(n, (Kind.SIGMA_POS, Kind.SIGMA_NEG, Kind.V)):
            yield mk("conjugate", gen=g)
    # lv-only has no conjugation at all, real or virtual
    if moveset != "lv-only" and L >= 2 and w.letters[0] == w.letters[-1].inverse():
        yield mk("deconjugate", gen=w.letters[-1])
    if moveset in ("markov", "lv-only", "exchange", "welded", "unrestricted"):
        for kind in ("real+", "real-", "virtual"):
            yield mk("stabilize", kind=kind)
        yield mk("destabilize", kind=None)
    if moveset == "flat":
        for kind in ("virtual", "flat"):
            yield mk("stabilize", kind=kind)
        yield mk("destabilize", kind=None)
        for k in ("thread-right-flat", "unthread-right-flat", "thread-left-flat", "unthread-left-flat"):
            yield mk(k)
    if moveset in ("markov", "lv-only"):
        for sign in (1, -1):
            for k in ("thread-right-under", "unthread-right-under", "thread-left-under", "unthread-left-under"):
                yield mk(k, sign=sign)
    if moveset in ("lv-only", "l-equivalence"):
        for gap in range(L + 1):
            for p in range(1, n + 1):
                yield mk("lv-insert", site=(gap, p), kind="basic", side="right")
                for kind in ("virtual", "real+", "real-"):
                    for side in ("right", "left"):
                        yield mk("lv-insert", site=(gap, p), kind=kind, side=side)
        if n >= 2:
            for gap in range(L):
                for p in range(1, n):
                    for kind, sides in (("basic", ("right",)), ("virtual", ("right", "left")),
                                        ("real+", ("right", "left")), ("real-", ("right", "left"))):
                        for side in sides:
                            yield mk("lv-remove", site=(gap, p), kind=kind, side=side)
    if moveset == "exchange":
        for side, idx in (("right", n - 1), ("left", 1)):
            if idx < 1:
                continue
            pos = [k for k, g in enumerate(w.letters) if g.index == idx]
            if len(pos) == 2:
                yield mk("exchange", i=pos[0], j=pos[1], side=side)


def neighbors(w: BraidWord, cfg: SearchConfig) -> Iterator[tuple[Move, BraidWord]]:
    seen = set()
    for mv in candidate_moves(w, cfg.moves):
        try:
            y = apply_move(w, mv)
        except VBraidError:
            continue
        if y.strands > cfg.max_strands or len(y) > cfg.max_length or y in seen:
            continue
        seen.add(y)
        yield mv, y
    if cfg.include_relations:
        for pos in range(len(w)):
            for rel, direction in relations_at(w, pos):
                mv = mk("relation", rel=rel, pos=pos, direction=direction)
                y = apply_move(w, mv)
                if y not in seen:
                    seen.add(y)
                    yield mv, y


# ---------------------------------------------------------------- bidirectional search


@dataclass
class NotFoundWithinBounds:
    start: BraidWord
    target: BraidWord
    nodes: int
    depth: int
    config: SearchConfig
    seconds: float = 0.0
    note: str = "bound exhaustion only; this is not a proof of non-equivalence"

    def to_json(self) -> dict:
        return {
            "format": "vbraid-1",
            "result": "not-found-within-bounds",
            "start": str(self.start),
            "target": str(self.target),
            "nodes_explored": self.nodes,
            "depth_exhausted": self.depth,
            "moves": self.config.moves,
            "max_strands": self.config.max_strands,
            "max_length": self.config.max_length,
            "seconds": round(self.seconds, 3),
            "note": self.note,
        }


def _canon_key(w: BraidWord, cfg: SearchConfig) -> BraidWord:
    return canonicalize(w, cfg.canon_budget)


def bfs_connect(a: BraidWord, b: BraidWord, cfg: SearchConfig | None = None):
    """Bidirectional breadth-first search between canonical forms.

    Returns a validated :class:`MovePath` or :class:`NotFoundWithinBounds`; raises
    :class:`BudgetExceeded` when the node budget runs out first.
    """
    cfg = cfg or SearchConfig()
    if a.category != b.category:
        raise CategoryMismatch(f"{a.category.value} vs {b.category.value}")
    t0 = time.perf_counter()
    if a == b:
        return MovePath(a, [], "bfs")
    ca, cb = _canon_key(a, cfg), _canon_key(b, cfg)
    # parent[x] = (previous canonical word, move applied to it) ; roots map to None
    par = [{ca: None}, {cb: None}]
    frontier = [[ca], [cb]]
    depth = [0, 0]
    nodes = 2
    meet = ca if ca == cb else None
    while meet is None and depth[0] + depth[1] < cfg.max_depth:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        if not frontier[side]:
            side = 1 - side
            if not frontier[side]:
                break
        nxt = []
        mine, other = par[side], par[1 - side]
        for x in frontier[side]:
            for mv, y in neighbors(x, cfg):
                key = _canon_key(y, cfg)
                if key in mine:
                    continue
                mine[key] = (x, mv)
                nodes += 1
                if key in other:
                    meet = key
                    break
                if nodes > cfg.node_budget:
                    raise BudgetExceeded(
                        f"node budget {cfg.node_budget} exhausted at depth {depth[0] + depth[1]}", nodes
                    )
                nxt.append(key)
            if meet is not None:
                break
        frontier[side] = nxt
        depth[side] += 1
        if not frontier[0] and not frontier[1]:
            break
    if meet is None:
        return NotFoundWithinBounds(a, b, nodes, depth[0] + depth[1], cfg, time.perf_counter() - t0)
    path = _assemble(a, ca, par[0], meet, cfg).extend(_assemble(b, cb, par[1], meet, cfg).reversed())
    path.name = f"bfs:{cfg.moves}"
    path.validate()
    return path


def _assemble(start: BraidWord, root: BraidWord, par: dict, node: BraidWord, cfg: SearchConfig) -> MovePath:
    """Concrete path start -> root -> ... -> node, with every normalization step spelled out."""
    chain = []
    while par[node] is not None:
        prev, mv = par[node]
        chain.append((prev, mv, node))
        node = prev
    path = canonicalize_path(start, cfg.canon_budget)
    for prev, mv, key in reversed(chain):
        raw = apply_move(prev, mv)
        hop = MovePath(prev, [Step(mv, raw)])
        norm = canonicalize_path(raw, cfg.canon_budget)
        if norm.end != key:
            raise AssertionError("canonicalization is not deterministic")
        path = path.extend(hop).extend(norm)
    return path


# ---------------------------------------------------------------- experiments


def real_conjugate_pair() -> tuple[BraidWord, BraidWord]:
    """Default real-conjugate pair: ``v_1`` and ``s_1^-1 v_1 s_1`` on 2 strands (our minimal choice)."""
    return BraidWord(2, (v(1),)), BraidWord(2, (S(1), v(1), s(1)))


@dataclass
class FlatPairReport:
    k1: int
    k2: int
    connected: bool
    explored: int
    depth: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class FlatInfinitenessReport:
    k_max: int
    depth: int
    length_slack: int
    pairs: list[FlatPairReport] = field(default_factory=list)
    normal_forms_distinct: bool = False

    @property
    def all_distinct(self) -> bool:
        return self.normal_forms_distinct and not any(p.connected for p in self.pairs)

    def to_json(self) -> dict:
        return {
            "format": "vbraid-1",
            "k_max": self.k_max,
            "depth": self.depth,
            "length_slack": self.length_slack,
            "normal_forms_distinct": self.normal_forms_distinct,
            "all_distinct": self.all_distinct,
            "pairs": [p.to_json() for p in self.pairs],
        }


def flat_power(k: int) -> BraidWord:
    return BraidWord(2, (c(1), v(1)) * k, Category.FLAT)


def _fv2_rewrites(w: tuple, cap: int) -> Iterator[tuple]:
    """One-step rewrites in FV_2: delete or insert ``c1 c1`` / ``v1 v1`` anywhere."""
    for k in range(len(w) - 1):
        if w[k] == w[k + 1]:
            yield w[:k] + w[k + 2:]
    if len(w) + 2 <= cap:
        for k in range(len(w) + 1):
            for g in (c(1), v(1)):
                yield w[:k] + (g, g) + w[k:]


def _rewrite_ball(w: tuple, depth: int, cap: int) -> set:
    seen = {w}
    layer = [w]
    for _ in range(depth):
        nxt = []
        for x in layer:
            for y in _fv2_rewrites(x, cap):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        layer = nxt
    return seen


def distinct_words_flat(k_max: int = 8, depth: int = 10, length_slack: int = 4) -> FlatInfinitenessReport:
    """Check that the words ``(c1 v1)^k``, ``k = 0..k_max``, are pairwise not connected.

    Two pieces of evidence: a bounded exhaustive rewrite search (words may grow
    by at most ``length_slack`` letters beyond the start), and the fact that the
    cancellation system ``c1 c1 -> 1, v1 v1 -> 1`` is terminating and confluent
    with each ``(c1 v1)^k`` already irreducible, so distinct words are distinct
    elements of ``S_2 * S_2``.
    """
    if "c-braid" not in RELATION_NAMES[Category.FLAT]:
        raise AssertionError("flat relation table changed")
    rep = FlatInfinitenessReport(k_max, depth, length_slack)
    words = [flat_power(k).letters for k in range(k_max + 1)]
    balls = [_rewrite_ball(w, depth, len(w) + length_slack) for w in words]
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            hit = words[j] in balls[i] or words[i] in balls[j]
            rep.pairs.append(FlatPairReport(i, j, hit, len(balls[i]) + len(balls[j]), depth))

    def reduce(w):
        st = []
        for g in w:
            if st and st[-1] == g:
                st.pop()
            else:
                st.append(g)
        return tuple(st)

    # the only overlap of the two rules is x x x, which resolves to x either way
    rep.normal_forms_distinct = len({reduce(w) for w in words}) == len(words) and all(reduce(w) == w for w in words)
    return rep

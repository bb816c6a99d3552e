"""Braid words over the virtual, flat, welded and unrestricted categories.

Conventions: generator indices and strand positions are 1-based, words read
top to bottom, and "appending on the right" means appending at the end of the
word.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .errors import (
    CategoryMismatch,
    CategoryViolation,
    IndexOutOfRange,
    NoMatch,
    ParseError,
    StrandMismatch,
)


class Category(str, Enum):
    VIRTUAL = "virtual"
    FLAT = "flat"
    WELDED = "welded"
    UNRESTRICTED = "unrestricted"


class Kind(str, Enum):
    SIGMA_POS = "s"
    SIGMA_NEG = "S"
    V = "v"
    C = "c"


_KIND_RANK = {Kind.SIGMA_POS: 0, Kind.SIGMA_NEG: 1, Kind.V: 2, Kind.C: 3}


@dataclass(frozen=True)
class Generator:
    kind: Kind
    index: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not isinstance(self.index, int) or self.index < 1:
            raise IndexOutOfRange(f"generator index must be a positive integer, got {self.index!r}")

    @property
    def token(self) -> str:
        return f"{self.kind.value}{self.index}"

    @property
    def sign(self) -> int:
        return {Kind.SIGMA_POS: 1, Kind.SIGMA_NEG: -1}.get(self.kind, 0)

    @property
    def is_real(self) -> bool:
        return self.kind in (Kind.SIGMA_POS, Kind.SIGMA_NEG)

    def inverse(self) -> Generator:
        if self.kind is Kind.SIGMA_POS:
            return Generator(Kind.SIGMA_NEG, self.index)
        if self.kind is Kind.SIGMA_NEG:
            return Generator(Kind.SIGMA_POS, self.index)
        return self

    def shifted(self, k: int) -> Generator:
        return Generator(self.kind, self.index + k)

    def sort_key(self) -> tuple[int, int]:
        return (self.index, _KIND_RANK[self.kind])

    def __str__(self):
        return self.token

    def __repr__(self):
        return f"Generator({self.token})"


def s(i: int) -> Generator:
    return Generator(Kind.SIGMA_POS, i)


def S(i: int) -> Generator:
    return Generator(Kind.SIGMA_NEG, i)


def v(i: int) -> Generator:
    return Generator(Kind.V, i)


def c(i: int) -> Generator:
    return Generator(Kind.C, i)


def _check_letter(g: Generator, n: int, cat: Category) -> None:
    if g.index > n - 1:
        raise IndexOutOfRange(f"{g.token} needs index <= {n - 1} for {n} strands")
    if cat is Category.FLAT and g.is_real:
        raise CategoryViolation(f"{g.token} is not a flat braid generator")
    if cat is not Category.FLAT and g.kind is Kind.C:
        raise CategoryViolation(f"{g.token} is only valid in the flat category")


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[Generator, ...] = ()
    category: Category = Category.VIRTUAL

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "category", Category(self.category))
        if not isinstance(self.strands, int) or self.strands < 1:
            raise IndexOutOfRange(f"strand count must be positive, got {self.strands!r}")
        for g in self.letters:
            _check_letter(g, self.strands, self.category)

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def with_letters(self, letters: Iterable[Generator], strands: int | None = None) -> BraidWord:
        return BraidWord(self.strands if strands is None else strands, tuple(letters), self.category)

    def __str__(self):
        return format_word(self)


def word(text_or_n, *letters: Generator, category: Category = Category.VIRTUAL) -> BraidWord:
    """Shorthand: ``word("n=2 s1")`` or ``word(2, s(1))``."""
    if isinstance(text_or_n, str):
        return parse_word(text_or_n)
    return BraidWord(text_or_n, letters, category)


# ---------------------------------------------------------------- relations

@dataclass(frozen=True)
class Relation:
    name: str
    lhs: tuple[Generator, ...]
    rhs: tuple[Generator, ...]

    def side(self, direction: str) -> tuple[tuple[Generator, ...], tuple[Generator, ...]]:
        if direction == "forward":
            return self.lhs, self.rhs
        if direction == "backward":
            return self.rhs, self.lhs
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": [g.token for g in self.lhs],
            "rhs": [g.token for g in self.rhs],
        }

    @classmethod
    def from_json(cls, d: dict) -> Relation:
        return cls(d["name"], tuple(parse_token(t) for t in d["lhs"]), tuple(parse_token(t) for t in d["rhs"]))


# Three-letter templates: (kind, offset) with offset 0 -> i, 1 -> i+1.
_TEMPLATES: dict[str, tuple[str, str]] = {
    "braid-rel": ("s0 s1 s0", "s1 s0 s1"),
    "braid-rel-inv": ("S0 S1 S0", "S1 S0 S1"),
    "v-braid": ("v0 v1 v0", "v1 v0 v1"),
    "c-braid": ("c0 c1 c0", "c1 c0 c1"),
    "special-detour": ("v0 s1 v0", "v1 s0 v1"),
    "special-detour-inv": ("v0 S1 v0", "v1 S0 v1"),
    "mixed-flat": ("v0 c1 v0", "v1 c0 v1"),
    "F1": ("v0 s1 s0", "s1 s0 v1"),
    "F1-inv": ("S0 S1 v0", "v1 S0 S1"),
    "F2": ("s0 s1 v0", "v1 s0 s1"),
    "F2-inv": ("v0 S1 S0", "S1 S0 v1"),
}

_BASE = ("cancel", "far-commute")
_VIRTUAL = _BASE + ("braid-rel", "braid-rel-inv", "v-braid", "special-detour", "special-detour-inv")
RELATION_NAMES: dict[Category, tuple[str, ...]] = {
    Category.VIRTUAL: _VIRTUAL,
    Category.WELDED: _VIRTUAL + ("F1", "F1-inv"),
    Category.UNRESTRICTED: _VIRTUAL + ("F1", "F1-inv", "F2", "F2-inv"),
    Category.FLAT: _BASE + ("c-braid", "v-braid", "mixed-flat"),
}


def _instantiate(template: str, i: int) -> tuple[Generator, ...]:
    return tuple(Generator(Kind(t[0]), i + int(t[1])) for t in template.split())


def relation(name: str, i: int) -> Relation:
    """Concrete instance of a three-letter relation at index ``i``."""
    if name not in _TEMPLATES:
        raise KeyError(f"unknown templated relation {name!r}")
    lhs, rhs = _TEMPLATES[name]
    return Relation(name, _instantiate(lhs, i), _instantiate(rhs, i))


def cancel_relation(g: Generator) -> Relation:
    """``g g^-1 = empty``."""
    return Relation("cancel", (g, g.inverse()), ())


def far_commute(a: Generator, b: Generator) -> Relation:
    if abs(a.index - b.index) < 2:
        raise NoMatch(f"{a.token} and {b.token} are not far apart")
    return Relation("far-commute", (a, b), (b, a))


def _is_licensed(rel: Relation) -> bool:
    """Structural sanity: the concrete relation is an instance of its named form."""
    if rel.name == "cancel":
        return len(rel.lhs) == 2 and not rel.rhs and rel.lhs[1] == rel.lhs[0].inverse()
    if rel.name == "far-commute":
        return (
            len(rel.lhs) == 2
            and rel.rhs == (rel.lhs[1], rel.lhs[0])
            and abs(rel.lhs[0].index - rel.lhs[1].index) >= 2
        )
    if rel.name in _TEMPLATES and rel.lhs:
        i = min(g.index for g in rel.lhs)
        return relation(rel.name, i) == rel
    return False


def relations_at(w: BraidWord, pos: int) -> list[tuple[Relation, str]]:
    """All (relation, direction) pairs whose matching side occurs at ``pos``.

    Backward cancellation (inserting a pair) is not enumerated here because it
    needs a choice of letter; use :func:`insert_pair` for that.
    """
    out: list[tuple[Relation, str]] = []
    L = w.letters
    names = RELATION_NAMES[w.category]
    if pos < 0 or pos >= len(L):
        return out
    if pos + 1 < len(L):
        a, b = L[pos], L[pos + 1]
        if "cancel" in names and b == a.inverse():
            out.append((cancel_relation(a), "forward"))
        if abs(a.index - b.index) >= 2:
            out.append((far_commute(a, b), "forward"))
    if pos + 2 < len(L):
        seg = L[pos:pos + 3]
        i = min(g.index for g in seg)
        for name in names:
            if name not in _TEMPLATES:
                continue
            rel = relation(name, i)
            if rel.lhs == seg:
                out.append((rel, "forward"))
            if rel.rhs == seg:
                out.append((rel, "backward"))
    return out


def all_relation_sites(w: BraidWord) -> list[tuple[int, Relation, str]]:
    return [(p, r, d) for p in range(len(w)) for r, d in relations_at(w, p)]


def apply_relation(w: BraidWord, rel: Relation, pos: int, direction: str = "forward") -> BraidWord:
    if rel.name not in RELATION_NAMES[w.category] or not _is_licensed(rel):
        raise CategoryViolation(f"relation {rel.name} is not licensed in the {w.category.value} category")
    src, dst = rel.side(direction)
    if pos < 0 or w.letters[pos:pos + len(src)] != src:
        raise NoMatch(f"{rel.name} ({direction}) does not match at position {pos}")
    return w.with_letters(w.letters[:pos] + dst + w.letters[pos + len(src):])


def insert_pair(w: BraidWord, g: Generator, pos: int) -> BraidWord:
    """Backward cancellation: insert ``g g^-1`` before position ``pos``."""
    if not 0 <= pos <= len(w):
        raise NoMatch(f"insertion position {pos} out of range")
    return w.with_letters(w.letters[:pos] + (g, g.inverse()) + w.letters[pos:])


# ---------------------------------------------------------------- word algebra

def free_reduce(w: BraidWord) -> BraidWord:
    stack: list[Generator] = []
    for g in w.letters:
        if stack and stack[-1] == g.inverse():
            stack.pop()
        else:
            stack.append(g)
    return w.with_letters(stack)


def underlying_permutation(w: BraidWord) -> tuple[int, ...]:
    """``perm[p-1]`` is the bottom position of the strand entering at top position ``p``."""
    at = list(range(1, w.strands + 1))  # at[q-1] = top label of strand currently at q
    for g in w.letters:
        i = g.index
        at[i - 1], at[i] = at[i], at[i - 1]
    perm = [0] * w.strands
    for q, p in enumerate(at, start=1):
        perm[p - 1] = q
    return tuple(perm)


def permutation_cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = set()
    cycles = []
    for start in range(1, len(perm) + 1):
        if start in seen:
            continue
        cyc = []
        p = start
        while p not in seen:
            seen.add(p)
            cyc.append(p)
            p = perm[p - 1]
        cycles.append(cyc)
    return cycles


def cycle_count(w: BraidWord) -> int:
    return len(permutation_cycles(underlying_permutation(w)))


def writhe(w: BraidWord) -> int:
    return sum(g.sign for g in w.letters)


def include_right(w: BraidWord) -> BraidWord:
    return w.with_letters(w.letters, strands=w.strands + 1)


def shift_left(w: BraidWord) -> BraidWord:
    return w.with_letters((g.shifted(1) for g in w.letters), strands=w.strands + 1)


def _check_compatible(a: BraidWord, b: BraidWord) -> None:
    if a.strands != b.strands:
        raise StrandMismatch(f"{a.strands} vs {b.strands} strands")
    if a.category != b.category:
        raise CategoryMismatch(f"{a.category.value} vs {b.category.value}")


def compose(a: BraidWord, b: BraidWord) -> BraidWord:
    _check_compatible(a, b)
    return a.with_letters(a.letters + b.letters)


def invert(w: BraidWord) -> BraidWord:
    return w.with_letters(g.inverse() for g in reversed(w.letters))


def append(w: BraidWord, *letters: Generator) -> BraidWord:
    return w.with_letters(w.letters + letters)


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"([sSvc])(\d+)")


def parse_token(tok: str) -> Generator:
    m = _TOKEN.fullmatch(tok)
    if not m or int(m.group(2)) < 1:
        raise ParseError(f"bad generator token {tok!r}", 0)
    return Generator(Kind(m.group(1)), int(m.group(2)))


def parse_word(text: str) -> BraidWord:
    """Parse ``n=<k> tok tok ... [cat=<category>]``."""
    strands = None
    category = Category.VIRTUAL
    letters: list[Generator] = []
    seen_cat = False
    for m in re.finditer(r"\S+", text):
        tok, off = m.group(0), len(text[:m.start()].encode())
        if strands is None:
            hm = re.fullmatch(r"n=(\d+)", tok)
            if not hm or int(hm.group(1)) < 1:
                raise ParseError(f"expected header 'n=<strands>', got {tok!r}", off)
            strands = int(hm.group(1))
            continue
        if tok.startswith("cat="):
            if seen_cat:
                raise ParseError("duplicate category flag", off)
            try:
                category = Category(tok[4:])
            except ValueError:
                raise ParseError(f"unknown category {tok[4:]!r}", off) from None
            seen_cat = True
            continue
        gm = _TOKEN.fullmatch(tok)
        if not gm or int(gm.group(2)) < 1:
            raise ParseError(f"bad token {tok!r}", off)
        letters.append(Generator(Kind(gm.group(1)), int(gm.group(2))))
    if strands is None:
        raise ParseError("missing header 'n=<strands>'", len(text.encode()))
    return BraidWord(strands, tuple(letters), category)


def format_word(w: BraidWord) -> str:
    parts = [f"n={w.strands}"] + [g.token for g in w.letters]
    if w.category is not Category.VIRTUAL:
        parts.append(f"cat={w.category.value}")
    return " ".join(parts)


# ---------------------------------------------------------------- random words

def random_word(
    rng: random.Random,
    strands: int,
    length: int,
    category: Category = Category.VIRTUAL,
) -> BraidWord:
    if strands < 2:
        return BraidWord(strands, (), category)
    kinds = [Kind.V, Kind.C] if category is Category.FLAT else [Kind.SIGMA_POS, Kind.SIGMA_NEG, Kind.V]
    letters = tuple(Generator(rng.choice(kinds), rng.randint(1, strands - 1)) for _ in range(length))
    return BraidWord(strands, letters, category)

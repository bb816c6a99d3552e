"""Bracket polynomial state sum, R-matrix trace invariants and the Markov-trace axiom report.

Smoothing convention used by the state sum: the A-smoothing of a ``+``
crossing is the oriented one (in/out joined across strands), the A-smoothing
of a ``-`` crossing is the unoriented one (in/in, out/out). Loops weigh
``delta = -A^2 - A^-2`` and the normalized value is ``(-A^3)^(-writhe) <K>``.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from .core import BraidWord, Category, Kind, random_word, writhe
from .diagram import GaussCode, closure
from .errors import CategoryModelMismatch, DimensionBudgetExceeded, FlatCrossingPresent
from .laurent import LaurentPoly, as_laurent

A = LaurentPoly.monomial(1)
DELTA = -(A**2) - A**-2
NEG_A3 = -(A**3)

# ---------------------------------------------------------------- state sum


def _smoothing_pairs(g: GaussCode):
    """Per classical crossing: the endpoint pairs joined by the oriented and unoriented smoothings.

    An endpoint is ``(edge, end)`` with ``end`` 0 for the edge's start, 1 for its end.
    Edge ``(c, k)`` runs from visit ``k`` to visit ``k+1`` of component ``c``.
    """
    ports: dict[int, list[tuple[tuple, tuple]]] = defaultdict(list)
    free_loops = 0
    sign: dict[int, str] = {}
    for c, comp in enumerate(g.components):
        m = len(comp)
        if m == 0:
            free_loops += 1
            continue
        for k, x in enumerate(comp):
            if x.sign == "flat":
                raise FlatCrossingPresent(f"crossing {x.id} is flat; the bracket is undefined")
            sign[x.id] = x.sign
            inp = ((c, (k - 1) % m), 1)
            out = ((c, k), 0)
            ports[x.id].append((inp, out))
    order = list(ports)
    table = []
    for cid in order:
        (ia, oa), (ib, ob) = ports[cid]
        oriented = ((ia, ob), (ib, oa))
        unoriented = ((ia, ib), (oa, ob))
        if sign[cid] == "+":
            table.append((oriented, unoriented))
        else:
            table.append((unoriented, oriented))
    edges = sorted({e for pairs in ports.values() for io in pairs for e, _ in io})
    return table, edges, free_loops


def _finish(counts: Counter, free_loops: int) -> LaurentPoly:
    total = LaurentPoly()
    cache: dict[int, LaurentPoly] = {}
    for (exp, loops), cnt in counts.items():
        loops += free_loops
        if loops not in cache:
            cache[loops] = DELTA ** (loops - 1)
        total = total + LaurentPoly.monomial(exp, cnt) * cache[loops]
    return total


def _connect(partner: dict, x, y) -> int:
    """Join endpoints x and y; return 1 if that closes a loop."""
    if partner[x] == y:
        del partner[x], partner[y]
        return 1
    px, py = partner.pop(x), partner.pop(y)
    partner[px] = py
    partner[py] = px
    return 0


def bracket_dp(g: GaussCode) -> LaurentPoly:
    """Unnormalized bracket by smoothing crossings one at a time.

    The state is the partial matching of still-open endpoints; states that
    agree are merged, which keeps the work far below the 2^k enumeration on
    braid closures.
    """
    table, edges, free_loops = _smoothing_pairs(g)
    if not table:
        return DELTA ** (free_loops - 1)
    init = {}
    for e in edges:
        init[(e, 0)] = (e, 1)
        init[(e, 1)] = (e, 0)
    states: dict[tuple, Counter] = {tuple(sorted(init.items())): Counter({(0, 0): 1})}
    for a_pairs, b_pairs in table:
        nxt: dict[tuple, Counter] = defaultdict(Counter)
        for key, cnt in states.items():
            for pairs, dexp in ((a_pairs, 1), (b_pairs, -1)):
                partner = dict(key)
                closed = sum(_connect(partner, x, y) for x, y in pairs)
                nk = tuple(sorted(partner.items()))
                bucket = nxt[nk]
                for (e, loops), c in cnt.items():
                    bucket[(e + dexp, loops + closed)] += c
        states = nxt
    final = Counter()
    for cnt in states.values():
        final.update(cnt)
    return _finish(final, free_loops)


def bracket_bruteforce(g: GaussCode) -> LaurentPoly:
    """Plain 2^k enumeration with union-find loop counting; the reference oracle."""
    table, edges, free_loops = _smoothing_pairs(g)
    if not table:
        return DELTA ** (free_loops - 1)
    index = {e: i for i, e in enumerate(edges)}
    counts: Counter = Counter()
    for choice in itertools.product((0, 1), repeat=len(table)):
        parent = list(range(len(edges)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for bit, (a_pairs, b_pairs) in zip(choice, table):
            for x, y in (a_pairs if bit == 0 else b_pairs):
                rx, ry = find(index[x[0]]), find(index[y[0]])
                if rx != ry:
                    parent[rx] = ry
        loops = len({find(i) for i in range(len(edges))})
        a_count = choice.count(0)
        counts[(a_count - (len(table) - a_count), loops)] += 1
    return _finish(counts, free_loops)


def bracket_state_sum(g: GaussCode, normalized: bool = True, method: str = "dp") -> LaurentPoly:
    """Bracket polynomial of a Gauss code, writhe-normalized by default."""
    if method == "dp":
        raw = bracket_dp(g)
    elif method == "bruteforce":
        raw = bracket_bruteforce(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not normalized:
        return raw
    return NEG_A3 ** (-g.writhe()) * raw


@lru_cache(maxsize=200_000)
def _bracket_of_word(w: BraidWord) -> LaurentPoly:
    return bracket_state_sum(closure(w))


def bracket_of_closure(w: BraidWord) -> LaurentPoly:
    """Normalized bracket of the closure of ``w`` (memoized)."""
    return _bracket_of_word(w)


# ---------------------------------------------------------------- R-matrix models


def _identity(n: int) -> np.ndarray:
    m = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            m[i, j] = 1 if i == j else 0
    return m


def _swap(d: int) -> np.ndarray:
    m = np.zeros((d * d, d * d), dtype=object)
    m[...] = 0
    for x in range(d):
        for y in range(d):
            m[y * d + x, x * d + y] = 1
    return m


def _obj(rows) -> np.ndarray:
    m = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            m[i, j] = x
    return m


def _is_zero(x) -> bool:
    return x == 0


def mat_equal(a: np.ndarray, b: np.ndarray) -> tuple[bool, tuple | None]:
    """Exact equality; also returns the first differing entry."""
    if a.shape != b.shape:
        return False, ("shape", a.shape, b.shape)
    for idx in np.ndindex(a.shape):
        if not _is_zero(a[idx] - b[idx]):
            return False, (idx, str(a[idx]), str(b[idx]))
    return True, None


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = a[i, j] * b
    return out


def _simplify(m: np.ndarray) -> np.ndarray:
    """Turn constant Laurent entries back into ints so equality and printing stay cheap."""
    out = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(m.shape):
        x = m[idx]
        if isinstance(x, LaurentPoly) and x.is_constant():
            x = x.coeff(0)
        out[idx] = x
    return out


@dataclass
class RMatrixModel:
    name: str
    d: int
    eta: np.ndarray
    R: np.ndarray
    Rinv: np.ndarray
    V: np.ndarray
    alpha: Any
    q: Any = None  # Hecke parameter, if the model claims a quadratic relation
    categories: tuple[Category, ...] = (Category.VIRTUAL,)
    notes: str = ""

    def to_json(self) -> dict:
        def enc(m):
            return [[str(x) for x in row] for row in m]

        d = {
            "format": "vbraid-1",
            "name": self.name,
            "d": self.d,
            "eta": enc(self.eta),
            "R": enc(self.R),
            "Rinv": enc(self.Rinv),
            "V": enc(self.V),
            "alpha": str(self.alpha),
            "categories": [c.value for c in self.categories],
        }
        if self.q is not None:
            d["q"] = str(self.q)
        return d

    @classmethod
    def from_json(cls, d: dict) -> RMatrixModel:
        def dec(rows):
            return _simplify(_obj([[LaurentPoly.parse(str(x)) for x in row] for row in rows]))

        dim = int(d["d"])
        m = cls(
            name=d.get("name", "custom"),
            d=dim,
            eta=dec(d["eta"]),
            R=dec(d["R"]),
            Rinv=dec(d["Rinv"]),
            V=dec(d["V"]) if "V" in d else _swap(dim),
            alpha=LaurentPoly.parse(str(d.get("alpha", "1"))),
            q=LaurentPoly.parse(str(d["q"])) if "q" in d else None,
            categories=tuple(Category(c) for c in d.get("categories", ["virtual"])),
        )
        if m.eta.shape != (dim, dim):
            raise ValueError("eta must be d x d")
        for key in ("R", "Rinv", "V"):
            if getattr(m, key).shape != (dim * dim, dim * dim):
                raise ValueError(f"{key} must be d^2 x d^2")
        return m

    @classmethod
    def load(cls, path: str) -> RMatrixModel:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def bracket_model() -> RMatrixModel:
    """2-dimensional bracket solution with ``V`` the swap.

    ``U = u w^T`` with cup ``u = (0, 1, -A^-2, 0)`` and cap ``w = (0, -A^2, 1, 0)``;
    ``R = A I + A^-1 U``, ``R^-1 = A^-1 I + A U``, ``eta = diag(-A^2, -A^-2)``, ``alpha = -A^3``.
    """
    u = [0, 1, -(A**-2), 0]
    w = [0, -(A**2), 1, 0]
    U = _obj([[x * y for y in w] for x in u])
    I4 = _identity(4)
    R = _simplify(A * I4 + A**-1 * U)
    Rinv = _simplify(A**-1 * I4 + A * U)
    eta = _obj([[-(A**2), 0], [0, -(A**-2)]])
    return RMatrixModel("bracket", 2, eta, R, Rinv, _swap(2), NEG_A3,
                        notes="virtual rotational invariant; equals delta * normalized bracket on classical words")


def swap_model(d: int = 2) -> RMatrixModel:
    return RMatrixModel("swap", d, _identity(d), _swap(d), _swap(d), _swap(d), 1, q=1,
                        categories=(Category.VIRTUAL, Category.WELDED, Category.UNRESTRICTED))


def identity_model(d: int = 2) -> RMatrixModel:
    I = _identity(d * d)
    return RMatrixModel("identity", d, _identity(d), I, I, I, 1, q=1,
                        categories=(Category.VIRTUAL, Category.WELDED, Category.UNRESTRICTED))


SHIPPED_MODELS: dict[str, Callable[[], RMatrixModel]] = {
    "bracket": bracket_model,
    "swap": swap_model,
    "identity": identity_model,
}


def get_model(name_or_path: str) -> RMatrixModel:
    if name_or_path in SHIPPED_MODELS:
        return SHIPPED_MODELS[name_or_path]()
    return RMatrixModel.load(name_or_path)


# ---------------------------------------------------------------- representation

DEFAULT_BUDGET = 2**12


def _check_dim(model: RMatrixModel, n: int, budget: int) -> int:
    D = model.d**n
    if D > budget:
        raise DimensionBudgetExceeded(f"d^n = {D} exceeds the budget {budget}")
    return D


def _gate(model: RMatrixModel, kind: Kind) -> np.ndarray:
    if kind is Kind.SIGMA_POS:
        return model.R
    if kind is Kind.SIGMA_NEG:
        return model.Rinv
    if kind is Kind.V:
        return model.V
    raise CategoryModelMismatch("flat generators have no R-matrix image")


def _apply_gate(X: np.ndarray, M: np.ndarray, d: int, n: int, i: int) -> np.ndarray:
    """``X @ (I^(i-1) (x) M (x) I^(n-i-1))`` via a tensor contraction."""
    D = X.shape[0]
    left, right = d ** (i - 1), d ** (n - i - 1)
    X4 = X.reshape(D, left, d * d, right)
    Y = np.tensordot(X4, M, axes=([2], [0]))  # (D, left, right, d*d)
    return np.ascontiguousarray(Y.transpose(0, 1, 3, 2)).reshape(D, D)


def rho(w: BraidWord, model: RMatrixModel, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    if w.category not in model.categories:
        raise CategoryModelMismatch(
            f"model {model.name!r} is not certified for the {w.category.value} category"
        )
    n = w.strands
    D = _check_dim(model, n, budget)
    X = _identity(D)
    for g in w.letters:
        X = _apply_gate(X, _gate(model, g.kind), model.d, n, g.index)
    return _simplify(X)


def eta_power(model: RMatrixModel, n: int) -> np.ndarray:
    E = _identity(1)
    for _ in range(n):
        E = kron(E, model.eta)
    return E


def raw_trace(w: BraidWord, model: RMatrixModel, budget: int = DEFAULT_BUDGET):
    """``trace(eta^(x)n rho(w))``."""
    P = rho(w, model, budget)
    n = w.strands
    eta = model.eta
    diagonal = all(_is_zero(eta[i, j]) for i in range(model.d) for j in range(model.d) if i != j)
    total = 0
    if diagonal:
        for idx in range(P.shape[0]):
            if _is_zero(P[idx, idx]):
                continue
            coef = 1
            rem = idx
            for _ in range(n):
                rem, digit = divmod(rem, model.d)
                coef = coef * eta[digit, digit]
            total = total + coef * P[idx, idx]
    else:
        E = eta_power(model, n)
        for i in range(P.shape[0]):
            for j in range(P.shape[0]):
                if not _is_zero(E[i, j]) and not _is_zero(P[j, i]):
                    total = total + E[i, j] * P[j, i]
    return as_laurent(total)


def trace_invariant(w: BraidWord, model: RMatrixModel, budget: int = DEFAULT_BUDGET) -> LaurentPoly:
    """``alpha^(-writhe) * trace(eta^(x)n rho(w))``."""
    return as_laurent(model.alpha) ** (-writhe(w)) * raw_trace(w, model, budget)


def eta_trace(model: RMatrixModel) -> LaurentPoly:
    return as_laurent(sum((model.eta[i, i] for i in range(model.d)), 0))


# ---------------------------------------------------------------- model checks


def _ops(model: RMatrixModel):
    I2 = _identity(model.d)

    def L(M):
        return kron(M, I2)

    def Rt(M):
        return kron(I2, M)

    return L, Rt


def check_model(model: RMatrixModel) -> dict[str, dict]:
    """Exact verification of the matrix identities; each entry is pass/fail with the first bad entry."""
    L, Rt = _ops(model)
    R, Ri, V = model.R, model.Rinv, model.V
    dot = np.dot
    d2 = model.d**2
    checks: dict[str, tuple[np.ndarray, np.ndarray]] = {
        "R*Rinv=I": (dot(R, Ri), _identity(d2)),
        "Rinv*R=I": (dot(Ri, R), _identity(d2)),
        "YBE(R)": (dot(dot(L(R), Rt(R)), L(R)), dot(dot(Rt(R), L(R)), Rt(R))),
        "YBE(V)": (dot(dot(L(V), Rt(V)), L(V)), dot(dot(Rt(V), L(V)), Rt(V))),
        "V^2=I": (dot(V, V), _identity(d2)),
        "mixed-detour": (dot(dot(L(V), Rt(R)), L(V)), dot(dot(Rt(V), L(R)), Rt(V))),
        "F1": (dot(dot(L(V), Rt(R)), L(R)), dot(dot(Rt(R), L(R)), Rt(V))),
        "F2": (dot(dot(L(R), Rt(R)), L(V)), dot(dot(Rt(V), L(R)), Rt(R))),
    }
    report = {}
    for name, (lhs, rhs) in checks.items():
        ok, where = mat_equal(_simplify(lhs), _simplify(rhs))
        report[name] = {"pass": ok, "first_failure": where}
    if model.q is None:
        report["hecke-quadratic"] = {"pass": None, "first_failure": "model declares no q"}
    else:
        q = model.q
        lhs = dot(R, R)
        rhs = (q - 1) * R + q * _identity(d2)
        ok, where = mat_equal(_simplify(lhs), _simplify(rhs))
        report["hecke-quadratic"] = {"pass": ok, "first_failure": where}
    return report


REQUIRED_CHECKS = ("R*Rinv=I", "YBE(R)", "YBE(V)", "V^2=I", "mixed-detour")


# ---------------------------------------------------------------- Markov trace axioms


@dataclass
class SampleConfig:
    seed: int = 0
    count: int = 12
    max_strands: int = 3
    max_length: int = 4
    exhaustive: bool = False


@dataclass
class RuleResult:
    rule: int
    statement: str
    status: str  # "holds" | "fails" | "no-data"
    constant: str | None = None
    samples: int = 0
    counterexample: str | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TraceReport:
    model: str
    rules: list[RuleResult] = field(default_factory=list)
    normalization: str = ""
    profile: str = ""

    def rule(self, k: int) -> RuleResult:
        return next(r for r in self.rules if r.rule == k)

    def to_json(self) -> dict:
        return {
            "format": "vbraid-1",
            "model": self.model,
            "normalization": self.normalization,
            "profile": self.profile,
            "rules": [r.to_json() for r in self.rules],
        }


def _all_words(n: int, max_len: int):
    gens = [(k, i) for i in range(1, n) for k in (Kind.SIGMA_POS, Kind.SIGMA_NEG, Kind.V)]
    from .core import Generator

    for L in range(max_len + 1):
        for combo in itertools.product(gens, repeat=L):
            yield BraidWord(n, tuple(Generator(k, i) for k, i in combo))


def _sample_words(cfg: SampleConfig, min_strands: int = 1):
    if cfg.exhaustive:
        for n in range(min_strands, cfg.max_strands + 1):
            yield from _all_words(n, cfg.max_length)
        return
    rng = random.Random(cfg.seed)
    for _ in range(cfg.count):
        n = rng.randint(min_strands, cfg.max_strands)
        yield random_word(rng, n, rng.randint(0, cfg.max_length))


def _ratio_str(num: LaurentPoly, den: LaurentPoly) -> str:
    q = num.divide_exact(den)
    return str(q) if q is not None else f"({num}) / ({den})"


def markov_axiom_report(model: RMatrixModel, cfg: SampleConfig | None = None,
                        budget: int = DEFAULT_BUDGET) -> TraceReport:
    """Test the six trace rules for the normalized trace ``tr(b) / tr(eta)^n``."""
    from .core import S, include_right, s, v

    cfg = cfg or SampleConfig()
    E = eta_trace(model)
    report = TraceReport(model.name, normalization=f"tr(eta) = {E}; tr(b) := trace(eta^n rho(b)) / tr(eta)^n")

    def T(w):
        return raw_trace(w, model, budget)

    # rule 1: cyclicity
    rng = random.Random(cfg.seed)
    res = RuleResult(1, "tr(ab) = tr(ba)", "holds")
    for _ in range(cfg.count):
        n = rng.randint(1, cfg.max_strands)
        a = random_word(rng, n, rng.randint(0, cfg.max_length))
        b = random_word(rng, n, rng.randint(0, cfg.max_length))
        res.samples += 1
        ab = BraidWord(n, a.letters + b.letters)
        ba = BraidWord(n, b.letters + a.letters)
        if T(ab) != T(ba):
            res.status, res.counterexample = "fails", f"a = {a}; b = {b}"
            break
    report.rules.append(res)

    # rule 2: tr(1) = 1 under this normalization
    res = RuleResult(2, "tr(1) = 1", "holds", constant="1")
    for n in range(1, cfg.max_strands + 1):
        res.samples += 1
        if T(BraidWord(n)) != E**n:
            res.status, res.counterexample = "fails", f"n={n}"
            break
    report.rules.append(res)

    def suffix3(n):
        return (s(n),)

    def suffix4(n):
        return (v(n),)

    def suffix5(n):
        return (S(n), v(n - 1), s(n))

    def suffix6(n):
        return (v(n), v(n - 1), s(n - 1), v(n), S(n - 1), v(n - 1), v(n))

    specs = [
        (3, "tr(a g_n) = z tr(a)", "z", suffix3, 1),
        (4, "tr(a v_n) = s tr(a)", "s", suffix4, 1),
        (5, "tr(a g_n^-1 v_(n-1) g_n) = r tr(a)", "r", suffix5, 2),
        (6, "tr(a v_n v_(n-1) g_(n-1) v_n g_(n-1)^-1 v_(n-1) v_n) = k tr(a)", "k", suffix6, 2),
    ]
    for rule_no, text, sym, suffix, min_n in specs:
        res = RuleResult(rule_no, text, "no-data")
        ref = None
        for a in _sample_words(cfg, min_strands=min_n):
            n = a.strands
            if model.d ** (n + 1) > budget:
                continue
            ext = include_right(a)
            big = ext.with_letters(ext.letters + suffix(n))
            num = T(big)
            den = E * T(a)
            res.samples += 1
            if ref is None:
                if den.is_zero():
                    if not num.is_zero():
                        res.status, res.counterexample = "fails", f"a = {a} (tr(a) = 0 but tr(a x) != 0)"
                        break
                    continue
                ref = (num, den)
                res.status = "holds"
                res.constant = f"{sym} = {_ratio_str(num, den)}"
                continue
            if num * ref[1] != ref[0] * den:
                res.status, res.counterexample = "fails", f"a = {a}"
                break
        report.rules.append(res)

    failing = [r.rule for r in report.rules if r.status == "fails"]
    report.profile = (
        "full Markov trace on the sample" if not failing
        else f"virtual rotational invariant profile: rules {failing} fail"
    )
    return report

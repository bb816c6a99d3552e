"""``vbraid`` command line. Exit codes: 0 success, 1 domain error, 2 usage error."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import braiding, diagram, invariants, moves, search
from .core import Generator, parse_token, parse_word, relation
from .errors import VBraidError

FORMAT = "vbraid-1"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _read_arg(text: str) -> str:
    """Allow ``@file`` in place of any word argument."""
    if text.startswith("@"):
        return Path(text[1:]).read_text().strip()
    return text


def _word(text: str):
    return parse_word(_read_arg(text))


def cmd_normalize(a) -> str:
    w = _word(a.word)
    out = search.canonicalize(w, a.budget)
    return _dump({"format": FORMAT, "word": str(out)}) if a.json else str(out)


def cmd_braid(a) -> str:
    m = diagram.MorsePresentation.loads(Path(a.input).read_text())
    rng = random.Random(a.seed) if a.seed is not None else None
    w = braiding.braid(m, rng)
    text = str(w)
    if a.out:
        Path(a.out).write_text(text + "\n")
    return _dump({"format": FORMAT, "word": text}) if a.json else text


def cmd_close(a) -> str:
    g = diagram.closure(_word(a.word))
    return _dump(g.to_json())


def cmd_invariant(a) -> str:
    w = _word(a.word)
    if a.model == "state-sum":
        val = invariants.bracket_of_closure(w)
        key = "bracket"
    else:
        model = invariants.get_model(a.model)
        val = invariants.trace_invariant(w, model, a.budget)
        key = "trace"
        if not a.raw:
            q = val.divide_exact(invariants.eta_trace(model))
            if q is not None:
                val, key = q, "invar"
    return _dump({key: str(val)}) if a.json else str(val)


def _gen(text: str) -> Generator:
    return parse_token(text)


def _build_move(a) -> moves.Move:
    op = a.op
    if op == "relation":
        return moves.mk("relation", rel=relation(a.rel, a.index), pos=a.pos, direction=a.direction)
    if op == "insert-pair":
        return moves.mk("insert-pair", gen=_gen(a.gen), pos=a.pos)
    if op in ("conjugate", "deconjugate"):
        return moves.mk(op, gen=_gen(a.gen))
    if op == "stabilize":
        return moves.mk(op, kind=a.kind or "virtual")
    if op == "destabilize":
        return moves.mk(op, kind=a.kind)
    if op.endswith("-under"):
        return moves.mk(op, sign=a.sign)
    if op.endswith("-flat"):
        return moves.mk(op)
    if op in ("lv-insert", "lv-remove"):
        return moves.mk(op, site=(a.gap, a.strand), kind=a.kind or "basic", side=a.side)
    if op == "exchange":
        return moves.mk(op, i=a.i, j=a.j, side=a.side)
    raise ValueError(f"unknown op {op!r}")


MOVE_OPS = (
    "relation", "insert-pair", "conjugate", "deconjugate", "stabilize", "destabilize",
    "thread-right-under", "unthread-right-under", "thread-left-under", "unthread-left-under",
    "thread-right-flat", "unthread-right-flat", "thread-left-flat", "unthread-left-flat",
    "lv-insert", "lv-remove", "exchange",
)


def cmd_move(a) -> str:
    w = _word(a.word)
    mv = _build_move(a)
    out = moves.apply_move(w, mv)
    if a.json:
        return moves.MovePath(w, [moves.Step(mv, out)], a.op).dumps()
    return str(out)


def cmd_replay(a) -> str:
    w = _word(a.word)
    extra = _word(a.extra) if a.extra else None
    opts = {}
    if a.strand is not None:
        opts["strand"] = a.strand
    if a.sign is not None:
        opts["sign"] = a.sign
    path = moves.replay_derivation(a.script, w, extra, **opts)
    return path.dumps()


def cmd_search(a) -> str:
    cfg = search.SearchConfig(
        moves=a.moves, max_depth=a.depth, max_strands=a.max_strands,
        max_length=a.max_length, node_budget=a.budget,
    )
    if a.source is None and a.target is None:
        src, dst = search.real_conjugate_pair()
    elif a.source is None or a.target is None:
        raise ValueError("--from and --to must be given together")
    else:
        src, dst = _word(a.source), _word(a.target)
    res = search.bfs_connect(src, dst, cfg)
    if isinstance(res, search.NotFoundWithinBounds):
        return _dump(res.to_json())
    return res.dumps()


def cmd_check_model(a) -> str:
    model = invariants.get_model(a.model)
    rep = invariants.check_model(model)
    out = {"format": FORMAT, "model": model.name, "checks": {}}
    for k, r in rep.items():
        where = r["first_failure"]
        out["checks"][k] = {"pass": r["pass"], "first_failure": list(where) if isinstance(where, tuple) else where}
    if a.json:
        return _dump(out)
    return "\n".join(
        f"{k:16s} {'skip' if r['pass'] is None else ('pass' if r['pass'] else 'FAIL')}"
        + (f"  at {r['first_failure']}" if r["pass"] is False else "")
        for k, r in out["checks"].items()
    )


def cmd_axiom_report(a) -> str:
    model = invariants.get_model(a.model)
    cfg = invariants.SampleConfig(seed=a.seed, count=a.count, max_strands=a.max_strands,
                                  max_length=a.max_length, exhaustive=a.exhaustive)
    rep = invariants.markov_axiom_report(model, cfg, a.budget)
    if a.json:
        return _dump(rep.to_json())
    lines = [f"model {rep.model}: {rep.normalization}"]
    if rep.profile:
        lines.append(rep.profile)
    for r in rep.rules:
        extra = f" constant={r.constant}" if r.constant is not None else ""
        if r.counterexample:
            extra += f" counterexample: {r.counterexample}"
        lines.append(f"rule {r.rule} [{r.status}] {r.statement} (samples={r.samples}){extra}")
    return "\n".join(lines)


def cmd_flat_parity(a) -> str:
    g = diagram.closure(_word(a.word))
    par = diagram.virtual_parity_between_components(g)
    out = {
        "format": FORMAT,
        "components": len(g.components),
        "parity": {f"{i}-{j}": p for (i, j), p in sorted(par.items())},
        "nontrivial": any(par.values()),
    }
    return _dump(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vbraid", description="Virtual braids, L-moves and trace invariants.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    sp = add("normalize", cmd_normalize, "canonicalize a braid word")
    sp.add_argument("--word", required=True)
    sp.add_argument("--budget", type=int, default=200)

    sp = add("braid", cmd_braid, "braid a Morse diagram (leftmost-topmost order unless --seed)")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int, default=None, help="random elimination order")

    sp = add("close", cmd_close, "Gauss code of the closure")
    sp.add_argument("--word", required=True)

    sp = add("invariant", cmd_invariant, "trace invariant of the closure")
    sp.add_argument("--word", required=True)
    sp.add_argument("--model", default="bracket", help="bracket|swap|identity|state-sum|file.json")
    sp.add_argument("--raw", action="store_true", help="skip division by tr(eta)")
    sp.add_argument("--budget", type=int, default=invariants.DEFAULT_BUDGET)

    sp = add("move", cmd_move, "apply one move")
    sp.add_argument("--op", required=True, choices=MOVE_OPS)
    sp.add_argument("--word", required=True)
    sp.add_argument("--gen")
    sp.add_argument("--kind")
    sp.add_argument("--sign", type=int, default=1, choices=(1, -1))
    sp.add_argument("--rel")
    sp.add_argument("--index", type=int, default=1, help="relation index i")
    sp.add_argument("--pos", type=int, default=0)
    sp.add_argument("--direction", default="forward", choices=("forward", "backward"))
    sp.add_argument("--gap", type=int, default=0)
    sp.add_argument("--strand", type=int, default=1)
    sp.add_argument("--side", default="right", choices=("right", "left"))
    sp.add_argument("--i", type=int, default=0)
    sp.add_argument("--j", type=int, default=0)

    sp = add("replay", cmd_replay, "replay a scripted derivation")
    sp.add_argument("--script", required=True, choices=sorted(moves.SCRIPTS))
    sp.add_argument("--word", required=True)
    sp.add_argument("--extra", help="second braid for the exchange script")
    sp.add_argument("--strand", type=int)
    sp.add_argument("--sign", type=int, choices=(1, -1))

    sp = add("search", cmd_search, "bounded bidirectional search between two words")
    sp.add_argument("--from", dest="source")
    sp.add_argument("--to", dest="target")
    sp.add_argument("--moves", default="markov", choices=search.MOVE_SETS)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--budget", type=int, default=1_000_000)
    sp.add_argument("--max-strands", type=int, default=4)
    sp.add_argument("--max-length", type=int, default=10)

    sp = add("check-model", cmd_check_model, "verify an R-matrix model")
    sp.add_argument("model")

    sp = add("axiom-report", cmd_axiom_report, "test the six trace rules")
    sp.add_argument("--model", default="identity")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=12)
    sp.add_argument("--max-strands", type=int, default=3)
    sp.add_argument("--max-length", type=int, default=4)
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--budget", type=int, default=invariants.DEFAULT_BUDGET)

    sp = add("flat-parity", cmd_flat_parity, "virtual crossing parity between closure components")
    sp.add_argument("--word", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        out = args.func(args)
    except VBraidError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

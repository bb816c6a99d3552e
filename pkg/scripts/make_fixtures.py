"""Regenerate the shipped fixtures and golden outputs (deterministic)."""

import json
import random
from pathlib import Path

from vbraid.braiding import braid
from vbraid.core import parse_word
from vbraid.diagram import MorsePresentation, cap, cross, cup, gauss_from_morse, random_morse, render_closure, vcross
from vbraid.invariants import bracket_state_sum

OUT = Path(__file__).resolve().parent.parent / "src" / "vbraid" / "fixtures"


def main():
    OUT.mkdir(exist_ok=True)
    diagrams = {
        "virtual_trefoil": render_closure(parse_word("n=2 s1 s1 v1"), explicit=True),
        "virtual_hopf": render_closure(parse_word("n=2 s1 v1"), explicit=True),
        "classical_trefoil": render_closure(parse_word("n=2 s1 s1 s1"), explicit=True),
        "kishino_like": render_closure(parse_word("n=3 s1 v2 S1 v2 s2 v1 S2 v1"), explicit=True),
        "unknot_virtual_loop": render_closure(parse_word("n=2 v1"), explicit=True),
        # crossings whose strands both run upward
        "up_up_kink": MorsePresentation(0, (cup(1, "rl"), cup(3, "lr"), cross(2, "+"), cap(1), cap(1))),
        "up_up_mixed": MorsePresentation(0, (
            cup(1, "rl"), cup(3, "lr"), cross(2, "+"), vcross(1), cross(2, "+"),
            cross(2, "-"), vcross(3), cap(1), cap(1),
        )),
    }
    rng = random.Random(2024)
    k = 0
    while k < 7:
        m = random_morse(rng, strands=rng.randint(0, 2), steps=10)
        if sum(e.event == "cross" for e in m.slices) < 2:
            continue
        diagrams[f"random_{k}"] = m
        k += 1
    golden = {}
    for name, m in sorted(diagrams.items()):
        (OUT / f"{name}.json").write_text(m.dumps() + "\n")
        w = braid(m)
        golden[name] = {
            "braid": str(w),
            "bracket": str(bracket_state_sum(gauss_from_morse(m))),
        }
    (OUT / "golden_braiding.json").write_text(json.dumps(golden, indent=1, sort_keys=True) + "\n")
    (OUT / "h_link.txt").write_text("n=2 c1 v1 cat=flat\n")
    (OUT / "fig37_input.txt").write_text("n=2 s1 v1\n")
    exchange = [
        ["n=2 s1", "n=2 v1"],
        ["n=2 S1 v1", "n=2 s1"],
        ["n=3 s1 s2", "n=3 v1"],
        ["n=3 v2 s1", "n=3 S1 v1"],
        ["n=3 s1 s2 s1", "n=3 s2 v1"],
    ]
    (OUT / "exchange_instances.json").write_text(
        json.dumps({"format": "vbraid-1", "instances": exchange}, indent=1) + "\n"
    )


if __name__ == "__main__":
    main()

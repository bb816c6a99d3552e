"""Virtual braid groups, L-move equivalences and exact trace invariants."""

from importlib import resources

from .braiding import braid, braid_crossing_box, braid_diagram, eliminate_up_arc, find_up_arcs, read_word
from .core import (
    RELATION_NAMES,
    BraidWord,
    Category,
    Generator,
    Kind,
    Relation,
    S,
    apply_relation,
    c,
    compose,
    format_word,
    free_reduce,
    insert_pair,
    invert,
    parse_word,
    random_word,
    relation,
    relations_at,
    s,
    underlying_permutation,
    v,
    writhe,
)
from .diagram import (
    Event,
    GaussCode,
    MorsePresentation,
    closure,
    gauss_from_morse,
    parity_signature,
    render_closure,
    virtual_parity_between_components,
)
from .errors import *  # noqa: F401,F403
from .invariants import (
    RMatrixModel,
    bracket_model,
    bracket_of_closure,
    bracket_state_sum,
    check_model,
    get_model,
    identity_model,
    markov_axiom_report,
    rho,
    swap_model,
    trace_invariant,
)
from .laurent import LaurentPoly
from .moves import Move, MovePath, apply_move, mk, replay_derivation
from .search import (
    NotFoundWithinBounds,
    SearchConfig,
    bfs_connect,
    canonicalize,
    real_conjugate_pair,
    distinct_words_flat,
)

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a shipped fixture file (e.g. ``"virtual_trefoil.json"``)."""
    return resources.files(__package__) / "fixtures" / name


def fixture_names(suffix: str = ".json") -> list[str]:
    return sorted(p.name for p in (resources.files(__package__) / "fixtures").iterdir() if p.name.endswith(suffix))

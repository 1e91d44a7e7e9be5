"""Finite-domain constraint propagation around the multiset ordering constraint.

The package bundles a small trailed domain store, GAC filters for the multiset
ordering constraint (occurrence-vector and sorted-vector variants, weak and
strict, with optional entailment detection), the alternative encodings used to
benchmark them, a brute-force oracle for differential testing, a depth-first
search engine with branch and bound, and a benchmark CLI (``bench``).
"""

from .engine import (
    Branching,
    Model,
    Propagator,
    SearchStats,
    SearchTimeout,
    Solver,
    Status,
    ascending,
    descending,
    propagate_to_fixpoint,
    solve_first,
    solve_optimal,
)
from .mset import (
    Flags,
    MultisetOrdering,
    NO_INDEX,
    SortedMultisetOrdering,
    filter_multiset_once,
    multiset_entailed,
)
from .order import (
    OccVector,
    Ordering,
    ceiling_of,
    floor_of,
    lex_cmp,
    mset_cmp,
    normalize_values,
    occ_of,
    sort_desc,
)
from .store import Event, EventKind, Inconsistent, Store

__all__ = [
    "Branching",
    "Event",
    "EventKind",
    "Flags",
    "Inconsistent",
    "Model",
    "MultisetOrdering",
    "NO_INDEX",
    "OccVector",
    "Ordering",
    "Propagator",
    "SearchStats",
    "SearchTimeout",
    "Solver",
    "SortedMultisetOrdering",
    "Status",
    "Store",
    "ascending",
    "ceiling_of",
    "descending",
    "filter_multiset_once",
    "floor_of",
    "lex_cmp",
    "mset_cmp",
    "multiset_entailed",
    "normalize_values",
    "occ_of",
    "propagate_to_fixpoint",
    "solve_first",
    "solve_optimal",
    "sort_desc",
]

"""Benchmark models and harness: party scheduling, rack configuration, sports.

Instances are JSON documents (see ``data/`` for shipped examples); a run is a
(config, instance) pair that builds the model, searches, and emits one stats
record.  The symmetry option decides which ordering constraints are posted and
the encoding option decides how multiset orderings among them are propagated:
the dedicated filter (occurrence or sorted variant), the counting
decomposition, the sortedness decomposition, or the weighted-power-sum
encoding.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional, Sequence

from .constraints import (
    AllDifferent,
    ArithmeticMultiset,
    Cardinality,
    Conditional,
    LessThan,
    LexOrdering,
    LinearSum,
    ReifiedEquals,
    SortednessLink,
    StatelessMultisetOrdering,
    TableConstraint,
    sum_eq,
)
from .engine import Branching, Model, SearchTimeout, Solver
from .mset import MultisetOrdering, SortedMultisetOrdering

PROBLEMS = ("progressive_party", "rack", "sport")
ENCODINGS = ("algorithm", "algorithm-sorted", "gcc", "sort", "arith")


class SchemaError(Exception):
    """The instance document does not match the expected schema."""


@dataclass
class RunConfig:
    symmetry: str = "none"
    encoding: str = "algorithm"
    entailment: bool = False
    labelling: str = "row-wise"
    timeout: Optional[float] = None
    seed: int = 0

    def validate(self) -> None:
        if self.encoding not in ENCODINGS:
            raise SchemaError(f"unknown encoding {self.encoding!r}")
        if self.labelling not in ("row-wise", "column-wise"):
            raise SchemaError(f"unknown labelling {self.labelling!r}")


@dataclass
class RunRecord:
    problem: str
    config: dict
    status: str  # solved | unsat | timeout
    fails: int
    choice_points: int
    wall_time_s: float
    solutions: int
    objective: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "RunRecord":
        return RunRecord(**json.loads(line))

    def text_line(self) -> str:
        obj = "" if self.objective is None else f" objective={self.objective}"
        return (
            f"{self.problem} [{self.config['symmetry']}/{self.config['encoding']}] "
            f"{self.status}: fails={self.fails} choice_points={self.choice_points} "
            f"time={self.wall_time_s:.3f}s{obj}"
        )


# -- instance loading ------------------------------------------------------------


def _require(doc: dict, key: str, kind) -> object:
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise SchemaError(f"field {key!r} has wrong type")
    return val


def load_boats() -> list[dict]:
    """The 42-boat capacity/crew table bundled with the package."""
    text = resources.files("msetcp").joinpath("data/boats_csplib.json").read_text()
    return json.loads(text)["boats"]


def load_instance(path_or_doc) -> dict:
    """Load and validate an instance document; returns a normalized dict.

    Validation failures raise SchemaError; suspicious-but-legal data only
    warns on stderr (it is never silently adjusted).
    """
    if isinstance(path_or_doc, dict):
        doc = dict(path_or_doc)
    else:
        try:
            with open(path_or_doc) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read instance: {exc}") from exc
        if not isinstance(doc, dict):
            raise SchemaError("instance document must be a JSON object")
    problem = _require(doc, "problem", str)
    if problem not in PROBLEMS:
        raise SchemaError(f"unknown problem {problem!r}")
    if problem == "progressive_party":
        _normalize_party(doc)
    elif problem == "rack":
        _normalize_rack(doc)
    else:
        _normalize_sport(doc)
    return doc


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _normalize_party(doc: dict) -> None:
    periods = _require(doc, "periods", int)
    if periods <= 0:
        raise SchemaError("periods must be positive")
    if "csplib_hosts" in doc:
        ids = _require(doc, "csplib_hosts", list)
        boats = {b["id"]: b for b in load_boats()}
        unknown = [i for i in ids if i not in boats]
        if unknown:
            raise SchemaError(f"unknown boat ids {unknown}")
        doc["hosts"] = [
            {"capacity": boats[i]["capacity"], "crew": boats[i]["crew"]} for i in ids
        ]
        doc["guests"] = [
            {"crew": b["crew"]} for i, b in sorted(boats.items()) if i not in set(ids)
        ]
    hosts = _require(doc, "hosts", list)
    guests = _require(doc, "guests", list)
    if not hosts or not guests:
        raise SchemaError("hosts and guests must be non-empty")
    for h in hosts:
        if not isinstance(h, dict) or "capacity" not in h or "crew" not in h:
            raise SchemaError("host entries need capacity and crew")
        if h["capacity"] < 0 or h["crew"] < 0:
            raise SchemaError("host capacity/crew must be non-negative")
    for g in guests:
        if not isinstance(g, dict) or "crew" not in g or g["crew"] <= 0:
            raise SchemaError("guest entries need a positive crew")
    spare = sum(h["capacity"] - h["crew"] for h in hosts)
    demand = sum(g["crew"] for g in guests)
    if spare < demand:
        _warn(f"total spare capacity {spare} below total guest size {demand}")


def _normalize_rack(doc: dict) -> None:
    models = _require(doc, "rack_models", list)
    cards = _require(doc, "card_types", list)
    racks = _require(doc, "racks", int)
    if racks <= 0:
        raise SchemaError("racks must be positive")
    if not models or not cards:
        raise SchemaError("rack_models and card_types must be non-empty")
    for m in models:
        if not isinstance(m, dict) or not {"power", "connectors", "price"} <= set(m):
            raise SchemaError("rack model entries need power, connectors, price")
        if min(m["power"], m["connectors"], m["price"]) < 0:
            raise SchemaError("rack model fields must be non-negative")
    for c in cards:
        if not isinstance(c, dict) or not {"power", "demand"} <= set(c):
            raise SchemaError("card type entries need power and demand")
        if c["power"] < 0 or c["demand"] < 0:
            raise SchemaError("card power/demand must be non-negative")
    total_conn = racks * max(m["connectors"] for m in models)
    total_demand = sum(c["demand"] for c in cards)
    if total_conn < total_demand:
        _warn(f"total connectors {total_conn} cannot meet demand {total_demand}")


def _normalize_sport(doc: dict) -> None:
    teams = _require(doc, "teams", int)
    if teams < 3:
        raise SchemaError("sport scheduling needs at least 3 teams")


# -- multiset ordering encodings ---------------------------------------------------


def post_mset_ordering(
    model: Model,
    xs: Sequence[int],
    ys: Sequence[int],
    strict: bool,
    cfg: RunConfig,
) -> None:
    """Post one multiset ordering constraint under the configured encoding."""
    enc = cfg.encoding
    if enc == "algorithm":
        model.post(MultisetOrdering(xs, ys, strict=strict, entailment=cfg.entailment))
    elif enc == "algorithm-sorted":
        model.post(SortedMultisetOrdering(xs, ys, strict=strict))
    elif enc == "arith":
        model.post(ArithmeticMultiset(xs, ys, base=max(2, len(xs)), strict=strict))
    elif enc == "gcc":
        values = sorted(
            {v for w in list(xs) + list(ys) for v in model.store.values(w)},
            reverse=True,
        )
        ox = [model.new_var(range(len(xs) + 1)) for _ in values]
        oy = [model.new_var(range(len(ys) + 1)) for _ in values]
        model.post(Cardinality(xs, values, ox))
        model.post(Cardinality(ys, values, oy))
        model.post(LexOrdering(ox, oy, strict=strict))
    elif enc == "sort":
        union_x = {v for w in xs for v in model.store.values(w)}
        union_y = {v for w in ys for v in model.store.values(w)}
        sxs = [model.new_var(union_x) for _ in xs]
        sys_ = [model.new_var(union_y) for _ in ys]
        model.post(SortednessLink(xs, sxs))
        model.post(SortednessLink(ys, sys_))
        model.post(LexOrdering(sxs, sys_, strict=strict))
    else:
        raise SchemaError(f"unknown encoding {enc!r}")


def post_conditional_mset(
    model: Model,
    guard_a: int,
    guard_b: int,
    xs: Sequence[int],
    ys: Sequence[int],
    cfg: RunConfig,
) -> None:
    """Conditional multiset ordering; only stateless bodies are possible."""
    if cfg.encoding in ("algorithm", "algorithm-sorted"):
        body = StatelessMultisetOrdering(xs, ys)
    elif cfg.encoding == "arith":
        body = ArithmeticMultiset(xs, ys, base=max(2, len(xs)))
    else:
        raise SchemaError(
            f"encoding {cfg.encoding!r} cannot be posted conditionally"
        )
    model.post(Conditional(guard_a, guard_b, body))


def _post_ordering(model, xs, ys, kind: str, cfg: RunConfig) -> None:
    """kind: msetle | msetge | lexlt | lexgt."""
    if kind == "msetle":
        post_mset_ordering(model, xs, ys, False, cfg)
    elif kind == "msetge":
        post_mset_ordering(model, ys, xs, False, cfg)
    elif kind == "lexlt":
        model.post(LexOrdering(xs, ys, strict=True))
    elif kind == "lexgt":
        model.post(LexOrdering(ys, xs, strict=True))
    else:
        raise SchemaError(f"unknown ordering kind {kind!r}")


_PARTY_SYMMETRY_MAP = {
    "none": (None, None),
    "lex": ("lexlt", "lexlt"),
    "mset": ("msetle", "msetle"),
    "mset+msetge": ("msetle", "msetge"),
    "mset+lex": ("msetle", "lexlt"),
    "mset+lexge": ("msetle", "lexgt"),
    "lex+mset": ("lexlt", "msetle"),
    "lex+msetge": ("lexlt", "msetge"),
    "mset-rows": ("msetle", None),
}


# -- progressive party -------------------------------------------------------------


@dataclass
class BuiltModel:
    model: Model
    branching: Branching
    meta: dict = field(default_factory=dict)


def build_progressive_party(instance: dict, cfg: RunConfig) -> BuiltModel:
    """Host assignment matrix with meet-once, revisit, and capacity constraints.

    Guests are ordered by decreasing crew size; a guest's "row" collects its
    host over all periods, a period's "column" collects all guests of that
    period.  Multiset/lex row orderings are posted only between adjacent
    guests of equal crew size (partial row symmetry); column orderings
    between all adjacent periods.
    """
    if cfg.symmetry not in _PARTY_SYMMETRY_MAP:
        raise SchemaError(f"unknown party symmetry {cfg.symmetry!r}")
    hosts = instance["hosts"]
    p = instance["periods"]
    guests = sorted(instance["guests"], key=lambda g: -g["crew"])
    h, g = len(hosts), len(guests)
    spare = [b["capacity"] - b["crew"] for b in hosts]
    crew = [b["crew"] for b in guests]

    m = Model()
    H = [[m.new_var(range(h)) for _ in range(g)] for _ in range(p)]
    host_const = [m.new_var({k}) for k in range(h)]
    C = [[[m.new_var({0, 1}) for _ in range(h)] for _ in range(g)] for _ in range(p)]

    # (5) channel H to the 0/1 matrix
    for i in range(p):
        for j in range(g):
            for k in range(h):
                m.post(ReifiedEquals(H[i][j], host_const[k], C[i][j][k]))
    # (4) exactly one host per guest and period
    for i in range(p):
        for j in range(g):
            m.post(sum_eq([C[i][j][k] for k in range(h)], 1))
    # (3) spare capacity per period and host
    for i in range(p):
        for k in range(h):
            m.post(LinearSum(crew, [C[i][j][k] for j in range(g)], "<=", spare[k]))
    # (2) no revisits
    for j in range(g):
        m.post(AllDifferent([H[i][j] for i in range(p)]))
    # (1) two guests meet at most once
    for j1 in range(g):
        for j2 in range(j1 + 1, g):
            meets = []
            for i in range(p):
                b = m.new_var({0, 1})
                m.post(ReifiedEquals(H[i][j1], H[i][j2], b))
                meets.append(b)
            m.post(LinearSum([1] * p, meets, "<=", 1))

    row_kind, col_kind = _PARTY_SYMMETRY_MAP[cfg.symmetry]
    # with a single period, equal-crew guests may legitimately take identical
    # rows (they meet just once), so strict orderings would cut solutions
    if p < 2 and row_kind in ("lexlt", "lexgt"):
        raise SchemaError("strict row orderings need at least two periods")
    if row_kind:
        for j in range(g - 1):
            if crew[j] == crew[j + 1]:
                row_a = [H[i][j] for i in range(p)]
                row_b = [H[i][j + 1] for i in range(p)]
                _post_ordering(m, row_a, row_b, row_kind, cfg)
    if col_kind:
        for i in range(p - 1):
            col_a = H[i]
            col_b = H[i + 1]
            _post_ordering(m, col_a, col_b, col_kind, cfg)

    if cfg.labelling == "row-wise":
        order = [H[i][j] for j in range(g) for i in range(p)]
    else:
        order = [H[i][j] for i in range(p) for j in range(g)]
    by_spare = Branching.by_key(order, lambda var, val: -spare[val])
    return BuiltModel(m, by_spare, {"hosts": h, "guests": g, "H": H})


# -- rack configuration --------------------------------------------------------------


def build_rack(instance: dict, cfg: RunConfig) -> BuiltModel:
    """Rack model assignment plus per-rack card counts, minimizing total price.

    A zero-power/zero-connector/zero-price dummy model marks unused racks.
    Same-model racks are interchangeable, so adjacent racks get a conditional
    multiset ordering on their card-count columns when symmetry is enabled.
    """
    if cfg.symmetry not in ("none", "mset"):
        raise SchemaError(f"unknown rack symmetry {cfg.symmetry!r}")
    models = list(instance["rack_models"]) + [{"power": 0, "connectors": 0, "price": 0}]
    cards = instance["card_types"]
    r = instance["racks"]
    t = len(cards)
    nm = len(models)
    max_conn = max(mo["connectors"] for mo in models)

    m = Model()
    R = [m.new_var(range(nm)) for _ in range(r)]
    C = [[m.new_var(range(max_conn + 1)) for _ in range(r)] for _ in range(t)]
    conn = [m.new_var({mo["connectors"] for mo in models}) for _ in range(r)]
    power = [m.new_var({mo["power"] for mo in models}) for _ in range(r)]
    price = [m.new_var({mo["price"] for mo in models}) for _ in range(r)]
    lookup_conn = [(k, mo["connectors"]) for k, mo in enumerate(models)]
    lookup_power = [(k, mo["power"]) for k, mo in enumerate(models)]
    lookup_price = [(k, mo["price"]) for k, mo in enumerate(models)]
    for j in range(r):
        m.post(TableConstraint([R[j], conn[j]], lookup_conn))
        m.post(TableConstraint([R[j], power[j]], lookup_power))
        m.post(TableConstraint([R[j], price[j]], lookup_price))
        # (1) connector capacity
        m.post(LinearSum([1] * t + [-1], [C[i][j] for i in range(t)] + [conn[j]], "<=", 0))
        # (2) power capacity
        m.post(
            LinearSum(
                [c["power"] for c in cards] + [-1],
                [C[i][j] for i in range(t)] + [power[j]],
                "<=",
                0,
            )
        )
    # (3) demands
    for i in range(t):
        m.post(sum_eq([C[i][j] for j in range(r)], cards[i]["demand"]))
    # redundant aggregates implied by (1)-(3): chosen racks must jointly cover
    # the total connector and power demand; prunes hopeless model choices
    # before any card packing starts
    total_cards = sum(c["demand"] for c in cards)
    total_power = sum(c["power"] * c["demand"] for c in cards)
    m.post(LinearSum([-1] * r, conn, "<=", -total_cards))
    m.post(LinearSum([-1] * r, power, "<=", -total_power))
    # objective
    obj = m.new_var(range(sum(mo["price"] for mo in models) * r + 1))
    m.post(LinearSum([1] * r + [-1], price + [obj], "==", 0))
    m.minimize(obj)

    if cfg.symmetry == "mset":
        for j in range(r - 1):
            post_conditional_mset(
                m, R[j], R[j + 1], [C[i][j] for i in range(t)], [C[i][j + 1] for i in range(t)], cfg
            )

    # all rack models first, so the cost bound and capacity aggregates prune
    # whole configurations before any card packing is attempted
    order = list(R)
    for j in range(r):
        order.extend(C[i][j] for i in range(t))
    card_vars = {v for row in C for v in row}
    rack_vars = set(R)
    price_of = [mo["price"] for mo in models]

    # rack models cheapest-first (so the cost bound prunes on prefixes);
    # card counts packed greedily (largest count first)
    def value_order(var, vals):
        if var in rack_vars:
            return sorted(vals, key=lambda k: (price_of[k], k))
        if var in card_vars:
            return vals[::-1]
        return vals

    return BuiltModel(m, Branching(order, value_order), {"R": R, "C": C, "objective": obj})


# -- sport scheduling ----------------------------------------------------------------


def game_code(home: int, away: int, n: int) -> int:
    return (home - 1) * n + away


def build_sport(instance: dict, cfg: RunConfig) -> BuiltModel:
    """Round-robin schedule; odd team counts play n weeks of (n-1)/2 periods.

    Each period must host every team exactly twice across the season and each
    week column is (a sub-permutation of) the teams.  With odd n the week
    columns are pairwise distinct as multisets, so a strict multiset ordering
    chain over adjacent columns breaks week symmetry; with even n the columns
    are equal as multisets and only lex orderings apply.
    """
    n = instance["teams"]
    odd = n % 2 == 1
    if cfg.symmetry not in ("none", "mset", "lex"):
        raise SchemaError(f"unknown sport symmetry {cfg.symmetry!r}")
    if cfg.symmetry == "mset" and not odd:
        raise SchemaError("multiset column ordering applies to odd team counts only")
    periods = (n - 1) // 2 if odd else n // 2
    weeks = n  # odd: n real weeks; even: n-1 real weeks plus a dummy column
    real_weeks = n if odd else n - 1
    teams = range(1, n + 1)
    triples = [
        (hh, aa, game_code(hh, aa, n)) for hh in teams for aa in teams if hh < aa
    ]
    codes = {tr[2] for tr in triples}

    m = Model()
    T = [
        [[m.new_var(teams) for _ in range(2)] for _ in range(weeks)]
        for _ in range(periods)
    ]
    G = [[m.new_var(codes) for _ in range(real_weeks)] for _ in range(periods)]

    # every week column: no team twice
    for w in range(weeks):
        m.post(AllDifferent([T[j][w][s] for j in range(periods) for s in range(2)]))
    # all games different
    m.post(AllDifferent([G[j][w] for j in range(periods) for w in range(real_weeks)]))
    # every period row: each team exactly twice
    occ_two = [m.new_var({2}) for _ in teams]
    for j in range(periods):
        row = [T[j][w][s] for w in range(weeks) for s in range(2)]
        m.post(Cardinality(row, sorted(teams, reverse=True), occ_two))
    # channel games, order slots
    for j in range(periods):
        for w in range(real_weeks):
            m.post(TableConstraint([T[j][w][0], T[j][w][1], G[j][w]], triples))
    for j in range(periods):
        for w in range(weeks):
            m.post(LessThan(T[j][w][0], T[j][w][1]))

    # only the real weeks are interchangeable (the dummy week, if any, is
    # pinned by the period counts), so ordering chains stop before it
    if cfg.symmetry == "mset":
        for w in range(real_weeks - 1):
            col_a = [T[j][w][s] for j in range(periods) for s in range(2)]
            col_b = [T[j][w + 1][s] for j in range(periods) for s in range(2)]
            post_mset_ordering(m, col_a, col_b, True, cfg)
    elif cfg.symmetry == "lex":
        for w in range(real_weeks - 1):
            col_a = [T[j][w][s] for j in range(periods) for s in range(2)]
            col_b = [T[j][w + 1][s] for j in range(periods) for s in range(2)]
            m.post(LexOrdering(col_a, col_b, strict=True))

    order = []
    for w in range(weeks):
        first, second = (0, 1) if w % 2 == 0 else (1, 0)
        order.extend(T[j][w][first] for j in range(periods))
        order.extend(T[j][w][second] for j in range(periods))
    return BuiltModel(m, Branching(order), {"T": T, "G": G, "periods": periods})


# -- harness ---------------------------------------------------------------------------


def build(instance: dict, cfg: RunConfig) -> BuiltModel:
    problem = instance["problem"]
    if problem == "progressive_party":
        return build_progressive_party(instance, cfg)
    if problem == "rack":
        return build_rack(instance, cfg)
    return build_sport(instance, cfg)


def run(cfg: RunConfig, instance: dict) -> RunRecord:
    """Build, solve, and report one benchmark run.

    Wall time covers the search only (model build excluded).  The stats
    record is deterministic for a given (config, instance) pair.
    """
    cfg.validate()
    built = build(instance, cfg)
    model, branching = built.model, built.branching
    optimizing = model.objective is not None
    status = "solved"
    objective = None
    solver = Solver(model)
    try:
        sol, stats = solver.solve(
            branching,
            minimize=model.objective,
            timeout=cfg.timeout,
            first_only=not optimizing,
        )
        if sol is None:
            status = "unsat"
        elif optimizing:
            objective = stats.best_objective
    except SearchTimeout:
        status = "timeout"
        stats = solver.stats
    return RunRecord(
        problem=instance["problem"],
        config={
            "symmetry": cfg.symmetry,
            "encoding": cfg.encoding,
            "entailment": cfg.entailment,
            "labelling": cfg.labelling,
            "timeout": cfg.timeout,
            "seed": cfg.seed,
        },
        status=status,
        fails=stats.fails,
        choice_points=stats.choice_points,
        wall_time_s=round(stats.wall_time, 6),
        solutions=stats.solutions,
        objective=objective,
    )

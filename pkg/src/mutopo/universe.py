"""Finite universes of mutation classes, their embedding order, and the
induced topology (closure, generated open sets, closed/open/clopen tests,
Hasse diagrams, DOT export).

A universe is the desk-scale stand-in for the infinite space of mutation
classes: all classes of valid matrices with rank at most r and seed entries
bounded by w, together with the full tri-valued embedding relation between
them.  Topology operations refuse with :class:`UnresolvedRelation` rather
than silently misclassify when an UNKNOWN verdict could change the answer.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product

from .canonical import canonical_form
from .classes import (
    Budget,
    ClassKey,
    DEFAULT_BUDGET,
    Verdict,
    enumerate_class,
)
from .embed import embeds
from .matrix import (
    ExchangeMatrix,
    NotSkewSymmetrizable,
    build,
    from_json_dict,
    to_json_dict,
)


class UnresolvedRelation(RuntimeError):
    """An UNKNOWN embedding verdict blocks a sound answer."""


@dataclass(frozen=True)
class UniverseClass:
    key: ClassKey
    seed: ExchangeMatrix

    @property
    def hash(self) -> str:
        return self.key.hash

    @property
    def rank(self) -> int:
        return self.key.form.matrix.size


@dataclass(frozen=True)
class Universe:
    rank_cap: int
    entry_cap: int
    budget: Budget
    family: str
    classes: tuple[UniverseClass, ...]
    relation: tuple[tuple[str, ...], ...]  # relation[i][j]: does class i embed into class j

    def __post_init__(self):
        object.__setattr__(
            self, "_by_hash", {cls.hash: i for i, cls in enumerate(self.classes)}
        )

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def hashes(self) -> frozenset[str]:
        return frozenset(self._by_hash)

    def index_of(self, hash_: str) -> int:
        try:
            return self._by_hash[hash_]
        except KeyError:
            raise KeyError(f"class {hash_[:12]} is not in this universe") from None

    def class_of(self, hash_: str) -> UniverseClass:
        return self.classes[self.index_of(hash_)]

    def find(self, prefix: str) -> UniverseClass:
        """Resolve a unique class-hash prefix."""
        hits = [cls for cls in self.classes if cls.hash.startswith(prefix)]
        if not hits:
            raise KeyError(f"no universe class matches prefix {prefix!r}")
        if len(hits) > 1:
            raise KeyError(f"prefix {prefix!r} is ambiguous ({len(hits)} matches)")
        return hits[0]

    def verdict(self, lower: str, upper: str) -> str:
        return self.relation[self.index_of(lower)][self.index_of(upper)]


# --- seed generation ---------------------------------------------------------

def iter_quiver_seeds(rank_cap: int, entry_cap: int):
    """All skew-symmetric matrices (no frozen indices) with size <= rank_cap
    and entries bounded by entry_cap."""
    for size in range(1, rank_cap + 1):
        pairs = list(combinations(range(size), 2))
        for values in product(range(-entry_cap, entry_cap + 1), repeat=len(pairs)):
            rows = [[0] * size for _ in range(size)]
            for (i, j), v in zip(pairs, values):
                rows[i][j] = v
                rows[j][i] = -v
            yield build(size, 0, rows)


def iter_skew_seeds(rank_cap: int, entry_cap: int):
    """All skew-symmetrizable matrices with size <= rank_cap, entries bounded
    by entry_cap, over every mutable/frozen split with at least one mutable
    index.  Sign-coherent candidates that admit no symmetrizer are skipped."""
    pair_options = [(0, 0)]
    for a in range(1, entry_cap + 1):
        for c in range(1, entry_cap + 1):
            pair_options.append((a, -c))
            pair_options.append((-a, c))
    for size in range(1, rank_cap + 1):
        pairs = list(combinations(range(size), 2))
        for m in range(size):
            n = size - m
            for values in product(pair_options, repeat=len(pairs)):
                rows = [[0] * size for _ in range(size)]
                for (i, j), (x, y) in zip(pairs, values):
                    rows[i][j] = x
                    rows[j][i] = y
                try:
                    yield build(n, m, rows)
                except NotSkewSymmetrizable:
                    continue


_FAMILIES = {"quiver": iter_quiver_seeds, "skew": iter_skew_seeds}


def collect_classes(seeds, budget: Budget, store=None) -> list[UniverseClass]:
    """Group seed matrices into mutation classes.

    Seeds are first deduplicated by canonical form and sorted, so the sweep
    (and hence the result) does not depend on the order seeds arrive in.
    Each unclassified canonical seed is enumerated once; every member hash
    it discovers is marked classified.
    """
    by_hash = {}
    for seed in seeds:
        form = canonical_form(seed)
        if form.hash not in by_hash:
            by_hash[form.hash] = form
    order = sorted(
        by_hash.values(), key=lambda f: (f.matrix.size, f.matrix.n, f.key)
    )
    classified: set[str] = set()
    out: list[UniverseClass] = []
    for form in order:
        if form.hash in classified:
            continue
        enum = enumerate_class(form.matrix, budget, store)
        least = enum.least()
        out.append(
            UniverseClass(ClassKey(least.form, enum.status), form.matrix)
        )
        classified.update(enum.hashes)
    out.sort(key=lambda cls: (cls.rank, cls.key.form.matrix.n, cls.key.form.key))
    return out


_WORKER_STATE: dict = {}


def _relation_worker_init(reps, budget, rank3_invariant):
    _WORKER_STATE["reps"] = reps
    _WORKER_STATE["budget"] = budget
    _WORKER_STATE["rank3"] = rank3_invariant


def _relation_worker(pair):
    i, j = pair
    reps = _WORKER_STATE["reps"]
    ev = embeds(
        reps[i], reps[j], _WORKER_STATE["budget"], _WORKER_STATE["rank3"]
    )
    return i, j, _VERDICT_CHAR[ev.verdict]


_VERDICT_CHAR = {Verdict.YES: "Y", Verdict.NO: "N", Verdict.UNKNOWN: "U"}


def build_universe(
    rank_cap: int,
    entry_cap: int,
    budget: Budget = DEFAULT_BUDGET,
    family: str = "quiver",
    rank3_invariant: bool = True,
    store=None,
    jobs: int = 1,
    seeds=None,
) -> Universe:
    """Build the universe of classes with rank <= rank_cap and seed entries
    <= entry_cap, plus its full pairwise embedding relation.

    ``family`` selects the seed matrices: "quiver" (skew-symmetric, no
    frozen indices, the default) or "skew" (all skew-symmetrizable splits).
    ``jobs`` parallelizes the relation computation; the result is identical
    for every job count.
    """
    if rank_cap < 1:
        raise ValueError("rank cap must be at least 1")
    if entry_cap < 0:
        raise ValueError("entry cap must be non-negative")
    if seeds is None:
        try:
            seeds = _FAMILIES[family](rank_cap, entry_cap)
        except KeyError:
            raise ValueError(f"unknown family {family!r}") from None
    classes = collect_classes(seeds, budget, store)
    reps = [cls.key.form.matrix for cls in classes]
    count = len(reps)
    grid = [["?"] * count for _ in range(count)]
    if jobs > 1 and count > 1:
        pairs = [(i, j) for i in range(count) for j in range(count)]
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_relation_worker_init,
            initargs=(reps, budget, rank3_invariant),
        ) as pool:
            for i, j, char in pool.map(_relation_worker, pairs, chunksize=64):
                grid[i][j] = char
    else:
        for i in range(count):
            for j in range(count):
                ev = embeds(reps[i], reps[j], budget, rank3_invariant, store)
                grid[i][j] = _VERDICT_CHAR[ev.verdict]
    relation = tuple(tuple(row) for row in grid)
    return Universe(rank_cap, entry_cap, budget, family, tuple(classes), relation)


# --- topology operations -----------------------------------------------------

def _as_index_set(u: Universe, selection) -> set[int]:
    out = set()
    for item in selection:
        out.add(u.index_of(item) if isinstance(item, str) else int(item))
    for i in out:
        if not 0 <= i < len(u):
            raise KeyError(f"class index {i} out of range")
    return out


def closure(u: Universe, selection) -> frozenset[str]:
    """Smallest lower set of the universe containing the given classes:
    every class that embeds into some member of the selection."""
    chosen = _as_index_set(u, selection)
    out = set()
    for k, cls in enumerate(u.classes):
        row = u.relation[k]
        if any(row[a] == "Y" for a in chosen):
            out.add(cls.hash)
        elif any(row[a] == "U" for a in chosen):
            raise UnresolvedRelation(
                f"membership of class {cls.hash[:12]} in the closure is unresolved"
            )
    return frozenset(out)


def open_set_generated(u: Universe, selection) -> frozenset[str]:
    """Upper set generated by the selection: every class some member of the
    selection embeds into.  Its complement is the selection-avoiding set."""
    chosen = _as_index_set(u, selection)
    out = set()
    for k, cls in enumerate(u.classes):
        if any(u.relation[a][k] == "Y" for a in chosen):
            out.add(cls.hash)
        elif any(u.relation[a][k] == "U" for a in chosen):
            raise UnresolvedRelation(
                f"membership of class {cls.hash[:12]} in the generated open set is unresolved"
            )
    return frozenset(out)


def _as_hash_set(u: Universe, selection) -> frozenset[str]:
    return frozenset(u.classes[i].hash for i in _as_index_set(u, selection))


def is_closed(u: Universe, selection) -> bool:
    chosen = _as_hash_set(u, selection)
    return closure(u, chosen) == chosen


def is_open(u: Universe, selection) -> bool:
    chosen = _as_hash_set(u, selection)
    return is_closed(u, u.hashes - chosen)


def is_clopen(u: Universe, selection) -> bool:
    return is_closed(u, selection) and is_open(u, selection)


# --- Hasse diagram -----------------------------------------------------------

@dataclass(frozen=True)
class HasseDiagram:
    universe: Universe
    edges: tuple[tuple[int, int], ...]  # (lower, upper) cover pairs
    unknown: tuple[tuple[int, int], ...]


def build_hasse(u: Universe, partial: bool = False) -> HasseDiagram:
    """Transitive reduction of the strict embedding order.

    Requires a fully resolved relation; with ``partial=True`` unresolved
    pairs are returned separately (for dashed rendering) instead of raising.
    """
    count = len(u)
    unknown = tuple(
        (i, j)
        for i in range(count)
        for j in range(count)
        if i != j and u.relation[i][j] == "U"
    )
    if unknown and not partial:
        raise UnresolvedRelation(
            f"{len(unknown)} unresolved pairs block the transitive reduction"
        )
    strict = [
        [i != j and u.relation[i][j] == "Y" for j in range(count)] for i in range(count)
    ]
    for i in range(count):
        for j in range(count):
            if strict[i][j] and strict[j][i]:
                raise ValueError(
                    "relation is not antisymmetric; cannot reduce "
                    f"({u.classes[i].hash[:12]} vs {u.classes[j].hash[:12]})"
                )
    edges = []
    for i in range(count):
        for j in range(count):
            if strict[i][j] and not any(
                strict[i][k] and strict[k][j] for k in range(count)
            ):
                edges.append((i, j))
    return HasseDiagram(u, tuple(sorted(edges)), unknown)


def _matrix_label(B: ExchangeMatrix) -> str:
    return ";".join(" ".join(str(v) for v in row) for row in B.b)


def hasse_to_dot(h: HasseDiagram) -> str:
    """Graphviz digraph; vertices carry the class hash prefix and a
    representative matrix, cover edges point upward."""
    lines = [
        "digraph mutation_class_poset {",
        "  rankdir=BT;",
        '  node [shape=box fontname="monospace"];',
    ]
    for cls in h.universe.classes:
        short = cls.hash[:12]
        label = f"{short}\\n{_matrix_label(cls.key.form.matrix)}"
        lines.append(f'  "{short}" [label="{label}"];')
    for i, j in h.edges:
        lines.append(
            f'  "{h.universe.classes[i].hash[:12]}" -> "{h.universe.classes[j].hash[:12]}";'
        )
    for i, j in h.unknown:
        lines.append(
            f'  "{h.universe.classes[i].hash[:12]}" -> '
            f'"{h.universe.classes[j].hash[:12]}" [style=dashed label="?"];'
        )
    lines.append("}")
    return "\n".join(lines)


# --- universe file format ----------------------------------------------------

def universe_to_json(u: Universe) -> dict:
    return {
        "params": {
            "r": u.rank_cap,
            "w": u.entry_cap,
            "budget": {
                "max_members": u.budget.max_members,
                "max_entry": u.budget.max_entry,
                "max_depth": u.budget.max_depth,
            },
            "family": u.family,
        },
        "classes": [
            {
                "hash": cls.hash,
                "status": cls.key.status,
                "matrix": to_json_dict(cls.key.form.matrix),
                "seed": to_json_dict(cls.seed),
                "rank": cls.rank,
            }
            for cls in u.classes
        ],
        "relation": [list(row) for row in u.relation],
    }


def universe_from_json(obj: dict) -> Universe:
    params = obj["params"]
    budget = Budget(
        params["budget"]["max_members"],
        params["budget"]["max_entry"],
        params["budget"]["max_depth"],
    )
    classes = []
    for entry in obj["classes"]:
        matrix = from_json_dict(entry["matrix"])
        form = canonical_form(matrix)
        if form.hash != entry["hash"] or form.matrix != matrix:
            raise ValueError(
                f"universe class {entry['hash'][:12]} does not match its matrix"
            )
        classes.append(
            UniverseClass(ClassKey(form, entry["status"]), from_json_dict(entry["seed"]))
        )
    relation = tuple(tuple(row) for row in obj["relation"])
    if len(relation) != len(classes) or any(len(row) != len(classes) for row in relation):
        raise ValueError("universe relation shape does not match the class list")
    return Universe(
        params["r"], params["w"], budget, params.get("family", "quiver"),
        tuple(classes), relation,
    )


def dump_universe(u: Universe) -> str:
    return json.dumps(universe_to_json(u), sort_keys=True, indent=2)


def load_universe(text: str) -> Universe:
    return universe_from_json(json.loads(text))

"""Budget-bounded enumeration of mutation classes.

A mutation class can be infinite, so every enumeration runs under a
:class:`Budget` and reports whether it CLOSED (the member set is complete
up to isomorphism) or was TRUNCATED by a cap.  Enumeration is breadth
first and level synchronous with candidates admitted in canonical order,
which makes the member set, the stored witnesses, and the truncation
behaviour a deterministic function of the seed and the budget alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from itertools import permutations
from math import gcd

from .canonical import CanonicalForm, canonical_form
from .matrix import ExchangeMatrix, is_acyclic, mutate

CLOSED = "CLOSED"
TRUNCATED = "TRUNCATED"


class Verdict(enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class Finiteness(enum.Enum):
    FINITE = "FINITE"
    INFINITE = "INFINITE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Budget:
    """Caps for one enumeration: distinct members, entry magnitude, sequence length."""

    max_members: int = 100_000
    max_entry: int = 64
    max_depth: int | None = None

    def __post_init__(self):
        if self.max_members < 1 or self.max_entry < 1:
            raise ValueError("budget caps must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("budget caps must be positive")

    def key(self) -> tuple:
        return (self.max_members, self.max_entry, self.max_depth)


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class Member:
    """One class member: canonical form, shortest discovered witness, and the
    exact matrix that witness reaches from the enumeration seed."""

    form: CanonicalForm
    witness: tuple[int, ...]
    reached: ExchangeMatrix


@dataclass(frozen=True)
class ClassEnumeration:
    seed: CanonicalForm
    members: tuple[Member, ...]
    status: str
    tripped: frozenset[str]
    entry_witness: ExchangeMatrix | None
    budget: Budget

    def __post_init__(self):
        object.__setattr__(self, "_index", {mem.form.hash: mem for mem in self.members})

    def member(self, hash_: str) -> Member | None:
        return self._index.get(hash_)

    def member_for(self, form: CanonicalForm) -> Member | None:
        """Hash-indexed lookup with full-matrix confirmation; the hash is an
        index, never a proof of membership."""
        mem = self._index.get(form.hash)
        if mem is not None and mem.form.matrix != form.matrix:
            raise RuntimeError(f"canonical hash collision at {form.hash}")
        return mem

    def __contains__(self, hash_: str) -> bool:
        return hash_ in self._index

    @property
    def hashes(self) -> frozenset[str]:
        return frozenset(self._index)

    @property
    def count(self) -> int:
        return len(self.members)

    @property
    def max_abs_entry(self) -> int:
        return max(mem.form.matrix.max_abs_entry for mem in self.members)

    @property
    def depth(self) -> int:
        return max(len(mem.witness) for mem in self.members)

    def least(self) -> Member:
        return min(self.members, key=lambda mem: mem.form.key)


@dataclass(frozen=True)
class ClassKey:
    """Class identifier: canonical form of the least member discovered."""

    form: CanonicalForm
    status: str

    @property
    def hash(self) -> str:
        return self.form.hash


_MEMO: dict[tuple[str, tuple], ClassEnumeration] = {}


def clear_memo() -> None:
    _MEMO.clear()


def _run_bfs(seed: CanonicalForm, budget: Budget) -> ClassEnumeration:
    n = seed.matrix.n
    members: dict[str, Member] = {seed.hash: Member(seed, (), seed.matrix)}
    order: list[Member] = [members[seed.hash]]
    frontier: list[Member] = [members[seed.hash]]
    tripped: set[str] = set()
    entry_witness: ExchangeMatrix | None = None
    depth = 0
    while frontier:
        if budget.max_depth is not None and depth == budget.max_depth:
            tripped.add("depth")
            break
        candidates: dict[str, tuple[CanonicalForm, tuple[int, ...], ExchangeMatrix]] = {}
        for mem in frontier:
            for k in range(1, n + 1):
                child = mutate(mem.reached, k)
                if child.max_abs_entry > budget.max_entry:
                    tripped.add("entry")
                    if entry_witness is None:
                        entry_witness = child
                    continue
                form = canonical_form(child)
                seen = members.get(form.hash)
                if seen is not None:
                    if seen.form.matrix != form.matrix:
                        raise RuntimeError(f"canonical hash collision at {form.hash}")
                    continue
                witness = mem.witness + (k,)
                prev = candidates.get(form.hash)
                if prev is not None and prev[0].matrix != form.matrix:
                    raise RuntimeError(f"canonical hash collision at {form.hash}")
                if prev is None or witness < prev[1]:
                    candidates[form.hash] = (form, witness, child)
        new_members: list[Member] = []
        capped = False
        for hash_ in sorted(candidates, key=lambda h: candidates[h][0].key):
            if len(members) >= budget.max_members:
                tripped.add("members")
                capped = True
                break
            form, witness, child = candidates[hash_]
            mem = Member(form, witness, child)
            members[hash_] = mem
            order.append(mem)
            new_members.append(mem)
        if capped:
            break
        frontier = new_members
        depth += 1
    status = CLOSED if not tripped else TRUNCATED
    return ClassEnumeration(
        seed, tuple(order), status, frozenset(tripped), entry_witness, budget
    )


def enumerate_class(
    B: ExchangeMatrix, budget: Budget = DEFAULT_BUDGET, store=None
) -> ClassEnumeration:
    """BFS the mutation class of B up to isomorphism, under the given budget.

    The seed is ``canonical_form(B)``, so isomorphic inputs share one
    enumeration (and one cache entry).  Each member records the shortest
    discovered mutation sequence from the seed; replaying it reproduces the
    member exactly.
    """
    seed = canonical_form(B)
    if seed.matrix.max_abs_entry > budget.max_entry:
        raise ValueError(
            f"budget.max_entry={budget.max_entry} is below the seed's largest entry "
            f"{seed.matrix.max_abs_entry}"
        )
    memo_key = (seed.hash, budget.key())
    enum = _MEMO.get(memo_key)
    if enum is None and store is not None:
        enum = store.get_class(seed.hash, budget)
        if enum is not None:
            _MEMO[memo_key] = enum
    if enum is not None:
        return enum
    enum = _run_bfs(seed, budget)
    _MEMO[memo_key] = enum
    if store is not None:
        store.put_class(enum)
    return enum


def class_key(
    B: ExchangeMatrix, budget: Budget = DEFAULT_BUDGET, store=None
) -> ClassKey:
    enum = enumerate_class(B, budget, store)
    return ClassKey(enum.least().form, enum.status)


def mutation_fingerprint(B: ExchangeMatrix, rank3_invariant: bool = True) -> tuple:
    """Cheap mutation-class invariants, used to certify that two classes differ.

    Always included (elementary facts about the mutation rule): the shape
    (n, m), and per component of the support graph its size, mutable count,
    entry gcd, and skew-symmetry flag.  Mutation never merges or splits
    support components, preserves common divisors of a component's entries,
    and preserves skew-symmetry, so these are class invariants.

    With ``rank3_invariant`` (default on) a connected skew-symmetric rank-3
    matrix also contributes a*a + b*b + c*c -/+ a*b*c over its unsigned edge
    weights, minus for cyclic orientation and plus for acyclic.  That this
    is mutation-invariant is a known rank-3 classification fact; disable
    the flag to fall back to the elementary invariants only.
    """
    profiles = []
    for comp in B.components():
        idx = sorted(comp)
        entries = [B.b[i - 1][j - 1] for i in idx for j in idx]
        g = gcd(*(abs(v) for v in entries)) if len(idx) > 1 else 0
        skew = all(
            B.b[i - 1][j - 1] == -B.b[j - 1][i - 1] for i in idx for j in idx
        )
        profiles.append((len(idx), sum(1 for i in idx if i <= B.n), g, skew))
    fp: tuple = (B.n, B.m, tuple(sorted(profiles)))
    if (
        rank3_invariant
        and B.n == 3
        and B.m == 0
        and B.is_connected
        and B.is_skew_symmetric
    ):
        fp = fp + (_rank3_weight_invariant(B),)
    return fp


def _is_rank3_quiver(B: ExchangeMatrix) -> bool:
    return B.n == 3 and B.m == 0 and B.is_skew_symmetric and B.is_connected


def rank3_acyclic_orbit(B: ExchangeMatrix, enum: ClassEnumeration) -> frozenset | None:
    """Weight readings of the class's acyclic members, as one closed orbit.

    A forward reading of an acyclic rank-3 member is the triple
    (source->mid, mid->sink, source->sink) of unsigned weights.  The acyclic
    members of a connected rank-3 class form a single sink/source-reflection
    orbit, a reflection rotates any reading, and a member with a missing
    edge (a zero in the triple) can be read two ways, so the full reading
    set is the closure of one member's readings under rotation and the
    zero re-reading swap.  That closure is computed here from the first
    acyclic member discovered.  Returns None when the family conditions
    fail or no acyclic member was discovered; then nothing can be
    concluded.  Two classes whose orbits are disjoint share no acyclic
    member and are therefore distinct.
    """
    if not _is_rank3_quiver(B):
        return None
    for mem in enum.members:
        mat = mem.form.matrix
        if not is_acyclic(mat):
            continue
        b = mat.b
        frontier = set()
        for p, q, r in permutations(range(3)):
            if b[p][q] >= 0 and b[q][r] >= 0 and b[p][r] >= 0:
                frontier.add((b[p][q], b[q][r], b[p][r]))
        orbit: set[tuple[int, int, int]] = set()
        while frontier:
            a, c, e = frontier.pop()
            if (a, c, e) in orbit:
                continue
            orbit.add((a, c, e))
            frontier.add((c, e, a))
            if a == 0:
                frontier.add((0, e, c))
            if c == 0:
                frontier.add((e, 0, a))
        return frozenset(orbit)
    return None


def rank3_zero_pair_free(B: ExchangeMatrix, enum: ClassEnumeration) -> bool | None:
    """Does no member of this connected rank-3 class have an arrowless pair?

    A member with a zero pair has at most two edges and is therefore
    acyclic, so the question is decided by the acyclic reading orbit:
    True/False when an acyclic member was discovered, None when the family
    conditions fail or the class has no discovered acyclic member.
    """
    orbit = rank3_acyclic_orbit(B, enum)
    if orbit is None:
        return None
    return all(0 not in triple for triple in orbit)


def _rank3_weight_invariant(B: ExchangeMatrix) -> int:
    b = B.b
    s12, s13, s23 = b[0][1], b[0][2], b[1][2]
    # Directed 3-cycle iff the signs of b12, b23, b31 = -b13 all agree and
    # none vanish (covers both traversal directions).
    nonzero = s12 != 0 and s23 != 0 and s13 != 0
    signs = (s12 > 0, s23 > 0, s13 < 0)
    cyclic = nonzero and (all(signs) or not any(signs))
    a, c, e = abs(s12), abs(s13), abs(s23)
    prod = a * c * e
    base = a * a + c * c + e * e
    return base - prod if cyclic else base + prod


def same_class(
    A: ExchangeMatrix,
    B: ExchangeMatrix,
    budget: Budget = DEFAULT_BUDGET,
    rank3_invariant: bool = True,
    store=None,
) -> Verdict:
    """Are A and B mutation-equivalent? Tri-valued under the budget.

    YES when either budgeted enumeration reaches the other's canonical
    form; NO when one enumeration is CLOSED without doing so (or a class
    invariant separates them); UNKNOWN otherwise.
    """
    if (A.n, A.m) != (B.n, B.m):
        return Verdict.NO
    cf_a = canonical_form(A)
    cf_b = canonical_form(B)
    if cf_a == cf_b:
        return Verdict.YES
    if mutation_fingerprint(A, rank3_invariant) != mutation_fingerprint(B, rank3_invariant):
        return Verdict.NO
    enum_a = enumerate_class(A, budget, store)
    if enum_a.member_for(cf_b) is not None:
        return Verdict.YES
    if enum_a.status == CLOSED:
        return Verdict.NO
    enum_b = enumerate_class(B, budget, store)
    if enum_b.member_for(cf_a) is not None:
        return Verdict.YES
    if enum_b.status == CLOSED:
        return Verdict.NO
    if rank3_invariant:
        orbit_a = rank3_acyclic_orbit(A, enum_a)
        orbit_b = rank3_acyclic_orbit(B, enum_b)
        if orbit_a is not None and orbit_b is not None and orbit_a.isdisjoint(orbit_b):
            return Verdict.NO
    return Verdict.UNKNOWN


@dataclass(frozen=True)
class FinitenessVerdict:
    kind: Finiteness
    enumeration: ClassEnumeration | None
    offender: ExchangeMatrix | None
    budget: Budget

    @property
    def members(self) -> int | None:
        return self.enumeration.count if self.enumeration is not None else None


def is_mutation_finite(
    B: ExchangeMatrix,
    budget: Budget = DEFAULT_BUDGET,
    infinite_exit: bool = True,
    store=None,
) -> FinitenessVerdict:
    """FINITE when the enumeration closes; INFINITE via the early exit; else UNKNOWN.

    The early exit applies to connected skew-symmetric matrices with
    n >= 3 and no frozen indices: any class member with an entry of
    magnitude above 2 proves the class infinite (a known finite-mutation-
    type classification fact, external to the mutation algebra itself).
    It is on by default; with ``infinite_exit=False``, or whenever the
    matrix is outside that family, the always-sound fallback is UNKNOWN.
    """
    applies = (
        infinite_exit
        and B.m == 0
        and B.n >= 3
        and budget.max_entry >= 2
        and B.is_skew_symmetric
        and B.is_connected
    )
    if applies and B.max_abs_entry > 2:
        return FinitenessVerdict(Finiteness.INFINITE, None, B, budget)
    effective = replace(budget, max_entry=2) if applies else budget
    enum = enumerate_class(B, effective, store)
    if enum.status == CLOSED:
        return FinitenessVerdict(Finiteness.FINITE, enum, None, effective)
    if applies and "entry" in enum.tripped:
        return FinitenessVerdict(Finiteness.INFINITE, enum, enum.entry_witness, effective)
    return FinitenessVerdict(Finiteness.UNKNOWN, enum, None, effective)

"""The embedding relation between mutation classes.

[P] embeds into [Q] when some member of [P] is isomorphic to a restriction
of some member of [Q].  The verdict is tri-valued: YES carries a replayable
witness, NO is asserted only when both budgeted enumerations are
exhaustive, and UNKNOWN reports that a budget tripped first.

Witnesses are anchored at the canonical forms of the two inputs: replaying
``q_sequence`` from ``canonical_form(Q).matrix``, restricting to
``subset``, and canonicalizing gives the same form as replaying
``p_sequence`` from ``canonical_form(P).matrix``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

from .canonical import canonical_form, canonical_relabeling
from .classes import (
    CLOSED,
    DEFAULT_BUDGET,
    Budget,
    Verdict,
    enumerate_class,
    mutation_fingerprint,
    rank3_acyclic_orbit,
    rank3_zero_pair_free,
)
from .matrix import ExchangeMatrix, apply_sequence, disjoint_union, restrict


@dataclass(frozen=True)
class EmbedWitness:
    q_sequence: tuple[int, ...]
    subset: tuple[int, ...]
    p_sequence: tuple[int, ...]


@dataclass(frozen=True)
class EmbedVerdict:
    verdict: Verdict
    witness: EmbedWitness | None
    budget: Budget


def _subsets_colex(q_n: int, q_m: int, p_n: int, p_m: int) -> list[tuple[int, ...]]:
    """Partition-compatible index subsets of a (q_n, q_m) matrix, in colex order."""
    subsets = []
    for mut in combinations(range(1, q_n + 1), p_n):
        for fro in combinations(range(q_n + 1, q_n + q_m + 1), p_m):
            subsets.append(mut + fro)
    subsets.sort(key=lambda idx: idx[::-1])
    return subsets


def embeds(
    P: ExchangeMatrix,
    Q: ExchangeMatrix,
    budget: Budget = DEFAULT_BUDGET,
    rank3_invariant: bool = True,
    store=None,
) -> EmbedVerdict:
    """Does [P] embed into [Q]?

    Rank (and per-pool) shape drops give an immediate exhaustive NO.  At
    equal rank embedding is mutation equivalence, resolved through either
    enumeration and the class invariants.  Otherwise members of [Q] are
    scanned in BFS order and their subsets in colex order, short-circuiting
    on the first restriction whose canonical form is a known member of [P].
    """
    cf_p = canonical_form(P)
    cf_q = canonical_form(Q)
    if store is not None:
        hit = store.get_embed(cf_p.hash, cf_q.hash, budget)
        if hit is not None:
            return hit
    verdict = _embeds_fresh(P, Q, cf_p, cf_q, budget, rank3_invariant, store)
    if store is not None:
        store.put_embed(cf_p.hash, cf_q.hash, verdict)
    return verdict


def _embeds_fresh(P, Q, cf_p, cf_q, budget, rank3_invariant, store) -> EmbedVerdict:
    if P.n > Q.n or P.m > Q.m:
        return EmbedVerdict(Verdict.NO, None, budget)

    if P.size == Q.size:
        full = tuple(range(1, Q.size + 1))
        if cf_p == cf_q:
            return EmbedVerdict(Verdict.YES, EmbedWitness((), full, ()), budget)
        if mutation_fingerprint(P, rank3_invariant) != mutation_fingerprint(Q, rank3_invariant):
            return EmbedVerdict(Verdict.NO, None, budget)
        enum_q = enumerate_class(cf_q.matrix, budget, store)
        mem = enum_q.member_for(cf_p)
        if mem is not None:
            return EmbedVerdict(Verdict.YES, EmbedWitness(mem.witness, full, ()), budget)
        enum_p = enumerate_class(cf_p.matrix, budget, store)
        mem = enum_p.member_for(cf_q)
        if mem is not None:
            return EmbedVerdict(Verdict.YES, EmbedWitness((), full, mem.witness), budget)
        if enum_q.status == CLOSED or enum_p.status == CLOSED:
            return EmbedVerdict(Verdict.NO, None, budget)
        if rank3_invariant:
            orbit_p = rank3_acyclic_orbit(P, enum_p)
            orbit_q = rank3_acyclic_orbit(Q, enum_q)
            if orbit_p is not None and orbit_q is not None and orbit_p.isdisjoint(orbit_q):
                return EmbedVerdict(Verdict.NO, None, budget)
        return EmbedVerdict(Verdict.UNKNOWN, None, budget)

    enum_p = enumerate_class(cf_p.matrix, budget, store)
    enum_q = enumerate_class(cf_q.matrix, budget, store)
    subsets = _subsets_colex(Q.n, Q.m, P.n, P.m)
    for q_mem in enum_q.members:
        for idx in subsets:
            sub = restrict(q_mem.reached, idx)
            p_mem = enum_p.member_for(canonical_form(sub))
            if p_mem is not None:
                witness = EmbedWitness(q_mem.witness, idx, p_mem.witness)
                return EmbedVerdict(Verdict.YES, witness, budget)
    if enum_p.status == CLOSED and enum_q.status == CLOSED:
        return EmbedVerdict(Verdict.NO, None, budget)
    if enum_p.status == CLOSED:
        if _divisibility_obstruction(enum_p, Q):
            return EmbedVerdict(Verdict.NO, None, budget)
        if rank3_invariant and _zero_pair_obstruction(cf_p, Q, enum_q):
            return EmbedVerdict(Verdict.NO, None, budget)
    return EmbedVerdict(Verdict.UNKNOWN, None, budget)


def _divisibility_obstruction(enum_p, Q: ExchangeMatrix) -> bool:
    """Exhaustive NO without closing [Q]: mutation preserves the entry gcd,
    so when every member of a CLOSED [P] has an entry outside g(Q)*Z no
    restriction of any member of [Q] can realize one."""
    g = gcd(*(abs(v) for row in Q.b for v in row))
    if g <= 1:
        return False
    return not any(
        all(v % g == 0 for row in mem.form.matrix.b for v in row)
        for mem in enum_p.members
    )


def _zero_pair_obstruction(cf_p, Q: ExchangeMatrix, enum_q) -> bool:
    """Exhaustive NO for the arrowless pair against a connected rank-3 quiver:
    a zero-pair member would be acyclic, and the acyclic reading orbit of
    [Q] shows none exists."""
    if cf_p.matrix.b != ((0, 0), (0, 0)) or cf_p.matrix.m != 0:
        return False
    return rank3_zero_pair_free(Q, enum_q) is True


def replay_embedding(P: ExchangeMatrix, Q: ExchangeMatrix, ev: EmbedVerdict) -> bool:
    """Re-run a YES witness end to end through the matrix operations."""
    if ev.verdict is not Verdict.YES or ev.witness is None:
        return False
    w = ev.witness
    reached = apply_sequence(canonical_form(Q).matrix, w.q_sequence)
    sub = restrict(reached, w.subset)
    target = apply_sequence(canonical_form(P).matrix, w.p_sequence)
    return canonical_form(sub).hash == canonical_form(target).hash


def density_witness(
    P: ExchangeMatrix, Q: ExchangeMatrix
) -> tuple[ExchangeMatrix, EmbedVerdict, EmbedVerdict]:
    """A common upper bound: the disjoint union with both block-restriction embeddings.

    Mutations in one connected component never touch another, so both
    factors embed into the union.  No enumeration or search is needed; the
    witnesses restrict the canonical form of R to the images of the two
    blocks.
    """
    R = disjoint_union(P, Q)
    relabel = canonical_relabeling(R)  # new position -> old index, 1-based
    new_of_old = {old: new for new, old in enumerate(relabel, start=1)}
    p_block = list(range(1, P.n + 1)) + [
        P.n + Q.n + i for i in range(1, P.m + 1)
    ]
    q_block = [i for i in range(1, R.size + 1) if i not in set(p_block)]
    subset_p = tuple(sorted(new_of_old[o] for o in p_block))
    subset_q = tuple(sorted(new_of_old[o] for o in q_block))
    verdict_p = EmbedVerdict(Verdict.YES, EmbedWitness((), subset_p, ()), DEFAULT_BUDGET)
    verdict_q = EmbedVerdict(Verdict.YES, EmbedWitness((), subset_q, ()), DEFAULT_BUDGET)
    return R, verdict_p, verdict_q

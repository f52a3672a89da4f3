"""Exchange matrices over mutable and frozen indices.

This is the single substrate for everything in the package.  A quiver is
the skew-symmetric special case with no frozen indices, where entry
``b[i][j] > 0`` counts the arrows ``i -> j``.  Values are immutable after
construction and every operation is a pure function, so instances are safe
to share across threads and processes.

All public index arguments (mutation vertex, restriction subsets) are
1-based, matching the usual labelling of quiver vertices.  Indices
``1..n`` are mutable, ``n+1..n+m`` are frozen.
"""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from math import gcd, lcm


class NotSkewSymmetrizable(ValueError):
    """No positive integer rescaling of the rows makes the matrix skew-symmetric."""


class FrozenMutation(ValueError):
    """Mutation was requested at a frozen or out-of-range index."""


class EmptySubset(ValueError):
    """Restriction subset is empty or retains no mutable index."""


@dataclass(frozen=True)
class ExchangeMatrix:
    """Validated integer exchange matrix with a normalized skew-symmetrizer.

    Do not call the constructor directly; go through :func:`build` (or one
    of the operations below), which validates the matrix and derives ``d``.
    Entries are plain Python ints, so they never overflow under mutation.
    """

    n: int
    m: int
    b: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def max_abs_entry(self) -> int:
        return max(abs(v) for row in self.b for v in row)

    @property
    def is_skew_symmetric(self) -> bool:
        return all(
            self.b[i][j] == -self.b[j][i]
            for i in range(self.size)
            for j in range(i, self.size)
        )

    def components(self) -> tuple[frozenset[int], ...]:
        """Connected components of the support graph, as 1-based index sets."""
        return tuple(
            frozenset(i + 1 for i in comp) for comp in _support_components(self.b)
        )

    @property
    def is_connected(self) -> bool:
        return len(_support_components(self.b)) == 1


def _support_components(b: tuple[tuple[int, ...], ...]) -> list[list[int]]:
    n = len(b)
    seen = [False] * n
    comps: list[list[int]] = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if b[i][j] != 0 and not seen[j]:
                    seen[j] = True
                    comp.append(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _symmetrizer(b: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    """Derive the normalized skew-symmetrizer by spanning-tree propagation.

    One root per support component gets a provisional value of 1; along
    each tree edge ``d[j] = d[i] * |b[i][j]| / |b[j][i]|``.  Denominators
    are cleared per component, the component gcd is divided out, and the
    defining identity is then verified globally, which catches inconsistent
    cycles.
    """
    n = len(b)
    frac: list[Fraction | None] = [None] * n
    comps = _support_components(b)
    for comp in comps:
        frac[comp[0]] = Fraction(1)
        stack = [comp[0]]
        while stack:
            i = stack.pop()
            for j in range(n):
                if b[i][j] != 0 and frac[j] is None:
                    frac[j] = frac[i] * abs(b[i][j]) / abs(b[j][i])
                    stack.append(j)
    d = [0] * n
    for comp in comps:
        scale = lcm(*(frac[i].denominator for i in comp))
        vals = [int(frac[i] * scale) for i in comp]
        g = gcd(*vals)
        for i, v in zip(comp, vals):
            d[i] = v // g
    for i in range(n):
        for j in range(n):
            if d[i] * b[i][j] != -d[j] * b[j][i]:
                raise NotSkewSymmetrizable(
                    f"no positive symmetrizer exists: inconsistency at pair ({i + 1},{j + 1})"
                )
    return tuple(d)


def build(n: int, m: int, rows) -> ExchangeMatrix:
    """Validate an (n+m) x (n+m) integer matrix and attach its symmetrizer.

    Raises ValueError for malformed input (shape, non-integers, n < 1,
    m < 0) and NotSkewSymmetrizable when the matrix has a nonzero diagonal
    entry, fails sign-coherence, or admits no positive integer symmetrizer.
    """
    n = operator.index(n)
    m = operator.index(m)
    if n < 1:
        raise ValueError("at least one mutable index is required (n >= 1)")
    if m < 0:
        raise ValueError("frozen index count must be non-negative")
    size = n + m
    rows = list(rows)
    if len(rows) != size or any(len(row) != size for row in rows):
        raise ValueError(f"matrix must be {size}x{size}")
    b = tuple(tuple(operator.index(v) for v in row) for row in rows)
    for i in range(size):
        if b[i][i] != 0:
            raise NotSkewSymmetrizable(f"nonzero diagonal entry at index {i + 1}")
        for j in range(i + 1, size):
            x, y = b[i][j], b[j][i]
            if (x == 0) != (y == 0) or x * y > 0:
                raise NotSkewSymmetrizable(
                    f"sign coherence fails at pair ({i + 1},{j + 1})"
                )
    return ExchangeMatrix(n, m, b, _symmetrizer(b))


def mutate(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Mutate at the mutable index k (1-based).

    Row and column k flip sign; every other entry picks up the two-path
    contribution ``b[i][k]*max(b[k][j],0) + max(-b[i][k],0)*b[k][j]``.
    The symmetrizer is unchanged.
    """
    k = operator.index(k)
    if not 1 <= k <= B.n:
        raise FrozenMutation(f"index {k} is not mutable (mutable indices are 1..{B.n})")
    kk = k - 1
    b = B.b
    size = B.size
    row_k = b[kk]
    new_rows = []
    for i in range(size):
        bi = b[i]
        if i == kk:
            new_rows.append(tuple(-v for v in bi))
            continue
        bik = bi[kk]
        row = list(bi)
        row[kk] = -bik
        if bik > 0:
            for j in range(size):
                if j != kk and row_k[j] > 0:
                    row[j] += bik * row_k[j]
        elif bik < 0:
            for j in range(size):
                if j != kk and row_k[j] < 0:
                    row[j] -= bik * row_k[j]
        new_rows.append(tuple(row))
    return ExchangeMatrix(B.n, B.m, tuple(new_rows), B.d)


def apply_sequence(B: ExchangeMatrix, sequence) -> ExchangeMatrix:
    """Apply mutations left to right: ``[k1, k2]`` computes mu_k2(mu_k1(B))."""
    for k in sequence:
        B = mutate(B, k)
    return B


def restrict(B: ExchangeMatrix, indices) -> ExchangeMatrix:
    """Restrict to the submatrix on the given 1-based index subset.

    Retained indices keep their mutable/frozen status; mutable indices are
    placed first in the result.  The symmetrizer is re-derived (restricting
    and renormalizing per component gives the same answer).
    """
    idx = [operator.index(i) for i in indices]
    if not idx:
        raise EmptySubset("restriction subset is empty")
    if len(set(idx)) != len(idx):
        raise ValueError("restriction subset has duplicate indices")
    for i in idx:
        if not 1 <= i <= B.size:
            raise ValueError(f"index {i} out of range 1..{B.size}")
    mutable = [i for i in idx if i <= B.n]
    frozen = [i for i in idx if i > B.n]
    if not mutable:
        raise EmptySubset("restriction retains no mutable index")
    order = mutable + frozen
    rows = [[B.b[i - 1][j - 1] for j in order] for i in order]
    return build(len(mutable), len(frozen), rows)


def disjoint_union(P: ExchangeMatrix, Q: ExchangeMatrix) -> ExchangeMatrix:
    """Block-diagonal union; mutable indices of both factors come first.

    The new index order is P-mutable, Q-mutable, P-frozen, Q-frozen, so
    restricting to either block recovers the factor exactly.
    """
    sources = (
        [(P, i) for i in range(P.n)]
        + [(Q, i) for i in range(Q.n)]
        + [(P, P.n + i) for i in range(P.m)]
        + [(Q, Q.n + i) for i in range(Q.m)]
    )
    size = len(sources)
    rows = []
    for src_i, oi in sources:
        row = []
        for src_j, oj in sources:
            row.append(src_i.b[oi][oj] if src_i is src_j else 0)
        rows.append(tuple(row))
    d = tuple(src.d[oi] for src, oi in sources)
    return ExchangeMatrix(P.n + Q.n, P.m + Q.m, tuple(rows), d)


def is_acyclic(B: ExchangeMatrix) -> bool:
    """True iff the digraph on mutable indices (edge i->j when b[i][j] > 0) is acyclic."""
    preds: dict[int, set[int]] = {j: set() for j in range(B.n)}
    for i in range(B.n):
        for j in range(B.n):
            if B.b[i][j] > 0:
                preds[j].add(i)
    try:
        tuple(TopologicalSorter(preds).static_order())
    except CycleError:
        return False
    return True


# --- serialization -----------------------------------------------------------

def to_json_dict(B: ExchangeMatrix) -> dict:
    return {"mutable": B.n, "frozen": B.m, "b": [list(row) for row in B.b]}


def from_json_dict(obj: dict) -> ExchangeMatrix:
    try:
        return build(obj["mutable"], obj["frozen"], obj["b"])
    except KeyError as exc:
        raise ValueError(f"matrix object is missing key {exc}") from None


def to_json(B: ExchangeMatrix) -> str:
    return json.dumps(to_json_dict(B), sort_keys=True)


def to_text(B: ExchangeMatrix) -> str:
    lines = [f"{B.n} {B.m}"]
    lines.extend(" ".join(str(v) for v in row) for row in B.b)
    return "\n".join(lines)


def from_text(text: str) -> ExchangeMatrix:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("expected a first line 'n m' followed by matrix rows")
    n, m = int(tokens[0]), int(tokens[1])
    size = n + m
    entries = [int(t) for t in tokens[2:]]
    if len(entries) != size * size:
        raise ValueError(f"expected {size * size} entries, got {len(entries)}")
    rows = [entries[i * size : (i + 1) * size] for i in range(size)]
    return build(n, m, rows)


def from_inline(spec: str, frozen: int = 0) -> ExchangeMatrix:
    """Parse an inline matrix like ``"0 1;-1 0"``; the last `frozen` indices freeze."""
    rows = [[int(t) for t in chunk.split()] for chunk in spec.split(";") if chunk.strip()]
    size = len(rows)
    return build(size - frozen, frozen, rows)

"""Exhaustive optimal-clustering oracles (reference values for bound checks).

``opt_score`` enumerates every partition of 0..n-1 into exactly k nonempty
blocks in restricted-growth-string order and keeps the first minimum it sees.
There is deliberately no branch-and-bound: the point of the oracle is to be
too simple to be wrong, so every one of the S(n, k) partitions is visited
(block diameters are maintained incrementally, which changes the constant
factor but not the set of partitions examined).  A size guard refuses n
beyond ``n_max`` unless explicitly overridden.

``opt_dm_threshold`` is an independent second oracle for the max-diameter
objective: the optimum equals the smallest distance threshold t such that
the graph with edges {d <= t} can be covered by at most k cliques, computed
by a per-component clique-cover DP over vertex subsets with a binary search
on candidate thresholds (the predicate is monotone in t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .metric_core import (
    Clustering,
    DistanceMatrix,
    PreconditionError,
    ResourceGuardError,
    clustering_score,
)

__all__ = [
    "OracleResult",
    "partitions_into_k",
    "opt_score",
    "opt_dm_threshold",
    "stirling2",
]

DEFAULT_N_MAX = 14
ORACLE_SCORES = ("max-diam", "avg-diam")


@dataclass(frozen=True)
class OracleResult:
    """Optimal value, an optimal clustering, and how many partitions were seen."""

    score: str
    k: int
    value: float
    witness: Clustering
    enumerated: int


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind (partition count), via the DP table."""
    if k < 0 or n < 0:
        raise PreconditionError("n and k must be nonnegative")
    if k == 0:
        return 1 if n == 0 else 0
    if k > n:
        return 0
    prev = [1] + [0] * k  # S(0, j)
    for m in range(1, n + 1):
        cur = [0] * (k + 1)
        for j in range(1, min(m, k) + 1):
            cur[j] = j * prev[j] + prev[j - 1]
        prev = cur
    return prev[k]


def _check_guard(n: int, k: int, n_max: int, allow_large: bool) -> None:
    if not 1 <= k <= n:
        raise PreconditionError(f"k must be in 1..{n}, got {k}")
    if n > n_max and not allow_large:
        raise ResourceGuardError(
            f"n={n} exceeds the oracle guard n_max={n_max} "
            f"(S({n},{k}) = {stirling2(n, k)} partitions); "
            "pass allow_large=True / raise n_max to force it"
        )


def partitions_into_k(n: int, k: int, n_max: int = DEFAULT_N_MAX,
                      allow_large: bool = False) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield every partition of 0..n-1 into exactly k blocks.

    Restricted-growth order: point 0 opens block 0, and each later point
    tries existing blocks in index order before opening a new one.  Blocks
    arrive sorted by their smallest member.  Yields S(n, k) partitions.
    """
    _check_guard(n, k, n_max, allow_large)
    blocks: list[list[int]] = [[0]]

    def rec(i: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == n:
            if len(blocks) == k:
                yield tuple(tuple(b) for b in blocks)
            return
        remaining = n - i
        used = len(blocks)
        if remaining > k - used:  # room to reuse an existing block
            for b in blocks:
                b.append(i)
                yield from rec(i + 1)
                b.pop()
        if used < k:
            blocks.append([i])
            yield from rec(i + 1)
            blocks.pop()

    if n == 1:
        if k == 1:
            yield ((0,),)
        return
    yield from rec(1)


def opt_score(score: str, D: DistanceMatrix, k: int, n_max: int = DEFAULT_N_MAX,
              allow_large: bool = False) -> OracleResult:
    """Exact optimum of a clustering score over all k-clusterings.

    Supports "max-diam" and "avg-diam".  Ties keep the first witness in
    enumeration order (strict improvement replaces).
    """
    if score not in ORACLE_SCORES:
        raise PreconditionError(f"oracle supports {ORACLE_SCORES}, got {score!r}")
    n = D.n
    _check_guard(n, k, n_max, allow_large)
    M = D.full.tolist()  # python floats: much faster scalar access than ndarray
    avg = score == "avg-diam"

    best_val = math.inf
    best_blocks: list[list[int]] | None = None
    count = 0
    blocks: list[list[int]] = [[0]]
    diams: list[float] = [0.0]

    def rec(i: int, dsum: float, dmax: float) -> None:
        nonlocal best_val, best_blocks, count
        if i == n:
            count += 1
            val = dsum / k if avg else dmax
            if val < best_val:
                best_val = val
                best_blocks = [list(b) for b in blocks]
            return
        used = len(blocks)
        row = M[i]
        if n - i > k - used:
            for bi in range(used):
                b = blocks[bi]
                old = diams[bi]
                nd = old
                for p in b:
                    v = row[p]
                    if v > nd:
                        nd = v
                b.append(i)
                diams[bi] = nd
                rec(i + 1, dsum + (nd - old), nd if nd > dmax else dmax)
                b.pop()
                diams[bi] = old
        if used < k:
            blocks.append([i])
            diams.append(0.0)
            rec(i + 1, dsum, dmax)
            blocks.pop()
            diams.pop()

    if n == 1:
        best_val, best_blocks, count = 0.0, [[0]], 1
    else:
        rec(1, 0.0, 0.0)
    witness = Clustering.from_blocks(best_blocks, n)
    # Recompute the value from the witness so it matches clustering_score
    # bit-for-bit; the incremental sums used during the search can differ
    # from the canonical evaluation by final-ulp rounding.
    value = clustering_score(score, witness, D)
    return OracleResult(score=score, k=k, value=value,
                        witness=witness, enumerated=count)


def _clique_cover_number(adj: list[int], verts: list[int]) -> int:
    """Minimum number of cliques partitioning the given vertex set.

    ``adj[v]`` is a global-id bitmask of v's neighbours.  DP over subsets of
    the (small) vertex list; each subset is tested for clique-ness by bit
    intersection with every member's neighbourhood.
    """
    m = len(verts)
    local_adj = []
    for v in verts:
        mask = 0
        for li, u in enumerate(verts):
            if u != v and (adj[v] >> u) & 1:
                mask |= 1 << li
        local_adj.append(mask)
    full = (1 << m) - 1
    clique = bytearray(full + 1)
    clique[0] = 1
    for mask in range(1, full + 1):
        v = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << v)
        clique[mask] = 1 if clique[rest] and (local_adj[v] & rest) == rest else 0
    cover = [0] * (full + 1)
    for mask in range(1, full + 1):
        v_bit = mask & -mask
        best = m + 1
        sub = mask
        while sub:
            if (sub & v_bit) and clique[sub]:
                c = 1 + cover[mask ^ sub]
                if c < best:
                    best = c
            sub = (sub - 1) & mask
        cover[mask] = best
    return cover[full]


def opt_dm_threshold(D: DistanceMatrix, k: int, n_max: int = 20) -> float:
    """Independent max-diameter optimum via threshold graphs + clique covers.

    Binary-searches the sorted candidate thresholds (0 plus every pairwise
    distance) for the smallest t whose graph {d <= t} splits -- per connected
    component -- into at most k cliques in total.
    """
    n = D.n
    if not 1 <= k <= n:
        raise PreconditionError(f"k must be in 1..{n}, got {k}")
    if n > n_max:
        raise ResourceGuardError(
            f"n={n} exceeds the threshold-oracle guard n_max={n_max}"
        )
    M = D.full

    def cover_count(t: float) -> int:
        adj = []
        for v in range(n):
            mask = 0
            row = M[v]
            for u in range(n):
                if u != v and row[u] <= t:
                    mask |= 1 << u
            adj.append(mask)
        seen = [False] * n
        total = 0
        for s in range(n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                rest = adj[v]
                while rest:
                    u = (rest & -rest).bit_length() - 1
                    rest ^= 1 << u
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            total += _clique_cover_number(adj, comp)
        return total

    candidates = sorted(set([0.0] + [float(v) for v in D.packed]))
    lo, hi = 0, len(candidates) - 1
    if cover_count(candidates[hi]) > k:  # cannot happen: one clique at t = max
        raise AssertionError("threshold oracle: full graph needs more than k cliques")
    while lo < hi:
        mid = (lo + hi) // 2
        if cover_count(candidates[mid]) <= k:
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]

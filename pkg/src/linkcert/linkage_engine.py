"""Agglomerative linkage: engine, dendrograms, and replay-based checkers.

Methods: CL (complete, max cross distance), SL (single, min cross), AL
(average, mean cross), MM (minimax, best eccentricity over the union), or a
custom pair function ``f(A, B, D)``.  Starting from singletons, each of the
n-1 iterations merges the active pair with the smallest method value; ties
(exact float equality) go to the lexicographically least pair keyed by
(smaller min-member id, other min-member id).  The cluster born at iteration
j (1-based) gets id n-1+j; points are 0..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .metric_core import (
    Clustering,
    DistanceMatrix,
    PreconditionError,
    as_cluster,
    cohesion,
)

__all__ = [
    "MergeRecord",
    "Dendrogram",
    "AlignmentReport",
    "RuleEquivalenceResult",
    "METHODS",
    "linkage_distance",
    "run_linkage",
    "extract_clustering",
    "check_merge_monotonicity",
    "check_rule_equivalence",
    "check_alignment",
    "union_diameter_rule",
    "leq_with_tol",
]

METHODS = ("CL", "SL", "AL", "MM")
TIE_RULE = "lexicographic-min-member"


def leq_with_tol(lhs: float, rhs: float, rtol: float = 1e-9) -> bool:
    """lhs <= rhs up to a relative slack scaled by the larger magnitude."""
    return lhs <= rhs + rtol * max(abs(lhs), abs(rhs))


@dataclass(frozen=True)
class MergeRecord:
    """One merge: cluster ids joined, method value, new id, 1-based iteration."""

    left: int
    right: int
    value: float
    result: int
    iteration: int


@dataclass(frozen=True)
class Dendrogram:
    n: int
    method: str
    tie_rule: str
    merges: tuple[MergeRecord, ...]

    def members_map(self) -> dict[int, frozenset[int]]:
        """Point set of every cluster id appearing in the dendrogram."""
        members = {i: frozenset([i]) for i in range(self.n)}
        for m in self.merges:
            members[m.result] = members[m.left] | members[m.right]
        return members

    def to_json(self) -> list[dict]:
        return [
            {"left": m.left, "right": m.right, "value": float(m.value),
             "iteration": m.iteration}
            for m in self.merges
        ]

    @classmethod
    def from_json(cls, data: Sequence[dict], method: str = "CL",
                  tie_rule: str = TIE_RULE, n: int | None = None) -> "Dendrogram":
        if n is None:
            n = len(data) + 1
        merges = []
        for rec in data:
            it = int(rec["iteration"])
            merges.append(MergeRecord(left=int(rec["left"]), right=int(rec["right"]),
                                      value=float(rec["value"]),
                                      result=n - 1 + it, iteration=it))
        return cls(n=n, method=method, tie_rule=tie_rule, merges=tuple(merges))


def _cross_block(A: frozenset[int], B: frozenset[int], D: DistanceMatrix) -> np.ndarray:
    ia = np.fromiter(sorted(A), dtype=np.intp)
    ib = np.fromiter(sorted(B), dtype=np.intp)
    return D.full[np.ix_(ia, ib)]


def _minimax(U: Iterable[int], D: DistanceMatrix) -> float:
    iu = np.fromiter(sorted(U), dtype=np.intp)
    sub = D.full[np.ix_(iu, iu)]
    return float(sub.max(axis=1).min())


def linkage_distance(method, A, B, D: DistanceMatrix, f: Callable | None = None) -> float:
    """Method value between two disjoint nonempty clusters.

    ``method`` is one of "CL", "SL", "AL", "MM", or "custom" (then ``f`` is
    called as ``f(A, B, D)``); a bare callable is accepted as shorthand.
    """
    A = as_cluster(A, D.n)
    B = as_cluster(B, D.n)
    if A & B:
        raise PreconditionError(f"clusters overlap on {sorted(A & B)}")
    if callable(method):
        return float(method(A, B, D))
    if method == "custom":
        if f is None:
            raise PreconditionError("method 'custom' needs a pair function f")
        return float(f(A, B, D))
    if method not in METHODS:
        raise PreconditionError(f"unknown linkage method {method!r}")
    if method == "MM":
        return _minimax(A | B, D)
    cross = _cross_block(A, B, D)
    if method == "CL":
        return float(cross.max())
    if method == "SL":
        return float(cross.min())
    return float(cross.sum() / cross.size)


def union_diameter_rule(A, B, D: DistanceMatrix) -> float:
    """Pair value = diameter of the merged cluster (a custom-rule example)."""
    return cohesion("diam", set(A) | set(B), D)


def run_linkage(method, D: DistanceMatrix, f: Callable | None = None) -> Dendrogram:
    """Run the full agglomeration (n-1 merges) and return the dendrogram.

    CL/SL rows are updated by max/min, so their stored values are exact
    originals from D.  AL keeps exact cross-distance sums and divides at
    lookup.  MM and custom values are recomputed from the point matrix for
    every affected pair.
    """
    n = D.n
    if n < 2:
        raise PreconditionError("linkage needs at least two points")
    if callable(method):
        f, method = method, "custom"
    if method == "custom" and f is None:
        raise PreconditionError("method 'custom' needs a pair function f")
    if method != "custom" and method not in METHODS:
        raise PreconditionError(f"unknown linkage method {method!r}")

    M = D.full
    members: list[frozenset[int]] = [frozenset([i]) for i in range(n)]
    ids = list(range(n))
    minmem = list(range(n))
    if method == "custom":
        V = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                V[i, j] = V[j, i] = f(members[i], members[j], D)
    else:
        V = M.copy()
        np.fill_diagonal(V, np.inf)
    S = M.copy() if method == "AL" else None  # exact cross-distance sums
    sizes = np.ones(n, dtype=np.int64)

    merges: list[MergeRecord] = []
    for it in range(1, n):
        m = V.min()
        cand = np.argwhere(V == m)
        best = None
        for i, j in cand:
            if i >= j:
                continue
            a, b = minmem[i], minmem[j]
            key = (min(a, b), max(a, b))
            if best is None or key < best[0]:
                best = (key, int(i), int(j))
        _, i, j = best
        new_members = members[i] | members[j]
        new_id = n - 1 + it
        if minmem[i] <= minmem[j]:
            left, right = ids[i], ids[j]
        else:
            left, right = ids[j], ids[i]
        merges.append(MergeRecord(left=left, right=right, value=float(m),
                                  result=new_id, iteration=it))

        keep = [c for c in range(len(ids)) if c != i and c != j]
        if method == "CL":
            newrow = np.maximum(V[i], V[j])[keep]
        elif method == "SL":
            newrow = np.minimum(V[i], V[j])[keep]
        elif method == "AL":
            news = (S[i] + S[j])[keep]
            newrow = news / (len(new_members) * sizes[keep])
        elif method == "MM":
            newrow = np.array([_minimax(new_members | members[c], D) for c in keep])
        else:
            newrow = np.array([float(f(new_members, members[c], D)) for c in keep])

        V = V[np.ix_(keep, keep)]
        V = np.pad(V, ((0, 1), (0, 1)), constant_values=np.inf)
        V[-1, :-1] = newrow
        V[:-1, -1] = newrow
        if method == "AL":
            S = S[np.ix_(keep, keep)]
            S = np.pad(S, ((0, 1), (0, 1)), constant_values=0.0)
            S[-1, :-1] = news
            S[:-1, -1] = news
        sizes = np.append(sizes[keep], len(new_members))
        members = [members[c] for c in keep] + [new_members]
        minmem = [minmem[c] for c in keep] + [min(new_members)]
        ids = [ids[c] for c in keep] + [new_id]

    return Dendrogram(n=n, method=method, tie_rule=TIE_RULE, merges=tuple(merges))


def extract_clustering(dg: Dendrogram, k: int) -> Clustering:
    """The k-clustering reached after n-k merges (1 <= k <= n)."""
    n = dg.n
    if not 1 <= k <= n:
        raise PreconditionError(f"k must be in 1..{n}, got {k}")
    if len(dg.merges) < n - k:
        raise PreconditionError(
            f"dendrogram has {len(dg.merges)} merges, need {n - k} for k={k}"
        )
    active: dict[int, frozenset[int]] = {i: frozenset([i]) for i in range(n)}
    for m in dg.merges[: n - k]:
        u = active.pop(m.left) | active.pop(m.right)
        active[m.result] = u
    return Clustering.from_blocks(active.values(), n)


def check_merge_monotonicity(dg: Dendrogram, D: DistanceMatrix) -> list[dict]:
    """Replay a CL dendrogram and audit its union-diameter structure.

    Per merge j the two recorded claims are (1) the merged union's diameter
    equals the max cross distance between the merged pair, and (2) union
    diameters are nondecreasing in j.  Both sides of each comparison are
    maxima of entries of D, so comparisons are exact.  Returns one record per
    violated claim: {iteration, claim, expected, observed}.
    """
    members = dg.members_map()
    violations: list[dict] = []
    prev_diam = None
    for m in dg.merges:
        A, B = members[m.left], members[m.right]
        U = A | B
        diam_u = cohesion("diam", U, D)
        cross_max = float(_cross_block(A, B, D).max())
        if diam_u != cross_max:
            violations.append({
                "iteration": m.iteration,
                "claim": "union-diam-equals-cross-max",
                "expected": cross_max,
                "observed": diam_u,
            })
        if prev_diam is not None and diam_u < prev_diam:
            violations.append({
                "iteration": m.iteration,
                "claim": "union-diam-nondecreasing",
                "expected": prev_diam,
                "observed": diam_u,
            })
        prev_diam = diam_u
    return violations


@dataclass(frozen=True)
class RuleEquivalenceResult:
    identical: bool
    divergence: dict | None = None


def check_rule_equivalence(D: DistanceMatrix) -> RuleEquivalenceResult:
    """Compare CL against the min-union-diameter agglomerative rule.

    Precondition: all pairwise distances are distinct (raises otherwise --
    with ties the two rules' tie-breaking is incomparable).  Returns whether
    the two dendrograms merge identical pairs at every iteration, plus the
    first divergence if any.
    """
    if D.n < 2:
        raise PreconditionError("need at least two points")
    if np.unique(D.packed).size != D.packed.size:
        raise PreconditionError("pairwise distances must be distinct")
    dg_cl = run_linkage("CL", D)
    dg_ud = run_linkage(union_diameter_rule, D)
    mem_cl = dg_cl.members_map()
    mem_ud = dg_ud.members_map()
    for mc, mu in zip(dg_cl.merges, dg_ud.merges):
        pair_c = {mem_cl[mc.left], mem_cl[mc.right]}
        pair_u = {mem_ud[mu.left], mem_ud[mu.right]}
        if pair_c != pair_u:
            return RuleEquivalenceResult(False, {
                "iteration": mc.iteration,
                "cl_pair": [sorted(s) for s in pair_c],
                "rule_pair": [sorted(s) for s in pair_u],
            })
    return RuleEquivalenceResult(True, None)


@dataclass
class AlignmentReport:
    samples: int
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_alignment(f: Callable, cost: Callable, D: DistanceMatrix,
                    sample_pairs: int, seed: int = 0,
                    rtol: float = 1e-12) -> AlignmentReport:
    """Probe whether a pair function and a cohesion cost fit together.

    On random disjoint cluster pairs (A, B) three conditions are sampled:
      (i)   min cross distance <= f(A,B) <= diam(A u B)
      (ii)  singletons cost exactly 0
      (iii) cost(A u B) <= max{cost(A), cost(B), f(A,B)}
    Float comparisons allow a tiny relative slack ``rtol`` (mean-based costs
    can overshoot pure maxima by final-ulp rounding); every fourth sample
    forces |A| = 1 so condition (ii) is exercised.
    """
    n = D.n
    if n < 2:
        raise PreconditionError("need at least two points")
    if sample_pairs < 1:
        raise PreconditionError("sample_pairs must be positive")
    rng = np.random.default_rng(seed)
    report = AlignmentReport(samples=sample_pairs)
    for s in range(sample_pairs):
        perm = rng.permutation(n)
        sa = 1 if s % 4 == 0 else int(rng.integers(1, n))
        sb = int(rng.integers(1, n - sa + 1))
        A = frozenset(int(x) for x in perm[:sa])
        B = frozenset(int(x) for x in perm[sa:sa + sb])
        fab = float(f(A, B, D))
        cross = _cross_block(A, B, D)
        lo, hi = float(cross.min()), cohesion("diam", A | B, D)
        if not leq_with_tol(lo, fab, rtol):
            report.violations.append({"condition": "i-lower", "A": sorted(A),
                                      "B": sorted(B), "lhs": lo, "rhs": fab})
        if not leq_with_tol(fab, hi, rtol):
            report.violations.append({"condition": "i-upper", "A": sorted(A),
                                      "B": sorted(B), "lhs": fab, "rhs": hi})
        for side in (A, B):
            if len(side) == 1 and float(cost(side, D)) != 0.0:
                report.violations.append({"condition": "ii", "A": sorted(A),
                                          "B": sorted(B),
                                          "lhs": float(cost(side, D)), "rhs": 0.0})
        cu = float(cost(A | B, D))
        bound = max(float(cost(A, D)), float(cost(B, D)), fab)
        if not leq_with_tol(cu, bound, rtol):
            report.violations.append({"condition": "iii", "A": sorted(A),
                                      "B": sorted(B), "lhs": cu, "rhs": bound})
    return report

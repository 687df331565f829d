"""Family-forest certificate: replay a CL run against a target clustering.

Given a target k-clustering T_1..T_k, start with one family per block
holding its points as singleton clusters, and replay the first n-k CL
merges.  Each merge rewrites the one or two root families containing the
merged clusters (four structural cases) and records the rewrite as parent
nodes in a forest, so every family is immutable once created.  Two counters
ride along: phi(F) = number of leaf families below F, and phi_sigma(F) =
sum of the leaf families' diameters; both are additive across children by
construction, and the additivity is re-verified against the actual leaf
sets at every creation.

Per-iteration assertions:
  p3  at least one root family holds more than one cluster,
  p4  every regular root F (more than one cluster) satisfies the chain
      diam(F) <= phi_sigma(F) * phi(F)^p <= k * avg-diam(target) * k^p
      with p = log2(3) - 1, up to 1e-9 relative slack.
The final per-cluster guarantee (every cluster born in the first n-k merges
has diameter at most k^{log2 3} * avg-diam(target)) is checked separately by
``alg1_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linkage_engine import Dendrogram, leq_with_tol
from .metric_core import (
    Clustering,
    DistanceMatrix,
    PreconditionError,
    clustering_score,
)

__all__ = [
    "FamilyNode",
    "Alg1IterationRecord",
    "Alg1Trace",
    "BoundCheck",
    "P_EXP",
    "alg1_trace",
    "alg1_bound",
]

P_EXP = math.log(3) / math.log(2) - 1  # exponent in the phi bound chain
RTOL = 1e-9


def _diam(points, D: DistanceMatrix) -> float:
    pts = sorted(points)
    if len(pts) < 2:
        return 0.0
    idx = np.fromiter(pts, dtype=np.intp)
    return float(D.full[np.ix_(idx, idx)].max())


@dataclass
class FamilyNode:
    """An immutable family: a set of cluster ids plus its forest bookkeeping."""

    id: int
    clusters: frozenset[int]
    parent: int | None
    phi: int
    phi_sigma: float
    diam: float
    created_at: int                      # iteration of creation, 0 = initial
    children: tuple[int, ...] = ()
    points: frozenset[int] = frozenset()

    @property
    def regular(self) -> bool:
        return len(self.clusters) > 1

    def summary(self) -> dict:
        return {
            "id": self.id,
            "size": len(self.clusters),
            "phi": self.phi,
            "phi_sigma": float(self.phi_sigma),
            "diam": float(self.diam),
            "regular": self.regular,
        }


@dataclass
class Alg1IterationRecord:
    iteration: int
    case: str | None
    roots: list[dict]
    assertions: dict
    failures: list[dict] = field(default_factory=list)


@dataclass
class Alg1Trace:
    n: int
    k: int
    target: Clustering
    records: list[Alg1IterationRecord]
    forest: dict[int, FamilyNode]
    final_assertions: dict
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures and all(not r.failures for r in self.records)

    @property
    def assertion_counts(self) -> tuple[int, int]:
        """(passed, failed) over all per-iteration + final assertions."""
        passed = failed = 0
        for r in self.records:
            for v in r.assertions.values():
                passed, failed = passed + (1 if v else 0), failed + (0 if v else 1)
        for v in self.final_assertions.values():
            passed, failed = passed + (1 if v else 0), failed + (0 if v else 1)
        return passed, failed

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "target": self.target.to_json(),
            "iterations": [
                {
                    "iteration": r.iteration,
                    "case": r.case,
                    "roots": r.roots,
                    "assertions": r.assertions,
                    "failures": r.failures,
                }
                for r in self.records
            ],
            "final": self.final_assertions,
            "ok": self.ok,
        }


def _leaves(forest: dict[int, FamilyNode], fid: int) -> list[int]:
    node = forest[fid]
    if not node.children:
        return [fid]
    out: list[int] = []
    for c in node.children:
        out.extend(_leaves(forest, c))
    return out


def alg1_trace(D: DistanceMatrix, dg: Dendrogram, target) -> Alg1Trace:
    """Replay the family-forest construction along the first n-k CL merges."""
    if dg.method != "CL":
        raise PreconditionError(f"certificates require a CL dendrogram, got {dg.method!r}")
    if dg.n != D.n:
        raise PreconditionError(f"dendrogram is over {dg.n} points, instance has {D.n}")
    if not isinstance(target, Clustering):
        target = Clustering.from_blocks(target, D.n)
    else:
        Clustering.from_blocks(target.blocks, D.n)
    n, k = D.n, target.k
    members = dg.members_map()

    avg_diam = clustering_score("avg-diam", target, D)
    chain_rhs = k * avg_diam * k ** P_EXP

    forest: dict[int, FamilyNode] = {}
    fam_of: dict[int, int] = {}      # live cluster id -> root family id
    roots: set[int] = set()
    next_fid = 0

    def new_family(clusters, phi, phi_sigma, created_at, children) -> FamilyNode:
        nonlocal next_fid
        pts = frozenset().union(*(members[c] for c in clusters))
        node = FamilyNode(id=next_fid, clusters=frozenset(clusters), parent=None,
                          phi=phi, phi_sigma=phi_sigma, diam=_diam(pts, D),
                          created_at=created_at, children=tuple(children),
                          points=pts)
        next_fid += 1
        forest[node.id] = node
        roots.add(node.id)
        for c in children:
            forest[c].parent = node.id
            roots.discard(c)
        for c in clusters:
            fam_of[c] = node.id
        return node

    for block in target.blocks:
        new_family([x for x in sorted(block)], phi=1,
                   phi_sigma=_diam(block, D), created_at=0, children=())

    trace_failures: list[dict] = []
    records: list[Alg1IterationRecord] = []

    def creation_checks(node: FamilyNode, iteration: int, failures: list[dict]) -> None:
        leaf_ids = _leaves(forest, node.id)
        if node.phi != len(leaf_ids):
            failures.append({
                "assertion": "phi-additivity", "iteration": iteration,
                "detail": f"family {node.id}: phi={node.phi}, leaves={len(leaf_ids)}",
            })
        direct = math.fsum(forest[l].diam for l in leaf_ids)
        if not math.isclose(node.phi_sigma, direct, rel_tol=1e-12, abs_tol=1e-12):
            failures.append({
                "assertion": "phi-sigma-additivity", "iteration": iteration,
                "detail": f"family {node.id}: stored={node.phi_sigma!r}, leaf sum={direct!r}",
            })

    def root_assertions(iteration: int, check_p3: bool = True):
        snap = [forest[r].summary() for r in sorted(roots)]
        p3 = any(forest[r].regular for r in roots)
        p4 = True
        failures: list[dict] = []
        if check_p3 and not p3:
            failures.append({"assertion": "p3", "iteration": iteration,
                             "detail": "no regular root family"})
        for r in sorted(roots):
            node = forest[r]
            if not node.regular:
                continue
            mid = node.phi_sigma * node.phi ** P_EXP
            if not leq_with_tol(node.diam, mid, RTOL):
                p4 = False
                failures.append({
                    "assertion": "p4", "iteration": iteration,
                    "detail": f"family {r}: diam {node.diam!r} > "
                              f"phi_sigma*phi^p {mid!r}",
                })
            if not leq_with_tol(mid, chain_rhs, RTOL):
                p4 = False
                failures.append({
                    "assertion": "p4", "iteration": iteration,
                    "detail": f"family {r}: phi_sigma*phi^p {mid!r} > "
                              f"k*avg-diam*k^p {chain_rhs!r}",
                })
        return snap, p3, p4, failures

    for t in range(1, n - k + 1):
        m = dg.merges[t - 1]
        snap, p3, p4, failures = root_assertions(t)
        g, g2, u = m.left, m.right, m.result

        fa, fb = fam_of.pop(g), fam_of.pop(g2)
        ga, gb = g, g2
        if len(forest[fa].clusters) < len(forest[fb].clusters):
            fa, fb, ga, gb = fb, fa, gb, ga
        A, Bf = forest[fa], forest[fb]

        if len(Bf.clusters) == 1 and len(A.clusters) > 1:
            case = "a"
            nf = new_family(A.clusters - {ga}, phi=A.phi, phi_sigma=A.phi_sigma,
                            created_at=t, children=(fa,))
            nf2 = new_family([u], phi=Bf.phi, phi_sigma=Bf.phi_sigma,
                             created_at=t, children=(fb,))
            creation_checks(nf, t, failures)
            creation_checks(nf2, t, failures)
        elif fa == fb:
            case = "b-sub2"
            nf = new_family((A.clusters - {ga, gb}) | {u}, phi=A.phi,
                            phi_sigma=A.phi_sigma, created_at=t, children=(fa,))
            creation_checks(nf, t, failures)
        elif len(A.clusters) == 1 and len(Bf.clusters) == 1:
            case = "b-sub1"
            nf = new_family([u], phi=A.phi + Bf.phi,
                            phi_sigma=A.phi_sigma + Bf.phi_sigma,
                            created_at=t, children=(fa, fb))
            creation_checks(nf, t, failures)
        else:
            case = "b-sub3"
            nf = new_family((A.clusters | Bf.clusters | {u}) - {ga, gb},
                            phi=A.phi + Bf.phi,
                            phi_sigma=A.phi_sigma + Bf.phi_sigma,
                            created_at=t, children=(fa, fb))
            creation_checks(nf, t, failures)

        records.append(Alg1IterationRecord(
            iteration=t, case=case, roots=snap,
            assertions={"p3": p3, "p4": p4},
            failures=failures,
        ))

    # Final state: the per-cluster guarantee leans on p4 holding here too.
    # p3 is not asserted here -- once every target block has fully merged all
    # root families hold a single cluster, which is the intended end shape.
    _, _, p4_final, final_failures = root_assertions(n - k + 1, check_p3=False)
    trace_failures.extend(final_failures)
    return Alg1Trace(n=n, k=k, target=target, records=records, forest=forest,
                     final_assertions={"p4": p4_final}, failures=trace_failures)


@dataclass
class BoundCheck:
    bound: float
    per_iteration: list[dict]
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures


def alg1_bound(trace: Alg1Trace, dg: Dendrogram, D: DistanceMatrix) -> BoundCheck:
    """Check every cluster born in the first n-k merges against the guarantee
    diam <= k^{log2 3} * avg-diam(target), with 1e-9 relative slack."""
    k = trace.k
    avg_diam = clustering_score("avg-diam", trace.target, D)
    bound = k ** (P_EXP + 1) * avg_diam
    members = dg.members_map()
    rows, failures = [], []
    for m in dg.merges[: trace.n - k]:
        dm = _diam(members[m.result], D)
        ok = leq_with_tol(dm, bound, RTOL)
        rows.append({"iteration": m.iteration, "diam": dm, "bound": bound, "ok": ok})
        if not ok:
            failures.append({"assertion": "per-cluster-bound",
                             "iteration": m.iteration,
                             "detail": f"diam {dm!r} > bound {bound!r}"})
    return BoundCheck(bound=bound, per_iteration=rows, failures=failures)

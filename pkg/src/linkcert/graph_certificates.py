"""Pure-cluster graph certificate: exclusion sets, components, spanning trees.

This is the second certificate replayed along a CL run, against a target
k-clustering scored by its LARGEST block diameter.  Families exist only for
multi-point target blocks and snapshot their point set, diameter and cluster
count at creation.  Singleton target blocks seed the exclusion set.  While
merges replay, a graph over live families grows edges whenever a merged pair
touches two families; connected components are tracked together with the
"tree edges" that first connected them (those become the spanning-tree
certificate when a component collapses into a new family).

Cluster purity: a cluster is pure w.r.t. a live family F while all its
points lie in Pts(F) and it has not entered the exclusion set; entering the
exclusion set erases purity for good.  Per-family pure counts drive all the
structural cases:

  case a  a multi-family component keeps exactly one family with >1 pure
          clusters -> component collapses into a new family F_C,
  case b  a multi-family component has no family with >1 pure clusters ->
          one last pure cluster is excluded (site addLr2), then collapse,
  case c  a single-family component drops to <=1 pure clusters -> removed.

Whenever case b did not fire, every live family that dropped from >1 to
exactly 1 pure cluster this iteration sends that cluster to the exclusion
set (site addLr1).  The replay asserts, every iteration: the two-pure-
clusters lemma, the exact four-case evolution of pure counts, exclusivity
of the cases, the cluster classification (excluded / pure / inside exactly
one component's territory), the addition-budget cap, and -- at every family
creation -- the spanning-tree weight bounds, the diameter-sum bound, and the
growth bound diam(F) <= max-diam(target) * phi(F)^alpha_k.
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
    "AlphaK",
    "Alg2Family",
    "PureLedger",
    "ComponentState",
    "SpanningTreeCert",
    "Alg2IterationRecord",
    "Alg2Trace",
    "alpha_k",
    "alg2_trace",
    "spanning_tree_check",
    "fc_diameter_check",
    "alg2_bound",
]

RTOL = 1e-9
ALPHA_CAP = math.log(6) / math.log(4)


@dataclass(frozen=True)
class AlphaK:
    """Exponent alpha_k and the factor k**alpha_k of the per-cluster bound."""

    k: int
    exponent: float
    factor: float


def alpha_k(k: int) -> AlphaK:
    """alpha_k = log_k(2k-2) for k in {2, 3, 4}, log_4(6) for k > 4.

    For k <= 4 the factor k**alpha_k equals 2k-2 exactly, so it is returned
    as that integer value rather than as power-function output.
    """
    if k < 2:
        raise PreconditionError(f"k must be at least 2, got {k}")
    if k <= 4:
        exponent = math.log(2 * k - 2) / math.log(k)
        return AlphaK(k=k, exponent=exponent, factor=float(2 * k - 2))
    return AlphaK(k=k, exponent=ALPHA_CAP, factor=float(k) ** ALPHA_CAP)


def _diam(points, D: DistanceMatrix) -> float:
    pts = sorted(points)
    if len(pts) < 2:
        return 0.0
    idx = np.fromiter(pts, dtype=np.intp)
    return float(D.full[np.ix_(idx, idx)].max())


@dataclass
class Alg2Family:
    """A family with creation-time snapshots (points, diameter, cluster count)."""

    id: int
    clusters: frozenset[int]     # cluster ids at creation
    points: frozenset[int]
    diam: float
    size: int
    phi: int
    created_at: int
    parent: int | None = None
    children: tuple[int, ...] = ()

    def summary(self, pure: int | None = None) -> dict:
        out = {"id": self.id, "size": self.size, "phi": self.phi,
               "diam": float(self.diam)}
        if pure is not None:
            out["pure"] = pure
        return out


@dataclass
class PureLedger:
    """Tags of current clusters and pure-cluster counts of live families."""

    tags: dict[int, tuple] = field(default_factory=dict)
    counts: dict[int, int] = field(default_factory=dict)

    def tag_of(self, cid: int) -> tuple:
        return self.tags[cid]

    def count_of(self, fid: int) -> int:
        return self.counts[fid]

    def pure_family(self, cid: int) -> int | None:
        tag = self.tags.get(cid)
        return tag[1] if tag and tag[0] == "pure" else None


@dataclass
class ComponentState:
    id: int
    families: set[int]
    events: list[dict] = field(default_factory=list)  # tree edges, in order


@dataclass
class SpanningTreeCert:
    """Edges that connected a component, with the families' snapshot diameters."""

    fc_id: int
    iteration: int
    families: list[int]
    edges: list[dict]            # {iteration, weight, endpoints}
    dm: list[float]              # family diameters sorted ascending


def spanning_tree_check(cert: SpanningTreeCert) -> list[dict]:
    """Structural + weight checks for a component's connecting edges.

    Requires exactly |C|-1 edges that span all of C's families, and sorted
    edge weights w_(1) <= DM_1, w_(i) <= DM_{i-1} for i >= 2 (so the two
    cheapest edges are both below DM_1).  Comparisons are exact: both sides
    are maxima of original distance entries.
    """
    failures: list[dict] = []
    nfam = len(cert.families)
    if len(cert.edges) != nfam - 1:
        failures.append({
            "assertion": "tree-edge-count", "iteration": cert.iteration,
            "detail": f"component of {nfam} families has {len(cert.edges)} tree edges",
        })
        return failures
    parent = {f: f for f in cert.families}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    joined = 0
    for e in cert.edges:
        a, b = e["endpoints"]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            joined += 1
    if joined != nfam - 1:
        failures.append({
            "assertion": "tree-spanning", "iteration": cert.iteration,
            "detail": "tree edges do not span the component",
        })
    weights = sorted(e["weight"] for e in cert.edges)
    for i, w in enumerate(weights):           # 0-based; bound DM[0], DM[i-1]
        bound = cert.dm[0] if i == 0 else cert.dm[i - 1]
        if w > bound:
            failures.append({
                "assertion": "tree-weight", "iteration": cert.iteration,
                "detail": f"edge weight {w!r} (rank {i + 1}) exceeds DM {bound!r}",
            })
    return failures


def fc_diameter_check(cert: SpanningTreeCert, fc_diam: float) -> list[dict]:
    """diam(F_C) <= sum of all DM_i plus the |C|-2 smallest DM_i (exact sums)."""
    rhs = math.fsum(cert.dm) + math.fsum(cert.dm[: max(len(cert.dm) - 2, 0)])
    if fc_diam > rhs:
        return [{
            "assertion": "sum-diam", "iteration": cert.iteration,
            "detail": f"diam(F_C) {fc_diam!r} > DM-sum bound {rhs!r}",
        }]
    return []


@dataclass
class Alg2IterationRecord:
    iteration: int
    case: str | None
    roots: list[dict]
    assertions: dict
    exclusion_set_size: int
    components: list[dict]
    events: list[dict]
    failures: list[dict] = field(default_factory=list)


@dataclass
class Alg2Trace:
    n: int
    k: int
    target: Clustering
    records: list[Alg2IterationRecord]
    families: dict[int, Alg2Family]
    spanning_certs: list[SpanningTreeCert]
    additions: list[dict]
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures and all(not r.failures for r in self.records)

    @property
    def assertion_counts(self) -> tuple[int, int]:
        passed = failed = 0
        for r in self.records:
            for v in r.assertions.values():
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
                    "exclusion_set_size": r.exclusion_set_size,
                    "components": r.components,
                    "events": r.events,
                    "failures": r.failures,
                }
                for r in self.records
            ],
            "spanning_tree_certs": [
                {
                    "fc_id": c.fc_id,
                    "iteration": c.iteration,
                    "families": list(c.families),
                    "edges": c.edges,
                    "dm": c.dm,
                }
                for c in self.spanning_certs
            ],
            "exclusion_additions": self.additions,
            "ok": self.ok,
        }


def alg2_trace(D: DistanceMatrix, dg: Dendrogram, target) -> Alg2Trace:
    """Replay the pure-cluster graph construction along the first n-k merges."""
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
    max_diam = clustering_score("max-diam", target, D)
    alpha = alpha_k(k) if k >= 2 else None

    families: dict[int, Alg2Family] = {}
    ledger = PureLedger()
    live: set[int] = set()
    p2f: list[int | None] = [None] * n
    comps: dict[int, ComponentState] = {}
    fam2comp: dict[int, int] = {}
    E: set[int] = set()
    additions: list[dict] = []
    fam_events: dict[int, list[dict]] = {}
    spanning_certs: list[SpanningTreeCert] = []
    trace_failures: list[dict] = []
    active: set[int] = set(range(n))
    edge_set: set[tuple[int, int]] = set()   # simple edges of the live graph
    next_fid = 0
    next_comp = 0

    for block in target.blocks:
        if len(block) == 1:
            (x,) = block
            E.add(x)
            ledger.tags[x] = ("excluded",)
            continue
        fam = Alg2Family(id=next_fid, clusters=frozenset(block),
                         points=frozenset(block), diam=_diam(block, D),
                         size=len(block), phi=1, created_at=0)
        families[next_fid] = fam
        live.add(next_fid)
        ledger.counts[next_fid] = len(block)
        fam_events[next_fid] = []
        for x in block:
            ledger.tags[x] = ("pure", next_fid)
            p2f[x] = next_fid
        comps[next_comp] = ComponentState(id=next_comp, families={next_fid})
        fam2comp[next_fid] = next_comp
        next_comp += 1
        if alpha and not leq_with_tol(fam.diam, max_diam, RTOL):
            trace_failures.append({
                "assertion": "family-growth-bound", "iteration": 0,
                "detail": f"initial family {fam.id}: diam {fam.diam!r} > "
                          f"max-diam(target) {max_diam!r}",
            })
        next_fid += 1

    def start_assertions(t: int, failures: list[dict]) -> dict:
        ok_l1 = True
        for comp in comps.values():
            rich = [f for f in comp.families if ledger.counts[f] >= 2]
            need = 1 if len(comp.families) == 1 else 2
            if len(rich) < need:
                ok_l1 = False
                failures.append({
                    "assertion": "two-pure-clusters", "iteration": t,
                    "detail": f"component {sorted(comp.families)} has only "
                              f"{len(rich)} families with >=2 pure clusters",
                })
        ok_cs = True
        recount: dict[int, int] = {f: 0 for f in live}
        for h in active:
            tag = ledger.tags[h]
            if tag[0] == "excluded":
                if h not in E:
                    ok_cs = False
                    failures.append({
                        "assertion": "clusters-structure", "iteration": t,
                        "detail": f"cluster {h} tagged excluded but not in the set",
                    })
                continue
            touched = {p2f[p] for p in members[h]}
            orphans = None in touched
            touched.discard(None)
            if tag[0] == "pure":
                recount[tag[1]] = recount.get(tag[1], 0) + 1
            if orphans or not touched:
                ok_cs = False
                failures.append({
                    "assertion": "clusters-structure", "iteration": t,
                    "detail": f"cluster {sorted(members[h])} touches orphaned "
                              "points but is not excluded",
                })
                continue
            if len(touched) == 1:
                (f,) = touched
                if tag != ("pure", f):
                    ok_cs = False
                    failures.append({
                        "assertion": "clusters-structure", "iteration": t,
                        "detail": f"cluster {sorted(members[h])} lies inside "
                                  f"family {f} but is tagged {tag}",
                    })
            else:
                comp_ids = {fam2comp[f] for f in touched}
                if tag[0] != "nonpure" or len(comp_ids) != 1:
                    ok_cs = False
                    failures.append({
                        "assertion": "clusters-structure", "iteration": t,
                        "detail": f"cluster {sorted(members[h])} (tag {tag}) "
                                  f"spans families {sorted(touched)} in "
                                  f"{len(comp_ids)} components",
                    })
        if recount != {f: ledger.counts[f] for f in live}:
            ok_cs = False
            failures.append({
                "assertion": "clusters-structure", "iteration": t,
                "detail": f"pure-count ledger {ledger.counts} disagrees with "
                          f"tag recount {recount}",
            })
        return {"two_pure_clusters": ok_l1, "clusters_structure": ok_cs}

    records: list[Alg2IterationRecord] = []

    for t in range(1, n - k + 1):
        failures: list[dict] = []
        events: list[dict] = []
        assertions = start_assertions(t, failures)
        pure_start = dict(ledger.counts)

        m = dg.merges[t - 1]
        g, g2, u = m.left, m.right, m.result
        tag_g, tag_g2 = ledger.tags.pop(g), ledger.tags.pop(g2)
        active.discard(g)
        active.discard(g2)
        active.add(u)

        absorbed = g in E or g2 in E
        if absorbed:
            E.discard(g)
            E.discard(g2)
            E.add(u)
            ledger.tags[u] = ("excluded",)
            for tg in (tag_g, tag_g2):
                if tg[0] == "pure":
                    ledger.counts[tg[1]] -= 1
            events.append({"type": "absorbed", "iteration": t,
                           "cluster": sorted(members[u])})
        else:
            A = {p2f[p] for p in members[g]}
            B = {p2f[p] for p in members[g2]}
            if None in A or None in B or not A or not B:
                failures.append({
                    "assertion": "clusters-structure", "iteration": t,
                    "detail": "merged non-excluded cluster touches orphaned points",
                })
                A.discard(None)
                B.discard(None)
            if tag_g[0] == "pure" and tag_g == tag_g2:
                ledger.tags[u] = tag_g
                ledger.counts[tag_g[1]] -= 1
            else:
                ledger.tags[u] = ("nonpure",)
                for tg in (tag_g, tag_g2):
                    if tg[0] == "pure":
                        ledger.counts[tg[1]] -= 1
            for side, fams in (("left", A), ("right", B)):
                if len({fam2comp[f] for f in fams}) > 1:
                    failures.append({
                        "assertion": "clusters-structure", "iteration": t,
                        "detail": f"{side} cluster touches several components",
                    })
            new_edges = sorted(
                {(min(a, b), max(a, b)) for a in A for b in B if a != b}
                - edge_set
            )
            for e in new_edges:
                edge_set.add(e)
                events.append({"type": "edge", "iteration": t, "endpoints": list(e)})
            ca = fam2comp[min(A)] if A else None
            cb = fam2comp[min(B)] if B else None
            if ca is not None and cb is not None and ca != cb:
                endpoints = min(
                    (tuple(sorted((a, b))) for a in A for b in B),
                )
                tree_edge = {"iteration": t, "weight": _diam(members[u], D),
                             "endpoints": list(endpoints)}
                events.append({"type": "edge", "iteration": t,
                               "endpoints": list(endpoints),
                               "tree_edge": True,
                               "weight": tree_edge["weight"]})
                compa, compb = comps[ca], comps[cb]
                compa.families |= compb.families
                compa.events = compa.events + compb.events + [tree_edge]
                for f in compb.families:
                    fam2comp[f] = ca
                del comps[cb]

        # four-case evolution of pure counts (exact integer bookkeeping)
        delta = {f: ledger.counts[f] - pure_start[f]
                 for f in pure_start if ledger.counts.get(f) != pure_start[f]}
        pg = tag_g[1] if tag_g[0] == "pure" else None
        pg2 = tag_g2[1] if tag_g2[0] == "pure" else None
        if pg is None and pg2 is None:
            evol_ok = delta == {}
            evol_case = "none-pure"
        elif pg is not None and pg2 is not None and pg == pg2:
            evol_ok = delta == {pg: -1} and ledger.tags[u] == ("pure", pg)
            evol_case = "both-pure-same"
            if pure_start[pg] >= 2 and u in E:
                evol_ok = False
        elif pg is not None and pg2 is not None:
            evol_ok = delta == {pg: -1, pg2: -1}
            evol_case = "both-pure-different"
        else:
            f = pg if pg is not None else pg2
            evol_ok = delta == {f: -1}
            evol_case = "one-pure"
        assertions["families_evolution"] = evol_ok
        if not evol_ok:
            failures.append({
                "assertion": "families-evolution", "iteration": t,
                "detail": f"case {evol_case}: count deltas {delta}",
            })

        # case dispatch on the post-merge state
        fired: list[tuple[str, int]] = []
        for cid_, comp in sorted(comps.items()):
            rich = [f for f in comp.families if ledger.counts[f] > 1]
            if len(comp.families) > 1 and len(rich) == 1:
                fired.append(("a", cid_))
            elif len(comp.families) > 1 and not rich:
                fired.append(("b", cid_))
            elif len(comp.families) == 1 and not rich:
                fired.append(("c", cid_))
        assertions["case_exclusivity"] = len(fired) <= 1
        if len(fired) > 1:
            failures.append({
                "assertion": "case-exclusivity", "iteration": t,
                "detail": f"cases fired simultaneously: {fired}",
            })
        case, comp_id = fired[0] if fired else (None, None)
        if case:
            events.append({"type": f"case_{case}", "iteration": t,
                           "component": sorted(comps[comp_id].families)})

        # exclusion additions
        additions_ok = True
        dropped = sorted(f for f in live
                         if pure_start.get(f, 0) > 1 and ledger.counts[f] == 1)

        def exclude_last_pure(f: int, site: str) -> None:
            nonlocal additions_ok
            cands = [h for h in active if ledger.tags[h] == ("pure", f)]
            if len(cands) != 1:
                additions_ok = False
                failures.append({
                    "assertion": "exclusion-additions", "iteration": t,
                    "detail": f"family {f} should have exactly one pure cluster, "
                              f"found {len(cands)}",
                })
                return
            (h,) = cands
            ledger.tags[h] = ("excluded",)
            E.add(h)
            ledger.counts[f] = 0
            rec = {"site": site, "iteration": t, "family": f,
                   "cluster": sorted(members[h])}
            additions.append(rec)
            fam_events[f].append(rec)
            events.append({"type": "exclusion_add", **rec})

        if case != "b":
            for f in dropped:
                exclude_last_pure(f, "addLr1")
        else:
            comp = comps[comp_id]
            two_at_start = sorted(f for f in comp.families
                                  if pure_start.get(f, 0) >= 2)
            fc_b_ok = (len(two_at_start) == 2
                       and all(pure_start[f] == 2 for f in two_at_start)
                       and dropped == two_at_start)
            assertions["case_b_structure"] = fc_b_ok
            if not fc_b_ok:
                start_counts = {f: pure_start.get(f) for f in sorted(comp.families)}
                failures.append({
                    "assertion": "case-b-structure", "iteration": t,
                    "detail": f"pure counts at start {start_counts}, "
                              f"dropped now: {dropped}",
                })
            cand_b = [f for f in dropped if f in comp.families]
            if cand_b:
                exclude_last_pure(min(cand_b), "addLr2")
        assertions["additions"] = additions_ok

        # component collapse into a new family
        if case in ("a", "b"):
            comp = comps[comp_id]
            comp_fams = sorted(comp.families)
            union_pts = frozenset().union(*(families[f].points for f in comp_fams))
            fc_members = sorted(h for h in active
                                if h not in E and members[h] <= union_pts)
            assertions["fc_size"] = len(fc_members) >= 2
            if len(fc_members) < 2:
                failures.append({
                    "assertion": "fc-size", "iteration": t,
                    "detail": f"new family would hold {len(fc_members)} clusters",
                })

            if case == "a":
                rich = [f for f in comp_fams if ledger.counts[f] > 1]
                with_events = {f for f in comp_fams if fam_events[f]}
                ls_ok = (len(rich) == 1
                         and with_events == set(comp_fams) - set(rich)
                         and all(len(fam_events[f]) == 1 for f in with_events))
            else:
                site2 = {f for f in comp_fams
                         if any(e["site"] == "addLr2" for e in fam_events[f])}
                site1 = {f for f in comp_fams
                         if any(e["site"] == "addLr1" for e in fam_events[f])}
                none_ = {f for f in comp_fams if not fam_events[f]}
                ls_ok = (len(site2) == 1 and len(none_) == 1
                         and len(site1) == len(comp_fams) - 2
                         and all(len(fam_events[f]) == 1
                                 for f in site1 | site2))
            assertions["ls_addition"] = ls_ok
            if not ls_ok:
                failures.append({
                    "assertion": "ls-addition", "iteration": t,
                    "detail": f"lifetime additions per family: "
                              f"{ {f: [e['site'] for e in fam_events[f]] for f in comp_fams} }",
                })

            fc_pts = frozenset().union(*(members[h] for h in fc_members)) \
                if fc_members else frozenset()
            fam = Alg2Family(
                id=next_fid, clusters=frozenset(fc_members), points=fc_pts,
                diam=_diam(fc_pts, D), size=len(fc_members),
                phi=sum(families[f].phi for f in comp_fams),
                created_at=t, children=tuple(comp_fams),
            )
            families[next_fid] = fam
            for f in comp_fams:
                families[f].parent = next_fid

            cert = SpanningTreeCert(
                fc_id=next_fid, iteration=t, families=comp_fams,
                edges=list(comp.events),
                dm=sorted(families[f].diam for f in comp_fams),
            )
            spanning_certs.append(cert)
            st_fail = spanning_tree_check(cert)
            sd_fail = fc_diameter_check(cert, fam.diam)
            assertions["spanning_tree"] = not st_fail
            assertions["sum_diam"] = not sd_fail
            failures.extend(st_fail)
            failures.extend(sd_fail)
            bound = max_diam * fam.phi ** alpha.exponent
            assertions["family_bound"] = leq_with_tol(fam.diam, bound, RTOL)
            if not assertions["family_bound"]:
                failures.append({
                    "assertion": "family-growth-bound", "iteration": t,
                    "detail": f"family {fam.id}: diam {fam.diam!r} > "
                              f"max-diam * phi^alpha {bound!r}",
                })

            for f in comp_fams:
                live.discard(f)
                del ledger.counts[f]
                del fam2comp[f]
            del comps[comp_id]
            edge_set = {e for e in edge_set
                        if e[0] not in comp.families and e[1] not in comp.families}
            live.add(next_fid)
            ledger.counts[next_fid] = len(fc_members)
            fam_events[next_fid] = []
            for h in fc_members:
                ledger.tags[h] = ("pure", next_fid)
            for p in union_pts:
                p2f[p] = next_fid if p in fc_pts else None
            comps[next_comp] = ComponentState(id=next_comp, families={next_fid})
            fam2comp[next_fid] = next_comp
            events.append({"type": "fc_created", "iteration": t,
                           "family": next_fid,
                           "clusters": [sorted(members[h]) for h in fc_members],
                           "component": comp_fams, "phi": fam.phi,
                           "diam": fam.diam})
            next_comp += 1
            next_fid += 1
        elif case == "c":
            comp = comps[comp_id]
            (f,) = comp.families
            live.discard(f)
            del ledger.counts[f]
            del fam2comp[f]
            del comps[comp_id]
            for p in families[f].points:
                if p2f[p] == f:
                    p2f[p] = None
            events.append({"type": "removed", "iteration": t, "family": f})

        budget_ok = len(additions) <= k and len(E) <= k
        assertions["exclusion_budget"] = budget_ok
        if not budget_ok:
            failures.append({
                "assertion": "exclusion-budget", "iteration": t,
                "detail": f"{len(additions)} additions, |E| = {len(E)}, k = {k}",
            })

        records.append(Alg2IterationRecord(
            iteration=t, case=case,
            roots=[families[f].summary(ledger.counts[f]) for f in sorted(live)],
            assertions=assertions,
            exclusion_set_size=len(E),
            components=[{
                "families": sorted(c.families),
                "pure_counts": {str(f): ledger.counts[f] for f in sorted(c.families)},
            } for _, c in sorted(comps.items())],
            events=events,
            failures=failures,
        ))

    return Alg2Trace(n=n, k=k, target=target, records=records,
                     families=families, spanning_certs=spanning_certs,
                     additions=additions, failures=trace_failures)


@dataclass
class Alg2BoundCheck:
    factor: float
    bound: float
    per_iteration: list[dict]
    family_checks: list[dict]
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures


def alg2_bound(trace: Alg2Trace, dg: Dendrogram, D: DistanceMatrix,
               k: int | None = None) -> Alg2BoundCheck:
    """Family growth bounds at every creation plus the final per-cluster bound
    diam <= max-diam(target) * k^{alpha_k} for every cluster born in the
    first n-k merges (1e-9 relative slack)."""
    if k is None:
        k = trace.k
    if k != trace.k:
        raise PreconditionError(f"trace was built for k={trace.k}, got k={k}")
    alpha = alpha_k(k)
    max_diam = clustering_score("max-diam", trace.target, D)
    bound = max_diam * alpha.factor
    members = dg.members_map()
    failures: list[dict] = []
    family_checks = []
    for fam in trace.families.values():
        fb = max_diam * fam.phi ** alpha.exponent
        ok = leq_with_tol(fam.diam, fb, RTOL)
        family_checks.append({"family": fam.id, "phi": fam.phi,
                              "diam": fam.diam, "bound": fb, "ok": ok})
        if not ok:
            failures.append({"assertion": "family-growth-bound",
                             "family": fam.id,
                             "detail": f"diam {fam.diam!r} > bound {fb!r}"})
    rows = []
    for m in dg.merges[: trace.n - k]:
        dm = _diam(members[m.result], D)
        ok = leq_with_tol(dm, bound, RTOL)
        rows.append({"iteration": m.iteration, "diam": dm, "bound": bound, "ok": ok})
        if not ok:
            failures.append({"assertion": "per-cluster-bound",
                             "iteration": m.iteration,
                             "detail": f"diam {dm!r} > bound {bound!r}"})
    return Alg2BoundCheck(factor=alpha.factor, bound=bound, per_iteration=rows,
                          family_checks=family_checks, failures=failures)

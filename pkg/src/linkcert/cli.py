"""Command-line harness: generate, run, certify, sweep, inequalities, oracle.

Exit codes: 0 success, 2 usage/validation error, 3 assertion failures
(details land in a machine-readable failures.json manifest in the output
directory), 4 resource-guard refusal.  All randomness is seeded; reruns with
identical arguments/configs produce byte-identical outputs.  CSV numbers are
printed with 17 significant digits so values survive a round trip exactly.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from multiprocessing import Pool

from . import inequality_lab
from .family_certificates import P_EXP, alg1_bound, alg1_trace
from .graph_certificates import alg2_bound, alg2_trace, alpha_k
from .instance_lab import (
    gen_random_euclidean,
    gen_random_metric,
    gen_single_link_adversary,
    load_target,
    write_adversary,
)
from .linkage_engine import METHODS, Dendrogram, extract_clustering, run_linkage
from .metric_core import (
    CLUSTERING_SCORES,
    Clustering,
    DistanceMatrix,
    PreconditionError,
    ResourceGuardError,
    StructuralError,
    clustering_score,
    dump_instance,
    load_instance,
)
from .opt_oracles import DEFAULT_N_MAX, opt_score

__all__ = ["main", "BoundReport"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ASSERTION = 3
EXIT_GUARD = 4


class AssertionFailures(Exception):
    """Carrier for collected assertion failures (drives exit code 3)."""

    def __init__(self, failures: list[dict]):
        super().__init__(f"{len(failures)} assertion failure(s)")
        self.failures = failures


@dataclass
class BoundReport:
    """Everything a certify run learned about one (instance, method, k) cell."""

    instance: dict
    method: str
    k: int
    achieved: dict
    oracle: dict | None
    bounds: dict | None
    ratios: dict | None
    certificates: dict | None

    def to_json(self) -> dict:
        return asdict(self)


def fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_failures(out_dir: str, command: str, failures: list[dict]) -> str:
    path = os.path.join(out_dir, "failures.json")
    with open(path, "w") as fh:
        json.dump({"command": command, "failures": failures}, fh, indent=2)
        fh.write("\n")
    return path


def _achieved(dg: Dendrogram, D: DistanceMatrix, k: int) -> dict:
    C = extract_clustering(dg, k)
    return {score: clustering_score(score, C, D) for score in CLUSTERING_SCORES}


# ---------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    if args.kind == "adversary":
        inst = gen_single_link_adversary(args.k, args.B, args.eps)
        path = os.path.join(
            args.out_dir, f"adversary_k{args.k}_B{fmt(args.B)}_eps{fmt(args.eps)}.json")
        sidecar = write_adversary(inst, path)
        print(json.dumps({"instance": path, "sidecar": sidecar,
                          "n": inst.n, "d_out": inst.d_out}))
    elif args.kind == "euclidean":
        D = gen_random_euclidean(args.n, args.dim, args.seed)
        path = os.path.join(
            args.out_dir, f"euclidean_n{args.n}_d{args.dim}_s{args.seed}.json")
        dump_instance(D, path)
        print(json.dumps({"instance": path, "n": D.n}))
    else:
        D = gen_random_metric(args.n, args.seed)
        path = os.path.join(args.out_dir, f"metric_n{args.n}_s{args.seed}.json")
        dump_instance(D, path)
        print(json.dumps({"instance": path, "n": D.n}))
    return EXIT_OK


# --------------------------------------------------------------------- run

def cmd_run(args) -> int:
    D = load_instance(args.instance)
    dg = run_linkage(args.method, D)
    os.makedirs(args.out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.instance))[0]
    dpath = os.path.join(args.out_dir, f"{stem}.{args.method}.dendrogram.json")
    with open(dpath, "w") as fh:
        json.dump(dg.to_json(), fh)
        fh.write("\n")
    out = {"instance": args.instance, "method": args.method,
           "dendrogram": dpath, "merges": len(dg.merges)}
    if args.k is not None:
        C = extract_clustering(dg, args.k)
        cpath = os.path.join(args.out_dir,
                             f"{stem}.{args.method}.k{args.k}.clustering.json")
        with open(cpath, "w") as fh:
            json.dump(C.to_json(), fh)
            fh.write("\n")
        out["k"] = args.k
        out["clustering"] = cpath
        out["scores"] = _achieved(dg, D, args.k)
    print(json.dumps(out))
    return EXIT_OK


# ----------------------------------------------------------------- certify

def _certify_one(D: DistanceMatrix, method: str, k: int, target_arg: str,
                 n_max: int, instance_info: dict):
    """Build the report plus trace objects for one certify cell."""
    dg = run_linkage(method, D)
    achieved = _achieved(dg, D, k)
    file_target = None
    if target_arg not in ("oracle", "oracle-av", "oracle-dm"):
        file_target = load_target(target_arg, D.n)
        if file_target.k != k:
            raise PreconditionError(
                f"target file has k={file_target.k}, requested k={k}")

    oracle = bounds = ratios = None
    av_target = dm_target = file_target
    if file_target is None:
        res_av = opt_score("avg-diam", D, k, n_max=n_max)
        res_dm = opt_score("max-diam", D, k, n_max=n_max)
        oracle = {"opt_av": res_av.value, "opt_dm": res_dm.value}
        av_target, dm_target = res_av.witness, res_dm.witness
    else:
        oracle = {
            "opt_av": clustering_score("avg-diam", file_target, D),
            "opt_dm": clustering_score("max-diam", file_target, D),
        }
    ak = alpha_k(k) if k >= 2 else None
    bounds = {
        "avg_based": k ** (P_EXP + 1) * oracle["opt_av"],
        "exponent_avg": P_EXP + 1,
        "dm_based": ak.factor * oracle["opt_dm"] if ak else None,
        "exponent_dm": ak.exponent if ak else None,
        "factor_dm": ak.factor if ak else None,
    }
    ratios = {
        "max_diam_vs_opt_dm": (achieved["max-diam"] / oracle["opt_dm"]
                               if oracle["opt_dm"] > 0 else None),
        "max_diam_vs_avg_target": (achieved["max-diam"] / oracle["opt_av"]
                                   if oracle["opt_av"] > 0 else None),
    }

    certificates = None
    traces = {}
    failures: list[dict] = []
    if method == "CL":
        t1 = alg1_trace(D, dg, av_target)
        b1 = alg1_bound(t1, dg, D)
        t2 = alg2_trace(D, dg, dm_target) if k >= 2 else None
        b2 = alg2_bound(t2, dg, D, k) if t2 else None
        p1, f1 = t1.assertion_counts
        certificates = {
            "alg1": {"passed": p1, "failed": f1,
                     "bound_ok": b1.ok, "ok": t1.ok and b1.ok},
        }
        for fail in [*(r.failures for r in t1.records), t1.failures, b1.failures]:
            failures.extend(fail if isinstance(fail, list) else [fail])
        traces["alg1"] = t1
        if t2:
            p2, f2 = t2.assertion_counts
            certificates["alg2"] = {"passed": p2, "failed": f2,
                                    "bound_ok": b2.ok, "ok": t2.ok and b2.ok}
            for r in t2.records:
                failures.extend(r.failures)
            failures.extend(t2.failures)
            failures.extend(b2.failures)
            traces["alg2"] = t2
    elif method in ("AL", "MM") and oracle["opt_av"] > 0:
        key = "max-avg" if method == "AL" else "max-radius"
        if achieved[key] > bounds["avg_based"] * (1 + 1e-9):
            failures.append({"assertion": "method-bound", "method": method,
                             "detail": f"{key} {achieved[key]!r} exceeds "
                                       f"bound {bounds['avg_based']!r}"})

    report = BoundReport(instance=instance_info, method=method, k=k,
                         achieved=achieved, oracle=oracle, bounds=bounds,
                         ratios=ratios, certificates=certificates)
    return report, traces, failures


def cmd_certify(args) -> int:
    D = load_instance(args.instance)
    os.makedirs(args.out_dir, exist_ok=True)
    report, traces, failures = _certify_one(
        D, args.method, args.k, args.target, args.n_max_oracle,
        {"path": args.instance, "n": D.n, "target": args.target},
    )
    stem = os.path.splitext(os.path.basename(args.instance))[0]
    for name, trace in traces.items():
        tpath = os.path.join(args.out_dir,
                             f"{stem}.{args.method}.k{args.k}.{name}_trace.json")
        with open(tpath, "w") as fh:
            json.dump(trace.to_json(), fh)
            fh.write("\n")
    rpath = os.path.join(args.out_dir, f"{stem}.{args.method}.k{args.k}.report.json")
    with open(rpath, "w") as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")
    print(json.dumps(report.to_json(), indent=2))
    if failures:
        raise AssertionFailures(failures)
    return EXIT_OK


# ------------------------------------------------------------------- sweep

def _parse_int_list(text: str) -> list[int]:
    out: list[int] = []
    for tok in text.split():
        if ".." in tok:
            a, b = tok.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return out


def _sweep_cells(cfg: configparser.ConfigParser) -> list[dict]:
    grid = cfg["grid"]
    gens = grid.get("generators", "euclidean").split()
    ns = _parse_int_list(grid.get("ns", "8"))
    dims = _parse_int_list(grid.get("dims", "2"))
    seeds = _parse_int_list(grid.get("seeds", "0"))
    ks = _parse_int_list(grid.get("ks", "2"))
    methods = grid.get("methods", "CL").split()
    for m in methods:
        if m not in METHODS:
            raise PreconditionError(f"unknown method {m!r} in sweep config")
    oracle_on = cfg.getboolean("oracle", "enabled", fallback=False)
    oracle_n_max = cfg.getint("oracle", "n_max", fallback=DEFAULT_N_MAX)
    certs_on = cfg.getboolean("certificates", "enabled", fallback=False)
    if certs_on and not oracle_on:
        raise PreconditionError("certificates.enabled requires oracle.enabled")
    cells = []
    for gen in gens:
        if gen not in ("euclidean", "metric"):
            raise PreconditionError(f"unknown generator {gen!r} in sweep config")
        for n in ns:
            for dim in (dims if gen == "euclidean" else [0]):
                for seed in seeds:
                    for method in methods:
                        for k in ks:
                            if k > n:
                                continue
                            cells.append({
                                "generator": gen, "n": n, "dim": dim,
                                "seed": seed, "method": method, "k": k,
                                "oracle": oracle_on and n <= oracle_n_max,
                                "oracle_n_max": oracle_n_max,
                                "certificates": certs_on and n <= oracle_n_max,
                            })
    cells.sort(key=lambda c: (c["generator"], c["n"], c["dim"], c["seed"],
                              c["method"], c["k"]))
    return cells


def _sweep_cell(cell: dict) -> dict:
    if cell["generator"] == "euclidean":
        D = gen_random_euclidean(cell["n"], cell["dim"], cell["seed"])
    else:
        D = gen_random_metric(cell["n"], cell["seed"])
    method, k = cell["method"], cell["k"]
    dg = run_linkage(method, D)
    achieved = _achieved(dg, D, k)
    row = {
        "generator": cell["generator"], "n": cell["n"],
        "dim": cell["dim"] or "", "seed": cell["seed"],
        "method": method, "k": k,
        "max_diam": achieved["max-diam"], "avg_diam": achieved["avg-diam"],
        "max_avg": achieved["max-avg"], "max_radius": achieved["max-radius"],
        "opt_dm": "", "opt_av": "", "bound_avg_based": "", "bound_dm_based": "",
        "bound_ok": "", "cert_alg1_pass": "", "cert_alg1_fail": "",
        "cert_alg2_pass": "", "cert_alg2_fail": "", "cert_ok": "",
    }
    if not cell["oracle"]:
        return row
    res_av = opt_score("avg-diam", D, k, n_max=cell["oracle_n_max"])
    res_dm = opt_score("max-diam", D, k, n_max=cell["oracle_n_max"])
    row["opt_av"], row["opt_dm"] = res_av.value, res_dm.value
    avg_based = k ** (P_EXP + 1) * res_av.value
    row["bound_avg_based"] = avg_based
    if k >= 2:
        row["bound_dm_based"] = alpha_k(k).factor * res_dm.value
    tol = 1 + 1e-9
    if method == "CL":
        ok = achieved["max-diam"] <= avg_based * tol
        if k >= 2:
            ok = ok and achieved["max-diam"] <= row["bound_dm_based"] * tol
        row["bound_ok"] = ok
    elif method == "AL":
        row["bound_ok"] = achieved["max-avg"] <= avg_based * tol
    elif method == "MM":
        row["bound_ok"] = achieved["max-radius"] <= avg_based * tol
    if cell["certificates"] and method == "CL":
        t1 = alg1_trace(D, dg, res_av.witness)
        b1 = alg1_bound(t1, dg, D)
        p1, f1 = t1.assertion_counts
        row["cert_alg1_pass"], row["cert_alg1_fail"] = p1, f1
        cert_ok = t1.ok and b1.ok
        if k >= 2:
            t2 = alg2_trace(D, dg, res_dm.witness)
            b2 = alg2_bound(t2, dg, D, k)
            p2, f2 = t2.assertion_counts
            row["cert_alg2_pass"], row["cert_alg2_fail"] = p2, f2
            cert_ok = cert_ok and t2.ok and b2.ok
        row["cert_ok"] = cert_ok
    return row


SWEEP_COLUMNS = ["generator", "n", "dim", "seed", "method", "k",
                 "max_diam", "avg_diam", "max_avg", "max_radius",
                 "opt_dm", "opt_av", "bound_avg_based", "bound_dm_based",
                 "bound_ok", "cert_alg1_pass", "cert_alg1_fail",
                 "cert_alg2_pass", "cert_alg2_fail", "cert_ok"]


def cmd_sweep(args) -> int:
    cfg = configparser.ConfigParser()
    if not cfg.read(args.config):
        raise PreconditionError(f"cannot read sweep config {args.config!r}")
    cells = _sweep_cells(cfg)
    if args.workers > 1 and len(cells) > 1:
        with Pool(processes=args.workers) as pool:
            rows = pool.map(_sweep_cell, cells)
    else:
        rows = [_sweep_cell(c) for c in cells]
    os.makedirs(args.out_dir, exist_ok=True)
    csv_name = cfg.get("output", "csv", fallback="sweep.csv")
    path = os.path.join(args.out_dir, csv_name)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: fmt(row[c]) for c in SWEEP_COLUMNS})
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    failures = []
    for row in rows:
        if row["bound_ok"] is False:
            failures.append({"assertion": "method-bound", "cell": {
                c: row[c] for c in ("generator", "n", "dim", "seed", "method", "k")}})
        if row["cert_ok"] is False:
            failures.append({"assertion": "certificates", "cell": {
                c: row[c] for c in ("generator", "n", "dim", "seed", "method", "k")}})
    print(json.dumps({"csv": path, "cells": len(rows),
                      "failures": len(failures)}))
    if failures:
        raise AssertionFailures(failures)
    return EXIT_OK


# ------------------------------------------------------------ inequalities

def _extremes_csv(path: str, batch) -> None:
    rows = [s.to_row() for s in batch.extremes]
    cols: list[str] = []
    for r in rows:
        for c in r:
            if c not in cols:
                cols.append(c)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({c: fmt(r.get(c, "")) for c in cols})


def cmd_inequalities(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    avg = inequality_lab.sample_ineq_avg(args.samples, seed=args.seed)
    two = inequality_lab.sample_ineq_2(args.samples, seed=args.seed + 1)
    sup = inequality_lab.alpha_sup(args.i_max)
    _extremes_csv(os.path.join(args.out_dir, "ineq_avg_extremes.csv"), avg)
    _extremes_csv(os.path.join(args.out_dir, "ineq_2_extremes.csv"), two)
    failures = []
    for batch in (avg, two):
        for s in batch.failures:
            failures.append({"assertion": batch.name, "inputs": s.inputs,
                             "lhs": s.lhs, "rhs": s.rhs, "slack": s.slack})
        frows = [s.to_row() for s in batch.failures]
        if frows:
            fpath = os.path.join(args.out_dir, f"{batch.name}_failures.csv")
            cols = list(frows[0])
            with open(fpath, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
                writer.writeheader()
                for r in frows:
                    writer.writerow({c: fmt(r.get(c, "")) for c in cols})
    if not (sup.argmax == 4 and sup.tail_ok
            and math.isclose(sup.value, inequality_lab.ALPHA_CAP, rel_tol=1e-12)):
        failures.append({"assertion": "alpha-sup",
                         "argmax": sup.argmax, "value": sup.value,
                         "tail_ok": sup.tail_ok})
    print(json.dumps({
        "ineq_avg": {"samples": avg.samples, "failures": len(avg.failures),
                     "min_rel_slack": avg.min_rel_slack},
        "ineq_2": {"samples": two.samples, "failures": len(two.failures),
                   "min_rel_slack": two.min_rel_slack},
        "alpha_sup": {"i_max": sup.i_max, "argmax": sup.argmax,
                      "value": sup.value, "tail_ok": sup.tail_ok},
    }))
    if failures:
        raise AssertionFailures(failures)
    return EXIT_OK


# ------------------------------------------------------------------ oracle

def cmd_oracle(args) -> int:
    D = load_instance(args.instance)
    res = opt_score(args.score, D, args.k, n_max=args.n_max_oracle)
    print(json.dumps({"score": res.score, "k": res.k, "value": res.value,
                      "witness": res.witness.to_json(),
                      "enumerated": res.enumerated}))
    return EXIT_OK


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkcert",
        description="Linkage clustering with replayable guarantee certificates.",
    )
    parser.add_argument("--seed", type=int, default=0, help="global RNG seed")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for sweeps (instance-level)")
    parser.add_argument("--n-max-oracle", type=int, default=DEFAULT_N_MAX,
                        help="size guard for exhaustive oracles")
    parser.add_argument("--out-dir", default=".", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an instance file")
    p.add_argument("kind", choices=["adversary", "euclidean", "metric"])
    p.add_argument("--k", type=int, help="adversary: target block count")
    p.add_argument("--B", type=float, default=100.0, help="adversary: base distance")
    p.add_argument("--eps", type=float, default=1.0, help="adversary: gap")
    p.add_argument("--n", type=int, help="random instance size")
    p.add_argument("--dim", type=int, default=2, help="euclidean dimension")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="run a linkage method on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", required=True, choices=list(METHODS))
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("certify", help="replay certificates and check bounds")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", default="CL", choices=list(METHODS))
    p.add_argument("--target", default="oracle",
                   help="'oracle' (optimal witnesses) or a clustering JSON path")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep", help="grid run driven by an INI config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("inequalities", help="sample the exponent inequalities")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--i-max", type=int, default=1_000_000)
    p.set_defaults(func=cmd_inequalities)

    p = sub.add_parser("oracle", help="exhaustive optimal clustering")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--score", required=True, choices=["max-diam", "avg-diam"])
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "generate" and args.kind == "adversary" and args.k is None:
        parser.error("generate adversary requires --k")
    if args.command == "generate" and args.kind in ("euclidean", "metric") \
            and args.n is None:
        parser.error(f"generate {args.kind} requires --n")
    try:
        return args.func(args)
    except AssertionFailures as exc:
        os.makedirs(args.out_dir, exist_ok=True)
        path = _write_failures(args.out_dir, args.command, exc.failures)
        print(f"assertion failures: {len(exc.failures)} (manifest: {path})",
              file=sys.stderr)
        return EXIT_ASSERTION
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (PreconditionError, StructuralError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

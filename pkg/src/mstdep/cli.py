"""Command-line front end: gen, analyze, reference, bench.

Every command takes an explicit seed (with a fixed default), and the
primary artifacts of gen/analyze/reference are byte-identical across
runs with identical flags. The bench table necessarily contains wall
times and is reproducible in its error columns only.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from ._util import DEFAULT_SEED, available_threads, child_seed
from .approx import METHODS
from .dataset import (Dataset, has_duplicate_values, jitter, load_csv,
                      project_pair, rank_transform)
from .entropy import (ALL_METHODS, EXACT, build_reference, h_star,
                      load_reference, save_reference)
from .mst import mst_prim
from .sensitivity import (format_report_table, pairwise_matrix, rank_inputs,
                          report)
from .synth import (IshigamiParam, ShapeParam, gen_dependent,
                    gen_ishigami_uniform, gen_normal, gen_shape, gen_uniform)


def _write_text(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _write_json(path: str, obj) -> None:
    _write_text(path, json.dumps(obj, indent=1) + "\n")


def _dataset_to_csv(data: Dataset, path: str, delimiter: str = ",") -> None:
    lines = [delimiter.join(data.names)]
    for row in data.values:
        lines.append(delimiter.join(repr(float(v)) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def cmd_gen(args) -> int:
    n, seed = args.n, args.seed
    if args.dist == "uniform":
        data = gen_uniform(n, args.d, seed)
    elif args.dist == "normal":
        data = gen_normal(n, args.rho, seed)
    elif args.dist in ("corner", "line"):
        data = gen_shape(n, ShapeParam(args.A, args.dist), seed)
    elif args.dist == "ishigami-uniform":
        data = gen_ishigami_uniform(n, seed, IshigamiParam(args.a, args.b))
    elif args.dist == "ishigami-dependent":
        data = gen_dependent(n, seed, IshigamiParam(args.a, args.b))
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.dist)
    _dataset_to_csv(data, args.out, args.delimiter)
    print(f"wrote {data.n_points} x {data.n_columns} dataset to {args.out}")
    return 0


def _report_csv(rep: dict) -> str:
    lines = ["set,a,b,h_star_mean,h_star_min,h_star_max,dependent,threshold"]
    for p in rep["pairs"]:
        dep = "" if p["dependent"] is None else str(p["dependent"]).lower()
        thr = "" if p["threshold"] is None else repr(p["threshold"])
        lines.append(
            f"{p['set']},{p['a']},{p['b']},{p['h_star_mean']!r},"
            f"{p['h_star_min']!r},{p['h_star_max']!r},{dep},{thr}"
        )
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    data = load_csv(args.input, delimiter=args.delimiter,
                    has_header=not args.no_header)
    if data.n_columns < 2:
        raise ValueError("analysis needs at least 2 columns")
    had_duplicates = has_duplicate_values(data)
    ranked = rank_transform(data, seed=child_seed(args.seed, "rank"))
    if had_duplicates and args.sigma > 0:
        ranked = jitter(ranked, args.sigma, seed=child_seed(args.seed, "jitter"))

    matrix = pairwise_matrix(ranked, method=args.method, K=args.K, k=args.k,
                             restarts=args.restarts, gamma=args.gamma,
                             seed=args.seed, threads=args.threads)
    if args.output_col is None:
        out_col = data.n_columns - 1
    elif args.output_col in data.names:
        out_col = data.names.index(args.output_col)
    else:
        out_col = int(args.output_col)
    ranking = rank_inputs(matrix, out_col)

    reference = None
    if args.reference:
        reference = load_reference(args.reference)
    rep = report(matrix, ranking, reference, args.eta)
    rep["params"] = {
        "input": str(args.input),
        "method": args.method,
        "K": args.K,
        "k": args.k,
        "eta": args.eta,
        "gamma": args.gamma,
        "seed": args.seed,
        "sigma": args.sigma if had_duplicates else 0.0,
        "output_col": out_col,
    }
    if args.format == "json":
        _write_json(args.out, rep)
    elif args.format == "table":
        _write_text(args.out, format_report_table(rep))
    else:
        _write_text(args.out, _report_csv(rep))
    print(f"wrote report to {args.out}")
    return 0


def cmd_reference(args) -> int:
    ref = build_reference(args.n, args.r, method=args.method, seed=args.seed,
                          K=args.K, threads=args.threads,
                          cache_dir=args.cache_dir)
    save_reference(ref, args.out)
    print(f"wrote reference (N={args.n}, r={args.r}, {args.method}) to {args.out}")
    return 0


def _bench_datasets(family: str, n: int, r: int, seed: int):
    """Rank-transformed point pairs for one bench family.

    uniform: r independent bivariate datasets. dependent: r datasets of
    the polynomially coupled inputs, each contributing all 6 projections
    of (x, y, z, response).
    """
    pairs = []
    if family == "uniform":
        for i in range(r):
            data = gen_uniform(n, 2, child_seed(seed, family, i))
            ranked = rank_transform(data, child_seed(seed, family, i, "rank"))
            pairs.append(project_pair(ranked, 0, 1))
    else:
        cols = [0, 1, 2, 4]  # x, y, z, response
        for i in range(r):
            data = gen_dependent(n, child_seed(seed, family, i))
            ranked = rank_transform(data, child_seed(seed, family, i, "rank"))
            for a in range(len(cols)):
                for b in range(a + 1, len(cols)):
                    pairs.append(project_pair(ranked, cols[a], cols[b]))
    return pairs


def run_bench(n_values, methods, r_uniform: int, r_dependent: int,
              families, seed: int, K: int, exact_cap: int,
              details: list | None = None) -> list[dict]:
    """Error/timing table comparing approximations against the exact MST.

    Runs stay sequential so the timing column reflects single-call cost.
    Pass a list as ``details`` to also collect one row per individual
    run (ready for box/scatter plots of the error distributions).
    """
    rows = []
    for n in n_values:
        if n > exact_cap:
            raise ValueError(
                f"N={n} exceeds the exact-MST cap {exact_cap}; raise --exact-cap"
            )
        for family in families:
            r = r_uniform if family == "uniform" else r_dependent
            pairs = _bench_datasets(family, n, r, seed)
            exact_h = []
            exact_times = []
            for pts in pairs:
                t0 = time.perf_counter()
                tree = mst_prim(pts)
                exact_times.append(time.perf_counter() - t0)
                exact_h.append(np.log(tree.gamma_length / np.sqrt(n)))
            rows.append({
                "family": family, "method": "exact", "n_points": n,
                "runs": len(pairs), "mean_abs_err": 0.0, "max_abs_err": 0.0,
                "mean_seconds": float(np.mean(exact_times)),
            })
            for method in methods:
                if method == EXACT:
                    continue
                errs = []
                times = []
                for idx, pts in enumerate(pairs):
                    t0 = time.perf_counter()
                    est = h_star(pts, method=method, K=K,
                                 seed=child_seed(seed, method, n, idx))
                    times.append(time.perf_counter() - t0)
                    errs.append(abs(est.h_star - exact_h[idx]))
                    if details is not None:
                        details.append({
                            "family": family, "method": method,
                            "n_points": n, "run": idx,
                            "abs_err": errs[-1], "seconds": times[-1],
                        })
                rows.append({
                    "family": family, "method": method, "n_points": n,
                    "runs": len(pairs),
                    "mean_abs_err": float(np.mean(errs)),
                    "max_abs_err": float(np.max(errs)),
                    "mean_seconds": float(np.mean(times)),
                })
    return rows


def cmd_bench(args) -> int:
    families = ["uniform", "dependent"] if args.data == "both" else [args.data]
    methods = args.methods.split(",") if args.methods else list(METHODS)
    for m in methods:
        if m not in ALL_METHODS:
            raise ValueError(f"unknown method {m!r}")
    details = [] if args.details else None
    rows = run_bench(args.n, methods, args.r_uniform, args.r_dependent,
                     families, args.seed, args.K, args.exact_cap,
                     details=details)
    if args.format == "json":
        _write_json(args.out, rows)
    else:
        cols = ["family", "method", "n_points", "runs", "mean_abs_err",
                "max_abs_err", "mean_seconds"]
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(str(row[c]) for c in cols))
        _write_text(args.out, "\n".join(lines) + "\n")
    if details is not None:
        cols = ["family", "method", "n_points", "run", "abs_err", "seconds"]
        lines = [",".join(cols)]
        for row in details:
            lines.append(",".join(str(row[c]) for c in cols))
        _write_text(args.details, "\n".join(lines) + "\n")
        print(f"wrote per-run details ({len(details)} rows) to {args.details}")
    print(f"wrote benchmark table ({len(rows)} rows) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mstdep",
        description="Dependence quantification via spanning-tree entropy",
    )
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="root seed; all randomness derives from it")
    p.add_argument("--threads", type=int, default=available_threads(),
                   help="worker threads for independent jobs")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset as CSV")
    g.add_argument("--dist", required=True,
                   choices=["uniform", "normal", "corner", "line",
                            "ishigami-uniform", "ishigami-dependent"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=2, help="columns (uniform only)")
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--A", type=float, default=0.5, help="excluded area")
    g.add_argument("--a", type=float, default=7.0)
    g.add_argument("--b", type=float, default=0.1)
    g.add_argument("--out", required=True)
    g.add_argument("--delimiter", default=",")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="pairwise dependence report for a CSV")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--method", default="fmst", choices=ALL_METHODS)
    a.add_argument("--K", type=int, default=10, help="subset count")
    a.add_argument("--k", type=int, default=None, help="cluster count")
    a.add_argument("--restarts", type=int, default=10)
    a.add_argument("--gamma", type=float, default=1.0,
                   help="length exponent (exact method only)")
    a.add_argument("--eta", type=float, default=0.05)
    a.add_argument("--reference", default=None,
                   help="reference-level JSON for independence verdicts")
    a.add_argument("--sigma", type=float, default=1e-6,
                   help="jitter scale applied when duplicate values exist")
    a.add_argument("--delimiter", default=",")
    a.add_argument("--no-header", action="store_true")
    a.add_argument("--output-col", default=None,
                   help="output column name or index (default: last)")
    a.add_argument("--format", default="json", choices=["json", "table", "csv"])
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reference", help="calibrate the independence level")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--r", type=int, required=True, help="repetitions (>= 20)")
    r.add_argument("--method", default=EXACT, choices=ALL_METHODS)
    r.add_argument("--K", type=int, default=10)
    r.add_argument("--out", required=True)
    r.add_argument("--cache-dir", default=None)
    r.set_defaults(func=cmd_reference)

    b = sub.add_parser("bench", help="compare approximations to the exact MST")
    b.add_argument("--n", type=int, nargs="+", required=True)
    b.add_argument("--data", default="both",
                   choices=["uniform", "dependent", "both"])
    b.add_argument("--r-uniform", type=int, default=50,
                   help="uniform datasets per N")
    b.add_argument("--r-dependent", type=int, default=10,
                   help="dependent datasets per N (6 projections each)")
    b.add_argument("--methods", default=None,
                   help="comma-separated subset (default: all approximations)")
    b.add_argument("--K", type=int, default=10)
    b.add_argument("--exact-cap", type=int, default=20_000)
    b.add_argument("--out", required=True)
    b.add_argument("--details", default=None,
                   help="also write one CSV row per individual run")
    b.add_argument("--format", default="csv", choices=["csv", "json"])
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

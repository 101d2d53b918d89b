"""Command-line front end: ``ttrs solve|gen|bench|oracle``."""

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .exceptions import GenError, ProblemFileError, TTRSError
from .gen import GenSpec, generate, oracle_2d, parse_class
from .hybrid import HybridConfig, Source, Status, collect_lngm_candidates, solve
from .io import ProblemFile, read_problem, write_problem

log = logging.getLogger("ttrs")

THREADS_ENV = "TTRS_THREADS"
PROBLEM_SUFFIX = ".ttrs"

BENCH_COLUMNS = [
    "file",
    "n",
    "den",
    "status",
    "cpu",
    "kkt",
    "obj",
    "l1a",
    "l4",
    "opt_2active",
    "opt_source",
    "opt_l1a",
    "opt_l4",
]

# preset suggested for each generated class
CLASS_PRESETS = {
    "LngmEngineered": "class2",
    "LngmEngineeredEllipsoid": "class2",
    "NoLngmMultiplicity": "class3",
    "NoLngmOrthogonal": "class3",
    "Homogeneous": "class4",
    "Example1": "class2",
    "Example2": "class2",
}

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

_CONFIG_KEYS = ("tol", "maxiter", "preset", "rho", "tau", "lam_scale", "beta1", "beta2", "polish", "restarts")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _config_file(args):
    path = getattr(args, "config", None)
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def build_config(args, meta=None):
    """Merge settings: command-line flags, then the config file, then the file's preset tag, then defaults."""
    values = {}
    if meta and meta.get("preset"):
        values["preset"] = meta["preset"]
    cfg_file = _config_file(args)
    unknown = set(cfg_file) - set(_CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    values.update(cfg_file)
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return HybridConfig(**values)


def _load(path, convention):
    pf = read_problem(path)
    if convention is None or convention == pf.convention:
        return pf
    # the flag overrides the header: rescale A from the header's reading to the flag's
    scale = 2.0 if convention == "nohalf" else 0.5
    p = pf.problem
    return ProblemFile(type(p)(scale * p.A, p.a, p.B, p.c, p.delta1, p.delta2), pf.meta, convention)


def record_from_report(name, pf, rep, cpu):
    """One benchmark row from a finished solve."""
    p = pf.problem
    row = dict.fromkeys(BENCH_COLUMNS, "")
    row["file"] = name
    row["n"] = p.n
    row["den"] = pf.meta.get("density", f"{np.count_nonzero(p.A) / p.A.size:.4g}")
    row["cpu"] = cpu
    row["status"] = rep.status.value
    if rep.status is Status.INFEASIBLE:
        return row
    x = rep.best.x
    row["kkt"] = rep.kkt.stationarity_residual
    row["obj"] = rep.best.objective
    if rep.lngm_reasons:
        lngms = {e.source: e.x for e in rep.pool if e.source in (Source.LNGM1, Source.LNGM4)}
    else:
        # early exit skipped the local minimizers; the table still counts them
        pool, _ = collect_lngm_candidates(p)
        lngms = {e.source: e.x for e in pool}
    row["l1a"] = int(Source.LNGM1 in lngms)
    row["l4"] = int(Source.LNGM4 in lngms)
    act1 = abs(p.g1(x)) <= 1e-6 * max(1.0, p.delta1**2)
    act2 = abs(p.g2(x)) <= 1e-6 * max(1.0, p.delta2**2)
    row["opt_2active"] = int(act1 and act2)
    row["opt_source"] = rep.best.source.value
    tol = 1e-6 * (1.0 + np.linalg.norm(x))
    for key, src in (("opt_l1a", Source.LNGM1), ("opt_l4", Source.LNGM4)):
        row[key] = int(src in lngms and np.linalg.norm(lngms[src] - x) <= tol)
    return row


def bench_record(path, base, preset_from_file=True):
    """Solve one file with settings ``base`` (a dict) and return its benchmark row."""
    name = Path(path).name
    try:
        pf = read_problem(path)
        settings = dict(base)
        if preset_from_file and "preset" in pf.meta:
            settings["preset"] = pf.meta["preset"]
        t0 = time.process_time()
        rep = solve(pf.problem, HybridConfig(**settings))
        cpu = time.process_time() - t0
    except (OSError, TTRSError, ValueError) as exc:
        row = dict.fromkeys(BENCH_COLUMNS, "")
        row["file"] = name
        row["status"] = f"Error: {exc}"
        return row
    return record_from_report(name, pf, rep, cpu)


def summarize(rows):
    """Per-(n, den) averages over solved rows and tallies of the count columns."""
    groups = {}
    for r in rows:
        if r["n"] == "":
            continue
        groups.setdefault((r["n"], r["den"]), []).append(r)
    out = []
    for (n, den), rs in sorted(groups.items(), key=lambda kv: (int(kv[0][0]), str(kv[0][1]))):
        solved = [r for r in rs if r["status"] in (s.value for s in (Status.GLOBAL_CERTIFIED, Status.STATIONARY_POINT, Status.MAX_ITER))]
        s = dict.fromkeys(BENCH_COLUMNS, "")
        s["file"] = "SUMMARY"
        s["n"] = n
        s["den"] = den
        s["status"] = f"solved {len(solved)}/{len(rs)}"
        if solved:
            for k in ("cpu", "kkt", "obj"):
                s[k] = float(np.mean([float(r[k]) for r in solved]))
            for k in ("l1a", "l4", "opt_2active", "opt_l1a", "opt_l4"):
                s[k] = int(sum(int(r[k]) for r in solved))
        out.append(s)
    return out


def _threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def cmd_solve(args):
    pf = _load(args.path, args.convention)
    cfg = build_config(args, pf.meta)
    t0 = time.process_time()
    rep = solve(pf.problem, cfg)
    cpu = time.process_time() - t0
    if args.format == "csv":
        w = csv.DictWriter(sys.stdout, fieldnames=BENCH_COLUMNS)
        w.writeheader()
        w.writerow(record_from_report(Path(args.path).name, pf, rep, cpu))
    else:
        json.dump(rep.to_dict(), sys.stdout, default=_json_default, indent=2)
        sys.stdout.write("\n")
    return EXIT_INFEASIBLE if rep.status is Status.INFEASIBLE else EXIT_OK


def _cfg_dict(cfg):
    return {k: getattr(cfg, k) for k in _CONFIG_KEYS}


def _density_tag(d):
    return f"{d:g}"


def cmd_gen(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    klass = parse_class(args.klass)
    failures = 0
    for i in range(args.count):
        seed = args.seed + i
        stem = f"{args.klass}_n{args.n}_d{_density_tag(args.density)}_s{seed}"
        try:
            inst = generate(GenSpec(args.n, args.density, klass, seed))
        except GenError as exc:
            log.error("%s: %s", stem, exc)
            failures += 1
            continue
        meta = {"class": klass.value, "density": _density_tag(args.density), "seed": seed,
                "preset": CLASS_PRESETS[klass.value]}
        write_problem(outdir / (stem + PROBLEM_SUFFIX), inst.problem, meta)
        side = {"spec": {"n": args.n, "density": args.density, "class": klass.value, "seed": seed},
                "annotations": inst.info}
        with open(outdir / (stem + ".json"), "w", encoding="utf-8") as fh:
            json.dump(side, fh, default=_json_default, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_ERROR if failures == args.count and args.count > 0 else EXIT_OK


def cmd_bench(args):
    files = sorted(Path(args.dir).glob("*" + PROBLEM_SUFFIX))
    base = _cfg_dict(build_config(args))
    # a per-file preset tag applies unless a flag or the config file chose one
    from_file = args.preset is None and "preset" not in _config_file(args)
    workers = _threads()
    n = len(files)
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(bench_record, files, [base] * n, [from_file] * n))
    else:
        rows = [bench_record(f, base, from_file) for f in files]
    rows += summarize(rows)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        if args.format == "json":
            json.dump(rows, out, default=_json_default, indent=2)
            out.write("\n")
        else:
            w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
            w.writeheader()
            w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_oracle(args):
    pf = _load(args.path, args.convention)
    x, f = oracle_2d(pf.problem, grid=args.grid)
    json.dump({"x": x.tolist(), "objective": f}, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _add_solver_flags(sp):
    sp.add_argument("--tol", type=float, default=None, help="ADMM primal residual tolerance (default 1e-7)")
    sp.add_argument("--maxiter", type=int, default=None, help="ADMM iteration cap (default 1000)")
    sp.add_argument("--preset", choices=["class2", "class3", "class4"], default=None)
    sp.add_argument("--rho", type=float, default=None, help="ADMM penalty; overrides the preset")
    sp.add_argument("--tau", type=float, default=None, help="dual step factor in (0, 1)")
    sp.add_argument("--config", default=None, help="JSON file with solver settings")


def make_parser():
    ap = argparse.ArgumentParser(prog="ttrs", description="Two-ellipsoid trust-region subproblem solver.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve a problem file and print a JSON report")
    sp.add_argument("path")
    _add_solver_flags(sp)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--convention", choices=["half", "nohalf"], default=None,
                    help="treat A as the matrix of x'Ax (nohalf) regardless of the file header")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("gen", help="write random instances")
    sp.add_argument("klass", metavar="class", help="class2, class2e, class3a, class3b, class4, example1, example2")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--outdir", default=".")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="solve every problem file in a directory and tabulate")
    sp.add_argument("dir")
    _add_solver_flags(sp)
    sp.add_argument("--out", default=None, help="output file (default: standard output)")
    sp.add_argument("--format", choices=["json", "csv"], default="csv")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("oracle", help="brute-force minimum of a 2-D problem")
    sp.add_argument("path")
    sp.add_argument("--grid", type=int, default=2000)
    sp.add_argument("--convention", choices=["half", "nohalf"], default=None)
    sp.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(f"error: {getattr(args, 'path', '')}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (TTRSError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark command line: generate datasets, cluster them, sweep a
parameter, or ingest CSV point data.

Exit codes: 0 success, 1 usage error, 2 I/O or input-file error,
3 internal invariant violation.

Metric rows are CSV with a versioned schema column.  t1_ms is wall time
per iteration (index build time is reported separately in build_ms);
n_ed and n_cand are ED evaluations and pruner candidate pairs per object
per iteration.  The *_share_by_counters columns split total work by the
two counters as a rough attribution of where time went.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, fields

from . import data as dio
from .engine import AssignStrategy, run
from .model import Params, validate_dataset

SCHEMA = "ukmeans-metrics-1"
ALGO_CHOICES = ("baseline", "mmbb", "vcp", "rmm-vcp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class MetricsRow:
    """One benchmark measurement, one CSV row."""

    schema: str
    algo: str
    n: int
    k: int
    l: float
    s: int
    d: int
    b: int
    seed: object            # int, or "mean" for aggregated rows
    iterations: int
    t1_ms: float
    build_ms: float
    n_ed: float
    n_cand: float
    objective: float
    ed_share_by_counters: float
    prune_share_by_counters: float

    @classmethod
    def header(cls) -> list:
        return [f.name for f in fields(cls)]

    def values(self) -> list:
        return [getattr(self, f.name) for f in fields(type(self))]


def metrics_row(algo: str, params: Params, seed, result, n_objects: int) -> MetricsRow:
    rec = dio.run_result_record(result, n_objects)
    work = result.counters.ed_evals + result.counters.cand_pairs
    ed_share = result.counters.ed_evals / work if work else 0.0
    return MetricsRow(
        schema=SCHEMA, algo=algo, n=n_objects, k=params.k, l=params.l,
        s=params.s, d=params.d, b=params.b, seed=seed,
        iterations=rec["iterations"], t1_ms=rec["t1_ms"], build_ms=rec["build_ms"],
        n_ed=rec["n_ed"], n_cand=rec["n_cand"], objective=rec["objective"],
        ed_share_by_counters=ed_share, prune_share_by_counters=1.0 - ed_share if work else 0.0)


def write_metrics(rows, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(MetricsRow.header())
    for row in rows:
        writer.writerow(row.values())


def _add_common(parser) -> None:
    parser.add_argument("-n", type=int, default=Params.n, help="object count")
    parser.add_argument("-k", type=int, default=Params.k, help="cluster count")
    parser.add_argument("-l", type=float, default=Params.l, help="max rectangle side length")
    parser.add_argument("-s", type=int, default=Params.s, help="pdf cells per object")
    parser.add_argument("-d", type=int, default=Params.d, help="dimensionality")
    parser.add_argument("-b", type=int, default=Params.b, help="index block size in bytes")
    parser.add_argument("--seed", type=int, default=Params.seed, help="random seed")
    parser.add_argument("--max-iters", type=int, default=Params.max_iters)
    parser.add_argument("--threads", type=int, default=1)


def _check_common(args) -> None:
    if args.n < 1:
        raise UsageError(f"-n must be positive, got {args.n}")
    if args.k < 1:
        raise UsageError(f"-k must be positive, got {args.k}")
    if args.l <= 0:
        raise UsageError(f"-l must be positive, got {args.l}")
    if args.s < 1:
        raise UsageError(f"-s must be at least 1, got {args.s}")
    if args.d < 1:
        raise UsageError(f"-d must be at least 1, got {args.d}")
    if args.b < 1:
        raise UsageError(f"-b must be positive, got {args.b}")
    if args.seed < 0:
        raise UsageError(f"--seed must be nonnegative, got {args.seed}")
    if args.max_iters < 1:
        raise UsageError(f"--max-iters must be positive, got {args.max_iters}")
    if args.threads < 1:
        raise UsageError(f"--threads must be positive, got {args.threads}")


def _params(args, n=None) -> Params:
    return Params(n=n if n is not None else args.n, k=args.k, l=args.l, s=args.s,
                  d=args.d, b=args.b, seed=args.seed, max_iters=args.max_iters)


def cmd_generate(args) -> int:
    _check_common(args)
    objects = dio.generate(dio.GenSpec(_params(args)))
    dio.save_dataset(objects, args.out)
    print(f"wrote {len(objects)} objects to {args.out}")
    return 0


def _load_for_clustering(path):
    objects = dio.load_dataset(path)
    problems = validate_dataset(objects)
    if problems:
        for p in problems[:20]:
            print(f"invalid dataset: {p}", file=sys.stderr)
        raise dio.DatasetFormatError(f"{len(problems)} dataset invariant violations", 0)
    if not objects:
        raise dio.DatasetFormatError("dataset holds no objects", 0)
    return objects


def cmd_cluster(args) -> int:
    _check_common(args)
    objects = _load_for_clustering(args.dataset)
    m = objects[0].mbr.dim
    s = objects[0].pdf.masses.shape[0]
    params = Params(n=len(objects), k=args.k, l=args.l, s=s, d=m, b=args.b,
                    seed=args.seed, max_iters=args.max_iters)
    algo = args.algo
    result = run(objects, params, AssignStrategy(algo), threads=args.threads)
    out = args.out or (str(args.dataset) + ".assign.csv")
    with open(out, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["object_id", "cluster"])
        for oid in sorted(result.final_state.assignment):
            writer.writerow([oid, result.final_state.assignment[oid]])
    write_metrics([metrics_row(algo, params, args.seed, result, len(objects))],
                  sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    _check_common(args)
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values must be a comma list of integers, got {args.values!r}")
    if not values:
        raise UsageError("--values is empty")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGO_CHOICES:
            raise UsageError(f"unknown algo {a!r}; choose from {ALGO_CHOICES}")
    if args.repeat < 1:
        raise UsageError("--repeat must be positive")
    if args.vary == "b" and "rmm-vcp" not in algos:
        print("notice: sweeping the block size only affects tree-based "
              "algorithms; none is selected", file=sys.stderr)

    rows = []
    for value in values:
        for rep in range(args.repeat):
            seed = args.seed + rep
            p = _params(args)
            p = Params(n=value if args.vary == "n" else p.n,
                       k=value if args.vary == "k" else p.k,
                       l=p.l, s=p.s, d=p.d,
                       b=value if args.vary == "b" else p.b,
                       seed=seed, max_iters=p.max_iters)
            objects = dio.generate(dio.GenSpec(p))
            for algo in algos:
                result = run(objects, p, AssignStrategy(algo), threads=args.threads)
                rows.append(metrics_row(algo, p, seed, result, len(objects)))

    # mean rows per (algo, value), raw rows retained above them
    summary = []
    for value in values:
        for algo in algos:
            group = [r for r in rows
                     if r.algo == algo and getattr(r, args.vary) == value]
            mean = lambda xs: sum(xs) / len(xs)
            proto = group[0]
            summary.append(MetricsRow(
                schema=SCHEMA, algo=algo, n=proto.n, k=proto.k, l=proto.l,
                s=proto.s, d=proto.d, b=proto.b, seed="mean",
                iterations=mean([r.iterations for r in group]),
                t1_ms=mean([r.t1_ms for r in group]),
                build_ms=mean([r.build_ms for r in group]),
                n_ed=mean([r.n_ed for r in group]),
                n_cand=mean([r.n_cand for r in group]),
                objective=mean([r.objective for r in group]),
                ed_share_by_counters=mean([r.ed_share_by_counters for r in group]),
                prune_share_by_counters=mean([r.prune_share_by_counters for r in group])))

    if args.out:
        with open(args.out, "w") as fh:
            write_metrics(rows + summary, fh)
        print(f"wrote {len(rows)} raw + {len(summary)} mean rows to {args.out}")
    else:
        write_metrics(rows + summary, sys.stdout)
    return 0


def cmd_ingest(args) -> int:
    if args.l <= 0:
        raise UsageError(f"-l must be positive, got {args.l}")
    if args.s < 1:
        raise UsageError(f"-s must be at least 1, got {args.s}")
    if args.seed < 0:
        raise UsageError(f"--seed must be nonnegative, got {args.seed}")
    try:
        columns = [int(c) for c in args.columns.split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"--columns must be a comma list of integers, got {args.columns!r}")
    if not columns:
        raise UsageError("--columns is empty")
    bounds = None
    if args.bounds:
        try:
            pairs = [tuple(float(x) for x in part.split(":")) for part in args.bounds.split(",")]
            if any(len(p) != 2 for p in pairs) or len(pairs) != len(columns):
                raise ValueError
        except ValueError:
            raise UsageError("--bounds must look like min:max,min:max matching --columns")
        bounds = ([p[0] for p in pairs], [p[1] for p in pairs])
    points = dio.read_points_csv(args.input, columns, args.delimiter, args.skip_header)
    scaled, _ = dio.rescale_points(points, bounds)
    objects = dio.uncertainize(scaled, args.l, args.s, args.seed)
    dio.save_dataset(objects, args.out)
    print(f"ingested {len(objects)} points into {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="ukmeans",
                     description="benchmark harness for uncertain-object clustering")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="synthesize a dataset file")
    _add_common(g)
    g.add_argument("--out", default="dataset.txt", help="dataset path to write")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cluster", help="cluster one dataset file")
    c.add_argument("dataset", help="dataset file from generate/ingest")
    _add_common(c)
    c.add_argument("--algo", choices=ALGO_CHOICES, default="rmm-vcp")
    c.add_argument("--out", default=None, help="assignment CSV path")
    c.set_defaults(func=cmd_cluster)

    w = sub.add_parser("sweep", help="vary one parameter and benchmark")
    _add_common(w)
    w.add_argument("--vary", choices=("n", "k", "b"), required=True)
    w.add_argument("--values", required=True, help="comma list, e.g. 1000,2000,4000")
    w.add_argument("--algos", default="mmbb,vcp,rmm-vcp")
    w.add_argument("--repeat", type=int, default=3, help="seeds per point")
    w.add_argument("--out", default=None, help="CSV path (default stdout)")
    w.set_defaults(func=cmd_sweep)

    i = sub.add_parser("ingest", help="turn CSV points into a dataset file")
    i.add_argument("--input", required=True, help="CSV file of points")
    i.add_argument("--columns", default="0,1", help="column indices to use")
    i.add_argument("--delimiter", default=",")
    i.add_argument("--skip-header", action="store_true")
    i.add_argument("--bounds", default=None,
                   help="source extent min:max,min:max for reproducible rescaling")
    i.add_argument("-l", type=float, default=Params.l)
    i.add_argument("-s", type=int, default=Params.s)
    i.add_argument("--seed", type=int, default=Params.seed)
    i.add_argument("--out", default="dataset.txt")
    i.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (dio.DatasetFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:            # noqa: BLE001 - map to exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

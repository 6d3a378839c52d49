"""Command line interface: ``spdsim <command> [options]``.

Exit status is 0 on success, 2 for usage errors and malformed input files,
and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .errors import ConsistencyError, DomainError, NumericalError, ParameterError, SpdSimError
from .graph import erdos_renyi, read_edgelist, write_edgelist
from .harness import (
    DESK_P,
    TABLE1_D,
    TABLE1_P,
    TIMING_HEADER,
    TIMING_P,
    SweepSpec,
    derive_seed,
    load_sweep_config,
    run_sweep,
    run_timing,
    sample_gaussian,
)
from .linalg import read_matrix
from .matgen import Distribution, Method, SimConfig, simulate, write_result
from .metrics import matrix_stats

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

STATS_HEADER = ("p", "d_nominal", "r_max", "cond", "min_eig", "pattern_ok")


class UsageError(SpdSimError):
    pass


def _csv_list(cast):
    def parse(text):
        try:
            return [cast(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def _common(parser, out_help="output path"):
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    parser.add_argument("--zero-tol", type=float, default=None, help="relative structural-zero tolerance (default 1e-8)")
    parser.add_argument("--out", "-o", default=None, help=out_help)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spdsim", description="Simulate SPD matrices constrained by undirected graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen-graph", help="sample an Erdős–Rényi graph to an edge-list file")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--d", type=float, required=True)
    _common(sp, "edge-list file (default stdout)")

    sp = sub.add_parser("simulate", help="generate one SPD matrix")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list file")
    src.add_argument("--p", type=int, help="sample an Erdős–Rényi graph with this many vertices")
    sp.add_argument("--d", type=float, help="edge probability, with --p")
    sp.add_argument("--method", default="po", help="dd, eigshift, condshift or po (default po)")
    sp.add_argument("--entry-dist", default="uniform:0:1", help="initial entries, 'kind:a:b'")
    sp.add_argument("--epsilon", type=float, default=1.0, help="eigenvalue floor for eigshift")
    sp.add_argument("--kappa0", type=float, default=10.0, help="target condition number for condshift")
    _common(sp, "Matrix Market output (default spd.mtx); a .json manifest is written alongside")

    sp = sub.add_parser("sweep", help="run a (p, d) sweep to CSV")
    sp.add_argument("--config", help="TOML file; flags override its values")
    sp.add_argument("--p-values", type=_csv_list(int))
    sp.add_argument("--d-values", type=_csv_list(str))
    sp.add_argument("--full-grid", action="store_true", help="use every p of the original grid (up to 1000)")
    sp.add_argument("--graphs", type=int, help="graphs per cell (default 10)")
    sp.add_argument("--matrices", type=int, help="matrices per graph (default 10)")
    sp.add_argument("--methods", type=_csv_list(str))
    sp.add_argument("--entry-dist")
    sp.add_argument("--time", action="store_true", help="record gen_time (output is then not reproducible)")
    sp.add_argument("--resume", action="store_true", help="keep complete cells of an existing output file")
    sp.add_argument("--jobs", type=int, default=1)
    _common(sp, "CSV output (default sweep.csv)")

    sp = sub.add_parser("bench", help="time generation per (p, d) cell")
    sp.add_argument("--p-values", type=_csv_list(int), default=list(TIMING_P))
    sp.add_argument("--d-values", type=_csv_list(str), default=list(TABLE1_D))
    sp.add_argument("--n", type=int, default=10, help="matrices per cell (default 10)")
    sp.add_argument("--methods", type=_csv_list(str), default=["dd", "po"])
    _common(sp, "CSV output (default stdout)")

    sp = sub.add_parser("stats", help="statistics of a matrix file as one CSV row")
    sp.add_argument("matrix", help="Matrix Market file")
    sp.add_argument("--graph", help="edge-list file (default: taken from the matrix manifest)")
    sp.add_argument("--d", type=float, help="nominal edge probability to report")
    _common(sp, "CSV output (default stdout)")

    sp = sub.add_parser("sample", help="draw Gaussian data from a matrix file")
    sp.add_argument("matrix", help="Matrix Market file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--concentration", action="store_true", help="treat the matrix as a concentration (inverse covariance) matrix")
    _common(sp, "CSV output (default stdout)")
    return ap


# -- commands ----------------------------------------------------------------


def _seed(args):
    return 0 if args.seed is None else args.seed


def _zero_tol(args):
    return 1e-8 if args.zero_tol is None else args.zero_tol


def _open_text_out(path):
    if path is None or path == "-":
        return _NoClose(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        self.fh.flush()


def cmd_gen_graph(args):
    g = erdos_renyi(args.p, args.d, _seed(args))
    with _open_text_out(args.out) as fh:
        write_edgelist(g, fh)


def cmd_simulate(args):
    seed = _seed(args)
    out = args.out or "spd.mtx"
    if args.graph:
        g = read_edgelist(args.graph)
        graph_path = args.graph
        d = None
    else:
        if args.d is None:
            raise UsageError("--p requires --d")
        d = args.d
        g = erdos_renyi(args.p, args.d, derive_seed(seed, "graph"))
        graph_path = os.path.splitext(out)[0] + ".edges"
        write_edgelist(g, graph_path)
    cfg = SimConfig(
        method=Method.parse(args.method),
        entry_dist=Distribution.parse(args.entry_dist),
        epsilon=args.epsilon,
        kappa0=args.kappa0,
        seed=derive_seed(seed, "matrix"),
        zero_tol=_zero_tol(args),
    )
    result = simulate(g, cfg)
    write_result(result, out, graph_path=os.path.abspath(graph_path), extra={"d": d, "cli_seed": seed})


def cmd_sweep(args):
    kwargs = load_sweep_config(args.config) if args.config else {}
    if args.full_grid:
        kwargs["p_values"] = TABLE1_P
    overrides = {
        "p_values": args.p_values,
        "d_values": args.d_values,
        "graphs_per_cell": args.graphs,
        "matrices_per_graph": args.matrices,
        "methods": args.methods,
        "base_seed": args.seed,
        "zero_tol": args.zero_tol,
        "output_path": args.out,
        "entry_dist": Distribution.parse(args.entry_dist) if args.entry_dist else None,
        "measure_time": True if args.time else None,
    }
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    kwargs.setdefault("p_values", DESK_P)
    kwargs.setdefault("output_path", "sweep.csv")
    spec = SweepSpec(**kwargs)
    records = run_sweep(spec, resume=args.resume, jobs=args.jobs)
    failed = sum(r.failed for r in records)
    if failed:
        print(f"spdsim: {failed} of {len(records)} matrices failed validation", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


def cmd_bench(args):
    recs = run_timing(args.p_values, args.d_values, args.n, [Method.parse(m) for m in args.methods], _seed(args))
    with _open_text_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_HEADER)
        w.writerows(r.to_row() for r in recs)


def _manifest(matrix_path):
    path = os.fspath(matrix_path) + ".json"
    if not os.path.exists(path):
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: {exc}") from None


def cmd_stats(args):
    m = read_matrix(args.matrix)
    meta = _manifest(args.matrix)
    graph_path = args.graph or meta.get("graph")
    if not graph_path:
        raise UsageError("no graph given and none recorded in the matrix manifest")
    g = read_edgelist(graph_path)
    if g.p != m.shape[0]:
        raise UsageError(f"graph has p={g.p} but matrix is {m.shape[0]}x{m.shape[0]}")
    d = args.d if args.d is not None else meta.get("d")
    zero_tol = args.zero_tol if args.zero_tol is not None else meta.get("zero_tol", 1e-8)
    st = matrix_stats(m, g, zero_tol, d, residual=meta.get("pattern_residual", 0.0))
    with _open_text_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STATS_HEADER)
        w.writerow(
            [st.p, "" if d is None else repr(float(d)), repr(st.r_max), repr(st.cond), repr(st.min_eig),
             "true" if st.pattern_ok else "false"]
        )


def cmd_sample(args):
    m = read_matrix(args.matrix)
    x = sample_gaussian(m, args.n, as_concentration=args.concentration, seed=_seed(args))
    with _open_text_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"X{i}" for i in range(1, m.shape[0] + 1)])
        w.writerows([repr(v) for v in row] for row in x.tolist())


COMMANDS = {
    "gen-graph": cmd_gen_graph,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "stats": cmd_stats,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args) or 0
    except (NumericalError, DomainError, ConsistencyError, np.linalg.LinAlgError) as exc:
        print(f"spdsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ParameterError, UsageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"spdsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"spdsim: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface: ``gen``, ``run``, ``bench`` and ``rates``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import BenchError, QSDError
from .estimators import Method
from .harness import ALL_METHODS, BENCH_MAX_ITER, BENCH_TOL, BenchConfig, run_bench, run_single, write_outputs
from .model import (
    SbmParams,
    generate_plsbm,
    giant_component,
    load_edge_list,
    read_graph,
    write_graph,
)
from .theory import rate_report

logger = logging.getLogger("qsdcluster")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _methods(text):
    try:
        return tuple(Method.parse(m) for m in text.split(",") if m.strip())
    except QSDError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_sbm_args(p, required=True):
    p.add_argument("--n", type=int, required=required)
    p.add_argument("--a", type=float, required=required)
    p.add_argument("--b", type=float, required=required)
    p.add_argument("--delta", type=float, required=required)
    p.add_argument("--regime", default="connected" if required else None,
                   choices=["connected", "bounded", "bounded-degree"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qsdcluster", description="Semi-supervised community detection with quasi-stationary distributions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="sample a PL-SBM and write edge list, labels and revealed ids")
    _add_sbm_args(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)

    r = sub.add_parser("run", help="classify the unrevealed nodes of a graph file")
    r.add_argument("--graph", type=Path, required=True)
    r.add_argument("--labels", type=Path, help="defaults to GRAPH.labels")
    r.add_argument("--revealed", type=Path, help="defaults to GRAPH.revealed")
    r.add_argument("--reveal", type=float, metavar="FRACTION",
                   help="sample this fraction of each community as revealed instead of reading GRAPH.revealed")
    r.add_argument("--seed", type=int, default=0, help="seed for --reveal sampling")
    r.add_argument("--delta", type=float, help="revealed fraction used by the mixed method's constants")
    r.add_argument("--a", type=float, help="within-community rate (enables the mixed method)")
    r.add_argument("--b", type=float, help="across-community rate (enables the mixed method)")
    r.add_argument("--regime", default="connected", choices=["connected", "bounded", "bounded-degree"])
    r.add_argument("--methods", type=_methods, default=None, help="comma list of qsd,vote,mixed,spectral")
    r.add_argument("--tol", type=float, default=BENCH_TOL)
    r.add_argument("--max-iter", type=int, default=BENCH_MAX_ITER)
    r.add_argument("--out", type=Path, help="write JSON here instead of stdout")

    b = sub.add_parser("bench", help="Monte Carlo benchmark over PL-SBM trials")
    b.add_argument("--config", type=Path, help="JSON file with BenchConfig fields")
    _add_sbm_args(b, required=False)
    b.add_argument("--trials", type=int)
    b.add_argument("--seed", type=int, dest="base_seed")
    b.add_argument("--methods", type=_methods)
    b.add_argument("--workers", type=int, help="overrides QSD_WORKERS")
    b.add_argument("--tol", type=float)
    b.add_argument("--max-iter", type=int)
    b.add_argument("--out", type=Path, help="CSV path; the JSON summary goes next to it (default bench.csv)")
    b.add_argument("--no-timestamp", action="store_true", help="omit the timestamp comment line")

    t = sub.add_parser("rates", help="theoretical constants and error exponents")
    t.add_argument("--a", type=float, required=True)
    t.add_argument("--b", type=float, required=True)
    t.add_argument("--delta", type=float, required=True)
    return parser


def _emit(obj, out: Path | None):
    text = json.dumps(obj, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_gen(args):
    params = SbmParams(args.n, args.a, args.b, args.delta, args.regime)
    g = generate_plsbm(params, args.seed)
    for path in write_graph(g, args.out):
        print(path)


def cmd_run(args):
    if args.reveal is not None:
        if args.revealed is not None:
            raise UsageError("--reveal and --revealed are mutually exclusive")
        labels = args.labels or Path(str(args.graph) + ".labels")
        g = load_edge_list(args.graph, labels, args.reveal, args.seed)
    else:
        g = read_graph(args.graph, args.labels, args.revealed)
    params = None
    if args.a is not None and args.b is not None:
        if args.delta is None and args.reveal is None:
            raise UsageError("the mixed method needs --delta together with --a and --b")
        delta = args.delta if args.delta is not None else args.reveal
        # SbmParams wants an even n; an odd external graph is rounded up
        params = SbmParams(g.n + g.n % 2, args.a, args.b, delta, args.regime)
    methods = args.methods
    if methods is None:
        methods = ALL_METHODS if params is not None else (Method.QSD, Method.SIMPLE_VOTE, Method.SPECTRAL)
    preds = run_single(g, methods, params, args.tol, args.max_iter)
    _emit({
        "graph": str(args.graph),
        "n": g.n,
        "giant_component_size": giant_component(g).size,
        "predictions": [p.to_json() for p in preds.values()],
    }, args.out)


def cmd_bench(args):
    if args.config is not None:
        cfg = BenchConfig.from_json(args.config).to_dict()
    else:
        missing = [k for k in ("n", "a", "b", "delta") if getattr(args, k) is None]
        if missing:
            raise UsageError(f"bench needs --config or --{', --'.join(missing)}")
        cfg = {"params": {}}
    params = cfg["params"]
    for k in ("n", "a", "b", "delta"):
        if getattr(args, k) is not None:
            params[k] = getattr(args, k)
    if args.regime is not None:
        params["regime"] = args.regime
    for k in ("trials", "base_seed", "methods", "workers", "tol", "max_iter"):
        if getattr(args, k) is not None:
            cfg[k] = getattr(args, k)
    if args.out is not None:
        cfg["output"] = str(args.out)
    config = BenchConfig.from_dict(cfg)
    out = config.output or Path("bench.csv")
    try:
        res = run_bench(config)
    except BenchError as exc:
        if getattr(exc, "result", None) is not None:
            write_outputs(exc.result, out, not args.no_timestamp)
        raise
    csv_path, json_path = write_outputs(res, out, not args.no_timestamp)
    summary = res.summary()
    for m, s in summary.items():
        print(f"{m:9s} mean={s['mean']:.4f} std={s['std']:.4f} trials={s['trials']}")
    print(f"wrote {csv_path} and {json_path}")


def cmd_rates(args):
    _emit(rate_report(args.a, args.b, args.delta).to_dict(), None)


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "bench": cmd_bench, "rates": cmd_rates}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qsdcluster: error: {exc}", file=sys.stderr)
        return 1
    except (QSDError, OSError, ValueError) as exc:
        print(f"qsdcluster: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

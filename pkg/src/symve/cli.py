"""``symve`` command line.

Exit codes: 0 success, 1 usage error, 2 invalid model or input, 3 resource
limit exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import bench
from .errors import InvalidConfig, NotAPermutation, SymveError, TooLarge
from .fgsym import ModelFile, format_model, load_model, parse_uai
from .graph import CostLedger, run_elimination
from .search import DEFAULT_EXHAUSTIVE_LIMIT, POLICY_KINDS, find_order
from .symmetry import partition_size

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3

POLICY_ALIASES = {"greedy": "greedy_min_size"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=("dense", "compact", "cost-only"), default="dense")
    p.add_argument("--cost", choices=("dense", "compact"), default="dense", help="cost model for order search")
    p.add_argument("--totals", choices=("paper", "full"), default="full",
                   help="'paper' sums steps 1..n-1, 'full' sums all n steps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None, help="worker processes for bench (default: all cores)")
    p.add_argument("--redetect", action="store_true", help="re-detect symmetries of compact intermediates")
    p.add_argument("--no-validate", action="store_true", help="skip symmetry checks of declared groups")
    return p


def _policy_args(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--policy", default=default, choices=sorted(POLICY_KINDS + tuple(POLICY_ALIASES)))
    p.add_argument("--budget", type=int, default=1000, help="evaluations for --policy anneal")
    p.add_argument("--limit", type=int, default=DEFAULT_EXHAUSTIVE_LIMIT, help="max variables for exhaustive search")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="symve", description="Variable elimination with local-symmetry compact encodings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("partition", parents=[common], help="compute Z and print the cost ledger")
    p.add_argument("model")
    p.add_argument("--order", help="comma-separated elimination order (overrides --policy)")
    _policy_args(p, "greedy")

    p = sub.add_parser("order", parents=[common], help="search an elimination order")
    p.add_argument("model")
    _policy_args(p, "greedy")

    p = sub.add_parser("detect", parents=[common], help="list detected or declared symmetries per factor")
    p.add_argument("model")

    p = sub.add_parser("bench", parents=[common], help="cumulative cost experiment on random symmetric models")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--svg", help="SVG chart output path")
    p.add_argument("--rv-counts", default="50,55,60,65")
    p.add_argument("--factors", type=int, default=10)
    p.add_argument("--arity", default="5-10", help="inclusive range lo-hi")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--card", type=int, default=2)

    p = sub.add_parser("convert", parents=[common], help="convert a UAI model to FGSYM")
    p.add_argument("input")
    p.add_argument("--from", dest="source", choices=("uai",), required=True)
    p.add_argument("-o", "--output", help="output path (default: stdout)")
    return parser


def _load(args) -> ModelFile:
    return load_model(args.model, validate=not args.no_validate)


def _order(args, model: ModelFile):
    graph = model.graph
    if getattr(args, "order", None):
        try:
            return [int(t) for t in args.order.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"--order must be comma-separated integers, got {args.order!r}") from None
    kind = POLICY_ALIASES.get(args.policy, args.policy)
    order, _ = find_order(graph, kind, args.cost, args.totals, seed=args.seed, budget=args.budget, limit=args.limit)
    return order


def _print_ledger(ledger: CostLedger, out) -> None:
    print("order: " + " ".join(map(str, ledger.order)), file=out)
    print(f"{'step':>4} {'var':>5} {'|X*|':>5} {'dense':>12} {'compact':>12}", file=out)
    for i, s in enumerate(ledger.steps, start=1):
        print(f"{i:>4} {s.variable:>5} {len(s.new_scope):>5} {s.dense_cost:>12} {s.compact_cost:>12}", file=out)
    for totals in ("full", "paper"):
        print(f"total ({totals}): dense {ledger.total('dense', totals)} compact {ledger.total('compact', totals)}", file=out)


def cmd_partition(args, out) -> int:
    model = _load(args)
    mode = args.mode.replace("-", "_")
    z, ledger = run_elimination(model.graph, _order(args, model), mode, redetect=args.redetect)
    print(f"Z = {z!r}" if z is not None else "Z = n/a (cost-only)", file=out)
    _print_ledger(ledger, out)
    return EXIT_OK


def cmd_order(args, out) -> int:
    model = _load(args)
    order = _order(args, model)
    _, ledger = run_elimination(model.graph.structural(), order, "cost_only")
    print("order: " + " ".join(map(str, order)), file=out)
    print(f"total ({args.cost}, {args.totals}): {ledger.total(args.cost, args.totals)}", file=out)
    return EXIT_OK


def cmd_detect(args, out) -> int:
    model = _load(args)
    g = model.graph
    for i, (f, s, declared) in enumerate(zip(g.factors, g.structures, model.declared)):
        groups = " ".join("{" + " ".join(map(str, grp)) + "}" for grp in s.groups) or "-"
        source = "declared" if declared is not None else "detected"
        print(
            f"factor {i} scope ({' '.join(map(str, f.scope))}) {source} {groups} "
            f"dense {s.dense_size} compact {partition_size(s.card_map, s.groups)}",
            file=out,
        )
    return EXIT_OK


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.replace("-", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad {what}: {text!r}") from None


def cmd_bench(args, out) -> int:
    arity = _int_list(args.arity, "--arity")
    if len(arity) == 1:
        arity = arity * 2
    if len(arity) != 2:
        raise UsageError("--arity must be lo-hi")
    cfg = bench.BenchConfig(
        rv_counts=tuple(_int_list(args.rv_counts, "--rv-counts")),
        num_factors=args.factors,
        arity_range=tuple(arity),
        runs_per_setting=args.runs,
        cardinality=args.card,
        seed=args.seed,
        totals_convention=args.totals,
    )
    jobs = args.jobs if args.jobs is not None else bench.default_jobs()
    result = bench.run_benchmark(cfg, jobs=max(1, jobs))
    if args.out:
        bench.emit_report(result, "csv", args.out)
    else:
        out.write(bench.to_csv(result))
    if args.svg:
        bench.emit_report(result, "svg", args.svg)
    print(
        f"{result.strict_reductions()}/{len(result.records)} runs with compact total < dense total",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_convert(args, out) -> int:
    with open(args.input, encoding="utf-8") as fh:
        graph = parse_uai(fh.read())
    text = format_model(graph)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {
    "partition": cmd_partition,
    "order": cmd_order,
    "detect": cmd_detect,
    "bench": cmd_bench,
    "convert": cmd_convert,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (TooLarge, MemoryError) as exc:
        print(f"symve: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidConfig, NotAPermutation) as exc:
        print(f"symve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SymveError as exc:
        print(f"symve: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"symve: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

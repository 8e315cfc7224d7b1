"""Command-line front end.

Four subcommands: ``ci-test`` (one conditional-independence query on a CSV,
JSON result on stdout), ``discover`` (PC search, graph JSON), ``benchmark``
(experiment grid from a plan JSON, incremental CSV), and ``summarize``
(median/IQR tables from a results CSV). Exit codes: 0 success, 1 usage
error, 2 runtime failure. All randomness flows from --seed (fallback:
the PAIRCD_SEED environment variable, then 0).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .benchmark.runner import ExperimentPlan, run_experiment, summarize_results
from .ci_test import fast_config, general_config, pair_ci
from .data_model import DEFAULT_NA_MARKERS, load_csv
from .discovery import DISCOVERY_METHODS, DiscoveryConfig, discover
from .graphs import save_graph
from .imputation import MiceConfig, build_cache, mean_impute, marginal_impute
from .learners import LearnerConfig, Variant


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _default_seed() -> int:
    return int(os.environ.get("PAIRCD_SEED", "0"))


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None,
                     help="master seed (default: $PAIRCD_SEED or 0)")
    sub.add_argument("--alpha", type=float, default=0.05)
    sub.add_argument("--imputer", choices=("mice", "mean", "marginal"),
                     default="mice")
    sub.add_argument("--m-imputations", type=int, default=5)
    sub.add_argument("--variant", choices=("general", "fast"), default="fast")
    sub.add_argument("--k-folds", type=int, default=None,
                     help="CV folds (default: 5 fast / 10 general)")
    sub.add_argument("--n-trees", type=int, default=100)
    sub.add_argument("--min-leaf", type=int, default=5)
    sub.add_argument("--na", default=",".join(DEFAULT_NA_MARKERS),
                     help="comma-separated missing-value markers")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="paircd",
                     description="Causal discovery from incomplete data.")
    subs = parser.add_subparsers(dest="command", required=True)

    ci = subs.add_parser("ci-test", parents=[], help="one CI query on a CSV")
    ci.add_argument("--data", required=True)
    ci.add_argument("--z", required=True, help="target column name")
    ci.add_argument("--y", required=True, help="candidate column name")
    ci.add_argument("--cond", default="", help="comma-separated column names")
    _add_common(ci)
    ci.add_argument("--out", default=None, help="write the JSON here as well")

    disc = subs.add_parser("discover", help="PC search on a CSV")
    disc.add_argument("--data", required=True)
    disc.add_argument("--method", choices=DISCOVERY_METHODS, default="pairci")
    disc.add_argument("--out", default=None, help="graph JSON path")
    _add_common(disc)

    bench = subs.add_parser("benchmark", help="run an experiment plan")
    bench.add_argument("--plan", required=True, help="plan JSON path")
    bench.add_argument("--out", required=True, help="results CSV path")
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--progress", action="store_true")

    summ = subs.add_parser("summarize", help="aggregate a results CSV")
    summ.add_argument("--results", required=True)
    summ.add_argument("--out", default=None, help="summary JSON path")
    return parser


def _alpha_ok(alpha: float, parser) -> None:
    if not 0 < alpha < 1:
        parser.error(f"alpha must lie in (0, 1), got {alpha}")


def _ci_config(args):
    learner = LearnerConfig(
        variant=Variant.FAST if args.variant == "fast" else Variant.GENERAL,
        n_trees=args.n_trees, min_samples_leaf=args.min_leaf)
    factory = fast_config if args.variant == "fast" else general_config
    overrides = {"learner": learner, "alpha": args.alpha}
    if args.k_folds is not None:
        overrides["k_folds"] = args.k_folds
    return factory(seed=_seed_of(args), **overrides)


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _impute(args, data):
    seed = _seed_of(args)
    if args.imputer == "mice":
        return build_cache(data, MiceConfig(m_imputations=args.m_imputations,
                                            seed=seed))
    if args.imputer == "mean":
        return mean_impute(data, args.m_imputations)
    return marginal_impute(data, args.m_imputations, seed)


def _cmd_ci_test(args, parser) -> int:
    _alpha_ok(args.alpha, parser)
    data = load_csv(args.data, tuple(args.na.split(",")))
    z = data.column_index(args.z)
    y = data.column_index(args.y)
    cond = tuple(data.column_index(c) for c in args.cond.split(",") if c)
    stack = _impute(args, data)
    result = pair_ci(stack, z, y, cond, _ci_config(args))
    text = result.to_json()
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


def _cmd_discover(args, parser) -> int:
    _alpha_ok(args.alpha, parser)
    data = load_csv(args.data, tuple(args.na.split(",")))
    config = DiscoveryConfig(alpha=args.alpha, ci=_ci_config(args),
                             mice=MiceConfig(m_imputations=args.m_imputations),
                             imputer=args.imputer, seed=_seed_of(args))
    graph = discover(data, args.method, config)
    print(graph.to_json())
    if args.out:
        save_graph(graph, args.out)
    return 0


def _cmd_benchmark(args, parser) -> int:
    plan = ExperimentPlan.from_json(Path(args.plan).read_text())
    if args.seed is not None:
        plan = dataclasses.replace(plan, seed=args.seed)
    records = run_experiment(plan, args.out, progress=args.progress)
    n_fail = sum(1 for r in records if r.status != "ok")
    print(f"wrote {len(records)} new rows to {args.out}"
          + (f" ({n_fail} failed)" if n_fail else ""))
    return 0


def _cmd_summarize(args, parser) -> int:
    table = summarize_results(args.results)
    if table.empty:
        print("warning: no successful rows to summarize", file=sys.stderr)
        print("")
        return 0
    print(table.to_string(index=False))
    if args.out:
        Path(args.out).write_text(table.to_json(orient="records", indent=2) + "\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"ci-test": _cmd_ci_test, "discover": _cmd_discover,
                "benchmark": _cmd_benchmark, "summarize": _cmd_summarize}
    try:
        return handlers[args.command](args, parser)
    except SystemExit:
        raise
    except Exception as exc:  # runtime failure -> exit code 2
        print(f"paircd: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

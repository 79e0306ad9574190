"""
cli.py — Command-line front end.

  python -m app.cli solve      <instance> [--shadow exhaustive|random|oracle|cuts] [--seed N] [--rand-iters K] [--jobs J] [--stats [FILE]]
  python -m app.cli oracle     <instance>
  python -m app.cli oracle-w   <weighted-instance>
  python -m app.cli verify     <instance> <solution>
  python -m app.cli gen clique --graph <graph> --size T
  python -m app.cli gen maxcut --graph <graph> --cut T
  python -m app.cli skew2pairs <weighted-instance>
  python -m app.cli expand     <weighted-instance>
  python -m app.cli normalize  <instance>
  python -m app.cli bench      [--count N] [--seed S] [--n N] [--r R] [--p P] [--shadow …]

`-` reads from stdin. Results go to stdout, logs to stderr. `--stats FILE`
writes the search statistics as one JSON object to FILE; a bare `--stats`
sends it to stderr and quiets logging below WARNING for that run. Exit
codes: 0 done (YES or NO), 1 bench disagreement, 2 usage / parse / instance
error, 3 size guard, 4 internal invariant failure.
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError

from app.errors import GuardError, MulticutError, SolverInvariantError
from app.models.instance import DagInstance, WeightedArcInstance
from app.models.results import Answer, ShadowKind, ShadowStrategy
from app.services.dag_core import check_multicut
from app.services.formats import (
    parse_graph,
    parse_instance,
    parse_solution,
    render_instance,
    render_solution,
    render_weighted,
)
from app.services.gadgets import (
    expand_to_vertex_instance,
    gen_clique_instance,
    gen_maxcut_skew_instance,
    random_dag_instance,
    skew_to_two_pairs,
)
from app.services.oracle import brute_solve, brute_solve_weighted_arcs
from app.services.solver import solve
from app.services.transforms import normalize

load_dotenv(override=True)
logger = logging.getLogger("app.cli")

# ── Config ────────────────────────────────────────────────────────────────────
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
DATA_DIR = os.getenv("DAGMC_DATA_DIR", "data")

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_GUARD, EXIT_INTERNAL = 0, 1, 2, 3, 4
STDERR = "-"


class UsageError(MulticutError):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _vertex_instance(path: str) -> DagInstance:
    instance = parse_instance(_read(path))
    if not isinstance(instance, DagInstance):
        raise UsageError(f"{path}: expected a 'p dagmc' vertex instance")
    return instance


def _weighted_instance(path: str) -> WeightedArcInstance:
    instance = parse_instance(_read(path))
    if not isinstance(instance, WeightedArcInstance):
        raise UsageError(f"{path}: expected a 'p dagmc-w' weighted instance")
    return instance


def _strategy(args: argparse.Namespace) -> ShadowStrategy:
    return ShadowStrategy(kind=ShadowKind(args.shadow), seed=args.seed, iterations=args.rand_iters)


# ── Subcommands ───────────────────────────────────────────────────────────────
def cmd_solve(args: argparse.Namespace) -> int:
    instance = _vertex_instance(args.instance)
    outcome = solve(instance, _strategy(args), jobs=args.jobs)
    cut = outcome.cut.members if outcome.answer is Answer.YES else None
    sys.stdout.write(render_solution(instance, cut))
    if args.stats is not None:
        payload = json.dumps(outcome.stats.model_dump(), sort_keys=True) + "\n"
        if args.stats == STDERR:
            sys.stderr.write(payload)
        else:
            Path(args.stats).write_text(payload)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = _vertex_instance(args.instance)
    cut = brute_solve(instance)
    sys.stdout.write(render_solution(instance, cut.members if cut else None))
    return EXIT_OK


def cmd_oracle_w(args: argparse.Namespace) -> int:
    answer = brute_solve_weighted_arcs(_weighted_instance(args.instance))
    sys.stdout.write("s YES\n" if answer else "s NO\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    instance = _vertex_instance(args.instance)
    cut = parse_solution(_read(args.solution))
    if cut is None:
        sys.stdout.write("s INVALID\nc solution declares NO\n")
        return EXIT_OK
    check = check_multicut(instance, cut)
    if check.ok and len(cut) > instance.budget:
        sys.stdout.write(f"s INVALID\nc {len(cut)} vertices exceed budget {instance.budget}\n")
    elif check.ok:
        sys.stdout.write("s VALID\n")
    else:
        sys.stdout.write(f"s INVALID\nc {check.reason}\n")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    graph = parse_graph(_read(args.graph))
    if args.family == "clique":
        instance = gen_clique_instance(graph, args.size)
    else:
        instance = gen_maxcut_skew_instance(graph, args.cut)
    sys.stdout.write(render_weighted(instance))
    return EXIT_OK


def cmd_skew2pairs(args: argparse.Namespace) -> int:
    sys.stdout.write(render_weighted(skew_to_two_pairs(_weighted_instance(args.instance))))
    return EXIT_OK


def cmd_expand(args: argparse.Namespace) -> int:
    sys.stdout.write(render_instance(expand_to_vertex_instance(_weighted_instance(args.instance))))
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    sys.stdout.write(render_instance(normalize(_vertex_instance(args.instance))))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Solver vs oracle on a seeded random corpus; writes a CSV of the runs."""
    strategy = _strategy(args)
    rows = []
    for k in range(args.count):
        instance = random_dag_instance(args.seed + k, args.n, args.r, args.p, args.density)
        started = time.perf_counter()
        outcome = solve(instance, strategy, jobs=args.jobs)
        elapsed = time.perf_counter() - started
        expected = brute_solve(instance)
        depth_bound = (instance.r + 1) * instance.budget
        rows.append(
            {
                "seed": args.seed + k,
                "n": len(instance.vertices),
                "m": len(instance.arcs),
                "r": instance.r,
                "p": instance.budget,
                "solver": outcome.answer.value,
                "oracle": "NO" if expected is None else "YES",
                "cut_size": outcome.cut.size if outcome.cut else None,
                "nodes": outcome.stats.nodes_expanded,
                "max_depth": outcome.stats.max_depth,
                "depth_ok": outcome.stats.max_depth <= depth_bound,
                "pruned": outcome.stats.pruned_children,
                "seconds": round(elapsed, 4),
            }
        )
        logger.info("bench %d/%d: %s vs %s", k + 1, args.count, rows[-1]["solver"], rows[-1]["oracle"])

    df = pd.DataFrame(rows)
    mismatches = int((df["solver"] != df["oracle"]).sum()) if len(df) else 0
    depth_violations = int((~df["depth_ok"]).sum()) if len(df) else 0

    out_dir = Path(args.out_dir or DATA_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"bench_seed{args.seed}_n{args.n}_r{args.r}_p{args.p}.csv"
    df.to_csv(out_path, index=False)

    sys.stdout.write(
        f"instances {len(df)} mismatches {mismatches} depth_violations {depth_violations} csv {out_path}\n"
    )
    return EXIT_OK if mismatches == 0 and depth_violations == 0 else EXIT_MISMATCH


# ── Parser ────────────────────────────────────────────────────────────────────
def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shadow", choices=[k.value for k in ShadowKind], default=ShadowKind.EXHAUSTIVE.value)
    p.add_argument("--seed", type=int, default=0, help="Seed for --shadow random.")
    p.add_argument("--rand-iters", type=int, default=None, help="Family size for --shadow random.")
    p.add_argument("--jobs", type=int, default=None, help="Worker processes for the root children.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dagcut", description="Exact vertex multicut in DAGs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Run the branching solver.")
    p.add_argument("instance")
    _add_solver_flags(p)
    p.add_argument(
        "--stats",
        nargs="?",
        const=STDERR,
        default=None,
        metavar="FILE",
        help="Write search statistics as JSON to FILE (`-` or no value: stderr, logs quieted).",
    )
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="Brute-force lex-min solution.")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("oracle-w", help="Brute-force weighted arc-deletion answer.")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle_w)

    p = sub.add_parser("verify", help="Check a solution file against an instance.")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="Generate a hardness-gadget instance.")
    p.add_argument("family", choices=["clique", "maxcut"])
    p.add_argument("--graph", required=True)
    p.add_argument("--size", type=int, default=2, help="Clique size t.")
    p.add_argument("--cut", type=int, default=0, help="Max-Cut target t.")
    p.set_defaults(func=cmd_gen)

    for name, func, text in (
        ("skew2pairs", cmd_skew2pairs, "Skew multicut → two-pair multicut."),
        ("expand", cmd_expand, "Weighted arc instance → unweighted vertex instance."),
        ("normalize", cmd_normalize, "Distinct, degree-0 terminals."),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("instance")
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="Solver vs oracle on random instances.")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--density", type=float, default=0.35)
    p.add_argument("--out-dir", default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench, shadow=ShadowKind.CUT_SHADOWS.value)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    app_logger = logging.getLogger("app")
    previous_level = app_logger.level
    if getattr(args, "stats", None) == STDERR:
        # stderr belongs to the stats object
        app_logger.setLevel(max(logging.WARNING, app_logger.getEffectiveLevel()))
    try:
        return args.func(args)
    except SolverInvariantError as exc:
        logger.critical("Internal invariant failed: %s", exc)
        return EXIT_INTERNAL
    except GuardError as exc:
        logger.error("Size guard: %s", exc)
        return EXIT_GUARD
    except (MulticutError, ValidationError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    finally:
        app_logger.setLevel(previous_level)


def main() -> None:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    sys.exit(run())


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
partial-omt CLI - solve, generate, benchmark

Usage:
    partial-omt <command> [options]

Commands:
    solve       Minimize the objective of a problem file
    generate    Write a generated benchmark instance
    bench       Run a suite of instances x configurations
    oracle      Brute-force optimum of a small problem

Exit codes: 0 optimum, 10 unsat, 20 timeout, 30 unbounded, 1 error.
"""
import argparse
import logging
import sys
from pathlib import Path

from partial_omt.core.errors import OmtError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSAT = 10
EXIT_TIMEOUT = 20
EXIT_UNBOUNDED = 30


def _fail(message: str):
    print(f"Error: {message}")
    sys.exit(EXIT_ERROR)


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def _report_value(problem, value) -> str:
    return str(-value if problem.maximize else value)


def cmd_solve(args):
    """Solve a problem file"""
    from partial_omt.frontend import parse_file
    from partial_omt.solver import BnbConfig, OmtConfig, OmtSearch, OmtStatus

    path = Path(args.file)
    if not path.exists():
        _fail(f"Path does not exist: {path}")

    problem = parse_file(path)
    cfg = OmtConfig(
        strategy=args.reduction,
        lia_mode=BnbConfig(mode=args.lia, node_limit=args.node_limit),
        learn_block_lemma=args.block_lemma,
        time_budget=args.timeout,
        seed=args.seed,
        max_iterations=args.max_iterations,
        proposal=args.proposal,
    )
    search = OmtSearch(problem, cfg)
    if args.dump_dimacs:
        search.sat.dimacs(args.dump_dimacs)
        print(f"Skeleton written to {args.dump_dimacs}")

    outcome = search.run()
    trace = outcome.trace

    label = {
        OmtStatus.OPTIMUM: "sat",
        OmtStatus.UNSAT: "unsat",
        OmtStatus.UNBOUNDED: "unbounded",
        OmtStatus.BUDGET_EXHAUSTED: "timeout",
    }[outcome.status]
    print(label)
    if outcome.value is not None:
        kind = "objective" if outcome.status is OmtStatus.OPTIMUM else "best"
        print(f"{kind}: {_report_value(problem, outcome.value)}")
    if outcome.model is not None and args.model:
        print("model:")
        for v, name in enumerate(problem.var_names):
            value = outcome.model.values.get(v)
            if value is not None:
                print(f"  {name} = {value}")
    print(f"iterations: {trace.iterations}  sat calls: {trace.sat_calls}  lemmas: {trace.lemmas}")

    if args.stats:
        for stage, stats in trace.stages.items():
            print(f"  {stage:<9} {stats['calls']:>5} calls  {stats['latency_sec']:.3f}s")
    if args.trace:
        trace.to_csv(args.trace)
        print(f"Trace written to {args.trace}")

    sys.exit({
        OmtStatus.OPTIMUM: EXIT_OK,
        OmtStatus.UNSAT: EXIT_UNSAT,
        OmtStatus.UNBOUNDED: EXIT_UNBOUNDED,
        OmtStatus.BUDGET_EXHAUSTED: EXIT_TIMEOUT,
    }[outcome.status])


def cmd_generate(args):
    """Generate a benchmark instance"""
    from partial_omt.bench import render_sp, sample_sp

    if args.n < 1:
        _fail("--n must be at least 1")
    inst = sample_sp(args.n, args.seed, args.encoding)
    text = render_sp(inst)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"Wrote {inst.name} to {args.output}")
    else:
        sys.stdout.write(text)


def cmd_bench(args):
    """Run a benchmark suite"""
    from partial_omt.bench import load_suite, run_suite, summarize, write_scatter

    suite = load_suite(args.suite)
    if args.workers:
        suite.workers = args.workers
    print(f"Running {len(suite.instances)} instances x {len(suite.configs)} configs")

    def progress(i, total, record):
        mark = "✗" if record.status == "error" else "✓"
        ub = "" if record.ub is None else f" ub={record.ub}"
        print(f"[{i}/{total}] {record.instance} {record.config} ... {mark} {record.status}{ub}")

    records = run_suite(suite, args.output, on_result=progress)
    print(f"\nResults saved to: {args.output}")

    if args.scatter:
        files = write_scatter(records, args.scatter)
        print(f"Wrote {len(files)} scatter files to {args.scatter}")

    print("\nSummary:\n")
    for config, stats in summarize(records).items():
        print(
            f"  {config:<16} sat {int(stats['sat'])}/{int(stats['runs'])}"
            f"  median iterations {stats['median_iterations']:.1f}"
            f"  mean ub {stats['mean_ub']:.4f}"
        )


def cmd_oracle(args):
    """Brute-force optimum of a small problem"""
    from partial_omt.bench import OracleStatus, brute_force_omt, parse_box
    from partial_omt.frontend import parse_file

    problem = parse_file(args.file)
    box = parse_box(args.box, problem) if args.box else {}
    result = brute_force_omt(problem, box, max_models=args.max_models)

    print(result.status.value)
    if result.value is not None:
        print(f"objective: {_report_value(problem, result.value)}")
    print(f"propositional models: {result.leaves}")
    sys.exit({
        OracleStatus.OPTIMUM: EXIT_OK,
        OracleStatus.UNSAT: EXIT_UNSAT,
        OracleStatus.UNBOUNDED: EXIT_UNBOUNDED,
    }[result.status])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partial-omt",
        description="partial-omt - linear-search OMT with truth-assignment reduction",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Solve with guided reduction and write the bound trace
  partial-omt solve problem.smt2 --reduction guided --trace trace.csv

  # Compare against the total-assignment baseline
  partial-omt solve problem.smt2 --reduction none --block-lemma off

  # Generate a strip-packing instance
  partial-omt generate sp --n 8 --seed 1 --encoding lira -o sp8.smt2

  # Run a suite and write scatter files
  partial-omt bench --suite suite.toml -o results.csv --scatter scatter/

  # Brute-force optimum inside a box
  partial-omt oracle small.smt2 --box "x=0:4,y=0:4"
"""
    )

    parser.add_argument(
        "--verbose", "-v",
        action="count",
        default=0,
        help="Log solver events (-v info, -vv debug)"
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Solve command
    solve_parser = subparsers.add_parser("solve", help="Minimize the objective of a problem file")
    solve_parser.add_argument("file", type=str, help="Problem file")
    solve_parser.add_argument(
        "--reduction", choices=["none", "basic", "guided"], default="guided",
        help="Truth-assignment reduction strategy"
    )
    solve_parser.add_argument(
        "--lia", choices=["full", "truncated"], default="truncated",
        help="Branch-and-bound mode for integer variables"
    )
    solve_parser.add_argument(
        "--block-lemma", type=_on_off, default=True, metavar="on|off",
        help="Learn blocking lemmas from limiting literals"
    )
    solve_parser.add_argument("--timeout", type=float, default=60.0, help="Time budget in seconds")
    solve_parser.add_argument("--seed", type=int, default=0, help="SAT solver seed")
    solve_parser.add_argument("--max-iterations", type=int, help="Stop after this many improvements")
    solve_parser.add_argument("--node-limit", type=int, default=10_000, help="Branch-and-bound node limit")
    solve_parser.add_argument(
        "--proposal", choices=["tableau", "conflict"], default="tableau",
        help="Source of literal proposals for guided reduction"
    )
    solve_parser.add_argument("--trace", type=str, help="Write the per-iteration trace CSV")
    solve_parser.add_argument("--dump-dimacs", type=str, help="Write the propositional skeleton")
    solve_parser.add_argument("--no-model", dest="model", action="store_false", help="Do not print the model")
    solve_parser.add_argument("--stats", action="store_true", help="Show per-stage timings")
    solve_parser.set_defaults(func=cmd_solve)

    # Generate command
    generate_parser = subparsers.add_parser("generate", help="Write a generated benchmark instance")
    generate_parser.add_argument("family", choices=["sp"], help="Instance family (sp: strip packing)")
    generate_parser.add_argument("--n", type=int, required=True, help="Number of rectangles")
    generate_parser.add_argument("--seed", type=int, default=0, help="Sampling seed")
    generate_parser.add_argument("--encoding", choices=["lra", "lira"], default="lra", help="Variable sorts")
    generate_parser.add_argument("--output", "-o", type=str, help="Output file (default: stdout)")
    generate_parser.set_defaults(func=cmd_generate)

    # Bench command
    bench_parser = subparsers.add_parser("bench", help="Run a suite of instances x configurations")
    bench_parser.add_argument("--suite", type=str, required=True, help="Suite description (.toml or .yaml)")
    bench_parser.add_argument("--output", "-o", type=str, default="results.csv", help="Results CSV")
    bench_parser.add_argument("--scatter", type=str, help="Directory for paired metric files")
    bench_parser.add_argument("--workers", type=int, help="Override the suite's worker count")
    bench_parser.set_defaults(func=cmd_bench)

    # Oracle command
    oracle_parser = subparsers.add_parser("oracle", help="Brute-force optimum of a small problem")
    oracle_parser.add_argument("file", type=str, help="Problem file")
    oracle_parser.add_argument("--box", type=str, help="Variable bounds, e.g. 'x=0:4,y=-1:3' or '*=0:10'")
    oracle_parser.add_argument("--max-models", type=int, default=4096, help="Propositional model limit")
    oracle_parser.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(EXIT_ERROR)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        args.func(args)
    except (OmtError, FileNotFoundError, ValueError) as e:
        _fail(str(e))


if __name__ == "__main__":
    main()

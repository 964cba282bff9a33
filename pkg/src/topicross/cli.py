"""Command-line entry point.

Subcommands: ingest, patterns, generate, sweep, verify, render.
Exit codes: 0 success, 1 generation/verification failure, 2 usage or config
error, 3 I/O or data error. Output files are written atomically, so a failed
run never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import grid, harness, lexicon, pipeline, puzzle, solver
from .util import atomic_write_text, derive_seed

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def _parse_size(value: str) -> tuple[int, int]:
    try:
        v, h = value.lower().split("x")
        return int(v), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 7x7, got {value!r}")


def _parse_int_list(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in value.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _load_table(path: str | None) -> lexicon.NormalizationTable:
    if path is None:
        return lexicon.DEFAULT_TABLE
    return lexicon.NormalizationTable.from_json(json.loads(Path(path).read_text("utf-8")))


def _load_index(paths: list[str], table: lexicon.NormalizationTable):
    lex = lexicon.ingest_lexicon(paths, table)
    return lex, lexicon.build_index(lex)


def _solver_config(args: argparse.Namespace, target_rate: int) -> solver.SolverConfig:
    return solver.SolverConfig(
        target_rate=target_rate,
        time_limit=args.time_limit,
        restart_interval=args.restart_interval,
        node_budget=args.node_budget,
        seed=args.seed,
    )


def _resolve_pattern(args: argparse.Namespace) -> grid.GridPattern:
    if args.pattern:
        return grid.parse_pattern_file(Path(args.pattern).read_text("utf-8"))[0]
    if args.size and args.black is not None:
        height, width = args.size
        return grid.generate_random_patterns(
            height, width, args.black, count=1, seed=derive_seed(args.seed, "pattern")
        )[0]
    raise ValueError("either --pattern or both --size and --black are required")


def cmd_ingest(args: argparse.Namespace) -> int:
    table = _load_table(args.table)
    corpus = pipeline.read_corpus_jsonl(args.corpus)
    if args.gazetteer:
        terms = [
            line.strip()
            for line in Path(args.gazetteer).read_text("utf-8").splitlines()
            if line.strip() and not line.startswith("#")
        ]
        extractor: pipeline.KeywordFinder = pipeline.GazetteerExtractor(terms)
    elif args.extractor == "pretagged":
        extractor = pipeline.PreTaggedExtractor()
    else:
        raise pipeline.ExtractorUnavailableError(
            "gazetteer extraction needs --gazetteer; otherwise use --extractor pretagged"
        )
    result = pipeline.build_topic_lexicon(
        corpus, extractor, table, args.mask, args.min_clue_chars
    )
    text = pipeline.write_lexicon_jsonl(result.records)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(
        f"ingest: {result.stats.records} records, {result.stats.clues} clues, "
        f"{result.stats.occurrences} occurrences "
        f"({result.stats.skipped_short_clues} short clues, "
        f"{result.stats.skipped_unmappable_keywords} unmappable keywords skipped)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_patterns(args: argparse.Namespace) -> int:
    height, width = args.size
    patterns = grid.generate_random_patterns(
        height, width, args.black, args.count, seed=args.seed
    )
    text = grid.render_pattern_file(patterns)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    pattern = _resolve_pattern(args)
    lex, index = _load_index(args.lexicon, _load_table(args.table))
    slotset = grid.extract_slots(pattern)
    config = _solver_config(args, args.target_rate)
    if args.max_topic:
        result = solver.maximize_topic_rate(slotset, index, config)
    else:
        result = solver.solve(slotset, index, config)
    if not result.success:
        print(
            f"generation failed: {result.status.value}, "
            f"best achieved topic ratio {result.achieved_topic_ratio:.2f}",
            file=sys.stderr,
        )
        return EXIT_FAILURE
    pzl = puzzle.assemble(pattern, slotset, result, lex, clue_seed=args.seed)
    if args.format == "json":
        text = puzzle.puzzle_to_json(pzl, include_solution=not args.solution_free)
    else:
        text = puzzle.render_text(pzl, include_solution=not args.solution_free)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    _, index = _load_index(args.lexicon, _load_table(args.table))
    height, width = args.size
    config = harness.SweepConfig(
        height=height,
        width=width,
        t_values=args.t_values,
        black_counts=args.black_counts,
        patterns_per_count=args.patterns_per_count,
        trials_per_cell=args.trials,
        seed=args.seed,
        solver=_solver_config(args, target_rate=args.t_values[0]),
        early_stop=not args.no_early_stop,
    )
    patterns = None
    if args.patterns:
        patterns = grid.parse_pattern_file(Path(args.patterns).read_text("utf-8"))
    records = harness.run_sweep(config, index, patterns=patterns, jobs=args.jobs)
    harness.write_records_csv(records, args.out)
    if args.summary or args.svg:
        summary = harness.summarize(records)
        if args.summary:
            atomic_write_text(
                args.summary, json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"
            )
        if args.svg:
            harness.write_summary_svg(summary, args.svg)
    print(f"sweep: {len(records)} records -> {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.puzzle).read_text("utf-8"))
    pzl = puzzle.deserialize_puzzle(doc)
    lex, _ = _load_index(args.lexicon, _load_table(args.table))
    report = puzzle.verify_puzzle(pzl, lex, args.target_rate)
    if report.ok:
        print("puzzle OK")
        return EXIT_OK
    for violation in report.violations:
        print(f"{violation.kind}: {violation.detail}")
    return EXIT_FAILURE


def cmd_render(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.puzzle).read_text("utf-8"))
    pzl = puzzle.deserialize_puzzle(doc)
    text = puzzle.render_text(pzl, include_solution=not args.solution_free)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--time-limit", type=float, default=300.0, metavar="SECS")
    parser.add_argument("--restart-interval", type=float, default=10.0, metavar="SECS")
    parser.add_argument(
        "--node-budget",
        type=int,
        default=None,
        help="nodes per episode; enables deterministic mode",
    )
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicross",
        description="Generate crossword puzzles with a guaranteed share of topic words.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="corpus -> clued topic lexicon (JSON Lines)")
    p.add_argument("--corpus", required=True, help="JSONL corpus file")
    p.add_argument("--gazetteer", help="term list for gazetteer extraction")
    p.add_argument(
        "--extractor", choices=["gazetteer", "pretagged"], default="gazetteer"
    )
    p.add_argument("--mask", default=pipeline.DEFAULT_MASK)
    p.add_argument("--min-clue-chars", type=int, default=pipeline.DEFAULT_MIN_CLUE_CHARS)
    p.add_argument("--table", help="normalization table JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("patterns", help="generate random valid patterns")
    p.add_argument("--size", type=_parse_size, required=True, metavar="VxH")
    p.add_argument("--black", type=int, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("generate", help="fill one pattern into a puzzle")
    p.add_argument("--pattern", help="pattern file (first pattern is used)")
    p.add_argument("--size", type=_parse_size, metavar="VxH")
    p.add_argument("--black", type=int)
    p.add_argument("--lexicon", nargs="+", required=True, metavar="FILE")
    p.add_argument("--table", help="normalization table JSON")
    p.add_argument("--target-rate", type=int, default=50, metavar="T")
    p.add_argument("--max-topic", action="store_true", help="maximize the topic rate")
    p.add_argument("--solution-free", action="store_true")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="success-probability / time sweep")
    p.add_argument("--size", type=_parse_size, default=(7, 7), metavar="VxH")
    p.add_argument("--black-counts", type=_parse_int_list, default=(9, 10, 11, 12))
    p.add_argument("--patterns-per-count", type=int, default=10)
    p.add_argument(
        "--t-values",
        type=_parse_int_list,
        default=(10, 20, 30, 40, 50, 60, 70, 80, 90, 100),
    )
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--lexicon", nargs="+", required=True, metavar="FILE")
    p.add_argument("--table")
    p.add_argument("--patterns", help="pattern file instead of random generation")
    p.add_argument("--no-early-stop", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="records CSV path")
    p.add_argument("--summary", help="summary JSON path")
    p.add_argument("--svg", help="summary chart path")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="re-check a puzzle JSON file")
    p.add_argument("--puzzle", required=True)
    p.add_argument("--lexicon", nargs="+", required=True, metavar="FILE")
    p.add_argument("--table")
    p.add_argument("--target-rate", type=int, default=0, metavar="T")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="puzzle JSON -> text grid and clues")
    p.add_argument("--puzzle", required=True)
    p.add_argument("--solution-free", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (ValueError, solver.InstanceTooLargeError) as exc:
        if isinstance(
            exc,
            (
                grid.PatternError,
                lexicon.LexiconParseError,
                harness.SchemaMismatchError,
                json.JSONDecodeError,
            ),
        ):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (grid.ExhaustedAttemptsError, pipeline.ExtractorUnavailableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

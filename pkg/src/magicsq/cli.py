"""Command-line entry point.

Exit codes: 0 success, 1 failed verification or violated analysis
precondition, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig
from .contextuality import enumerate_sign_squares, vector_sets
from .files import CountsFile, FormatError, dumps, read_report, write_report
from .magicsquare import SQUARE, parse_cell
from .pipeline import AnalysisInputError, analyze_files, series_rows, simulate, summary_text, write_counts
from .verification import run_checks

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2


def _error(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = ExperimentConfig.load(args.config)
    except OSError as exc:
        return _error(f"cannot read config: {exc}", EXIT_MALFORMED)
    except ConfigError as exc:
        return _error(str(exc), EXIT_MALFORMED)
    files = simulate(config)
    for path, cf in zip(write_counts(files, args.out), files):
        plus, minus = cf.counts.plus_minus()
        print(f"{cf.label:>5}: +1 {plus:>6}  -1 {minus:>6}  -> {path}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        files = [CountsFile.read(p) for p in args.counts]
    except OSError as exc:
        return _error(f"cannot read counts: {exc}", EXIT_MALFORMED)
    except FormatError as exc:
        return _error(str(exc), EXIT_MALFORMED)
    try:
        report = analyze_files(files)
    except AnalysisInputError as exc:
        return _error(str(exc), EXIT_FAILED)
    if args.out:
        write_report(report, args.out)
    sys.stdout.write(summary_text(report))
    return EXIT_OK


def enumeration_dump() -> dict:
    sets = vector_sets()
    return {
        "schema_version": 1,
        "order": ["row1", "row2", "row3", "col1", "col2", "col3"],
        "realism": sets.realism_tuples(),
        "quantum": sets.quantum_tuples(),
        "squares": [
            {"square": grid.tolist(), "result_vector": list(rv)}
            for grid, rv in enumerate_sign_squares()
        ],
    }


def cmd_enumerate(args: argparse.Namespace) -> int:
    data = enumeration_dump()
    text = dumps(data)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(
            f"wrote {len(data['realism'])} realism vectors, {len(data['quantum'])} quantum vectors "
            f"and {len(data['squares'])} squares to {args.out}"
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    square = SQUARE
    if args.flip_cell:
        try:
            row, col = parse_cell(args.flip_cell)
        except ValueError as exc:
            return _error(str(exc), EXIT_MALFORMED)
        square = square.with_sign_flip(row, col)
    results = run_checks(square, unitarity_tol=args.unitarity_tol, seed=args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        report = read_report(args.analysis)
    except OSError as exc:
        return _error(f"cannot read analysis: {exc}", EXIT_MALFORMED)
    except (FormatError, json.JSONDecodeError) as exc:
        return _error(str(exc), EXIT_MALFORMED)
    sys.stdout.write(summary_text(report))
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows(series_rows(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magicsq", description="Simulate and analyse the Mermin-Peres magic square"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the circuits of a config and write counts files")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="analyse six line counts files")
    p.add_argument("--counts", required=True, nargs="+", type=Path)
    p.add_argument("--out", type=Path, help="write the JSON analysis report here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("enumerate", help="dump the realism and quantum result vectors")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run the invariant audit")
    p.add_argument("--unitarity-tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--flip-cell", metavar="rXcY", help="negate one cell before auditing (mutation test hook)"
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="render the summary of a saved analysis")
    p.add_argument("--analysis", required=True, type=Path)
    p.add_argument("--csv", type=Path, help="also write per-line numeric series as CSV")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

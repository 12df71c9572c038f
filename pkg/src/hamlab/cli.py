"""Command-line interface: hamgen, analyze, sweep.

Exit codes: 0 ok, 2 config error, 3 input-data error, 4 cap exceeded,
5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from .errors import HamlabError
from .pipeline import analyze, hamgen, sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamlab",
        description="Build qubit Hamiltonians and analyze Hamiltonian-simulation algorithms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_hamgen = sub.add_parser("hamgen", help="generate Hamiltonian files from a config")
    p_hamgen.add_argument("config", help="YAML configuration file")
    p_hamgen.add_argument("--out", default="hamgen_out", help="output directory")
    p_hamgen.add_argument(
        "--override", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key (section.key=value), repeatable",
    )

    p_analyze = sub.add_parser("analyze", help="build and analyze an algorithm")
    p_analyze.add_argument("config", help="YAML configuration file")
    p_analyze.add_argument("--out", default="analyze_out", help="output directory")
    p_analyze.add_argument(
        "--override", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key (section.key=value), repeatable",
    )
    p_analyze.add_argument("--seed", type=int, default=None, help="set encoding.seed")
    p_analyze.add_argument(
        "--format", choices=("structured", "tabular"), default="structured",
        help="report format (JSON document or CSV row)",
    )

    p_sweep = sub.add_parser("sweep", help="run a parameter grid over a template config")
    p_sweep.add_argument("config", help="sweep YAML with 'template' and 'grid'")
    p_sweep.add_argument("--out", default="sweep_out", help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="concurrent grid points")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "hamgen":
            result = hamgen(args.config, args.out, overrides=tuple(args.override))
            for name in result.built:
                print(f"built {name}: {result.outputs[name]}")
            for name in result.reused:
                print(f"reused (manifest hit) {name}: {result.outputs[name]}")
        elif args.command == "analyze":
            overrides = list(args.override)
            if args.seed is not None:
                overrides.append(f"encoding.seed={args.seed}")
            result = analyze(
                args.config, args.out, overrides=tuple(overrides),
                report_format=args.format,
            )
            print(f"report: {result.report_path}")
            for name, path in result.extra_paths.items():
                print(f"{name}: {path}")
        else:
            result = sweep(args.config, args.out, jobs=args.jobs)
            print(f"sweep rows: {len(result.rows)}")
            print(f"merged table: {result.csv_path}")
    except HamlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``analyze``, ``metrics`` and ``stats``.

Exit codes: 0 when the run completed (per-file analysis errors are reported,
not fatal), 1 for usage and configuration errors, 2 for unreadable inputs.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional

from .catalog import ConfigError, read_catalog
from .driver import (
    AnalysisConfig, MissingLabel, analyze_batch, compute_metrics, emit_histograms, format_structured,
    format_text, read_labels,
)
from .pathgen import DEFAULT_CAP, PathConfig

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2
PATH_MODES = {"whole": "whole_program", "per-method": "per_method", "flow-affecting": "flow_affecting"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ssa", action="store_true", help="rename to single-assignment form (flow sensitivity)")
    p.add_argument("--paths", action="store_true", help="analyze each if/else path variant (path sensitivity)")
    p.add_argument("--clone", action="store_true", help="clone methods per call site (context sensitivity)")
    p.add_argument("--path-mode", choices=sorted(PATH_MODES), default="flow-affecting")
    p.add_argument("--path-cap", type=int, default=DEFAULT_CAP, metavar="N",
                   help="most if-statements to resolve per file (default %(default)s)")
    p.add_argument("--clone-depth", type=int, default=8, metavar="N")
    p.add_argument("--catalog", metavar="FILE", help="sink/source catalog overriding the defaults")
    p.add_argument("--workers", type=int, default=1, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="smarttaint", description="Taint analysis for SmartThings Groovy apps.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="report tainted flows for a file or directory")
    a.add_argument("target")
    _pipeline_flags(a)
    a.add_argument("--format", choices=("text", "structured"), default="text")
    a.add_argument("--timing", action="store_true", help="include durations in structured output")

    m = sub.add_parser("metrics", help="precision and recall against a label file")
    m.add_argument("target")
    m.add_argument("--labels", required=True, metavar="FILE", help="lines of 'file,leaking|benign'")
    _pipeline_flags(m)

    s = sub.add_parser("stats", help="if-statement histograms")
    s.add_argument("target")
    s.add_argument("--catalog", metavar="FILE")
    return ap


def config_from(args) -> AnalysisConfig:
    if args.path_cap < 1 or args.workers < 1 or args.clone_depth < 0:
        raise UsageError("--path-cap and --workers must be positive, --clone-depth non-negative")
    return AnalysisConfig(
        ssa=args.ssa, paths=args.paths, clone=args.clone,
        path_cfg=PathConfig(PATH_MODES[args.path_mode], args.path_cap),
        catalog_path=args.catalog, output_format=getattr(args, "format", "text"),
        workers=args.workers, clone_depth=args.clone_depth, timing=getattr(args, "timing", False),
    )


def cmd_analyze(args, out) -> int:
    cfg = config_from(args)
    batch = analyze_batch(args.target, cfg)
    if cfg.output_format == "structured":
        out.write(format_structured(batch, cfg.timing))
    else:
        single = len(batch.files) == 1 and not cfg.paths
        for name in batch.files:
            if name in batch.errors:
                out.write(f"Running {name}\n    error: {batch.errors[name]}\n")
            elif single:
                out.write(batch.per_file[name].report.slice_text)
            else:
                out.write(format_text(batch.per_file[name], cfg.paths))
    for name, msg in sorted(batch.errors.items()):
        print(f"smarttaint: {name}: {msg}", file=sys.stderr)
    return EXIT_OK


def cmd_metrics(args, out) -> int:
    cfg = config_from(args)
    labels = read_labels(args.labels)
    batch = analyze_batch(args.target, cfg)
    metrics = compute_metrics(batch, labels)
    for name in batch.files:
        if batch.verdict(name) != labels[name]:
            out.write(f"mismatch {name}: predicted {batch.verdict(name)}, labeled {labels[name]}\n")
    for name, msg in sorted(batch.errors.items()):
        out.write(f"error {name}: {msg}\n")
    out.write(metrics.text() + "\n")
    return EXIT_OK


def cmd_stats(args, out) -> int:
    cat = read_catalog(args.catalog) if args.catalog else None
    out.write(emit_histograms(args.target, cat))
    return EXIT_OK


def main(argv: Optional[list] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    handler = {"analyze": cmd_analyze, "metrics": cmd_metrics, "stats": cmd_stats}[args.command]
    try:
        return handler(args, out)
    except (UsageError, ConfigError, MissingLabel, ValueError) as e:
        print(f"smarttaint: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"smarttaint: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

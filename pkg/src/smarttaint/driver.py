"""Pipeline composition, batches, metrics and if-statement histograms.

The stage order is fixed: clone, then path enumeration, then SSA. Cloning
gives every call site its own copy before branches are split, and each path
variant is branch-free by the time it is renamed, so SSA never needs a phi.
"""
from __future__ import annotations

import dataclasses
import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .catalog import Catalog, ConfigError, default_catalog, read_catalog
from .cloning import DEFAULT_MAX_DEPTH, clone_methods
from .frontend.lexer import LexError
from .frontend.nodes import Program
from .frontend.parser import ParseError, parse_source
from .pathgen import CapExceeded, PathConfig, enumerate_paths, if_stats
from .ssa import SsaError, to_ssa
from .taint import FlowReport, analyze

SUFFIX = ".groovy"
OUTLIER_IFS = 50
ANALYSIS_ERRORS = (LexError, ParseError, CapExceeded, SsaError, UnicodeDecodeError, RecursionError)


@dataclass(frozen=True)
class AnalysisConfig:
    ssa: bool = False
    paths: bool = False
    clone: bool = False
    path_cfg: PathConfig = PathConfig()
    catalog_path: Optional[str] = None
    output_format: str = "text"
    workers: int = 1
    clone_depth: int = DEFAULT_MAX_DEPTH
    timing: bool = False

    def __post_init__(self):
        if self.output_format not in ("text", "structured"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def catalog(self) -> Catalog:
        return read_catalog(self.catalog_path) if self.catalog_path else default_catalog()


@dataclass
class VariantReport:
    path_id: Optional[str]  # None when paths are off
    report: FlowReport

    @property
    def label(self) -> str:
        return "-" if self.path_id is None else (self.path_id or "-")


@dataclass
class FileReport:
    file: str
    variants: list
    warnings: tuple = ()
    clone_spans: tuple = ()
    wall: float = 0.0
    cpu: float = 0.0

    @property
    def verdict(self) -> str:
        return "leaking" if any(v.report.flows for v in self.variants) else "benign"

    @property
    def report(self) -> FlowReport:
        """The single report of a run without path enumeration."""
        return self.variants[0].report

    def origin_line(self, line: int) -> int:
        for span in self.clone_spans:
            if span.start <= line <= span.end:
                return line - span.offset
        return line


@dataclass
class BatchReport:
    per_file: dict = field(default_factory=dict)  # file name -> FileReport
    errors: dict = field(default_factory=dict)  # file name -> diagnostic
    timing: dict = field(default_factory=dict)  # file name -> (wall s, cpu s); "<total>" for the batch

    def verdict(self, name: str) -> str:
        """Errored files count as benign: nothing was reported for them."""
        r = self.per_file.get(name)
        return r.verdict if r is not None else "benign"

    @property
    def files(self) -> list:
        return sorted(set(self.per_file) | set(self.errors))


# --------------------------------------------------------------------------
# single programs and files

def _variant(prog: Program, cfg: AnalysisConfig, cat: Catalog, path_id: Optional[str]) -> VariantReport:
    if cfg.ssa:
        prog = to_ssa(prog)
    r = analyze(prog, cat)
    r.markup = None  # keep reports small and picklable
    return VariantReport(path_id, r)


def _variant_job(args) -> VariantReport:
    return _variant(*args)


def analyze_program(p: Program, cfg: AnalysisConfig = AnalysisConfig(), cat: Optional[Catalog] = None,
                    name: str = "<program>") -> FileReport:
    """Run the configured pipeline on an already parsed program."""
    cat = cat or cfg.catalog()
    if cfg.clone:
        p = clone_methods(p, cfg.clone_depth)
    if cfg.paths:
        jobs = [(v.program, cfg, cat, v.id) for v in enumerate_paths(p, cfg.path_cfg, cat)]
    else:
        jobs = [(p, cfg, cat, None)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            variants = list(pool.map(_variant_job, jobs))
    else:
        variants = [_variant(*j) for j in jobs]
    return FileReport(name, variants, tuple(p.warnings), tuple(p.clone_spans))


def analyze_source(src: str, cfg: AnalysisConfig = AnalysisConfig(), cat: Optional[Catalog] = None,
                   name: str = "<source>") -> FileReport:
    return analyze_program(parse_source(src), cfg, cat, name)


def analyze_file(path, cfg: AnalysisConfig = AnalysisConfig(), cat: Optional[Catalog] = None) -> FileReport:
    """Analyze one file; parse and cap errors propagate to the caller."""
    path = Path(path)
    wall, cpu = time.perf_counter(), time.process_time()
    text = path.read_text(encoding="utf-8")
    out = analyze_source(text, cfg, cat, path.name)
    out.wall = time.perf_counter() - wall
    out.cpu = time.process_time() - cpu
    return out


def _batch_job(args):
    path, cfg, cat = args
    try:
        return analyze_file(path, cfg, cat), None
    except ANALYSIS_ERRORS as e:
        return None, f"{type(e).__name__}: {e}"
    except Exception as e:  # a crash on one app must not stop the batch
        return None, f"internal error {type(e).__name__}: {e}"


def list_sources(target) -> list:
    """``.groovy`` files under a directory (sorted), or the single file given."""
    target = Path(target)
    if target.is_file():
        return [target]
    if not target.is_dir():
        raise FileNotFoundError(f"no such file or directory: {target}")
    return sorted(p for p in target.rglob("*" + SUFFIX) if p.is_file())


def analyze_batch(target, cfg: AnalysisConfig = AnalysisConfig()) -> BatchReport:
    """Analyze every file; failures are recorded per file and never stop the run."""
    files = list_sources(target)
    cat = cfg.catalog()
    jobs = [(f, dataclasses.replace(cfg, workers=1), cat) for f in files]
    start_wall, start_cpu = time.perf_counter(), time.process_time()
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_batch_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        results = [_batch_job(j) for j in jobs]
    out = BatchReport()
    base = Path(target) if Path(target).is_dir() else Path(target).parent
    for f, (rep, err) in zip(files, results):
        name = f.relative_to(base).as_posix()
        if rep is None:
            out.errors[name] = err
        else:
            rep.file = name
            out.per_file[name] = rep
            out.timing[name] = (rep.wall, rep.cpu)
    out.timing["<total>"] = (time.perf_counter() - start_wall, time.process_time() - start_cpu)
    return out


# --------------------------------------------------------------------------
# output

def _indent(text: str, pad: str) -> str:
    return "".join(pad + line if line.strip() else line for line in text.splitlines(keepends=True))


def format_text(rep: FileReport, with_paths: bool) -> str:
    """Per-file text: ``Running <file>``, then each path's slice and chains."""
    if not with_paths:
        return f"Running {rep.file}\n" + _indent(rep.report.slice_text, "    ")
    out = [f"Running {rep.file}\n"]
    for v in rep.variants:
        out.append(f"    Path: {v.label}\n\n")
        if v.report.body_text:
            out.append(_indent(v.report.body_text, "        ") + "\n")
        out.append(_indent("\n".join(v.report.summary) + "\n", "        ") + "\n")
    return "".join(out)


def structured_records(batch: BatchReport, timing: bool = False) -> list:
    """JSON-ready records: one per flow, one summary per file, one per error.

    With ``timing`` the file records carry durations and a final record
    holds the batch total.
    """
    records = []
    for name in batch.files:
        if name in batch.errors:
            records.append({"type": "error", "file": name, "error": batch.errors[name]})
            continue
        rep = batch.per_file[name]
        for v in rep.variants:
            path = v.label if v.path_id is not None else None
            for f in v.report.flows:
                records.append({
                    "type": "flow", "file": name, "path": path, "chain": list(f.chain),
                    "original_chain": [rep.origin_line(n) for n in f.chain],
                    "origin_kind": f.origin_kind, "sink": f.sink, "sink_line": f.sink_line,
                })
        summary = {
            "type": "file", "file": name, "verdict": rep.verdict, "variants": len(rep.variants),
            "leaking_paths": [v.label for v in rep.variants if v.report.flows] if rep.variants[0].path_id is not None
            else None,
            "warnings": list(rep.warnings),
        }
        if timing:
            summary["wall_s"], summary["cpu_s"] = rep.wall, rep.cpu
        records.append(summary)
    if timing and "<total>" in batch.timing:
        wall, cpu = batch.timing["<total>"]
        records.append({"type": "timing", "files": len(batch.files), "wall_s": wall, "cpu_s": cpu})
    return records


def format_structured(batch: BatchReport, timing: bool = False) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in structured_records(batch, timing))


# --------------------------------------------------------------------------
# metrics

class MissingLabel(KeyError):
    def __init__(self, file: str, reason: str = "has no label"):
        super().__init__(f"{file} {reason}")
        self.file = file
        self.reason = reason

    def __str__(self) -> str:
        return f"{self.file} {self.reason}"


@dataclass(frozen=True)
class Metrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def precision(self) -> Optional[float]:
        d = self.tp + self.fp
        return self.tp / d if d else None

    @property
    def recall(self) -> Optional[float]:
        d = self.tp + self.fn
        return self.tp / d if d else None

    def text(self) -> str:
        def fmt(x):
            return "n/a" if x is None else f"{x:.3f}"
        return (f"tp={self.tp} fp={self.fp} fn={self.fn} tn={self.tn} "
                f"precision={fmt(self.precision)} recall={fmt(self.recall)}")


LABELS = ("leaking", "benign")


def read_labels(path) -> dict:
    """``filename,leaking|benign`` per line; blank lines and ``#`` comments ignored."""
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            name, _, label = (x.strip() for x in text.partition(","))
            if label not in LABELS or not name:
                raise ConfigError(f"expected 'file,leaking|benign', got {raw.strip()!r}", lineno)
            labels[name] = label
    return labels


def compute_metrics(batch: BatchReport, labels: dict) -> Metrics:
    """Confusion counts of file verdicts against labels."""
    for name in labels:
        if name not in batch.per_file and name not in batch.errors:
            raise MissingLabel(name, "is labeled but was not analyzed")
    counts = Counter()
    for name in batch.files:
        if name not in labels:
            raise MissingLabel(name)
        predicted = batch.verdict(name) == "leaking"
        actual = labels[name] == "leaking"
        counts[("t" if predicted == actual else "f") + ("p" if predicted else "n")] += 1
    return Metrics(counts["tp"], counts["fp"], counts["fn"], counts["tn"])


# --------------------------------------------------------------------------
# if-statement statistics

STATS = ("total_ifs", "max_ifs_per_method", "flow_affecting_ifs")


@dataclass
class IfHistograms:
    counts: dict = field(default_factory=dict)  # stat -> Counter(bucket -> apps)
    outliers: dict = field(default_factory=dict)  # stat -> {file: count} for counts above the limit
    errors: dict = field(default_factory=dict)

    def text(self) -> str:
        out = []
        for stat in STATS:
            out.append(f"# {stat}")
            out.append("ifs apps")
            for bucket, n in sorted(self.counts.get(stat, Counter()).items()):
                out.append(f"{bucket} {n}")
            extra = self.outliers.get(stat, {})
            out.append(f"outliers >{OUTLIER_IFS}: {len(extra)}")
            out.extend(f"  {name} {n}" for name, n in sorted(extra.items()))
            out.append("")
        if self.errors:
            out.append("# errors")
            out.extend(f"{name}: {msg}" for name, msg in sorted(self.errors.items()))
            out.append("")
        return "\n".join(out)


def if_histograms(target, cat: Optional[Catalog] = None) -> IfHistograms:
    cat = cat or default_catalog()
    h = IfHistograms({s: Counter() for s in STATS}, {s: {} for s in STATS})
    files = list_sources(target)
    base = Path(target) if Path(target).is_dir() else Path(target).parent
    for f in files:
        name = f.relative_to(base).as_posix()
        try:
            stats = if_stats(parse_source(f.read_text(encoding="utf-8")), cat)
        except ANALYSIS_ERRORS as e:
            h.errors[name] = f"{type(e).__name__}: {e}"
            continue
        for stat in STATS:
            n = getattr(stats, stat)
            if n > OUTLIER_IFS:
                h.outliers[stat][name] = n
            else:
                h.counts[stat][n] += 1
    return h


def emit_histograms(target, cat: Optional[Catalog] = None) -> str:
    return if_histograms(target, cat).text()


__all__ = [
    "AnalysisConfig", "BatchReport", "FileReport", "IfHistograms", "Metrics", "MissingLabel", "VariantReport",
    "analyze_batch", "analyze_file", "analyze_program", "analyze_source", "compute_metrics", "emit_histograms",
    "format_structured", "format_text", "if_histograms", "list_sources", "read_labels", "structured_records",
]

"""Static taint analysis for SmartThings Groovy apps.

The core tracks data backward from sink calls to sources; optional passes add
flow sensitivity (SSA renaming), path sensitivity (if/else variants) and
context sensitivity (per-call-site method clones).
"""
from .catalog import Catalog, ConfigError, default_catalog, load_catalog, read_catalog
from .cloning import clone_methods
from .driver import AnalysisConfig, analyze_batch, analyze_file, analyze_source, compute_metrics
from .frontend import parse_file, parse_source, render
from .pathgen import CapExceeded, PathConfig, enumerate_paths, false_path, if_stats, true_path
from .ssa import SsaError, to_ssa
from .taint import FlowReport, analyze

__version__ = "0.1.0"

"""Score the micro mutation suite under each combination of passes."""
from __future__ import annotations

import argparse
from pathlib import Path

from smarttaint.driver import AnalysisConfig, analyze_batch, compute_metrics, read_labels

CONFIGS = {
    "core": AnalysisConfig(),
    "ssa": AnalysisConfig(ssa=True),
    "paths": AnalysisConfig(paths=True),
    "clone": AnalysisConfig(clone=True),
    "ssa+paths+clone": AnalysisConfig(ssa=True, paths=True, clone=True),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("suite", nargs="?", default=str(Path(__file__).resolve().parent.parent / "corpus" / "micro"))
    args = ap.parse_args()
    labels = read_labels(Path(args.suite) / "labels.csv")
    for name, cfg in CONFIGS.items():
        batch = analyze_batch(args.suite, cfg)
        print(f"{name:16s} {compute_metrics(batch, labels).text()}")


if __name__ == "__main__":
    main()

"""Time the core and SSA configurations over a synthetic corpus."""
from __future__ import annotations

import argparse
import tempfile
import time

from smarttaint.driver import AnalysisConfig, analyze_batch
from smarttaint.synth import write_corpus


def best_wall(corpus: str, cfg: AnalysisConfig, repeats: int) -> float:
    walls = []
    for _ in range(repeats):
        start = time.perf_counter()
        batch = analyze_batch(corpus, cfg)
        walls.append(time.perf_counter() - start)
        if batch.errors:
            raise SystemExit(f"analysis errors: {batch.errors}")
    return min(walls)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        write_corpus(tmp, args.count)
        core = best_wall(tmp, AnalysisConfig(workers=args.workers), args.repeats)
        ssa = best_wall(tmp, AnalysisConfig(ssa=True, workers=args.workers), args.repeats)
    print(f"apps={args.count} core={core:.2f}s ssa={ssa:.2f}s overhead={100 * (ssa / core - 1):.1f}%")


if __name__ == "__main__":
    main()

"""Write a deterministic corpus of synthetic SmartApps."""
from __future__ import annotations

import argparse

from smarttaint.synth import SynthConfig, write_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output directory")
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--lines", type=int, default=300, help="approximate lines per app")
    ap.add_argument("--first-seed", type=int, default=0)
    args = ap.parse_args()
    paths = write_corpus(args.out, args.count, SynthConfig(target_lines=args.lines), args.first_seed)
    print(f"wrote {len(paths)} apps to {args.out}")


if __name__ == "__main__":
    main()

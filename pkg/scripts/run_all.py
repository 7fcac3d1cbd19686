"""Run every config under configs/ and print the consolidated check tables."""

import argparse
import sys
from pathlib import Path

from locconc.cli import read_config, report, run

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=str(ROOT / "configs"))
    ap.add_argument("--out", default="runs")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    failed = 0
    for path in sorted(Path(args.configs).glob("*.ini")):
        kind, params = read_config(path)
        out = run(kind, params, Path(args.out) / path.stem, threads=args.threads)
        summary = report(out)
        print(summary.to_text())
        failed += summary.count("fail")
    print(f"fail rows across all runs: {failed}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

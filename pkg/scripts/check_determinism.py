"""Run one config twice and compare the data-file hashes recorded in both manifests."""

import argparse
import json
import sys
import tempfile
from pathlib import Path

from locconc.cli import read_config, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config")
    args = ap.parse_args()
    kind, params = read_config(args.config)
    with tempfile.TemporaryDirectory() as tmp:
        hashes = []
        for i in range(2):
            out = run(kind, params, Path(tmp) / f"run{i}")
            hashes.append(json.loads((out / "manifest.json").read_text())["files"])
    same = hashes[0] == hashes[1]
    for name in sorted(hashes[0]):
        mark = "same" if hashes[0][name] == hashes[1].get(name) else "DIFF"
        print(f"{mark} {name} {hashes[0][name][:16]}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line experiment runner.

Every run writes into a staging directory next to ``--out`` and renames it
into place only after all files and the manifest are written, so a failed run
never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import platform
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from locconc import __version__
from locconc.errors import InvalidInputError, ResourceLimitError
from locconc.experiments import RUNNERS, Fmt, config_items, make_config

SUBCOMMANDS = {
    "gen-instance": "gen-instance",
    "check-subset-norms": "subset-norms",
    "plus-approx": "plus-approx",
    "taylor-spread": "taylor-spread",
    "shallow-tails": "shallow-tails",
    "run-qaoa": "qaoa-conc",
    "concentration": "markov-conc",
    "ogp": "ogp-symmetric",
    "bounds": "bound-ledger",
}

SECTION = "experiment"
CHECKS_FILE = "checks.csv"
MANIFEST = "manifest.json"


class UsageError(InvalidInputError):
    pass


def read_config(path: str | Path, expected_kind: str | None = None) -> tuple[str, dict[str, str]]:
    """Parse a flat ``[experiment]`` key = value file; ``kind`` may be implied by the subcommand."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not text.strip():
        raise UsageError(f"config {path} is empty")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from exc
    if SECTION not in parser:
        raise UsageError(f"config {path} has no [{SECTION}] section")
    params = dict(parser[SECTION])
    if not params:
        raise UsageError(f"config {path} has an empty [{SECTION}] section")
    kind = params.pop("kind", expected_kind)
    if kind is None:
        raise UsageError("config does not name an experiment kind")
    if expected_kind is not None and kind != expected_kind:
        raise UsageError(f"config kind {kind!r} does not match subcommand kind {expected_kind!r}")
    params.pop("out", None)
    return kind, params


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _checks_csv(checks, fmt: Fmt) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["formula_id", "measured", "bound", "status"])
    for fid, measured, bound, status in checks:
        w.writerow([fid, fmt(measured), fmt(bound), status])
    return buf.getvalue().encode()


def run(kind: str, params: dict[str, str], out: str | Path, seed: int | None = None, threads: int = 1, exact_floats: bool = False) -> Path:
    """Run one experiment and publish its directory atomically."""
    cfg = make_config(kind, params)
    if seed is not None and hasattr(cfg, "seed"):
        cfg.seed = seed
    run_seed = getattr(cfg, "seed", 0)
    fmt = Fmt(exact_floats)
    start = time.perf_counter()
    outcome = RUNNERS[kind](cfg, run_seed, fmt, threads)
    wall = time.perf_counter() - start
    files = dict(outcome.files)
    files[CHECKS_FILE] = _checks_csv(outcome.checks, fmt)

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        for name, data in sorted(files.items()):
            path = stage / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        manifest = {
            "kind": kind,
            "config": dict(config_items(cfg)),
            "seed": run_seed,
            "exact_floats": exact_floats,
            "threads": threads,
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "wall_time_s": wall,
            "files": {name: _sha256(data) for name, data in sorted(files.items())},
        }
        (stage / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        if out.exists():
            old = Path(tempfile.mkdtemp(prefix=f".{out.name}.old.", dir=out.parent))
            os.replace(out, old / "prev")
            os.replace(stage, out)
            shutil.rmtree(old)
        else:
            os.replace(stage, out)
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    return out


@dataclass(frozen=True)
class Summary:
    kind: str
    rows: list[tuple[str, str, str, str]]

    def count(self, status: str) -> int:
        return sum(1 for r in self.rows if r[3] == status)

    def to_text(self) -> str:
        widths = [max(len(r[i]) for r in [("formula_id", "measured", "bound", "status"), *self.rows]) for i in range(4)]
        head = ("formula_id", "measured", "bound", "status")
        lines = [f"experiment {self.kind}"]
        lines.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
        for r in self.rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
        tally = {s: self.count(s) for s in sorted({r[3] for r in self.rows})}
        lines.append("totals " + " ".join(f"{k}={v}" for k, v in tally.items()))
        return "\n".join(lines) + "\n"


def report(directory: str | Path) -> Summary:
    """Verify checksums of a run directory and tabulate its checks."""
    d = Path(directory)
    mpath = d / MANIFEST
    if not mpath.is_file():
        raise InvalidInputError(f"no {MANIFEST} in {d}")
    manifest = json.loads(mpath.read_text())
    for name, digest in manifest["files"].items():
        path = d / name
        if not path.is_file():
            raise InvalidInputError(f"missing data file {name}")
        if _sha256(path.read_bytes()) != digest:
            raise InvalidInputError(f"checksum mismatch for {name}")
    with open(d / CHECKS_FILE, newline="") as fh:
        rows = [tuple(r) for r in csv.reader(fh)][1:]
    return Summary(manifest["kind"], rows)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locconc", description="Locality and concentration experiments.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        p.add_argument("--config", help="flat [experiment] key = value file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory (default runs/<kind>)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for independent seeds")
        p.add_argument("--exact-floats", action="store_true", help="write floats as hex in CSV files")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    p = sub.add_parser("run", help="run whatever kind the config names")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--exact-floats", action="store_true")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p = sub.add_parser("report", help="summarise and verify a run directory")
    p.add_argument("dir")
    return ap


def _overrides(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "report":
            print(report(args.dir).to_text(), end="")
            return 0
        kind = SUBCOMMANDS.get(args.command)
        params: dict[str, str] = {}
        if args.config:
            kind, params = read_config(args.config, kind)
        params.update(_overrides(args.set))
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        out = args.out or os.path.join("runs", kind)
        path = run(kind, params, out, seed=args.seed, threads=args.threads, exact_floats=args.exact_floats)
        print(report(path).to_text(), end="")
        print(f"wrote {path}")
        return 0
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"locconc: error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"locconc: refused: {exc}", file=sys.stderr)
        return 3
    except InvalidInputError as exc:
        print(f"locconc: invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

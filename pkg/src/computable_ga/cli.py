"""``computable-ga`` command line: ``check``, ``verify`` and ``tables``.

Exit codes: 0 success, 1 a check failed, 2 usage, parse or config error.
The log level is read from ``COMPUTABLE_GA_LOG_LEVEL`` (default WARNING).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from .algebra import BLADE_NAMES, PRODUCT_INDEX, PRODUCT_SIGN
from .expressions import DSLSyntaxError, parse_lines
from .representation import builtin_reps, describe
from .rewrite import RewriteLimitError, check_computable
from .suite import ConfigError, RunConfig, parse_config, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
LOG_ENV = "COMPUTABLE_GA_LOG_LEVEL"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="computable-ga", description="Computability checker and lattice verification harness.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="classify each expression in a DSL file")
    c.add_argument("file", type=Path)
    c.add_argument("--expect", choices=["computable", "not-computable"])
    c.add_argument("--rule", choices=["printed", "derived"], default="printed", help="rewrite for S d~S (default: printed)")

    v = sub.add_parser("verify", help="run the seeded verification suite")
    v.add_argument("--config", type=Path)
    v.add_argument("--variant", choices=["plus", "minus", "both"])
    v.add_argument("--seed", type=int)
    v.add_argument("--out", type=Path, help="write <stem>.json and <stem>.csv")

    sub.add_parser("tables", help="print the product table and built-in representations")
    return p


def cmd_check(path: Path, expect: str | None, rule: str) -> int:
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        entries = parse_lines(text)
    except DSLSyntaxError as exc:
        line = getattr(exc, "lineno", 1)
        print(f"{path}:{line}:{exc.position + 1}: syntax error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    ok = True
    for lineno, source, expr in entries:
        try:
            rep = check_computable(expr, rule=rule)
        except RewriteLimitError as exc:
            print(f"{path}:{lineno}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(f"{lineno}: {source}: {rep.summary()}")
        want = expect or "computable"
        ok = ok and rep.verdict == want
    print(f"{len(entries)} expression{'s' if len(entries) != 1 else ''}")
    return EXIT_OK if ok else EXIT_FAIL


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            cfg = parse_config(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
    overrides = {}
    if args.variant is not None:
        overrides["variant"] = args.variant
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        cfg = RunConfig(**{**asdict(cfg), **overrides})
    return cfg


def cmd_verify(args) -> int:
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_suite(cfg, progress=lambda r: print(r.line(), flush=True))
    if args.out is not None:
        stem = args.out.with_suffix("")
        stem.parent.mkdir(parents=True, exist_ok=True)
        stem.with_suffix(".json").write_text(report.to_json())
        stem.with_suffix(".csv").write_text(report.to_csv())
    print("all checks passed" if report.passed else "some checks FAILED")
    return EXIT_OK if report.passed else EXIT_FAIL


def product_table() -> str:
    width = max(len(n) for n in BLADE_NAMES) + 2
    lines = [" " * width + "".join(n.rjust(width) for n in BLADE_NAMES)]
    for i, row in enumerate(BLADE_NAMES):
        cells = []
        for j in range(8):
            sign = "-" if PRODUCT_SIGN[i, j] < 0 else ""
            cells.append((sign + BLADE_NAMES[PRODUCT_INDEX[i, j]]).rjust(width))
        lines.append(row.rjust(width) + "".join(cells))
    return "\n".join(lines)


def cmd_tables() -> int:
    print("geometric product (row x column)")
    print(product_table())
    for r in builtin_reps():
        print()
        print(describe(r))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args.file, args.expect, args.rule)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_tables()


if __name__ == "__main__":
    sys.exit(main())

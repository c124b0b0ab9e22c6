"""Command line driver: ``nuetrack verify`` and ``nuetrack table KIND``.

Every flag has an environment override named NUETRACK_<FLAG>, for example
NUETRACK_R_SEQ or NUETRACK_PRECISION. Flags given on the command line win.

Exit codes: 0 all criteria pass, 1 a criterion fails, 2 invalid
configuration, 3 an enclosure is inconclusive (and nothing fails).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from . import suite
from .exactnum import DEFAULT_PRECISION, MIN_PRECISION
from .traintrack import GapSequence, InvalidSequence

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3
ENV_PREFIX = "NUETRACK_"
TABLES = ("residuals", "angles", "asymmetry", "intersections")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    r_seq: str = "quadratic"
    i_max: int = 8
    k_max: int = 6
    precision: int = DEFAULT_PRECISION
    out: str = "reports"
    format: str = "csv"

    def sequence(self) -> GapSequence:
        try:
            return GapSequence.parse(self.r_seq)
        except InvalidSequence as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self) -> GapSequence:
        if self.precision < MIN_PRECISION:
            raise ConfigError(f"precision must be at least {MIN_PRECISION} bits")
        if self.i_max < 2:
            raise ConfigError("i-max must be at least 2")
        if self.k_max < 0:
            raise ConfigError("k-max must be nonnegative")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        seq = self.sequence()
        needed = max(self.i_max + 2 * self.k_max + 1, 2 * 10 + 3)
        if len(seq) < needed:
            raise ConfigError(f"the gap sequence needs at least {needed} terms, got {len(seq)}")
        return seq


def _env(name: str, cast, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_PREFIX}{name}={raw!r}: {exc}") from exc


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    values = {}
    for field_name, cast in (("r_seq", str), ("i_max", int), ("k_max", int),
                             ("precision", int), ("out", str), ("format", str)):
        flag = getattr(args, field_name, None)
        values[field_name] = flag if flag is not None else _env(field_name.upper(), cast, getattr(base, field_name))
    return RunConfig(**values)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r-seq", help="formula name (quadratic, cubic, exponential) or comma separated r_n")
    common.add_argument("--i-max", type=int, help="largest block index in tables")
    common.add_argument("--k-max", type=int, help="largest product length in tables")
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--out", help="report directory for verify")
    common.add_argument("--format", choices=FORMATS, help="report format")
    parser = argparse.ArgumentParser(prog="nuetrack", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nuetrack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", parents=[common], help="run the acceptance suite and write reports")
    verify.add_argument("--only", type=int, action="append", help="run only this criterion (repeatable)")
    table = sub.add_parser("table", parents=[common], help="print one table as CSV on standard output")
    table.add_argument("kind", choices=TABLES)
    return parser


# tables


def table_rows(kind: str, cfg: RunConfig, seq: GapSequence):
    if kind == "residuals":
        return list(suite.RESIDUAL_HEADER), suite.residual_table(seq, cfg.i_max, cfg.k_max, cfg.precision)
    if kind == "angles":
        header = ["i", "group", "angle", "angle_lo", "angle_hi"]
        rows = [(i, g, suite.fmt(a.value), suite.fmt(a.lo), suite.fmt(a.hi))
                for i, g, a in suite.angle_table(seq, range(1, cfg.i_max + 1), cfg.precision)]
        return header, rows
    if kind == "asymmetry":
        header = ["i", "curve", "measure", "value", "monomial", "bound"]
        return header, suite.asymmetry_table(seq, cfg.i_max)
    if kind == "intersections":
        rows = suite.intersection_table(seq, 6)
        C = suite.band_constant([r for *_, r in rows])
        header = ["i", "j", "intersection", "estimate", "ratio", "band"]
        return header, [(i, j, k, str(e), suite.fmt(r), suite.fmt(C)) for i, j, k, e, r in rows]
    raise ConfigError(f"unknown table {kind!r}")


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def render_json(header, rows) -> str:
    return json.dumps([dict(zip(header, row)) for row in rows], indent=2, sort_keys=True, default=str) + "\n"


# commands


def exit_status(results) -> int:
    states = {r.status for r in results}
    if suite.FAIL in states:
        return EXIT_FAIL
    if suite.INCONCLUSIVE in states:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def cmd_verify(cfg: RunConfig, only=None, stream=None) -> int:
    stream = stream or sys.stdout
    seq = cfg.validate()
    results = suite.run_suite(seq, cfg.precision, only)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "version": __version__,
        "config": asdict(cfg),
        "status": {EXIT_PASS: "pass", EXIT_FAIL: "fail", EXIT_INCONCLUSIVE: "inconclusive"}[exit_status(results)],
        "criteria": [r.to_dict() for r in results],
    }
    (out / "verify.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if cfg.format == "csv":
        header = ["criterion", "check", "status", "detail"]
        rows = [(r.number, c.name, c.status, c.detail) for r in results for c in r.checks]
        (out / "verify.csv").write_text(render_csv(header, rows))
    for r in results:
        print(f"criterion {r.number:2d} {r.status:12s} {r.title}", file=stream)
    return exit_status(results)


def cmd_table(kind: str, cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    seq = cfg.validate()
    header, rows = table_rows(kind, cfg, seq)
    stream.write(render_json(header, rows) if cfg.format == "json" else render_csv(header, rows))
    return EXIT_PASS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "verify":
                return cmd_verify(cfg, args.only)
            return cmd_table(args.kind, cfg)
    except ConfigError as exc:
        print(f"nuetrack: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

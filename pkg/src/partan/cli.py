"""Command-line entry point: ``partan verify|rules|crude|table|conjecture``.

Exit codes: 0 when every emitted report passes, 1 on any verified mismatch,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import identities as ids
from .omega import ALL_RULES, RuleId, UnsupportedCrudeForm, check_base_rule, check_rule, verify_crude
from .partitions import ALT, PLAIN, SCHMIDT, FamilySpec, brute_series
from .report import Report
from .series import TruncationContext

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONFIG_KEYS = ("default_order", "threads", "output_dir")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    default_order: int = 30
    threads: int = 1
    output_dir: Path | None = None

    def __post_init__(self):
        if self.default_order < 1:
            raise UsageError("default_order must be at least 1")
        if self.threads < 1:
            raise UsageError("threads must be at least 1")


def load_config(path: str | os.PathLike) -> RunConfig:
    """Read ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config: {e}") from e
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        if key == "output_dir":
            values[key] = Path(value)
        else:
            try:
                values[key] = int(value)
            except ValueError:
                raise UsageError(f"config line {lineno}: {key} must be an integer") from None
    return RunConfig(**values)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="partan", description="Exact checks of partition generating-function identities.")
    p.add_argument("--config", help="file of 'key = value' lines (default_order, threads, output_dir)")
    p.add_argument("--threads", type=_positive, help="worker processes for independent checks")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="check one identity id, or 'all'")
    v.add_argument("id")
    v.add_argument("--order", type=_positive)
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--out")

    r = sub.add_parser("rules", help="check every Omega elimination rule")
    r.add_argument("--max-degree", type=_positive, default=10)
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--out")

    c = sub.add_parser("crude", help="Omega of a crude form against enumeration")
    c.add_argument("--family", required=True)
    c.add_argument("--mode", required=True, choices=("exact", "paired", "bounded"))
    c.add_argument("--n", type=_positive, required=True)
    c.add_argument("--degree", type=_positive, default=8)
    c.add_argument("--cap", type=_positive)
    c.add_argument("--format", choices=("json", "text"), default="json")
    c.add_argument("--out")

    t = sub.add_parser("table", help="coefficient table of a family by enumeration")
    t.add_argument("--family", required=True)
    t.add_argument("--stat", choices=("plain", "alt", "schmidt"), default="plain")
    t.add_argument("--order", type=_positive)
    t.add_argument("--out")

    k = sub.add_parser("conjecture", help="finite evidence for the (T, k) product formula")
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--t", required=True, help="comma-separated residues")
    k.add_argument("--order", type=_positive)
    k.add_argument("--length", type=_positive, default=4)
    k.add_argument("--refined-order", type=_positive, default=12)
    k.add_argument("--format", choices=("json", "text"), default="json")
    k.add_argument("--out")
    return p


def _out_path(cfg: RunConfig, out: str | None) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    if cfg.output_dir is not None and not path.is_absolute():
        path = cfg.output_dir / path
    return path


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e}") from e


def emit(reports: list[Report], fmt: str, path: Path | None) -> int:
    """Write reports (JSON lines or text) and return the exit code."""
    if fmt == "json":
        text = "".join(r.to_json() + "\n" for r in reports)
    else:
        text = "".join(r.to_text() + "\n" for r in reports)
    _write(text, path)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def _verify_one(job):
    iid, order = job
    return ids.check_identity(iid, order)


def _run(fn, jobs, threads):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_verify(args, cfg: RunConfig) -> int:
    order = args.order or cfg.default_order
    if args.id.strip().lower() == "all":
        targets = sorted(ids.ALL_IDS)
    else:
        try:
            targets = [ids.normalize_id(args.id)]
        except KeyError:
            raise UsageError(f"unknown identity id {args.id!r}; known: all, "
                             + ", ".join(sorted(ids.ALL_IDS))) from None
    reports = _run(_verify_one, [(t, order) for t in targets], cfg.threads)
    reports.sort(key=lambda r: r.check)
    return emit(reports, args.format, _out_path(cfg, args.out))


def _rule_job(job):
    name, param, degree = job
    if name == "BASE":
        return check_base_rule(degree)
    return check_rule(RuleId(name, param), degree)


def cmd_rules(args, cfg: RunConfig) -> int:
    jobs = [("BASE", None, args.max_degree)]
    jobs += [(r.name, r.param, args.max_degree) for r in ALL_RULES]
    jobs += [("CHI", k, args.max_degree) for k in range(6)]
    reports = _run(_rule_job, jobs, cfg.threads)
    reports.sort(key=lambda r: r.check)
    return emit(reports, args.format, _out_path(cfg, args.out))


def _family(name: str) -> FamilySpec:
    try:
        f = FamilySpec.parse(name)
    except (KeyError, ValueError):
        f = None
    if f is None:
        raise UsageError(f"unknown family {name!r}; use all, g1, g2, g1p, g2p, p1, p2, p1p or p2p")
    return f


def cmd_crude(args, cfg: RunConfig) -> int:
    f = _family(args.family)
    cap = args.cap if args.cap is not None else args.degree
    try:
        report = verify_crude(f, args.mode, args.n, args.degree, cap)
    except UnsupportedCrudeForm as e:
        raise UsageError(str(e)) from None
    return emit([report], args.format, _out_path(cfg, args.out))


def coefficient_rows(f: FamilySpec, stat: str, order: int) -> list[tuple[int, ...]]:
    """``(n, coeff)`` for every n <= order, or nonzero ``(n, z, coeff)`` for bivariate stats."""
    if stat == "plain":
        ctx = TruncationContext.build(["q"], order)
        series = brute_series(f, PLAIN, ctx)
        return [(n, series.coeff(q=n)) for n in range(order + 1)]
    scheme = ALT if stat == "alt" else SCHMIDT
    ctx = TruncationContext.build(["z", "q"], order, weights={"z": 0, "q": 1})
    series = brute_series(f, scheme, ctx)
    iz, iq = ctx.index("z"), ctx.index("q")
    return sorted((e[iq], e[iz], c) for e, c in series.items())


def cmd_table(args, cfg: RunConfig) -> int:
    f = _family(args.family)
    rows = coefficient_rows(f, args.stat, args.order or cfg.default_order)
    header = ["n", "coeff"] if args.stat == "plain" else ["n", "z", "coeff"]
    path = _out_path(cfg, args.out)
    if path is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return EXIT_PASS
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e}") from e
    return EXIT_PASS


def _residues(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"residues must be comma-separated integers, got {text!r}") from None


def cmd_conjecture(args, cfg: RunConfig) -> int:
    residues = _residues(args.t)
    try:
        FamilySpec.gen(residues, args.k)
    except ValueError as e:
        raise UsageError(str(e)) from None
    report = ids.check_conjecture(residues, args.k, args.order or cfg.default_order,
                                  length=args.length, refined_order=args.refined_order)
    return emit([report], args.format, _out_path(cfg, args.out))


COMMANDS = {
    "verify": cmd_verify, "rules": cmd_rules, "crude": cmd_crude,
    "table": cmd_table, "conjecture": cmd_conjecture,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.threads is not None:
            cfg.threads = args.threads
        return COMMANDS[args.command](args, cfg)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

JSON goes to stdout (with ``--json``), human-readable tables otherwise;
diagnostics always go to stderr.

Exit codes: 0 success, 1 input or validation error (or a replication
mismatch), 2 usage error, 3 total conflict, 4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .combination import condition, dempster_combine
from .errors import CapacityError, EvidenceError, TotalConflict
from .frame import Frame, MassFunction, Subset, format_decimal, rational_str
from .gamma import DatasetTable, bpa_from_gamma, build_gamma
from .population import Labeling, LabelingProcessSpec, PopulationSpec, apply_general_process
from .replication import REPLICATIONS, failed, records_to_json, run

EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CONFLICT = 3
EXIT_CAPACITY = 4

TABLE_ALL_SUBSETS_LIMIT = 6


class UsageError(Exception):
    pass


def parse_subset(frame: Frame, text: str) -> Subset:
    """Comma-separated element names; surrounding whitespace is ignored."""
    names = [t.strip() for t in text.split(",") if t.strip()]
    by_name = {str(e): e for e in frame}
    unknown = [n for n in names if n not in by_name]
    if unknown:
        raise UsageError(f"unknown frame element(s): {', '.join(unknown)}")
    return frame.subset(by_name[n] for n in names)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise EvidenceError(f"{path}: invalid JSON: {exc}") from None


def _inputs(args, count: int) -> list[str]:
    files = list(args.files or []) + list(args.input or [])
    if len(files) != count:
        raise UsageError(f"{args.command} expects {count} input file(s), got {len(files)}")
    return files


def mass_table(m: MassFunction, digits: int) -> str:
    if len(m.frame) <= TABLE_ALL_SUBSETS_LIMIT:
        rows = list(m.frame.subsets(nonempty=True))
    else:
        rows = list(m.focals)
    cells = [("subset", "m", "Bel", "Pl")]
    for s in rows:
        cells.append((repr(s), format_decimal(m.mass(s), digits), format_decimal(m.belief(s), digits), format_decimal(m.plausibility(s), digits)))
    widths = [max(len(r[i]) for r in cells) for i in range(4)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def _emit_combination(res, args) -> None:
    if args.json:
        print(res.to_json(indent=2))
        return
    print(mass_table(res.combined, args.precision))
    print(f"conflict: {rational_str(res.conflict_mass)} ({format_decimal(res.conflict_mass, args.precision)})")
    print(f"c: {rational_str(res.normalization_constant)}")


def cmd_bpa(args) -> int:
    (path,) = _inputs(args, 1)
    data = DatasetTable.from_csv(path)
    m = bpa_from_gamma(build_gamma(data, args.observable, args.target))
    if args.json:
        print(m.to_json(indent=2))
    else:
        print(mass_table(m, args.precision))
    return 0


def cmd_combine(args) -> int:
    p1, p2 = _inputs(args, 2)
    res = dempster_combine(MassFunction.from_dict(_read_json(p1)), MassFunction.from_dict(_read_json(p2)))
    _emit_combination(res, args)
    return 0


def cmd_condition(args) -> int:
    (path,) = _inputs(args, 1)
    m = MassFunction.from_dict(_read_json(path))
    res = condition(m, parse_subset(m.frame, args.on))
    _emit_combination(res, args)
    return 0


def cmd_simulate(args) -> int:
    pop_path, proc_path = _inputs(args, 2)
    pop = PopulationSpec.from_dict(_read_json(pop_path))
    proc = LabelingProcessSpec.from_dict(_read_json(proc_path), pop.frame)
    report = apply_general_process(pop, Labeling.unlabeled(pop), proc, mode=args.mode, trials=args.trials, seed=args.seed)
    if args.json:
        print(report.to_json(indent=2))
    else:
        print(report.to_table(args.precision))
    return 0


def cmd_replicate(args) -> int:
    records = run(args.name)
    if args.json:
        print(records_to_json(records, indent=2))
    else:
        for r in records:
            print("\n".join(r.summary_lines(args.precision)))
    return EXIT_ERROR if failed(records) else 0


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit machine-readable JSON on stdout")
    common.add_argument("--precision", type=_nonnegative, default=4, metavar="K", help="decimal digits for display")

    files = argparse.ArgumentParser(add_help=False)
    files.add_argument("files", nargs="*", metavar="FILE")
    files.add_argument("--input", action="append", metavar="FILE", help="input file (repeatable)")

    parser = argparse.ArgumentParser(prog="evidencelab", description="Exact Dempster-Shafer evidence toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bpa", parents=[common, files], help="mass/belief/plausibility table from a CSV dataset")
    p.add_argument("--observable", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_bpa)

    p = sub.add_parser("combine", parents=[common, files], help="Dempster combination of two mass-function files")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("condition", parents=[common, files], help="Dempster conditioning on a subset")
    p.add_argument("--on", required=True, metavar="ELEMS", help="comma-separated element names")
    p.set_defaults(func=cmd_condition)

    p = sub.add_parser("simulate", parents=[common, files], help="randomized labeling process against Dempster's rule")
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--trials", type=_positive, default=100_000, metavar="N")
    p.add_argument("--seed", type=_nonnegative, default=0, metavar="S")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replicate", parents=[common], help="reproduce the worked examples")
    p.add_argument("name", choices=[*REPLICATIONS, "all"])
    p.set_defaults(func=cmd_replicate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TotalConflict as exc:
        print(f"error: total conflict, conflict mass {rational_str(exc.conflict)}", file=sys.stderr)
        return EXIT_CONFLICT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

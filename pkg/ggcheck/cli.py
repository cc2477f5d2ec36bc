"""Command-line front end.

``ggcheck check`` runs the criteria pipeline on a record, ``ggcheck algebra``
exposes the power-series operations, ``ggcheck report`` renders a markdown
table over many records, ``ggcheck fetch`` prints engine output and
``ggcheck survey`` lists candidate fields.

Exit status: 0 when GGC or weak GGC is proved, 2 when the criteria are
inconclusive and 1 on errors.
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from ggcheck import __version__, helpers
from ggcheck.bivar import SeriesMatrix, char_det
from ggcheck.config import CasSettings
from ggcheck.criteria import (
    Decision,
    Level,
    Verdict,
    hilbert_in_ztilde,
    p_split_p_rational,
    record_char,
    verdict_pipeline,
)
from ggcheck.exceptions import AmbiguityError, CasError, DataMissingError, InvalidArgumentError
from ggcheck.fielddata import FieldRecord, bundled_record, bundled_records, candidate_fields, load_record
from ggcheck.gp import cas_fetch, parse_task
from ggcheck.series import (
    PowerSeries,
    hensel_lift_root,
    irreducible_by_newton,
    lambda_invariant,
    mu_invariant,
    newton_polygon,
    nu_polynomial,
    weierstrass_prepare,
)

log = logging.getLogger(__name__)

EXIT_PROVED, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
DEFAULT_TASKS = ("class_group", "aux_class_number")

HEADLINES = {
    Level.GGC_HOLDS: "GGC holds",
    Level.WEAK_GGC_HOLDS: "weak GGC holds",
    Level.INCONCLUSIVE: "inconclusive",
}
SHORT_LABELS = {
    Level.GGC_HOLDS: "GGC",
    Level.WEAK_GGC_HOLDS: "weak GGC",
    Level.INCONCLUSIVE: "Inconclusive",
}


def _emit(args: argparse.Namespace, text: str, data: Any) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


def _settings(args: argparse.Namespace) -> CasSettings:
    return CasSettings.from_env().override(args.engine_path, args.timeout)


# -- check ---------------------------------------------------------------------


def _check_record(args: argparse.Namespace) -> FieldRecord:
    record = None
    if args.record:
        record = load_record(Path(args.record).read_bytes())
    elif args.p is None or args.d is None:
        raise InvalidArgumentError("Give a record path or both --p and --d.")
    elif not args.fetch:
        record = bundled_record(args.d)
        if record.p != args.p:
            raise InvalidArgumentError(f"The bundled record for d={args.d} has p={record.p}.")
    if not args.fetch:
        return record
    p, d = record.key if record else (args.p, args.d)
    tasks = args.task or list(DEFAULT_TASKS)
    partial = cas_fetch(p, d, tasks, _settings(args), record)
    return partial.apply(record) if record else partial.to_record()


def render_verdict(record: FieldRecord, verdict: Verdict) -> str:
    """Text report: headline, failed precondition and one line per trace entry."""
    lines = [f"p={record.p} d={record.d}: {HEADLINES[verdict.level]}"]
    if verdict.reason:
        lines.append(f"  first failure: {verdict.reason}")
    for entry in verdict.trace:
        lines.append(f"  [{entry.criterion}] {entry.outcome}")
        lines.append(f"      {entry.statement}")
        if entry.reading:
            lines.append(f"      reading: {entry.reading}")
    return "\n".join(lines)


def cmd_check(args: argparse.Namespace) -> int:
    """Run the criteria pipeline on one record."""
    record = _check_record(args)
    verdict = verdict_pipeline(record)
    data = {"p": record.p, "d": record.d, "verdict": verdict.to_dict()}
    _emit(args, render_verdict(record, verdict), data)
    return EXIT_INCONCLUSIVE if verdict.level == Level.INCONCLUSIVE else EXIT_PROVED


# -- algebra -------------------------------------------------------------------


def _series(args: argparse.Namespace) -> PowerSeries:
    coeffs = helpers.parse_int_list(args.coeffs)
    return PowerSeries.polynomial(coeffs, args.p, args.prec, args.cutoff)


def cmd_algebra(args: argparse.Namespace) -> int:
    """Run one power-series operation and print its result."""
    op = args.operation
    if op == "prepare":
        prep = weierstrass_prepare(_series(args))
        dist, unit = prep.distinguished, prep.unit
        text = (
            f"mu={prep.mu} lambda={dist.lambda_}\n"
            f"P = {dist.to_string('T')}\nU = {unit.to_string('T')}"
        )
        data = {
            "mu": prep.mu,
            "lambda": dist.lambda_,
            "distinguished": dist.to_string("T"),
            "unit": unit.to_string("T"),
            "slack": prep.slack,
        }
    elif op == "hensel":
        root = hensel_lift_root(_series(args), args.root)
        text = str(root)
        data = {"root": root.residue, "p": root.p, "prec": root.prec}
    elif op == "newton":
        h = _series(args)
        decision = irreducible_by_newton(h)
        vertices: list[list[int]] | None
        try:
            polygon = newton_polygon(h)
            description = polygon.describe()
            vertices = [list(v) for v in polygon.vertices]
            slopes = [str(s) for s, _ in polygon.segments]
        except AmbiguityError:
            # only a linear polynomial is decided without its polygon
            description, vertices, slopes = "degree 1", None, []
        text = f"{description}: {decision.value}"
        data = {
            "vertices": vertices,
            "slopes": slopes,
            "decision": decision.value,
        }
    elif op == "invariants":
        h = _series(args)
        mu, lam = mu_invariant(h), lambda_invariant(h)
        text = f"mu={mu} lambda={lam}"
        data: dict[str, Any] = {"mu": str(mu), "lambda": str(lam)}
        if h.coefficient(0).is_zero:
            g0_val = h.coefficient(1).valuation()
            text += f" g0_val={g0_val}"
            data["g0_val"] = str(g0_val)
    elif op == "nu":
        nu = nu_polynomial(args.m, args.p, args.prec, args.cutoff)
        text = nu.to_string("S")
        data = {"nu": text}
    else:
        matrix = SeriesMatrix.from_ints(helpers.parse_matrix(args.matrix), args.p, args.prec)
        det = char_det(matrix, args.orientation)
        text = det.to_string()
        data = {"determinant": text, "orientation": args.orientation}
    _emit(args, text, data)
    return EXIT_PROVED


# -- report --------------------------------------------------------------------


def _mark(decision: Decision) -> str:
    return {Decision.TRUE: "yes", Decision.FALSE: "no", Decision.UNKNOWN: "?"}[decision]


def report_row(record: FieldRecord) -> dict[str, Any]:
    """Summary values of one record for the survey table."""
    verdict = verdict_pipeline(record)
    row: dict[str, Any] = {
        "p": record.p,
        "d": record.d,
        "s": record.s_exp,
        "verdict": SHORT_LABELS[verdict.level],
    }
    try:
        char = record_char(record)
    except (ValueError, ArithmeticError) as e:
        row.update({"lambda": "-", "mu": "-", "g0_val": "-", "p_rational": "?", "note": str(e)})
        return row
    try:
        hilbert = hilbert_in_ztilde(record)
    except DataMissingError:
        hilbert = Decision.UNKNOWN
    row.update(
        {
            "lambda": str(char.lambda_cyc),
            "mu": str(char.mu),
            "g0_val": str(char.g0_val),
            "p_rational": _mark(p_split_p_rational(record, char, hilbert)),
        }
    )
    return row


def _load_row(path: str) -> dict[str, Any]:
    try:
        return report_row(load_record(Path(path).read_bytes()))
    except (ValueError, ArithmeticError, OSError) as e:
        log.warning(f"cannot report on {path}: {e}")
        return {"path": path, "error": str(e), "verdict": SHORT_LABELS[Level.INCONCLUSIVE]}


def render_table(rows: list[dict[str, Any]]) -> str:
    """Markdown table, one row per record."""
    lines = [
        "| p | d | λ_cyc | μ | g0_val | s | p-rational | verdict |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for row in rows:
        if "error" in row:
            lines.append(f"| - | {row['path']} | - | - | - | - | - | {row['verdict']} (error) |")
            continue
        lines.append(
            f"| {row['p']} | {row['d']} | {row['lambda']} | {row['mu']} | {row['g0_val']} "
            f"| {row['s']} | {row['p_rational']} | {row['verdict']} |"
        )
    return "\n".join(lines)


def cmd_report(args: argparse.Namespace) -> int:
    """Render the verdicts of many records as a table ordered by ``(p, d)``."""
    if args.records:
        paths = sorted({path for pattern in args.records for path in glob.glob(pattern)})
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_load_row, paths))
    else:
        rows = [report_row(record) for record in bundled_records()]
    rows.sort(key=lambda r: (1, 0, r["path"]) if "error" in r else (0, r["p"], r["d"]))
    _emit(args, render_table(rows), rows)
    if not rows or all("error" in row for row in rows):
        print("no record could be reported", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_PROVED


# -- fetch and survey ------------------------------------------------------------


def cmd_fetch(args: argparse.Namespace) -> int:
    """Print the fields computed by the engine for one field."""
    tasks = [parse_task(t) for t in (args.task or DEFAULT_TASKS)]
    record = load_record(Path(args.record).read_bytes()) if args.record else None
    partial = cas_fetch(args.p, args.d, tasks, _settings(args), record)
    data = {"p": partial.p, "d": partial.d, "fields": partial.fields}
    print(json.dumps(data, indent=2, sort_keys=True))
    return EXIT_PROVED


def cmd_survey(args: argparse.Namespace) -> int:
    """List square-free d for which p splits, optionally in one residue class."""
    found = candidate_fields(args.p, args.d_max, args.residue, args.modulus, args.d_min)
    _emit(args, " ".join(str(d) for d in found), found)
    return EXIT_PROVED


# -- parser ----------------------------------------------------------------------


def _engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--engine-path", help="PARI/GP executable, overrides GGCHECK_GP_PATH")
    parser.add_argument("--timeout", type=float, help="seconds per engine task")
    parser.add_argument(
        "--task",
        action="append",
        help="engine task, e.g. class_group or layers:N:2:1 (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``ggcheck`` command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="ggcheck", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="run the criteria on a record")
    check.add_argument("record", nargs="?", help="record JSON file")
    check.add_argument("--p", type=int)
    check.add_argument("--d", type=int)
    check.add_argument("--fetch", action="store_true", help="complete the record with PARI/GP")
    _engine_flags(check)
    check.set_defaults(func=cmd_check)

    algebra = sub.add_parser("algebra", help="standalone power-series algebra")
    ops = algebra.add_subparsers(dest="operation", required=True)
    for name, summary in (
        ("prepare", "Weierstrass preparation"),
        ("hensel", "lift a root"),
        ("newton", "Newton polygon irreducibility test"),
        ("invariants", "mu, lambda and g0 valuation"),
    ):
        op = ops.add_parser(name, parents=[common], help=summary)
        op.add_argument("--p", type=int, required=True)
        op.add_argument("--prec", type=int, required=True)
        op.add_argument("--cutoff", type=int)
        op.add_argument("--coeffs", required=True, help="ascending coefficients, e.g. 0,64638,1")
        if name == "hensel":
            op.add_argument("--root", type=int, required=True, help="approximate root r0")
        op.set_defaults(func=cmd_algebra)
    nu = ops.add_parser("nu", parents=[common], help="the polynomial ((1+S)^(p^m) - 1) / S")
    nu.add_argument("--p", type=int, required=True)
    nu.add_argument("--m", type=int, required=True)
    nu.add_argument("--prec", type=int, default=10)
    nu.add_argument("--cutoff", type=int)
    nu.set_defaults(func=cmd_algebra)
    det = ops.add_parser("det", parents=[common], help="characteristic determinant det(X I - F)")
    det.add_argument("--p", type=int, required=True)
    det.add_argument("--prec", type=int, default=10)
    det.add_argument("--matrix", required=True, help="rows split by ';', e.g. '0 1,1;2 0'")
    det.add_argument("--orientation", choices=("T", "S"), default="T")
    det.set_defaults(func=cmd_algebra)

    report = sub.add_parser("report", parents=[common], help="markdown table over records")
    report.add_argument("records", nargs="*", help="record globs, defaults to the bundled data")
    report.add_argument("--jobs", type=int, default=4)
    report.set_defaults(func=cmd_report)

    fetch = sub.add_parser("fetch", parents=[common], help="print PARI/GP output as JSON")
    fetch.add_argument("--p", type=int, required=True)
    fetch.add_argument("--d", type=int, required=True)
    fetch.add_argument("--record", help="record supplying defining polynomials")
    _engine_flags(fetch)
    fetch.set_defaults(func=cmd_fetch)

    survey = sub.add_parser("survey", parents=[common], help="candidate fields in a range")
    survey.add_argument("--p", type=int, required=True)
    survey.add_argument("--d-max", type=int, required=True)
    survey.add_argument("--d-min", type=int, default=2)
    survey.add_argument("--residue", type=int)
    survey.add_argument("--modulus", type=int)
    survey.set_defaults(func=cmd_survey)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Entry point of the ``ggcheck`` command."""
    args = build_parser().parse_args(argv)
    levels = (logging.WARNING, logging.INFO, logging.DEBUG)
    logging.basicConfig(
        level=levels[min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, CasError, OSError) as e:
        print(f"ggcheck: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

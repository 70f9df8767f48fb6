"""Command line front end.

Exit codes: 0 success, 2 invalid spec or configuration, 3 indeterminate
convergence class under ``--strict``, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from .estimators import METHOD_CHOICES, spec_from_file
from .exceptions import (
    AccelerationInapplicable,
    DomainError,
    NumericFailure,
    ResourceError,
    SpecError,
)
from .functions import MultiplicativeSpec, lookup
from .mean_value import (
    DEFAULT_EPS,
    DEFAULT_PRIME_LIMIT,
    DEFAULT_SPLIT,
    PAPER_TRUNCATION,
    mean_value,
)
from .series import DEFAULT_ORDER, local_factor_to_X, series_neg_log
from .special import prime_zeta, prime_zeta_bound, prime_zeta_direct
from .summatory import summatory

EXIT_OK, EXIT_INVALID, EXIT_INDETERMINATE, EXIT_NUMERIC = 0, 2, 3, 4

# Commonly printed truncation of -log(1 - 2t^2 + t^3); its t^8 and t^9
# terms omit the X^4 contributions.
PRINTED_EXPANSION = {
    "totient_ratio_squared": {
        2: Fraction(2), 3: Fraction(-1), 4: Fraction(2), 5: Fraction(-2),
        6: Fraction(19, 6), 7: Fraction(-4), 8: Fraction(2), 9: Fraction(-1, 3),
    }
}

CSV_COLUMNS = ("x", "S", "S_over_x", "predicted_mean", "residual")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return fmt(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def dump_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def parse_checkpoints(text: str) -> list[int]:
    """Comma list of integers; ``a,b,...,z`` extends the ratio ``b/a`` up to ``z``."""
    items = [s.strip().replace("_", "") for s in text.split(",") if s.strip()]
    try:
        if "..." in items:
            i = items.index("...")
            if i < 2 or i != len(items) - 2:
                raise CliError("'...' needs two leading terms and one final term")
            a, b, last = int(float(items[i - 2])), int(float(items[i - 1])), int(float(items[-1]))
            head = [int(float(x)) for x in items[: i - 2]]
            if b <= a or a <= 0:
                raise CliError("progression must be increasing")
            seq = [a, b]
            if b % a == 0:
                r = b // a
                while seq[-1] * r <= last:
                    seq.append(seq[-1] * r)
            else:
                d = b - a
                while seq[-1] + d <= last:
                    seq.append(seq[-1] + d)
            if seq[-1] != last:
                seq.append(last)
            return head + seq
        return [int(float(x)) for x in items]
    except ValueError:
        raise CliError(f"bad checkpoint list {text!r}") from None


def decades(n: int) -> list[int]:
    out = []
    x = 10
    while x <= n:
        out.append(x)
        x *= 10
    if not out or out[-1] != n:
        out.append(n)
    return out


def parse_k_range(text: str) -> list[int]:
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _positive_int(text: str) -> int:
    try:
        v = int(float(text.replace("_", "")))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("function", nargs="?", help="builtin id, e.g. mobius or totient-ratio-squared")
    common.add_argument("--spec", help="path to a JSON spec file")
    common.add_argument("--method", choices=METHOD_CHOICES, default="auto")
    common.add_argument("--prime-limit", type=_positive_int, default=DEFAULT_PRIME_LIMIT)
    common.add_argument("--series-order", type=_positive_int, default=None)
    common.add_argument("--split-p0", type=_positive_int, default=DEFAULT_SPLIT)
    common.add_argument("--n", type=_positive_int)
    common.add_argument("--checkpoints", type=str)
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true")
    out.add_argument("--csv", action="store_true")
    common.add_argument("--strict", action="store_true")
    common.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)

    parser = argparse.ArgumentParser(prog="multmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("meanvalue", parents=[common], help="asymptotic mean value")
    sub.add_parser("summatory", parents=[common], help="exact S(x) at checkpoints")
    cmp_ = sub.add_parser("compare", parents=[common], help="oracle versus prediction")
    cmp_.add_argument("--threshold", type=float, default=1e-3)
    pz = sub.add_parser("primezeta", parents=[common], help="P(k) by two routes")
    pz.add_argument("--k", default="2..10", help="single k or range like 2..10")
    sub.add_parser("coefficients", parents=[common], help="exact a_k and b_k")
    return parser


def _select(args) -> MultiplicativeSpec:
    if args.spec and args.function:
        raise CliError("give either a builtin function or --spec, not both")
    if args.spec:
        return spec_from_file(args.spec)
    if not args.function:
        raise CliError("a function (builtin id or --spec) is required")
    return lookup(args.function)


def _mean(spec, args):
    res = mean_value(
        spec,
        args.method,
        prime_limit=args.prime_limit,
        series_order=args.series_order or DEFAULT_ORDER,
        split_p0=args.split_p0,
        eps=DEFAULT_EPS,
    )
    if args.strict and res.convergence_class == "indeterminate":
        raise CliError(f"{spec.name}: convergence class is indeterminate", EXIT_INDETERMINATE)
    return res


def _emit_table(rows: list[dict], columns: Sequence[str], out) -> None:
    cells = [[fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    out.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _emit_csv(rows: list[dict], columns: Sequence[str], out) -> None:
    w = csv.writer(out)
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in columns])


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return fmt(v)


def _emit(rows, columns, args, out, extra=None):
    if args.json:
        payload = dict(extra or {})
        payload["rows"] = rows
        out.write(dump_json(payload))
    elif args.csv:
        _emit_csv(rows, columns, out)
    else:
        _emit_table(rows, columns, out)


def run_meanvalue(args, out) -> int:
    spec = _select(args)
    res = _mean(spec, args)
    payload = {"function": spec.name, **res.to_dict()}
    if args.json:
        out.write(dump_json(payload))
    elif args.csv:
        cols = ["function", "value", "c_constant", "method", "convergence_class", "error_bound",
                "prime_limit", "series_order", "split_p0", "multiplier"]
        row = {**payload, **res.truncation_params}
        _emit_csv([row], cols, out)
    else:
        for key in ("function", "value", "c_constant", "method", "convergence_class", "error_bound", "multiplier"):
            out.write(f"{key:<18} {fmt(payload[key])}\n")
        for key, v in res.truncation_params.items():
            out.write(f"{key:<18} {fmt(v)}\n")
        for w in res.warnings:
            out.write(f"warning            {w}\n")
    return EXIT_OK


def _report_rows(reports):
    return [
        {"x": r.x, "S": r.S, "S_over_x": r.ratio, "predicted_mean": r.predicted_mean, "residual": r.residual}
        for r in reports
    ]


def _oracle(args, default_checkpoints):
    spec = _select(args)
    if args.n is None:
        raise CliError("--n is required")
    cps = parse_checkpoints(args.checkpoints) if args.checkpoints else default_checkpoints(args.n)
    res = _mean(spec, args)
    reports = summatory(spec, args.n, cps, threads=args.threads, predicted_mean=res.value)
    return spec, res, reports


def run_summatory(args, out) -> int:
    spec, res, reports = _oracle(args, lambda n: [n])
    _emit(_report_rows(reports), CSV_COLUMNS, args, out, {"function": spec.name, "method": res.method})
    return EXIT_OK


def run_compare(args, out) -> int:
    spec, res, reports = _oracle(args, decades)
    rows = _report_rows(reports)
    for r in rows:
        r["flagged"] = abs(r["residual"]) > args.threshold
    cols = [*CSV_COLUMNS, "flagged"]
    _emit(rows, cols, args, out, {"function": spec.name, "method": res.method, "threshold": args.threshold})
    return EXIT_OK


def run_primezeta(args, out) -> int:
    try:
        ks = parse_k_range(args.k)
    except ValueError:
        raise CliError(f"bad k range {args.k!r}") from None
    if not ks or min(ks) < 2:
        raise CliError("k must be >= 2")
    rows = []
    failed = False
    for k in ks:
        via_log = prime_zeta(k)
        via_sum, bound_sum = prime_zeta_direct(k)
        bound = prime_zeta_bound(k) + bound_sum
        diff = via_log - via_sum
        ok = abs(diff) <= bound
        failed |= not ok
        rows.append({"k": k, "log_zeta_route": via_log, "direct_route": via_sum,
                     "difference": diff, "bound": bound, "agree": ok})
    _emit(rows, ["k", "log_zeta_route", "direct_route", "difference", "bound", "agree"], args, out)
    return EXIT_NUMERIC if failed else EXIT_OK


def run_coefficients(args, out) -> int:
    spec = _select(args)
    if spec.series_rule is None:
        raise CliError(f"{spec.name} has no series rule")
    order = args.series_order or 12
    if order < 2:
        raise CliError("--series-order must be >= 2")
    X = local_factor_to_X(spec.series_rule, order)
    b = series_neg_log(X, order)
    printed = PRINTED_EXPANSION.get(spec.name, {})
    rows = []
    for k in range(1, order + 1):
        ref = printed.get(k)
        rows.append({
            "k": k, "a_k": X[k], "b_k": b[k], "printed": ref,
            "matches": None if ref is None else ref == b[k],
        })
    _emit(rows, ["k", "a_k", "b_k", "printed", "matches"], args, out, {"function": spec.name})
    return EXIT_OK


COMMANDS = {
    "meanvalue": run_meanvalue,
    "summatory": run_summatory,
    "compare": run_compare,
    "primezeta": run_primezeta,
    "coefficients": run_coefficients,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.method == "paper_truncation":
        args.split_p0 = PAPER_TRUNCATION["split_p0"]
        args.series_order = PAPER_TRUNCATION["series_order"]
    try:
        return COMMANDS[args.command](args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SpecError, DomainError, ResourceError, AccelerationInapplicable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command line interface: ``strata2rec compute | verify | emit-recursion``.

Exit codes: 0 success, 1 usage error, 2 bad input data or configuration,
3 mathematical inconsistency.  Diagnostics for codes 2 and 3 are JSON
objects written to standard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .dsl import DSLSemanticError, DSLSyntaxError, load_relation
from .graphs import StrataError
from .series import (
    DEGREE_ZERO,
    GENUS2_SERIES,
    Genus1FormatError,
    InconsistentSystem,
    InfeasibleAssignment,
    InsufficientData,
    Underdetermined,
    compile_degree_equation,
    extra_points,
    fit_polynomial,
    format_polynomial,
    genus1_load,
    solve_up_to,
    verify_printed_recursion,
    _multinomial,
)
from .splitting import Symbol

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INCONSISTENT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _degree(text: str) -> int:
    d = int(text)
    if d < 1:
        raise argparse.ArgumentTypeError("degree must be >= 1")
    return d


def _assignment(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad assignment {text!r}") from None
    if len(parts) != 3 or any(not 0 <= a <= 2 for a in parts):
        raise argparse.ArgumentTypeError("assignment must be three class indices in 0..2, e.g. 1,1,2")
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-degree", type=_degree, default=10, metavar="D")
    common.add_argument("--genus1", type=Path, default=None, metavar="PATH", help="genus-1 table (default: shipped)")
    common.add_argument("--relation", type=Path, default=None, metavar="PATH", help="relation file (default: shipped)")
    common.add_argument("--format", choices=("csv", "json", "text"), default="text")
    common.add_argument("--output", type=Path, default=None, metavar="PATH", help="write to a file instead of stdout")
    parser = _Parser(prog="strata2rec", description="Genus-2 descendent series of the plane from a stratum relation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("compute", parents=[common], help="solve for N2, H2, P2 up to the maximal degree")
    v = sub.add_parser("verify", parents=[common], help="check surplus equations and the printed (1,1,1) recursion")
    v.add_argument("--literal-p20", action="store_true", help="use p20 with the second summand added, as printed")
    e = sub.add_parser("emit-recursion", parents=[common], help="print the compiled equation per degree and split")
    e.add_argument("--assignment", type=_assignment, default=(1, 1, 1), metavar="i,j,k")
    return parser


def _emit(text: str, args) -> None:
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, payload: dict) -> int:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _inputs(args):
    relation = load_relation(args.relation) if args.relation else None
    genus1 = genus1_load(args.genus1)
    return relation, genus1


def cmd_compute(args) -> int:
    relation, genus1 = _inputs(args)
    table = solve_up_to(args.max_degree, genus1, relation)
    rows = [(d,) + tuple(str(x) for x in table.row(d)) for d in range(1, args.max_degree + 1)]
    header = ("d",) + GENUS2_SERIES
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out = buf.getvalue()
    elif args.format == "json":
        doc = {
            "rows": [dict(zip(header, r)) for r in rows],
            "ranks": [{"degree": r.degree, "equations": r.equations, "rank": r.rank} for r in table.reports],
        }
        out = json.dumps(doc, indent=2) + "\n"
    else:
        widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(4)]
        out = "".join(
            "  ".join(str(c).rjust(w) for c, w in zip(r, widths)) + "\n" for r in [header] + rows
        )
    _emit(out, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    relation, genus1 = _inputs(args)
    report = verify_printed_recursion(args.max_degree, None, args.literal_p20, genus1, relation)
    if args.format == "text":
        lines = [f"p20 second summand sign: {report['p20_second_sign']}"]
        for s in report["surplus"]:
            lines.append(f"degree {s['degree']}: {s['equations']} equations, rank {s['rank']}, surplus {s['surplus']} exact")
        for c in report["checks"]:
            status = "ok" if c["coefficients_match"] and c["table_satisfies_recursion"] else "FAIL"
            lines.append(f"d={c['degree']}: lhs {c['lhs']} rhs {c['rhs']} coefficients {len(c['mismatches'])} mismatches [{status}]")
        lines.append("all checks pass" if report["ok"] else "verification failed")
        out = "\n".join(lines) + "\n"
    else:
        out = json.dumps(report, indent=2) + "\n"
    _emit(out, args)
    if not report["ok"]:
        bad = next(c for c in report["checks"] if c["mismatches"] or not c["table_satisfies_recursion"])
        first = bad["mismatches"][0] if bad["mismatches"] else {"term": "table", "compiled": bad["lhs"], "printed": bad["rhs"]}
        return _fail(EXIT_INCONSISTENT, {"error": "printed recursion mismatch", "degree": bad["degree"], "split": first})
    return EXIT_OK


_ORDER = {"P2": 0, "H2": 1, "N2": 2, "N1": 3, "N0": 4, "C1": 5}


def _family(mono) -> tuple[tuple[str, ...], tuple[int, ...]]:
    syms = sorted(mono, key=lambda s: (_ORDER.get(s.name, 9), s.degree))
    return tuple(s.name for s in syms), tuple(s.degree for s in syms)


def _closed_form(points, l_of, parts: int):
    """Try ``multinomial(l; 3d_i + s_i) * polynomial`` with small shifts ``s``."""
    from itertools import product as _product

    for shifts in _product((-1, 0, 1), repeat=parts):
        normalized = []
        for split, c in points:
            l = l_of(sum(split))
            m = _multinomial(l, *(3 * di + si for di, si in zip(split, shifts)))
            if not m:
                break
            normalized.append((split, Fraction(c) / m))
        else:
            fit = fit_polynomial(normalized)
            if fit is not None:
                return shifts, fit
    return None


def cmd_emit(args) -> int:
    relation = load_relation(args.relation) if args.relation else None
    genus1 = genus1_load(args.genus1)
    consts = dict(DEGREE_ZERO)
    consts[Symbol("C1")] = genus1.c1
    a = args.assignment
    degrees, families, unknowns = [], {}, {}
    for d in range(1, args.max_degree + 1):
        try:
            eq = compile_degree_equation(a, d, relation)
        except InfeasibleAssignment:
            continue
        degrees.append(d)
        unknowns[d] = str(eq.unknown_side)
        for mono, c in sorted(eq.known_side.substitute(consts).terms.items()):
            names, split = _family(mono)
            families.setdefault(names, {})[split] = c
    if not degrees:
        return _fail(EXIT_DATA, {"error": "infeasible assignment", "assignment": list(a), "max_degree": args.max_degree})
    offset = extra_points(a, degrees[0], relation) - 3 * degrees[0]
    l_of = lambda d: 3 * d + offset
    closed = {}
    for names, pts in families.items():
        found = _closed_form(sorted(pts.items()), l_of, len(names)) if len(pts) > 3 else None
        if found:
            shifts, fit = found
            vars_ = [f"d{i + 1}" for i in range(len(names))] if len(names) > 1 else ["d"]
            parts = ", ".join(f"3{v}{'+' if s > 0 else '-' if s < 0 else ''}{abs(s) if s else ''}" for v, s in zip(vars_, shifts))
            poly = format_polynomial(fit, vars_)
            closed["*".join(names)] = poly if len(names) == 1 else f"multinomial(3d{offset:+d}; {parts}) * ({poly})"
    label = ",".join(map(str, a))
    if args.format == "json":
        doc = {
            "assignment": list(a),
            "extra_points": f"3d{offset:+d}",
            "degrees": [
                {
                    "degree": d,
                    "unknown_side": unknowns[d],
                    "terms": [
                        {"family": "*".join(n), "split": list(s), "coefficient": str(c)}
                        for n, pts in sorted(families.items()) for s, c in sorted(pts.items()) if sum(s) == d
                    ],
                }
                for d in degrees
            ],
            "closed_forms": closed,
        }
        out = json.dumps(doc, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("degree", "family", "split", "coefficient"))
        for d in degrees:
            for n, pts in sorted(families.items()):
                for s, c in sorted(pts.items()):
                    if sum(s) == d:
                        w.writerow((d, "*".join(n), " ".join(map(str, s)), str(c)))
        out = buf.getvalue()
    else:
        lines = [f"assignment {label}; extra points 3d{offset:+d}"]
        for d in degrees:
            lines.append(f"d={d}: {unknowns[d]} =")
            for n, pts in sorted(families.items()):
                for s, c in sorted(pts.items()):
                    if sum(s) == d:
                        lines.append(f"    {c} * " + "*".join(f"{x}({k})" for x, k in zip(n, s)))
        if closed:
            lines.append("detected closed forms:")
            lines += [f"    {k}: {v}" for k, v in sorted(closed.items())]
        out = "\n".join(lines) + "\n"
    _emit(out, args)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"compute": cmd_compute, "verify": cmd_verify, "emit-recursion": cmd_emit}[args.command]
    try:
        return handler(args)
    except (InconsistentSystem, Underdetermined) as exc:
        payload = exc.diagnostic() if isinstance(exc, InconsistentSystem) else {"error": str(exc), "degree": exc.degree}
        return _fail(EXIT_INCONSISTENT, payload)
    except InsufficientData as exc:
        return _fail(EXIT_DATA, {"error": str(exc)})
    except (Genus1FormatError, DSLSyntaxError, DSLSemanticError, StrataError, OSError, ValueError) as exc:
        return _fail(EXIT_DATA, {"error": str(exc), "kind": type(exc).__name__})


if __name__ == "__main__":
    raise SystemExit(main())

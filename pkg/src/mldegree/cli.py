"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cyclefiber, exactpoly, mle
from .critsolve import (SeedDisagreement, TrackerConfig, count_ml_degree, fiber_bruteforce,
                        fiber_matrix_to_vector, monotonicity_check)
from .graphs import clique_decomposition, is_chordal, parse_graph

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Report:
    data: dict
    ok: bool = True
    rows: list[dict] | None = None     # tabular view for --format csv
    text: str | None = None            # human view for --format text
    messages: list[str] = field(default_factory=list)   # diagnostics for stderr


# ---------------------------------------------------------------------------
# Serialization


def _num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _num(v) if isinstance(v, (float, np.floating)) else v
                             for k, v in r.items()})
    return buf.getvalue()


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return to_json(report.data) + "\n"
    if fmt == "csv":
        rows = report.rows
        if rows is None:
            rows = [{"key": k, "value": to_json(v)} for k, v in report.data.items()]
        return _to_csv(rows)
    if report.text is not None:
        return report.text.rstrip("\n") + "\n"
    return "\n".join(f"{k}: {to_json(v)}" for k, v in report.data.items()) + "\n"


# ---------------------------------------------------------------------------
# Commands


def _corrupted_table(max_index: int) -> exactpoly.PnTable:
    """P_n table with P_3 perturbed by x^3; a test hook for failure reporting."""
    table = exactpoly.pn_table(max_index)
    polys = list(table.polys)
    polys[4] = polys[4] + exactpoly.QPoly([0, 0, 0, 1])
    return exactpoly.PnTable(table.max_index, tuple(polys))


def cmd_verify_identities(args) -> Report:
    if args.max_n < 2:
        raise UsageError("--max-n must be >= 2")
    table = _corrupted_table(2 * args.max_n + 2) if args.inject_fault else None
    results = exactpoly.verify_all_identities(args.max_n, table=table)
    failures = [r for r in results if not r.holds]
    data = {"max_n": args.max_n, "checks": len(results), "failures": len(failures),
            "passed": not failures,
            "failed": [{"identity": r.name, "n": r.n, "m": r.m} for r in failures[:20]]}
    text = (f"{len(results)} identity checks for 2 <= n <= {args.max_n}: "
            + ("all hold" if not failures else f"{len(failures)} FAIL"))
    return Report(data, not failures, text=text, messages=[r.describe() for r in failures[:5]])


def cmd_roots(args) -> Report:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    found = sorted(exactpoly.poly_roots_numeric(exactpoly.pn(args.n)),
                   key=lambda z: (z.real, z.imag))
    expected = exactpoly.cosine_roots(args.n)
    ok = len(found) == len(expected)
    err = max((abs(a - b) for a, b in zip(found, expected)), default=0.0) if ok else math.inf
    ok = ok and err <= args.tol
    rows = [{"index": k, "re": z.real, "im": z.imag} for k, z in enumerate(found)]
    data = {"n": args.n, "degree": exactpoly.pn(args.n).degree, "count": len(found),
            "max_error": err, "passed": ok, "roots": [[z.real, z.imag] for z in found]}
    return Report(data, ok, rows=rows)


def cmd_fiber(args) -> Report:
    if args.n < 4:
        raise UsageError("--n must be >= 4")
    points = cyclefiber.enumerate_fiber(args.n, tol=args.tol)
    expected = cyclefiber.fiber_count_formula(args.n)
    ok = len(points) == expected
    out = [p.to_json() for p in points]
    rows = [{"family": p["family"], "x_re": p["x"][0], "x_im": p["x"][1],
             "signs": " ".join(str(s) for s in p["signs"]), "residual": p["residual"]}
            for p in out]
    return Report({"n": args.n, "count": len(points), "points": out}, ok, rows=rows,
                  text=f"n={args.n}: {len(points)} fiber points (expected {expected})")


def cmd_lower_bound(args) -> Report:
    if args.n < 4:
        raise UsageError("--n must be >= 4")
    value = cyclefiber.lower_bound(args.n)
    return Report({"n": args.n, "lower_bound": value}, text=str(value))


def cmd_chordal(args) -> Report:
    g = _graph(args.graph)
    res = is_chordal(g)
    data = {"graph": g.to_json(), "chordal": res.chordal, "ordering": res.ordering}
    if res.chordal:
        tree = clique_decomposition(g)
        data["cliques"] = [sorted(c) for c in tree.cliques]
        data["separators"] = [sorted(s) for s in tree.separators]
    text = "true" if res.chordal else "false"
    if res.chordal:
        text += f"\nperfect elimination ordering: {res.ordering}"
    return Report(data, text=text)


def _tracker_config(args, **extra) -> TrackerConfig:
    kw = {"seed": args.seed}
    if args.tol is not None:
        kw["endpoint_tol"] = args.tol
    kw.update(extra)
    try:
        return TrackerConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_mldeg(args) -> Report:
    g = _graph(args.graph)
    cfg = _tracker_config(args)
    try:
        res = count_ml_degree(g, args.seeds, cfg)
    except SeedDisagreement as exc:
        data = {"graph": g.to_json(), "seeds": args.seeds, "count": None,
                "per_seed": [r.summary() for r in exc.per_seed]}
        return Report(data, False, messages=[str(exc)])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = {"graph": g.to_json(), "seeds": args.seeds, "count": res.count,
            "paths_tracked": res.paths_tracked, "residual_max": res.residual_max}
    rows = [{"seed": r.seed, "count": r.count, "paths": len(r.paths),
             "residual_max": r.residual_max} for r in res.per_seed]
    return Report(data, rows=rows, text=f"ML-degree: {res.count}")


def cmd_fiber_bruteforce(args) -> Report:
    if not 4 <= args.n <= 6:
        raise UsageError("--n must be between 4 and 6")
    cfg = _tracker_config(args)
    found = fiber_bruteforce(args.n, cfg)
    enumerated = [fiber_matrix_to_vector(np.asarray(p.matrix, dtype=complex))
                  for p in cyclefiber.enumerate_fiber(args.n)]
    unmatched = list(enumerated)
    matched = 0
    for z in found:
        hit = next((k for k, e in enumerate(unmatched) if np.max(np.abs(z - e)) <= 1e-6), None)
        if hit is not None:
            unmatched.pop(hit)
            matched += 1
    ok = matched == len(found) == len(enumerated)
    data = {"n": args.n, "count": len(found), "enumerated": len(enumerated),
            "matched": matched, "passed": ok,
            "points": [[[c.real, c.imag] for c in z] for z in found]}
    return Report(data, ok, text=f"n={args.n}: {len(found)} points, {matched} matched "
                                 f"of {len(enumerated)} enumerated")


def cmd_mle(args) -> Report:
    g = _graph(args.graph)
    try:
        s = mle.read_covariance_csv(args.cov)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if s.shape[0] != g.n:
        raise UsageError(f"covariance is {s.shape[0]}x{s.shape[0]} but graph has {g.n} vertices")
    method = args.method
    if method == "auto":
        method = "chordal" if is_chordal(g) else "numeric"
    tol = args.tol if args.tol is not None else 1e-10
    if method == "chordal":
        try:
            k = np.asarray(mle.chordal_mle(g, s), dtype=float)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        try:
            k = mle.numeric_mle(g, s, tol=tol).k
        except mle.NonConvergence as exc:
            return Report({"graph": g.to_json(), "method": method, "k": None}, False,
                          messages=[str(exc)])
    residual = mle.stationarity_residual(g, k, s)
    data = {"graph": g.to_json(), "method": method, "k": k.tolist(), "residual": residual,
            "log_likelihood": mle.log_likelihood(k, s)}
    rows = [{f"c{j}": k[i, j] for j in range(g.n)} for i in range(g.n)]
    return Report(data, residual <= max(tol, 1e-10), rows=rows)


def cmd_monotonicity(args) -> Report:
    g = _graph(args.graph)
    if not 0 <= args.vertex < g.n:
        raise UsageError("--vertex out of range")
    cfg = _tracker_config(args)
    try:
        res = monotonicity_check(g, args.vertex, args.seeds, cfg)
    except SeedDisagreement as exc:
        return Report({"graph": g.to_json(), "holds": None}, False, messages=[str(exc)])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = {"graph": g.to_json(), "vertex": args.vertex, "seeds": args.seeds,
            "holds": res.holds, "count_g": res.count_g, "count_h": res.count_h}
    return Report(data, res.holds,
                  text=f"MLdeg(G) = {res.count_g} >= MLdeg(G - v) = {res.count_h}: {res.holds}")


def _graph(source: str):
    try:
        return parse_graph(source)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="tracker seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="verification / endpoint tolerance")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument("--no-timing", action="store_true",
                        help="report runtime_ms as 0 for byte-reproducible output")

    parser = _Parser(prog="mldegree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-identities", parents=[common], help="exact P_n identity checks")
    p.add_argument("--max-n", type=int, default=100)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("roots", parents=[common], help="numeric roots of P_n vs the cosine formula")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_roots, default_tol=1e-8)

    p = sub.add_parser("fiber", parents=[common], help="enumerate the C_n fiber over Id")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_fiber, default_tol=1e-9)

    p = sub.add_parser("lower-bound", parents=[common], help="fiber-size lower bound for C_n")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("chordal", parents=[common], help="chordality with certificate")
    p.add_argument("graph", help='JSON file or "cycle:N", "path:N", "complete:N", ...')
    p.set_defaults(func=cmd_chordal)

    p = sub.add_parser("mldeg", parents=[common], help="count ML-degree by homotopy")
    p.add_argument("graph")
    p.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    p.set_defaults(func=cmd_mldeg)

    p = sub.add_parser("fiber-bruteforce", parents=[common],
                       help="fiber over Id by homotopy, matched against the enumeration")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_fiber_bruteforce)

    p = sub.add_parser("mle", parents=[common], help="maximum likelihood estimate of K")
    p.add_argument("graph")
    p.add_argument("--cov", required=True, help="CSV sample covariance")
    p.add_argument("--method", choices=("auto", "chordal", "numeric"), default="auto")
    p.set_defaults(func=cmd_mle)

    p = sub.add_parser("monotonicity", parents=[common],
                       help="compare ML-degrees of G and G minus a vertex")
    p.add_argument("graph")
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    p.set_defaults(func=cmd_monotonicity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None and getattr(args, "default_tol", None) is not None:
        args.tol = args.default_tol
    start = time.perf_counter()
    try:
        report = args.func(args)
    except UsageError as exc:
        print(f"mldegree {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "mldeg":
        elapsed = 0 if args.no_timing else int(round(1000 * (time.perf_counter() - start)))
        report.data["runtime_ms"] = elapsed
    for msg in report.messages:
        print(msg, file=sys.stderr)
    out = render(report, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

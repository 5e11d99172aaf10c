"""Command-line entry point: one subcommand per search or analysis.

Every run writes a JSON report (schema ``ultracomb.report/1``) and a short
human-readable summary.  The report goes to ``--report`` (default: standard
output); the summary goes to standard output, or to standard error when the
report itself is on standard output.  Exit status: 0 found/pass, 1 not found
within the given bounds (including an exhausted node budget), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .errors import (
    CapExceeded,
    CapTooSmall,
    NoInnerLimit,
    NotFoundWithinPrefix,
    SearchBudgetExceeded,
    SetLangError,
    ShapeMismatch,
)
from .intset import IntSet
from .limits import (
    asymptotic_density_bounds,
    banach_density,
    banach_nested_tensor_formula,
    iterated_double_limit,
    riemann_double,
    schnirelmann,
)
from .modelcheck import check_model
from .patterns import (
    DEFAULT_MAX_NODES,
    PatternSpec,
    Surjection,
    cauchy_subsequence,
    certificate,
    find_homogeneous,
    ramsey_large,
    search_witness,
    verify_cauchy,
    verify_homogeneous,
    verify_ramsey_large,
    verify_witness,
)
from .setlang import (
    BOOL,
    INT,
    coloring_from_expr,
    double_sequence_from_expr,
    integrand_from_expr,
    parse_func,
    sequence_from_expr,
    set_from_text,
)
from .sumsets import SumsetCertificate, SumsetSpec, find_general, verify_certificate
from .tensorset import TensorSet

SCHEMA = "ultracomb.report/1"
EXIT_OK, EXIT_NOT_FOUND, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _default_workers() -> int:
    raw = os.environ.get("ULTRACOMB_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# -- shared input helpers ----------------------------------------------------


def _read_int_file(path: str, bound: int) -> IntSet:
    """One integer per line; blank lines and ``#`` comments are skipped."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    values = []
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise InputError(f"{path}:{lineno}: not an integer: {line!r}") from None
    try:
        return IntSet.from_elements(bound, values)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_float_file(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.split("#", 1)[0].strip() for ln in fh.read().splitlines()]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return np.array([float(ln) for ln in lines if ln])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _intset(args) -> IntSet:
    if (args.set is None) == (args.set_file is None):
        raise InputError("give exactly one of --set or --set-file")
    if args.set_file is not None:
        return _read_int_file(args.set_file, args.bound)
    return set_from_text(args.set, args.bound)


def _positive(name: str, value: int):
    if value < 1:
        raise InputError(f"{name} must be positive, got {value}")


def _int_list(text: str, what: str) -> list:
    try:
        values = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of integers, got {text!r}") from None
    if not values:
        raise InputError(f"{what} is empty")
    return values


def _add_set_args(p):
    p.add_argument("--set", help="set expression (setlang)")
    p.add_argument("--set-file", help="file with one integer per line")
    p.add_argument("--bound", type=int, required=True, help="the set lives in [0, BOUND)")


def _add_search_args(p):
    p.add_argument("--strategy", choices=["exhaustive", "greedy"], default="exhaustive")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)


# -- subcommands -------------------------------------------------------------
# each returns (status, result dict, summary line)


def cmd_check_model(args):
    report = check_model(args.i, args.j, args.k, cap=args.cap, map_samples=args.map_samples, seed=args.seed, workers=args.workers)
    failed = [c.name for c in report.clauses if not c.passed]
    summary = f"{len(report.clauses)} clauses, " + ("all pass" if not failed else f"failing: {', '.join(failed)}")
    return ("pass" if report.passed else "fail"), report.to_dict(), summary


def cmd_find_homogeneous(args):
    _positive("--bound", args.bound)
    _positive("--colors", args.colors)
    color_fn = coloring_from_expr(args.coloring, args.k, args.colors)

    def coloring(t):
        return int(color_fn(*t))

    found = find_homogeneous(
        coloring, args.k, args.bound, args.h, colors=range(args.colors), strategy=args.strategy, seed=args.seed, max_nodes=args.max_nodes
    )
    if found is None:
        return "not_found", {"H": None}, f"no homogeneous set of size {args.h} in [0, {args.bound})"
    H, color = found
    verdict = verify_homogeneous(coloring, args.k, H, color)
    result = {"H": H, "color": color, "verdict": verdict.to_dict()}
    return "found", result, f"H = {H} with color {color}"


def cmd_ramsey_large(args):
    _positive("--bound", args.bound)
    expr = parse_func(args.pred, allowed={f"j{d}" for d in range(1, args.k + 1)}, sort=BOOL)
    fn = expr.compile()

    def pred(*xs):
        env = {f"j{d + 1}": x for d, x in enumerate(xs) if f"j{d + 1}" in expr.variables}
        shape = np.broadcast(*xs).shape
        return np.broadcast_to(fn(**env), shape)

    X = TensorSet((args.bound,) * args.k, predicate=pred, name=args.pred)
    H = ramsey_large(X, args.h, args.strategy, args.seed, args.max_nodes)
    if H is None:
        return "not_found", {"H": None}, f"no {args.h}-element H inside [0, {args.bound})"
    verdict = verify_ramsey_large(X, H)
    return "found", {"H": H, "verdict": verdict.to_dict()}, f"H = {H}"


def _sequence(args) -> np.ndarray:
    if (args.seq is None) == (args.seq_file is None):
        raise InputError("give exactly one of --seq or --seq-file")
    if args.seq_file is not None:
        a = _read_float_file(args.seq_file)
        return a[: args.length] if args.length else a
    if not args.length:
        raise InputError("--length is required with --seq")
    return sequence_from_expr(args.seq, args.length)


def cmd_cauchy_sub(args):
    a = _sequence(args)
    try:
        res = cauchy_subsequence(a, args.t, start=args.start, max_nodes=args.max_nodes)
    except NotFoundWithinPrefix as exc:
        return "not_found", {"indices": None, "reason": str(exc)}, str(exc)
    verdict = verify_cauchy(a, res.indices)
    result = {"indices": res.indices, "epsilon": res.epsilon, "max_gap": res.max_gap, "verdict": verdict.to_dict()}
    return "found", result, f"indices {res.indices} (epsilon 1/{res.indices[0]})"


def cmd_pattern_search(args):
    if not args.phi:
        raise InputError("give at least one --phi")
    if len(args.target) not in (1, len(args.phi)):
        raise InputError("give one --target, or one per --phi")
    phis = [Surjection(_int_list(p, "--phi")) for p in args.phi]
    m = phis[0].m
    if any(p.m != m for p in phis):
        raise InputError("all surjections must have the same codomain size")
    grounds = _int_list(args.grounds, "--grounds")
    if len(grounds) == 1:
        grounds = grounds * m
    if len(grounds) != m:
        raise InputError(f"--grounds needs 1 or {m} entries")
    targets = []
    for idx, phi in enumerate(phis):
        text = args.target[idx if len(args.target) > 1 else 0]
        expr = parse_func(text, allowed={f"j{d}" for d in range(1, phi.k + 1)}, sort=BOOL)
        fn = expr.compile()
        dims = tuple(grounds[v - 1] for v in phi.values)

        def pred(*xs, fn=fn, expr=expr):
            env = {f"j{d + 1}": x for d, x in enumerate(xs) if f"j{d + 1}" in expr.variables}
            return np.broadcast_to(fn(**env), np.broadcast(*xs).shape)

        targets.append(TensorSet(dims, predicate=pred, name=text))
    spec = PatternSpec(phis, targets, grounds, strict=args.strict)
    w = search_witness(spec, args.depth, args.strategy, args.seed, args.max_nodes)
    if w is None:
        return "not_found", certificate(spec, None), f"no depth-{args.depth} witness"
    verdict = verify_witness(spec, w)
    return "found", certificate(spec, w, verdict), f"witness {w.sequences}"


def cmd_find_sumset(args):
    A = _intset(args)
    _positive("--len", args.len + 1)
    mode = "multiplicative" if args.multiplicative else "additive"
    if args.mode == "same":
        spec = SumsetSpec((args.k,), mode, allow_zero=args.allow_zero)
        if args.len < args.k:
            raise InputError(f"--len must be at least --k={args.k}")
    elif args.mode == "distinct":
        spec = SumsetSpec((1,) * args.k, mode, staggered=True, allow_zero=args.allow_zero)
    elif args.mode == "full":
        spec = SumsetSpec((1, 1), mode, allow_zero=args.allow_zero)
    else:
        if args.mult is None:
            raise InputError("--mode general needs --mult")
        spec = SumsetSpec(tuple(_int_list(args.mult, "--mult")), mode, allow_zero=args.allow_zero)
    cert = find_general(A, spec, args.len, strategy=args.strategy, seed=args.seed, max_nodes=args.max_nodes)
    if cert is None:
        return "not_found", {"certificate": None, "spec": spec.to_dict()}, "no certificate within the bound"
    verdict = verify_certificate(A, SumsetCertificate(cert.sets, spec))
    result = {"certificate": cert.to_dict(), "verdict": verdict.to_dict()}
    return "found", result, f"sets {cert.sets}, {cert.verified_count} combinations verified"


def cmd_density(args):
    A = _intset(args)
    if args.kind == "schnirelmann":
        rep = schnirelmann(A)
    elif args.kind == "asymptotic":
        rep = asymptotic_density_bounds(A)
    elif args.kind == "banach":
        rep = banach_density(A, args.n_max)
    else:
        rep = banach_nested_tensor_formula(A, args.n_max)
    result = rep.to_dict()
    if not args.trace:
        result.pop("trace")
    if rep.value is not None:
        summary = f"{args.kind} density {rep.value:.6g}"
    else:
        summary = f"{args.kind} density in [{rep.lower:.6g}, {rep.upper:.6g}]"
    return "pass", result, summary


def cmd_double_limit(args):
    ds = double_sequence_from_expr(args.expr)
    res = iterated_double_limit(ds, args.tol, args.n_cap, args.m_cap, extrapolate=args.extrapolate)
    return "pass", res.to_dict(), f"limit {res.value:.10g} (tol {args.tol:g})"


def cmd_integrate(args):
    f = integrand_from_expr(args.f)
    res = riemann_double(f, args.tol, args.n_cap, args.m_cap)
    return "pass", res.to_dict(), f"integral {res.value:.10g} (tol {args.tol:g})"


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ultracomb", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"ultracomb {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--report", default="-", help="report path, '-' for standard output (default)")
    common.add_argument("--no-report", action="store_true", help="do not write the JSON report")
    common.add_argument("--no-summary", action="store_true", help="do not print the summary line")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=_default_workers(), help="default from ULTRACOMB_WORKERS, else 1")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("check-model", parents=[common], help="exhaustive ultrafilter identity check")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--cap", type=int, default=6)
    p.add_argument("--map-samples", type=int, default=64)
    p.set_defaults(func=cmd_check_model)

    p = sub.add_parser("find-homogeneous", parents=[common], help="homogeneous set for a finite coloring")
    p.add_argument("--coloring", required=True, help="integer expression in j1..jk (or i, j when k=2)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    _add_search_args(p)
    p.set_defaults(func=cmd_find_homogeneous)

    p = sub.add_parser("ramsey-large", parents=[common], help="H with every increasing k-tuple in X")
    p.add_argument("--pred", required=True, help="condition in j1..jk defining X")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    _add_search_args(p)
    p.set_defaults(func=cmd_ramsey_large)

    p = sub.add_parser("cauchy-sub", parents=[common], help="Cauchy-type subsequence extraction")
    p.add_argument("--seq", help="expression in n")
    p.add_argument("--seq-file", help="file with one value per line")
    p.add_argument("--length", type=int, default=0)
    p.add_argument("--t", type=int, default=5)
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    p.set_defaults(func=cmd_cauchy_sub)

    p = sub.add_parser("pattern-search", parents=[common], help="witness search for a surjection pattern")
    p.add_argument("--phi", action="append", default=[], help="surjection values, e.g. 1,2,1 (repeatable)")
    p.add_argument("--target", action="append", default=[], help="condition in j1..jk (one, or one per --phi)")
    p.add_argument("--grounds", required=True, help="ground size, or one per role")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--strict", action="store_true", help="staggered tuples (all indices strictly increasing)")
    _add_search_args(p)
    p.set_defaults(func=cmd_pattern_search)

    p = sub.add_parser("find-sumset", parents=[common], help="sumset certificate inside A")
    _add_set_args(p)
    p.add_argument("--mode", choices=["same", "distinct", "full", "general"], default="general")
    p.add_argument("--k", type=int, default=2, help="summands for same/distinct")
    p.add_argument("--mult", help="multiplicities for general, e.g. 1,2,2")
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--multiplicative", action="store_true")
    p.add_argument("--allow-zero", action="store_true", default=None, help="admit 0 in multiplicative mode")
    _add_search_args(p)
    p.set_defaults(func=cmd_find_sumset)

    p = sub.add_parser("density", parents=[common], help="density estimates for a finite set")
    _add_set_args(p)
    p.add_argument("--kind", choices=["schnirelmann", "asymptotic", "banach", "banach-nested"], required=True)
    p.add_argument("--n-max", type=int, default=None, help="largest window for the Banach estimates")
    p.add_argument("--trace", action="store_true", help="include the per-n trace")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("double-limit", parents=[common], help="iterated limit of a(n, m)")
    p.add_argument("--expr", required=True, help="expression in n and m")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--n-cap", type=int, default=1024)
    p.add_argument("--m-cap", type=int, default=1 << 20)
    p.add_argument("--extrapolate", action="store_true")
    p.set_defaults(func=cmd_double_limit)

    p = sub.add_parser("integrate", parents=[common], help="integral over the line by Riemann double limit")
    p.add_argument("--f", required=True, help="real expression in x")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--n-cap", type=int, default=1024)
    p.add_argument("--m-cap", type=int, default=1 << 14)
    p.set_defaults(func=cmd_integrate)
    return parser


def _config(args) -> dict:
    skip = {"func", "report", "no_report", "no_summary", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _report_path(argv) -> str:
    # best effort when argument parsing itself failed
    for i, a in enumerate(argv):
        if a == "--report" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--report="):
            return a.split("=", 1)[1]
    return "-"


def _emit(doc: dict, path: str, summary: Optional[str], show_summary: bool, write_report: bool):
    text = json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"
    to_stdout = path == "-"
    if write_report:
        if to_stdout:
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
    if show_summary and summary:
        stream = sys.stderr if (to_stdout and write_report) else sys.stdout
        print(summary, file=stream)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (range, set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


_EXIT = {"found": EXIT_OK, "pass": EXIT_OK, "not_found": EXIT_NOT_FOUND, "fail": EXIT_NOT_FOUND, "error": EXIT_INPUT}


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise InputError("missing subcommand (see --help)")
    except InputError as exc:
        doc = {"schema": SCHEMA, "command": None, "status": "error", "error": str(exc)}
        _emit(doc, _report_path(argv), f"error: {exc}", True, True)
        return EXIT_INPUT

    doc = {"schema": SCHEMA, "command": args.command, "config": _config(args)}
    try:
        if args.workers < 1:
            raise InputError("--workers must be positive")
        status, result, summary = args.func(args)
        doc.update(status=status, result=result)
    except SearchBudgetExceeded as exc:
        status, summary = "not_found", f"not found: {exc}"
        doc.update(status=status, result={"reason": str(exc)})
    except (NoInnerLimit, CapTooSmall) as exc:
        status, summary = "not_found", f"no limit certified: {exc}"
        doc.update(status=status, result={"reason": str(exc), "kind": type(exc).__name__})
    except (InputError, SetLangError, CapExceeded, ShapeMismatch, ValueError) as exc:
        status, summary = "error", f"error: {exc}"
        doc.update(status=status, error=str(exc))
    try:
        _emit(doc, args.report, summary, not args.no_summary, not args.no_report)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return _EXIT[status]


if __name__ == "__main__":
    sys.exit(main())

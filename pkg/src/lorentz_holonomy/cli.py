"""Command-line front end.

Exit codes: 0 success, 1 analysis precondition failed (or a selftest
expectation failed), 2 parse or I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .families import FamilyError, build_family, default_point, standard_families
from .metric_io import MetricFormatError, dumps_metric, load_metric, metric_to_dict
from .symexpr import ExprParseError, InsufficientJet, JetPoint
from .walker import SIGN_CONVENTION, DimensionTooSmall, NotWalkerForm, SingularMetric

PRECONDITION_ERRORS = (DimensionTooSmall, SingularMetric, InsufficientJet, FamilyError)


class UsageError(Exception):
    pass


def _read_metric(args):
    if args.metric in (None, "-"):
        return load_metric(sys.stdin)
    try:
        with open(args.metric) as fp:
            return load_metric(fp)
    except OSError as exc:
        raise MetricFormatError(f"cannot read {args.metric}: {exc.strerror}") from None


def _point(args, m) -> JetPoint:
    if not args.point:
        return default_point(m)
    try:
        return JetPoint.from_json(json.loads(args.point))
    except (json.JSONDecodeError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise MetricFormatError(f"bad --point: {exc}") from None


def _names(m):
    return list(m.functions) or None


def _emit(report: dict, as_json: bool, out) -> None:
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return
    for key in sorted(report):
        val = report[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        out.write(f"{key}: {val}\n")


# -- subcommands -----------------------------------------------------------------------

def cmd_analyze(args, out) -> int:
    from .conditions import is_pp_wave, is_two_symmetric, named_tensor, recurrence_factor
    from .decomp import decompose_curvature
    from .holonomy import infinitesimal_holonomy

    m = _read_metric(args)
    names = _names(m)
    timings = {}
    t0 = time.perf_counter()
    blocks = decompose_curvature(m)
    timings["blocks"] = time.perf_counter() - t0
    report = {"sign_convention": SIGN_CONVENTION, "metric": metric_to_dict(m),
              "blocks": blocks.as_dict(names)}
    if not args.blocks:
        t0 = time.perf_counter()
        checks = {"R": recurrence_factor(named_tensor(m, "R"), m).to_json(names),
                  "two_symmetric": is_two_symmetric(m).to_json(),
                  "pp_wave": is_pp_wave(m)}
        if m.dim >= 4:
            checks["W"] = recurrence_factor(named_tensor(m, "W"), m).to_json(names)
        timings["checks"] = time.perf_counter() - t0
        report["checks"] = checks
        t0 = time.perf_counter()
        rep = infinitesimal_holonomy(m, _point(args, m), args.order)
        timings["holonomy"] = time.perf_counter() - t0
        report["holonomy"] = rep.to_json()
    if args.timing:
        report["timing_seconds"] = {k: round(v, 4) for k, v in timings.items()}
    _emit(report, args.json, out)
    return 0


def cmd_check(args, out) -> int:
    from .conditions import (is_two_symmetric, named_tensor, recurrence_factor,
                             recurrent_bilinear_forms, weyl_recurrence)

    m = _read_metric(args)
    names = _names(m)
    frozen = []
    for f in args.constant or ():
        if f not in m.functions:
            raise MetricFormatError(f"--constant {f!r} is not a formal function of the metric")
        frozen.append(m.functions.index(f))
    report: dict = {"sign_convention": SIGN_CONVENTION}
    if args.two_symmetric:
        report["two_symmetric"] = is_two_symmetric(m, frozen).to_json()
        report["verdict"] = report["two_symmetric"]["two_symmetric"]
    elif args.weyl_recurrent:
        report.update(weyl_recurrence(m, frozen).to_json(names))
        report["tensor"] = "W"
    elif args.bilinear:
        report.update(recurrent_bilinear_forms(m).to_json(names))
    else:
        r = recurrence_factor(named_tensor(m, args.tensor), m, frozen=frozen)
        report.update(r.to_json(names))
        report["tensor"] = args.tensor
        if args.parallel:
            report["parallel"] = r.verdict in ("parallel", "zero-tensor")
        else:
            report["recurrent"] = r.is_recurrent
    _emit(report, args.json, out)
    return 0


def cmd_holonomy(args, out) -> int:
    from .holonomy import infinitesimal_holonomy

    m = _read_metric(args)
    t0 = time.perf_counter()
    rep = infinitesimal_holonomy(m, _point(args, m), args.order)
    report = {"sign_convention": SIGN_CONVENTION, **rep.to_json()}
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 4)
    _emit(report, args.json, out)
    return 0


def cmd_family(args, out) -> int:
    try:
        params = json.loads(args.params) if args.params else {}
    except json.JSONDecodeError as exc:
        raise MetricFormatError(f"bad --params: {exc}") from None
    if not isinstance(params, dict):
        raise MetricFormatError("--params must be a JSON object")
    fam = build_family(args.name, params)
    text = dumps_metric(fam.metric)
    if args.emit:
        try:
            with open(args.emit, "w") as fp:
                fp.write(text + "\n")
        except OSError as exc:
            raise MetricFormatError(f"cannot write {args.emit}: {exc.strerror}") from None
    if args.check:
        results = fam.run()
        for name, ok in results:
            out.write(f"{'PASS' if ok else 'FAIL'}  {fam.name}: {name}\n")
        return 0 if all(ok for _, ok in results) else 1
    if not args.emit:
        out.write(text + "\n")
    return 0


def cmd_selftest(args, out) -> int:
    failures = 0
    for fam in standard_families():
        for name, ok in fam.run():
            failures += not ok
            out.write(f"{'PASS' if ok else 'FAIL'}  {fam.name} {json.dumps(fam.params, sort_keys=True)}: {name}\n")
    out.write(f"{'all expectations passed' if not failures else f'{failures} expectation(s) failed'}\n")
    return 0 if not failures else 1


# -- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="walker-holonomy",
                                 description="Exact curvature and holonomy of Walker metrics.")
    sub = ap.add_subparsers(dest="command", required=True)

    def metric_opts(p):
        p.add_argument("--metric", help="metric JSON file (default: stdin)")
        p.add_argument("--json", action="store_true", help="JSON output")

    p = sub.add_parser("analyze", help="blocks, recurrence checks and holonomy")
    metric_opts(p)
    p.add_argument("--blocks", action="store_true", help="only print the curvature blocks")
    p.add_argument("--point", help="jet point, e.g. '{\"coords\":{\"x1\":1},\"jets\":{\"0\":[1,2,3]}}'")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="parallel / recurrent / two-symmetric tests")
    metric_opts(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--parallel", action="store_true")
    g.add_argument("--recurrent", action="store_true")
    g.add_argument("--two-symmetric", action="store_true")
    g.add_argument("--weyl-recurrent", action="store_true")
    g.add_argument("--bilinear", action="store_true")
    p.add_argument("--tensor", choices=["R", "W", "Ric", "g", "tau2"], default="R")
    p.add_argument("--constant", action="append", metavar="NAME",
                   help="treat this formal function as constant (repeatable)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("holonomy", help="infinitesimal holonomy algebra at a point")
    metric_opts(p)
    p.add_argument("--point")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("family", help="emit a metric from one of the built-in families")
    p.add_argument("--name", required=True,
                   choices=["pp-wave", "walker-I", "walker-II", "cahen-wallach",
                            "two-symmetric", "conf-recurrent"])
    p.add_argument("--params", default="{}")
    p.add_argument("--emit", metavar="FILE")
    p.add_argument("--check", action="store_true", help="evaluate the family expectations")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("selftest", help="run every family expectation")
    p.set_defaults(func=cmd_selftest)
    return ap


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out)
    except (MetricFormatError, ExprParseError, NotWalkerForm) as exc:
        err.write(f"error: {exc}\n")
        return 2
    except PRECONDITION_ERRORS as exc:
        err.write(f"precondition failed: {type(exc).__name__}: {exc}\n")
        return 1
    except ValueError as exc:
        # remaining invariant violations (non-positive h, bad env settings, ...)
        err.write(f"precondition failed: {type(exc).__name__}: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())

"""Command-line front end.

Exit codes: 0 the queried property holds, 1 it provably fails, 2 input or
evaluation error, 3 a resource cap was hit, 4 the two quotient routes
disagree (an internal error).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__
from .accessibility import check_nu_conditions, is_geodesically_accessible
from .errors import InputError, MechquotError, QuotientError
from .geometry import lift_system
from .identities import identity_suite
from .quotient import (
    GLOBAL_NOTE,
    build_quotient_system,
    check_quotient_conditions,
    verify_lifted_invariance,
)
from .report import Report, render
from .simulate import QuotientMap, check_commutation, integrate
from .systemfile import SYSTEM, SystemFile, emit_system, load_system

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_DISAGREE = 4

COMMANDS = (
    "check-accessibility",
    "check-quotient",
    "build-quotient",
    "simulate",
    "check-commutation",
    "verify-identities",
)


def _verdict(report: Report, ok: bool, yes: str = "holds", no: str = "fails") -> int:
    report.verdict = yes if ok else no
    report.exit_code = EXIT_HOLDS if ok else EXIT_FAILS
    return report.exit_code


def _distribution(sf: SystemFile, name: Optional[str]):
    if not name:
        raise InputError("--distribution is required")
    if name not in sf.distributions:
        raise InputError(f"no distribution named {name!r} (have {', '.join(sorted(sf.distributions)) or 'none'})")
    return sf.distributions[name]


def _scenario(sf: SystemFile, name: Optional[str]):
    if not name:
        raise InputError("--scenario is required")
    if name not in sf.scenarios:
        raise InputError(f"no scenario named {name!r} (have {', '.join(sorted(sf.scenarios)) or 'none'})")
    return sf.scenarios[name]


def _point(sf: SystemFile, name: Optional[str]):
    if name is None:
        if sf.points:
            name = next(iter(sf.points))
        else:
            return "origin", {c: Fraction(0) for c in sf.chart.base}
    if name not in sf.points:
        raise InputError(f"no point named {name!r} (have {', '.join(sorted(sf.points)) or 'none'})")
    return name, sf.points[name]


def cmd_check_accessibility(sf: SystemFile, args, report: Report) -> int:
    name, pt = _point(sf, args.point)
    report.options.append(("point", name))
    acc = is_geodesically_accessible(sf.system, pt)
    s = report.section("sym closure")
    s.add("dimension", acc.n)
    s.add("sym rank (generic)", acc.sym_rank_generic)
    s.add("sym rank (at point)", acc.sym_rank_at_point)
    for label, f in zip(acc.closure_labels, acc.closure_fields):
        s.add(label, f)
    report.message = f"sym rank {acc.sym_rank_at_point} of {acc.n}"
    if args.max_level is not None:
        report.options.append(("max-level", args.max_level))
        y0 = {c: pt[c] for c in sf.chart.base}
        y0.update({v: Fraction(0) for v in sf.chart.velocity})
        t3 = check_nu_conditions(lift_system(sf.system), y0, args.max_level)
        s3 = report.section("nu sequence at zero velocity")
        s3.add("truncation level", t3.truncation_level)
        s3.add("stabilized at", t3.stabilized_at)
        s3.add("nu dim (generic)", t3.nu_dim_generic)
        s3.add("nu dim (at point)", t3.nu_dim_at_point)
        s3.add("nu + [f0, nu] dim (generic)", t3.nu_plus_bracket_dim_generic)
        s3.add("nu + [f0, nu] dim (at point)", t3.nu_plus_bracket_dim_at_point)
        s3.add("rank condition", t3.condition1)
        s3.add("nu abelian", t3.condition2)
        s3.add("drift in nu at point", t3.condition3)
        s3.add("caveat", "commutativity checked on generating fields up to the truncation level only")
    return _verdict(report, acc.geodesically_accessible, "geodesically accessible", "not geodesically accessible")


def _verdict_rows(report: Report, verdict) -> None:
    s = report.section("direct conditions")
    s.add("involutive", verdict.involutive)
    s.add("connection restricts", verdict.connection_restricts)
    s.add("curvature condition", verdict.curvature_ok)
    s.add("controls invariant", verdict.controls_invariant)
    s.add("overall", verdict.overall)
    for w in verdict.witnesses:
        s.add(f"witness ({w.condition})", f"{w.fields} = {w.vector}")


def cmd_check_quotient(sf: SystemFile, args, report: Report) -> int:
    D = _distribution(sf, args.distribution)
    report.options.append(("distribution", args.distribution))
    verdict = check_quotient_conditions(sf.system, D)
    _verdict_rows(report, verdict)
    lifted = verify_lifted_invariance(sf.system, D)
    s = report.section("lifted invariance")
    s.add("generators", len(lifted.generators))
    s.add("invariant", lifted.holds)
    for w in lifted.witnesses:
        s.add(f"witness ({w.condition})", f"{w.fields} = {w.vector}")
    if verdict.overall != lifted.holds:
        report.verdict = "route disagreement"
        report.exit_code = EXIT_DISAGREE
        report.message = "internal error: the direct and lifted routes disagree"
        return EXIT_DISAGREE
    if verdict.overall:
        report.message = GLOBAL_NOTE
    return _verdict(report, verdict.overall, "mechanical quotient", "no mechanical quotient")


def cmd_build_quotient(sf: SystemFile, args, report: Report) -> int:
    D = _distribution(sf, args.distribution)
    report.options.append(("distribution", args.distribution))
    verdict = check_quotient_conditions(sf.system, D)
    _verdict_rows(report, verdict)
    if not verdict.overall:
        report.message = "quotient conditions fail; nothing emitted"
        return _verdict(report, False, no="not built")
    q = build_quotient_system(sf.system, D, verdict)
    s = report.section("quotient")
    s.add("kept coordinates", [sf.chart.base[i] for i in q.kept])
    s.add("dropped coordinates", [sf.chart.base[i] for i in q.dropped])
    s.add("dimension", len(q.kept))
    if q.system is None:
        report.message = "quotient is zero-dimensional; nothing emitted"
        return _verdict(report, True, yes="built")
    text = emit_system(q.system)
    if args.out:
        Path(args.out).write_text(text)
        s.add("written to", args.out)
    else:
        s.add("system", text.rstrip("\n"))
    report.message = GLOBAL_NOTE
    return _verdict(report, True, yes="built")


def _source_system(sf: SystemFile, name: str):
    return sf.system if name == SYSTEM else sf.explicit_systems[name]


def _source_coords(sf: SystemFile, name: str):
    return sf.chart.tangent if name == SYSTEM else sf.explicit_systems[name].coords


def cmd_simulate(sf: SystemFile, args, report: Report) -> int:
    sc = _scenario(sf, args.scenario)
    dt = args.dt if args.dt is not None else sc.dt
    report.options += [("scenario", sc.name), ("dt", dt)]
    traj = integrate(_source_system(sf, sc.source), sc.x0, sc.control, sc.t_end, dt)
    s = report.section("trajectory")
    s.add("system", sc.source)
    s.add("steps", len(traj.times) - 1)
    s.add("t_end", traj.times[-1])
    for c, v in zip(traj.coords, traj.states[-1]):
        s.add(f"{c}(t_end)", v)
    if args.out:
        traj.write_csv(args.out)
        s.add("written to", args.out)
    return _verdict(report, True, yes="completed")


def _companion(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix or '.csv'}"))


def cmd_check_commutation(sf: SystemFile, args, report: Report) -> int:
    sc = _scenario(sf, args.scenario)
    dt = args.dt if args.dt is not None else sc.dt
    tol = args.tol if args.tol is not None else sc.tol
    report.options += [("scenario", sc.name), ("dt", dt), ("tol", tol)]
    if sc.target is None:
        raise InputError(f"scenario {sc.name!r} has no target system")
    source = _source_system(sf, sc.source)
    coords = _source_coords(sf, sc.source)
    if sc.target.startswith("quotient:"):
        if sc.source != SYSTEM:
            raise InputError("quotient targets need the file's mechanical system as source")
        dname = sc.target.split(":", 1)[1]
        q = build_quotient_system(sf.system, sf.distributions[dname])
        if q.system is None:
            raise InputError("quotient is zero-dimensional; nothing to integrate")
        target = lift_system(q.system)
        default_map = QuotientMap.coordinate_projection(coords, target.coords)
    else:
        target = sf.explicit_systems[sc.target]
        default_map = None
    if sc.map is not None:
        m = sf.maps[sc.map]
        if m.source != sc.source:
            raise InputError(f"map {sc.map!r} is defined on {m.source!r}, scenario source is {sc.source!r}")
        qmap = QuotientMap(coords, m.target, m.components)
    elif default_map is not None:
        qmap = default_map
    else:
        raise InputError(f"scenario {sc.name!r} needs a map for target {sc.target!r}")
    rep = check_commutation(source, target, qmap, sc.x0, sc.control, sc.t_end, dt, tol)
    s = report.section("commutation")
    s.add("source", sc.source)
    s.add("target", sc.target)
    s.add("map", sc.map or "coordinate projection")
    s.add("steps", len(rep.target.times) - 1)
    s.add("sup residual", rep.residual)
    s.add("worst time", rep.worst_time)
    if args.out:
        rep.source.write_csv(args.out)
        rep.target.write_csv(_companion(args.out, "quotient"))
        s.add("written to", [args.out, _companion(args.out, "quotient")])
    return _verdict(report, rep.passed, "commutes", "does not commute")


def cmd_verify_identities(sf: SystemFile, args, report: Report) -> int:
    report.options.append(("seed", args.seed))
    results = identity_suite(sf.connection, seed=args.seed)
    s = report.section("identities")
    names: List[str] = []
    for r in results:
        if r.name not in names:
            names.append(r.name)
    for name in names:
        rs = [r for r in results if r.name == name]
        s.add(name, f"{sum(r.holds for r in rs)}/{len(rs)}")
    bad = next((r for r in results if not r.holds), None)
    if bad is not None:
        report.message = f"first violated identity: {bad.name} (trial {bad.trial}), residual {bad.residual}"
    return _verdict(report, bad is None)


HANDLERS = {
    "check-accessibility": cmd_check_accessibility,
    "check-quotient": cmd_check_quotient,
    "build-quotient": cmd_build_quotient,
    "simulate": cmd_simulate,
    "check-commutation": cmd_check_commutation,
    "verify-identities": cmd_verify_identities,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mechquot", description="Mechanical quotients of affine connection control systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file")
    p.add_argument("--point", help="named point for accessibility checks")
    p.add_argument("--distribution", help="named distribution")
    p.add_argument("--scenario", help="named simulation scenario")
    p.add_argument("--out", help="output path (YAML system or CSV trajectory)")
    p.add_argument("--seed", type=int, default=0, help="seed for verify-identities (default 0)")
    p.add_argument("--max-level", type=int, help="truncation level for the nu sequence")
    p.add_argument("--dt", type=float, help="override the scenario step")
    p.add_argument("--tol", type=float, help="override the scenario tolerance")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    return p


def run(argv: Optional[List[str]] = None) -> tuple:
    """Execute one command; return ``(exit_code, rendered_report)``."""
    args = build_parser().parse_args(argv)
    report = Report(args.command, args.file)
    try:
        sf = load_system(args.file)
        HANDLERS[args.command](sf, args, report)
    except MechquotError as exc:
        code = exc.exit_code
        report.exit_code = code
        if isinstance(exc, QuotientError):
            report.verdict = getattr(exc, "code", "fails")
        elif code == EXIT_CAP:
            report.verdict = "cap exceeded"
        else:
            report.verdict = "error"
        report.message = str(exc)
    return report.exit_code, render(report, args.format)


def main(argv: Optional[List[str]] = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

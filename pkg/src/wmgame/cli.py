"""Command-line interface: ``wmgame validate|payoff|solve|fit|region``.

Errors go to stderr as ``<error-name>: <message>``. Exit codes: 0 success,
1 usage or parse error, 2 validation failure, 3 solver failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import equilibrium as eq
from . import profiles as pf
from . import region as rg
from .game_core import InvalidScenario, Scenario, build_payoff_matrix, validate_scenario

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, name: str, message: str, code: int):
        self.name, self.code = name, code
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage-error", message, EXIT_USAGE)


def load_scenario(path) -> Scenario:
    """Read a JSON scenario document; structural problems are parse errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError("file-not-found", str(path), EXIT_IO) from None
    except OSError as exc:
        raise CliError("io-failure", f"{path}: {exc}", EXIT_IO) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError("parse-error", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}",
                       EXIT_USAGE) from None
    try:
        if not isinstance(doc, dict):
            raise ValueError("top level must be an object")
        return Scenario.from_dict(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise CliError("parse-error", f"{path}: {exc}", EXIT_USAGE) from None


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2) + "\n"


def _write(path, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError("io-failure", f"{path}: {exc}", EXIT_IO) from None


def _require_valid(scenario: Scenario):
    report = validate_scenario(scenario)
    if not report.ok:
        raise CliError("invalid-scenario", "; ".join(report.failures), EXIT_VALIDATION)
    return report


# --- subcommands ----------------------------------------------------------

def cmd_validate(args, out) -> int:
    report = validate_scenario(load_scenario(args.scenario))
    for msg in report.failures:
        print(f"FAIL  {msg}", file=out)
    for msg in report.warnings:
        print(f"WARN  {msg}", file=out)
    for msg in report.notes:
        print(f"NOTE  {msg}", file=out)
    if not report.ok:
        raise CliError("invalid-scenario", f"{len(report.failures)} check(s) failed", EXIT_VALIDATION)
    if args.strict and report.warnings:
        raise CliError("sign-convention", f"{len(report.warnings)} warning(s) under --strict",
                       EXIT_VALIDATION)
    print("OK", file=out)
    return EXIT_OK


def payoff_csv_text(scenario: Scenario) -> str:
    m = build_payoff_matrix(scenario)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "u_alice", "u_bob"])
    n, k = m.shape
    for i in range(n):
        for j in range(k):
            w.writerow([i + 1, j + 1, repr(float(m.u_alice[i, j])), repr(float(m.u_bob[i, j]))])
    return buf.getvalue()


def cmd_payoff(args, out) -> int:
    scenario = load_scenario(args.scenario)
    _require_valid(scenario)
    text = payoff_csv_text(scenario)
    if args.output in (None, "-"):
        out.write(text)
    else:
        _write(args.output, text)
    return EXIT_OK


def report_document(report: eq.EquilibriumReport, digest: str) -> dict:
    def prof(p):
        return None if p is None else {"alice": list(p.alice), "bob": list(p.bob)}

    return {
        "scenario_digest": digest,
        "pure": [[i + 1, j + 1] for i, j in report.pure],
        "mixed": prof(report.mixed),
        "method": report.mixed_method,
        "residuals": None if report.residuals is None else list(report.residuals),
        "feasibility": report.feasibility,
        "oracle": [prof(p) for p in report.oracle],
        "degenerate": report.degenerate,
        "warnings": list(report.warnings),
        "diagnostics": list(report.diagnostics),
    }


def _g(x) -> str:
    return f"{x:.6g}"


def report_text(report: eq.EquilibriumReport) -> str:
    lines = []
    pure = ", ".join(f"({i + 1},{j + 1})" for i, j in report.pure) or "none"
    lines.append(f"pure equilibria : {pure}")
    if report.mixed is None:
        lines.append("mixed           : none")
    else:
        a = " ".join(_g(x) for x in report.mixed.alice)
        b = " ".join(_g(x) for x in report.mixed.bob)
        lines.append(f"mixed alice     : {a}")
        lines.append(f"mixed bob       : {b}")
        lines.append(f"method          : {report.mixed_method}")
        lines.append(f"residuals       : {_g(report.residuals[0])} {_g(report.residuals[1])}")
    lines.append(f"feasibility     : {report.feasibility}")
    for p in report.oracle:
        lines.append("oracle          : alice " + " ".join(_g(x) for x in p.alice)
                     + " | bob " + " ".join(_g(x) for x in p.bob))
    if report.degenerate:
        lines.append("degenerate      : yes")
    lines += [f"warning         : {w}" for w in report.warnings]
    lines += [f"diagnostic      : {d}" for d in report.diagnostics]
    return "\n".join(lines) + "\n"


def cmd_solve(args, out) -> int:
    scenario = load_scenario(args.scenario)
    _require_valid(scenario)
    try:
        report = eq.solve(scenario, args.method)
    except eq.EquilibriumError as exc:
        raise CliError(exc.name, str(exc), EXIT_SOLVER) from None
    if args.json:
        out.write(json.dumps(report_document(report, scenario.digest()), indent=2) + "\n")
    else:
        out.write(report_text(report))
    if not report.pure and report.mixed is None and not report.oracle:
        raise CliError("no-equilibrium", "no equilibrium reported", EXIT_SOLVER)
    return EXIT_OK


def _load_manifest(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError("file-not-found", str(path), EXIT_IO) from None
    except json.JSONDecodeError as exc:
        raise CliError("parse-error", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}",
                       EXIT_USAGE) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("models"), list) or not doc["models"]:
        raise CliError("parse-error", f"{path}: expected an object with a nonempty 'models' list",
                       EXIT_USAGE)
    return path.parent, doc


def _records(root: Path, rel, kind):
    p = root / rel
    try:
        return pf.read_records(p, kind)
    except FileNotFoundError:
        raise CliError("file-not-found", str(p), EXIT_IO) from None
    except pf.ProfileError as exc:
        raise CliError("parse-error", str(exc), EXIT_USAGE) from None


def cmd_fit(args, out) -> int:
    root, doc = _load_manifest(args.manifest)
    tol = args.tol if args.tol is not None else doc.get("tol", 1e-9)
    test_policy = pf.FidelityPolicy(args.delta_test) if args.delta_test else None
    trig_policy = pf.FidelityPolicy(args.delta_trigger) if args.delta_trigger else None
    baseline = _records(root, doc["baseline"], "test") if "baseline" in doc else None

    profs = []
    for entry in doc["models"]:
        try:
            alpha = float(entry["alpha"])
            test = _records(root, entry["test"], "test")
            trigger = _records(root, entry["trigger"], "trigger")
            prof = pf.estimate_profile(alpha, test, trigger)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, pf.ProfileError):
                raise CliError(exc.name, str(exc), EXIT_VALIDATION) from None
            raise CliError("parse-error", f"bad manifest entry {entry!r}", EXIT_USAGE) from None
        profs.append(prof)
        line = f"alpha={prof.alpha!r} p={prof.p!r} q={prof.q!r}"
        if baseline is not None:
            agree = pf.agreement_rate(baseline, test)
            line += f" agreement={agree!r}"
            if test_policy:
                line += " fidelity=" + ("ok" if test_policy.holds(agree) else "FAIL")
        if trig_policy:
            line += " verification=" + ("ok" if trig_policy.holds(prof.q) else "FAIL")
        print(line, file=out)

    try:
        coefs = pf.lambda_coefficients(profs)
    except pf.AllAlphasZeroError as exc:
        raise CliError(exc.name, str(exc), EXIT_VALIDATION) from None
    for alpha, lam in coefs:
        print(f"lambda[alpha={alpha!r}]={lam!r}", file=out)
    mean, spread = pf.lambda_spread(coefs)
    print(f"spread={spread!r}", file=out)
    try:
        lam = pf.fit_lambda(profs, tol)
    except pf.AssumptionFailure as exc:
        raise CliError(exc.name, str(exc), EXIT_VALIDATION) from None
    print(f"lambda={lam!r}", file=out)
    return EXIT_OK


def cmd_region(args, out) -> int:
    scenario = load_scenario(args.scenario)
    _require_valid(scenario)
    axes = [rg.Axis.parse(a) for a in args.axis]
    if args.svg and len(axes) != 2:
        raise CliError(rg.WrongAxisCount.name, f"--svg needs exactly 2 axes, got {len(axes)}",
                       EXIT_USAGE)
    spec = rg.SweepSpec(scenario, axes, tie_ongoing_costs=args.tie_ongoing)
    try:
        points = rg.scan(spec, workers=args.workers)
    except eq.EquilibriumError as exc:
        raise CliError(exc.name, str(exc), EXIT_SOLVER) from None
    if args.csv:
        _write(args.csv, rg.region_csv_text(points))
    if args.svg:
        _write(args.svg, rg.region_svg_text(points))
    counts = {c: 0 for c in rg.CLASSES}
    for p in points:
        counts[p.classification] += 1
    print(" ".join(f"{c}={n}" for c, n in counts.items()), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wmgame", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("scenario")
    v.add_argument("--strict", action="store_true", help="treat sign-convention warnings as failures")
    v.set_defaults(func=cmd_validate)

    pay = sub.add_parser("payoff", help="write the payoff bimatrix as CSV")
    pay.add_argument("scenario")
    pay.add_argument("-o", "--output", help="CSV destination (default: stdout)")
    pay.set_defaults(func=cmd_payoff)

    s = sub.add_parser("solve", help="find pure and mixed equilibria")
    s.add_argument("scenario")
    s.add_argument("--method", choices=eq.METHODS, default="auto")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("fit", help="estimate profiles and fit lambda from prediction records")
    f.add_argument("manifest", help="JSON manifest: {models: [{alpha, test, trigger}], tol?, baseline?}")
    f.add_argument("--tol", type=float)
    f.add_argument("--delta-test", type=float)
    f.add_argument("--delta-trigger", type=float)
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("region", help="sweep parameters and map the mixed-strategy region")
    r.add_argument("scenario")
    r.add_argument("--axis", action="append", required=True, metavar="PATH:START:END:STEPS")
    r.add_argument("--csv")
    r.add_argument("--svg")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--tie-ongoing", action="store_true",
                   help="set o_att=k*r_att_plus and o_def=k*r_def_plus at every grid point")
    r.set_defaults(func=cmd_region)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except CliError as exc:
        print(f"{exc.name}: {exc}", file=err)
        return exc.code
    except InvalidScenario as exc:
        print(f"{exc.name}: {exc}", file=err)
        return EXIT_VALIDATION
    except rg.RegionError as exc:
        code = EXIT_USAGE if isinstance(exc, (rg.InvalidSweep, rg.WrongAxisCount)) else EXIT_VALIDATION
        print(f"{exc.name}: {exc}", file=err)
        return code


if __name__ == "__main__":
    sys.exit(main())

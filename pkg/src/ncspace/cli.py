"""
Command-line front end.

    ncspace [--json|--csv|--table] [--out PATH] [--config PATH] [--oracle]
            [--tolerance X] <command> [options]

Commands: verify-algebra, corrections, ns, extract-constant, scaling-check.
Global flags are accepted before or after the command name. A config file
holds ``key = value`` lines using the long option names (dashes or
underscores); explicit flags override it.

Exit codes: 0 success, 1 verification failure, 2 numeric non-convergence,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import quadrature as quad
from . import spectra
from .checks import run_algebra_suite
from .composite import PROTON_ELECTRON_MASS_RATIO
from .errors import (
    DivergentLevel,
    GridTooCoarse,
    InconsistentScaling,
    InvalidQuantumNumbers,
    NonConverged,
    NonConvergedQuadrature,
    TruncationTooSmall,
)
from .second_order import loglog_slope, second_order_scaling_check

EXIT_OK, EXIT_FAIL, EXIT_NONCONVERGED, EXIT_USAGE = 0, 1, 2, 64

GLOBAL_DEFAULTS = {"format": "table", "out": None, "config": None, "oracle": False, "tolerance": None}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Report:
    records: list
    columns: list
    summary: dict = field(default_factory=dict)
    extra_tables: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK
    message: str | None = None


# ---------------------------------------------------------------------------
# argument parsing


def parse_int_range(text: str) -> list:
    """``"3"``, ``"1-4"`` or ``"1,2,5"`` (mixed allowed) to a sorted list."""
    out = set()
    try:
        for part in str(text).split(","):
            part = part.strip()
            if "-" in part[1:]:
                lo, hi = part.split("-", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise UsageError(f"empty range {part!r}")
                out.update(range(lo, hi + 1))
            else:
                out.add(int(part))
    except ValueError as exc:
        raise UsageError(f"cannot parse integer range {text!r}") from exc
    return sorted(out)


def parse_float_list(text) -> list:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _global_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = parent.add_argument_group("output and run control")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.add_argument("--table", dest="format", action="store_const", const="table")
    g.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    g.add_argument("--config", metavar="PATH", help="key = value file; flags take precedence")
    g.add_argument("--oracle", action="store_true", help="add independent oracle columns")
    g.add_argument("--tolerance", type=float, metavar="X", help="override numeric tolerance")
    return parent


def _physics_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("physical inputs")
    g.add_argument("--preset", choices=["hydrogen"], help="proton and electron masses")
    g.add_argument("--gamma", type=float, help="universal noncommutativity combination")
    g.add_argument("--mass1", type=float)
    g.add_argument("--mass2", type=float)
    g.add_argument("--kappa-rel", type=float, help="reduced units: mu = 1 and this relative strength")


def build_parser() -> argparse.ArgumentParser:
    parent = _global_parent()
    parser = _Parser(prog="ncspace", description=__doc__.split("\n\n")[0].strip(),
                     parents=[parent], argument_default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("verify-algebra", parents=[parent], argument_default=argparse.SUPPRESS,
                       help="run every exact commutator check")
    p.add_argument("--break-proportionality", action="store_true",
                   help="leave kappa_1 and kappa_2 independent")
    p.add_argument("--masses", help="m1,m2 for the composite checks (default 1,3)")

    p = sub.add_parser("corrections", parents=[parent], argument_default=argparse.SUPPRESS,
                       help="energy-level corrections over (n, l) ranges")
    p.add_argument("--n", help="principal quantum numbers, e.g. 1-4")
    p.add_argument("--l", help="orbital quantum numbers, e.g. 0-3")
    p.add_argument("--ns-constant", help="'stored', 'extract' or a number")
    _physics_options(p)

    p = sub.add_parser("ns", parents=[parent], argument_default=argparse.SUPPRESS,
                       help="ns-level integral and shift at vanishing chi")
    p.add_argument("--n", help="principal quantum numbers")
    p.add_argument("--a", help="fixed oscillator magnitudes; omit for the Gaussian average")
    p.add_argument("--K", type=int, help="Hermite truncation")
    _physics_options(p)

    p = sub.add_parser("extract-constant", parents=[parent], argument_default=argparse.SUPPRESS,
                       help="extract the universal ns constant")
    p.add_argument("--n", help="principal quantum numbers (default 1,2,3)")
    p.add_argument("--a", help="oscillator magnitudes (default 0.5,1,2)")
    p.add_argument("--K", type=int, help="Hermite truncation")
    p.add_argument("--data-out", metavar="PATH", help="plot-ready CSV of I_ns(0,a) against a")

    p = sub.add_parser("scaling-check", parents=[parent], argument_default=argparse.SUPPRESS,
                       help="frequency scaling of the second-order estimate")
    p.add_argument("--n", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--omega", help="comma-separated increasing frequencies")
    p.add_argument("--truncation", type=int)
    p.add_argument("--max-quanta", type=int)
    _physics_options(p)
    return parser


COMMAND_DEFAULTS = {
    "verify-algebra": {"break_proportionality": False, "masses": "1,3"},
    "corrections": {"n": "1-4", "l": "0-3", "ns_constant": "stored"},
    "ns": {"n": "1-3", "a": None, "K": None},
    "extract-constant": {"n": "1,2,3", "a": "0.5,1,2", "K": None, "data_out": None},
    "scaling-check": {"n": 2, "l": 1, "omega": "10,31.6227766,100,316.227766,1000",
                      "truncation": 8, "max_quanta": 2},
}
PHYSICS_DEFAULTS = {"preset": None, "gamma": None, "mass1": None, "mass2": None, "kappa_rel": None}
_BOOL_KEYS = {"oracle", "break_proportionality"}


def read_config(path) -> dict:
    cfg = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key in ("json", "csv", "table"):
            key, value = "format", key
        if key in _BOOL_KEYS:
            value = value.lower() in ("1", "true", "yes", "on")
        cfg[key] = value
    return cfg


def resolve(argv=None) -> argparse.Namespace:
    """Merge defaults < config file < flags."""
    ns = build_parser().parse_args(argv)
    flags = vars(ns)
    merged = dict(GLOBAL_DEFAULTS)
    merged.update(COMMAND_DEFAULTS[ns.command])
    if ns.command in ("corrections", "ns", "scaling-check"):
        merged.update(PHYSICS_DEFAULTS)
    if flags.get("config"):
        cfg = read_config(flags["config"])
        unknown = set(cfg) - set(merged)
        if unknown:
            raise UsageError(f"unknown config keys for {ns.command}: {', '.join(sorted(unknown))}")
        merged.update(cfg)
    merged.update(flags)
    if merged["format"] not in ("json", "csv", "table"):
        raise UsageError(f"format must be json, csv or table, got {merged['format']!r}")
    if merged["tolerance"] is not None:
        merged["tolerance"] = float(merged["tolerance"])
        if not merged["tolerance"] > 0:
            raise UsageError("tolerance must be positive")
    return argparse.Namespace(**merged)


def physical_params(args) -> spectra.PhysicalParams:
    if args.kappa_rel is not None:
        if any(v is not None for v in (args.preset, args.mass1, args.mass2, args.gamma)):
            raise UsageError("--kappa-rel excludes --preset, --gamma and explicit masses")
        return spectra.PhysicalParams.reduced(float(args.kappa_rel))
    if args.preset == "hydrogen" and (args.mass1 is not None or args.mass2 is not None):
        raise UsageError("--preset hydrogen fixes the masses")
    m1 = float(args.mass1) if args.mass1 is not None else PROTON_ELECTRON_MASS_RATIO
    m2 = float(args.mass2) if args.mass2 is not None else 1.0
    gamma = float(args.gamma) if args.gamma is not None else 1.0
    if m1 <= 0 or m2 <= 0:
        raise UsageError("masses must be positive")
    if gamma < 0:
        raise UsageError("gamma must be nonnegative")
    return spectra.PhysicalParams(gamma=gamma, mass1=m1, mass2=m2)


def spectral_config(args) -> quad.SpectralConfig:
    cfg = quad.SpectralConfig()
    if getattr(args, "K", None) is not None:
        try:
            cfg = replace(cfg, hermite_truncation=int(args.K))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.tolerance is not None:
        cfg = replace(cfg, tolerance=args.tolerance)
    return cfg


# ---------------------------------------------------------------------------
# commands


def cmd_verify_algebra(args) -> Report:
    masses = parse_float_list(args.masses)
    if len(masses) != 2 or min(masses) <= 0:
        raise UsageError("--masses needs two positive numbers")
    masses = [int(m) if float(m).is_integer() else m for m in masses]
    checks = run_algebra_suite(tuple(masses), bool(args.break_proportionality))
    records = [
        {"relation": c.relation, "status": "pass" if c.passed else "fail",
         "residual": c.residual, "index": list(c.index) if c.index else None}
        for c in checks
    ]
    failed = [c for c in checks if not c.passed]
    report = Report(records, ["relation", "status", "residual", "index"],
                    {"passed": len(checks) - len(failed), "failed": len(failed)})
    if failed:
        report.exit_code = EXIT_FAIL
        report.message = f"first failing relation: {failed[0].relation} (residual {failed[0].residual})"
    return report


def _ns_constant_choice(args) -> float | None:
    choice = str(args.ns_constant)
    if choice == "stored":
        return None
    if choice == "extract":
        return quad.extract_constant([1], [1.0], spectral_config(args), inject=False).constant
    try:
        return float(choice)
    except ValueError as exc:
        raise UsageError(f"--ns-constant must be 'stored', 'extract' or a number, got {choice!r}") from exc


CORRECTION_COLUMNS = ["n", "l", "kind", "value", "error_estimate", "divergent"]


def cmd_corrections(args) -> Report:
    params = physical_params(args)
    ns_list, ls = parse_int_range(args.n), parse_int_range(args.l)
    if not ns_list or min(ns_list) < 1 or min(ls) < 0:
        raise UsageError("need n >= 1 and l >= 0")
    pairs = [(n, l) for n in ns_list for l in ls if l < n]
    if not pairs:
        raise UsageError("no (n, l) pair with l < n in the requested ranges")
    constant = _ns_constant_choice(args)
    grid = spectra.RadialGrid() if args.tolerance is None else spectra.RadialGrid(tolerance=args.tolerance)
    records = []
    for n, l in pairs:
        qn = spectra.QuantumNumbers(n, l)
        if l == 0:
            row = spectra.delta_E_ns_asymptotic(n, params, constant).to_dict()
        elif l == 1:
            row = spectra.CorrectionResult(n, l, "divergent-expansion", None, divergent=True).to_dict()
        else:
            row = spectra.delta_E1_closed(qn, params).to_dict()
        if args.oracle:
            row["oracle"] = spectra.delta_E1_oracle(qn, params, grid).value if l >= 2 else None
        records.append(row)
    columns = CORRECTION_COLUMNS + (["oracle"] if args.oracle else [])
    summary = {"theta_sq_avg": params.theta_sq_avg, "theta_avg": params.theta_avg,
               "kappa_rel": params.kappa_rel,
               "ns_constant": spectra.ns_constant() if constant is None else constant}
    return Report(records, columns, summary)


def cmd_ns(args) -> Report:
    params = physical_params(args)
    cfg = spectral_config(args)
    ns_list = parse_int_range(args.n)
    if not ns_list or min(ns_list) < 1:
        raise UsageError("need n >= 1")
    records = []
    if args.a is not None:
        a_list = parse_float_list(args.a)
        if not a_list or min(a_list) <= 0:
            raise UsageError("--a values must be positive")
        for a in a_list:
            for n in ns_list:
                r = quad.ins_fixed_a(n, a, cfg)
                row = {"n": n, "a_tilde": a, "value": r.value, "error_estimate": r.error_estimate}
                if args.oracle:
                    row["grid"] = quad.grid_oracle(n, a)
                records.append(row)
        columns = ["n", "a_tilde", "value", "error_estimate"] + (["grid"] if args.oracle else [])
        return Report(records, columns)
    c = quad.constant_from(quad.ins_fixed_a(1, 1.0, cfg))
    for n in ns_list:
        ins0 = quad.ins_gaussian_avg(n, cfg)
        row = {"n": n, "ins_avg": ins0, "shift": params.chi ** 2 * ins0,
               "asymptotic": spectra.delta_E_ns_asymptotic(n, params, c).value}
        if args.oracle:
            row["ins_avg_quadrature"] = quad.ins_gaussian_avg(n, cfg, method="quadrature")
        records.append(row)
    columns = ["n", "ins_avg", "shift", "asymptotic"] + (["ins_avg_quadrature"] if args.oracle else [])
    return Report(records, columns, {"constant": c, "chi": params.chi})


def cmd_extract_constant(args) -> Report:
    cfg = spectral_config(args)
    ns_list, a_list = parse_int_range(args.n), parse_float_list(args.a)
    if not ns_list or min(ns_list) < 1 or not a_list or min(a_list) <= 0:
        raise UsageError("need n >= 1 and positive a values")
    res = quad.extract_constant(ns_list, a_list, cfg, inject=False)
    records, worst = [], 0.0
    for p in res.points:
        row = {"n": p.n, "a_tilde": p.a_tilde, "value": p.value, "error_estimate": p.error_estimate,
               "constant": quad.constant_from(p)}
        if args.oracle:
            g = quad.grid_oracle(p.n, p.a_tilde)
            row["grid"] = g
            row["grid_rel_diff"] = abs(g - p.value) / abs(p.value)
            worst = max(worst, row["grid_rel_diff"])
        records.append(row)
    columns = ["n", "a_tilde", "value", "error_estimate", "constant"]
    columns += ["grid", "grid_rel_diff"] if args.oracle else []
    first = res.points[0]
    convergence = [{"hermite_truncation": k, "averaged_partial_sum": v,
                    "constant": v * 4 * first.n ** 3 / (math.pi * first.a_tilde)}
                   for k, v in first.k_sequence]
    summary = {"constant": res.constant, "error_estimate": res.error_estimate,
               "max_scaling_deviation": res.max_deviation,
               "hermite_truncation": cfg.hermite_truncation}
    report = Report(records, columns, summary, {"convergence": convergence})
    if args.oracle:
        summary["grid_max_rel_diff"] = worst
        if worst > 0.02:
            report.exit_code = EXIT_FAIL
            report.message = f"grid oracle disagrees by {worst:.3%}"
    if args.data_out:
        Path(args.data_out).write_text(_to_csv(records, columns))
    return report


def cmd_scaling_check(args) -> Report:
    params = physical_params(args)
    omegas = parse_float_list(args.omega)
    if len(omegas) < 2:
        raise UsageError("need at least two frequencies")
    pts = second_order_scaling_check(int(args.n), int(args.l), omegas, int(args.truncation),
                                     params, max_quanta=int(args.max_quanta))
    slope = loglog_slope(*zip(*pts))
    tol = 0.1 if args.tolerance is None else args.tolerance
    records = [{"omega": w, "estimate": e} for w, e in pts]
    report = Report(records, ["omega", "estimate"], {"slope": slope, "expected": -1.0, "tolerance": tol})
    if abs(slope + 1) > tol:
        report.exit_code = EXIT_FAIL
        report.message = f"log-log slope {slope:.4f} outside -1 +/- {tol}"
    return report


COMMANDS = {
    "verify-algebra": cmd_verify_algebra,
    "corrections": cmd_corrections,
    "ns": cmd_ns,
    "extract-constant": cmd_extract_constant,
    "scaling-check": cmd_scaling_check,
}


# ---------------------------------------------------------------------------
# rendering


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


def _to_csv(records, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _fmt_table_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{v:.10g}"
    return _cell(v)


def _to_table(records, columns) -> str:
    rows = [[_fmt_table_cell(r.get(c)) for c in columns] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(report: Report, fmt: str, command: str) -> str:
    if fmt == "json":
        doc = {"command": command, "records": report.records, "summary": report.summary}
        doc.update(report.extra_tables)
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _to_csv(report.records, report.columns)
    parts = [_to_table(report.records, report.columns)]
    if report.summary:
        parts.append("\n".join(f"{k}: {_fmt_table_cell(v)}" for k, v in report.summary.items()) + "\n")
    for name, rows in report.extra_tables.items():
        parts.append(f"{name}:\n" + _to_table(rows, list(rows[0]) if rows else []))
    return "\n".join(parts)


def main(argv=None) -> int:
    try:
        args = resolve(argv)
        report = COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, InvalidQuantumNumbers, DivergentLevel, TruncationTooSmall) as exc:
        print(f"ncspace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConverged, NonConvergedQuadrature, GridTooCoarse) as exc:
        print(f"ncspace: not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except InconsistentScaling as exc:
        print(f"ncspace: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = render(report, args.format, args.command)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if report.message:
        print(f"ncspace: {report.message}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

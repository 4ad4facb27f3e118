"""Command-line front end.

Every subcommand prints a JSON report on stdout and, with ``--out``, writes
its table (CSV) or full report (JSON) atomically.  Exit codes: 0 all checks
pass, 1 a verification failed, 2 a computation failed, 64 bad usage.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .bifurcation import diagram, extrapolate_onset, onset, solve_energy
from .chicone import (
    CHICONE_P_GRID,
    CROSSCHECK_TOL,
    CURV_TOL,
    EXCLUSION,
    C_of_t,
    Cprime_margin,
    chicone_curvature,
    crosscheck_C_forms,
    u_grid,
)
from .errors import DomainError, OscPeriodError
from .lemmas import CLAIMS, DEFAULT_P_GRID, f_p, lemma_sweep
from .period import REL_TOL, energy_grid, period, period_scan
from .potential import as_exponent, energy_max
from .simulate import drift_bound, integrate, measure_period

EXIT_PASS = 0
EXIT_VERIFY = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64

AGREEMENT_TOL = 1e-8
ONSET_TOL = 1e-3
ANCHOR_TOL = 1e-13


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(EXIT_USAGE, "UsageError", message)


def _fail(code: int, kind: str, message: str):
    err = {"error": kind, "message": message, "exit_code": code, "version": __version__}
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    raise SystemExit(code)


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _atomic_write(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else
                              str(v) if isinstance(v, int) else "%.17g" % v for v in row))
    return "\n".join(lines) + "\n"


def _report(claim, p_grid, grid, worst, passed, tolerances, **extra) -> dict:
    out = {
        "claim": claim,
        "p_grid": list(p_grid),
        "t_or_e_grid": list(grid),
        "worst_violation": worst,
        "pass": bool(passed),
        "tolerances": tolerances,
        "version": __version__,
    }
    out.update(extra)
    return out


# -- argument parsing --------------------------------------------------------

def _energy_spec(text: str):
    """``"0.2"`` is an absolute energy; ``"0.99x"`` is a fraction of E_max."""
    text = text.strip()
    frac = text.endswith("x")
    try:
        value = float(text[:-1] if frac else text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an energy: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"energy must be finite: {text!r}")
    return ("frac" if frac else "abs", value)


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return n


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return x


def _finite_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oscperiod", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, steps, t_max=False, energies=True):
        sp.add_argument("--p", type=_finite_float, help="single exponent p > 1")
        sp.add_argument("--p-grid", help="'default' or comma-separated exponents")
        if energies:
            sp.add_argument("--e-min", type=_energy_spec, help="lowest energy; suffix x for a fraction of E_max")
            sp.add_argument("--e-max", type=_energy_spec, help="highest energy; suffix x for a fraction of E_max")
            sp.add_argument("--spacing", choices=("log", "linear"), default="log")
        sp.add_argument("--steps", type=_positive_int, default=steps, help="grid size")
        if t_max:
            sp.add_argument("--t-max", type=_positive_float, default=30.0, help="largest t of the sweep")
        sp.add_argument("--tol", type=_positive_float, help="override the main pass tolerance")
        sp.add_argument("--out", help="output file")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    common(sub.add_parser("period-scan", help="period on an energy grid and monotonicity verdict"), 50)
    common(sub.add_parser("chicone", help="convexity criterion and the transformed C(t)"), 200,
           t_max=True, energies=False)
    sp = sub.add_parser("lemmas", help="sign, identity and asymptotic sweeps of the lemma functions")
    common(sp, 200, t_max=True, energies=False)
    sp.add_argument("--claim", default="all", choices=("all",) + CLAIMS)
    sp = sub.add_parser("simulate", help="integrate the oscillator and measure its period")
    common(sp, 1, energies=False)
    sp.add_argument("--e", type=_energy_spec, required=True, help="energy; suffix x for a fraction of E_max")
    sp.add_argument("--cycles", type=_positive_int, default=8)
    sp = sub.add_parser("bifurcate", help="periodic and Neumann branches lambda(E)")
    common(sp, 40)
    sp.add_argument("--n-max", type=_positive_int, default=3)
    return parser


def _p_list(args, default) -> list:
    if args.p is not None and args.p_grid is not None:
        raise UsageError("give --p or --p-grid, not both")
    if args.p is not None:
        raw = [args.p]
    elif args.p_grid is None or args.p_grid.strip() == "default":
        raw = list(default)
    else:
        try:
            raw = [float(s) for s in args.p_grid.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"bad --p-grid {args.p_grid!r}")
        if not raw:
            raise UsageError("empty --p-grid")
    try:
        return [as_exponent(p) for p in raw]
    except DomainError as exc:
        raise UsageError(str(exc))


def _resolve_energy(energy, p: float, flag: str) -> float:
    kind, value = energy
    emax = energy_max(p)
    E = value * emax if kind == "frac" else value
    if not 0.0 < E < emax:
        raise UsageError(f"{flag} gives E = {E!r}, outside (0, {emax!r}) for p = {p!r}")
    return E


def _energy_grid(args, p: float) -> list:
    lo = _resolve_energy(args.e_min or ("frac", 1e-6), p, "--e-min")
    hi = _resolve_energy(args.e_max or ("frac", 0.999), p, "--e-max")
    if args.steps > 1 and not lo < hi:
        raise UsageError(f"--e-min must be below --e-max (p = {p!r})")
    return energy_grid(p, lo, hi, args.steps, args.spacing)


# -- subcommands -------------------------------------------------------------

def cmd_period_scan(args):
    ps = _p_list(args, DEFAULT_P_GRID)
    grids = {p: _energy_grid(args, p) for p in ps}
    rel_tol = args.tol or REL_TOL
    rows, scans, failures = [], {}, []
    worst = -math.inf
    for p in ps:
        scan = period_scan(p, grids[p], rel_tol)
        scans[p] = scan
        failures += [{"p": p, "E": E, "error": msg} for E, msg in scan.failures]
        for s in scan.samples:
            rows.append((p, s.E, s.T, s.est_error, s.order))
        if scan.margins:
            worst = max(worst, -scan.worst_margin)
    passed = all(s.monotone for s in scans.values())
    report = _report(
        "period-scan", ps, grids[ps[0]] if len(ps) == 1 else [], worst, passed,
        {"quadrature_rel_tol": rel_tol, "monotone_margin": 0.0},
        monotone={str(p): s.monotone for p, s in scans.items()},
        failures=failures,
    )
    table = _csv(("p", "E", "T", "est_error", "order"), rows)
    code = EXIT_RUNTIME if failures else (EXIT_PASS if passed else EXIT_VERIFY)
    return report, table, code


def _fd_curvature(p: float, u: float) -> float:
    # central difference of the analytic first derivative of V/V'^2; the
    # stencil may reach just inside the exclusion zone at its edge
    h = 1e-5 * u
    plus = chicone_curvature(p, u + h, exclusion=0.0).C_u
    minus = chicone_curvature(p, u - h, exclusion=0.0).C_u
    return (plus - minus) / (2.0 * h)


def cmd_chicone(args):
    ps = _p_list(args, CHICONE_P_GRID)
    curv_tol = args.tol or CURV_TOL
    us = u_grid(args.steps)
    ts = [float(t) for t in np.geomspace(1e-3, args.t_max, args.steps)]
    rows = []
    curv_worst = fd_worst = cp_worst = cross_worst = -math.inf
    for p in ps:
        for u in us:
            pt = chicone_curvature(p, u)
            rows.append((p, u, pt.ratio, pt.C_u, pt.curv))
            curv_worst = max(curv_worst, -pt.curv / pt.scale)
            fd = _fd_curvature(p, u)
            fd_worst = max(fd_worst, abs(fd - pt.curv) / max(abs(pt.curv), pt.scale * 1e-6))
        for t in ts:
            for s in (t, -t):
                cp_worst = max(cp_worst, -Cprime_margin(p, s))
                if abs(s) <= 5.0 and abs(math.expm1(s)) >= EXCLUSION:
                    cross_worst = max(cross_worst, crosscheck_C_forms(p, s))
    checks = {
        "curvature_nonnegative": {"worst": curv_worst, "tol": curv_tol, "pass": curv_worst <= curv_tol},
        "curvature_fd": {"worst": fd_worst, "tol": 1e-6, "pass": fd_worst <= 1e-6},
        "Cprime_positive": {"worst": cp_worst, "tol": -1e-12, "pass": cp_worst <= -1e-12},
        "C_forms_agree": {"worst": cross_worst, "tol": CROSSCHECK_TOL, "pass": cross_worst <= CROSSCHECK_TOL},
    }
    if 3.0 in ps:
        anchor = max(
            abs(C_of_t(3.0, t).C + 0.5 * math.exp(-3.0 * t)) / max(1.0, 0.5 * math.exp(-3.0 * t))
            for t in np.linspace(-5.0, 5.0, 201)
        )
        f3 = max(abs(f_p(3.0, t) - 1.0) for t in np.linspace(-30.0, 30.0, 601))
        checks["closed_form_p3"] = {"worst": anchor, "tol": ANCHOR_TOL, "pass": anchor <= ANCHOR_TOL}
        checks["f3_identically_one"] = {"worst": f3, "tol": ANCHOR_TOL, "pass": f3 <= ANCHOR_TOL}
    passed = all(c["pass"] for c in checks.values())
    report = _report(
        "chicone", ps, us, curv_worst, passed,
        {k: c["tol"] for k, c in checks.items()}, checks=checks,
    )
    table = _csv(("p", "u", "ratio", "C_u", "curv"), rows)
    return report, table, EXIT_PASS if passed else EXIT_VERIFY


def cmd_lemmas(args):
    ps = _p_list(args, DEFAULT_P_GRID)
    ts = [float(t) for t in np.geomspace(1e-4, args.t_max, args.steps)]
    claims = CLAIMS if args.claim == "all" else (args.claim,)
    results = {}
    for claim in claims:
        rep = lemma_sweep(claim, ps, ts)
        tol = rep.tolerance
        if args.tol is not None and tol > 0:
            tol = args.tol
        results[claim] = {
            "worst_violation": rep.worst_violation,
            "tolerance": tol,
            "pass": rep.worst_violation <= tol,
            "worst_at": rep.worst_at,
            "p_grid": rep.p_grid,
            "observed": rep.observed,
        }
    passed = all(r["pass"] for r in results.values())
    worst = max(r["worst_violation"] - r["tolerance"] for r in results.values())
    report = _report(
        args.claim, ps, ts, worst, passed,
        {c: r["tolerance"] for c, r in results.items()}, claims=results,
    )
    rows = [(c, r["worst_violation"], r["tolerance"], "true" if r["pass"] else "false")
            for c, r in results.items()]
    table = _csv(("claim", "worst_violation", "tolerance", "pass"), rows)
    return report, table, EXIT_PASS if passed else EXIT_VERIFY


def cmd_simulate(args):
    ps = _p_list(args, (3.0,))
    if len(ps) != 1:
        raise UsageError("simulate takes a single --p")
    p = ps[0]
    E = _resolve_energy(args.e, p, "--e")
    tol = args.tol or AGREEMENT_TOL
    measured = measure_period(p, E, args.cycles)
    quad = period(p, E)
    traj = integrate(p, E, args.cycles * measured.T_measured)
    gap = abs(measured.T_measured - quad.T) / quad.T
    spread = measured.per_cycle_spread / measured.T_measured
    bound = drift_bound(E)
    checks = {
        "period_agreement": {"worst": gap, "tol": tol, "pass": gap <= tol},
        "per_cycle_spread": {"worst": spread, "tol": AGREEMENT_TOL, "pass": spread <= AGREEMENT_TOL},
        "energy_drift": {"worst": traj.max_energy_drift, "tol": bound, "pass": traj.max_energy_drift <= bound},
    }
    passed = all(c["pass"] for c in checks.values())
    report = _report(
        "simulate", [p], [E], gap, passed, {k: c["tol"] for k, c in checks.items()},
        T_measured=measured.T_measured, T_quadrature=quad.T, n_cycles=measured.n_cycles,
        checks=checks,
    )
    rows = [(float(t), float(s[0]), float(s[1]), float(d))
            for t, s, d in zip(traj.times, traj.states, traj.energy_drift)]
    table = _csv(("t", "u", "u_prime", "energy_drift"), rows)
    return report, table, EXIT_PASS if passed else EXIT_VERIFY


def cmd_bifurcate(args):
    ps = _p_list(args, (3.0,))
    if len(ps) != 1:
        raise UsageError("bifurcate takes a single --p")
    p = ps[0]
    energies = _energy_grid(args, p)
    d = diagram(p, energies, args.n_max)
    checks = {}
    for mode in d.modes:
        branch = d.branch(mode)
        entry = {"monotone": d.monotone(mode), "onset": onset(p, mode)}
        if len(branch) >= 3:
            est = extrapolate_onset(branch)
            err = abs(est - entry["onset"]) / entry["onset"]
            entry.update(extrapolated=est, onset_error=err)
            # unique crossing of a level above onset
            level = 0.5 * (branch[0].lam + branch[-1].lam)
            entry["crossings"] = len(solve_energy(branch, level))
        checks[str(mode)] = entry
    periodic = checks.get("0", {})
    onset_err = periodic.get("onset_error", math.nan)
    passed = (
        all(c["monotone"] for c in checks.values())
        and d.ordered()
        and all(c.get("crossings", 1) == 1 for c in checks.values())
        and (len(energies) < 3 or onset_err <= ONSET_TOL)
    )
    report = _report(
        "bifurcate", [p], energies, onset_err, passed,
        {"onset": ONSET_TOL}, branches=checks, ordered=d.ordered(),
        failures=[{"E": E, "error": msg} for E, msg in d.failures],
    )
    rows = [(pt.mode, pt.E, pt.T, pt.lam) for pt in d.points]
    table = _csv(("mode", "E", "T", "lambda"), rows)
    code = EXIT_RUNTIME if d.failures else (EXIT_PASS if passed else EXIT_VERIFY)
    return report, table, code


COMMANDS = {
    "period-scan": cmd_period_scan,
    "chicone": cmd_chicone,
    "lemmas": cmd_lemmas,
    "simulate": cmd_simulate,
    "bifurcate": cmd_bifurcate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, table, code = COMMANDS[args.command](args)
    except UsageError as exc:
        _fail(EXIT_USAGE, "UsageError", str(exc))
    except OscPeriodError as exc:
        _fail(EXIT_RUNTIME, type(exc).__name__, str(exc))
    if args.out:
        _atomic_write(args.out, table if args.format == "csv" else _dumps(report))
    sys.stdout.write(_dumps(report))
    if code != EXIT_PASS:
        sys.stderr.write(json.dumps(
            {"error": "VerificationFailed" if code == EXIT_VERIFY else "ComputationFailed",
             "claim": report["claim"], "exit_code": code, "version": __version__},
            sort_keys=True) + "\n")
    return code

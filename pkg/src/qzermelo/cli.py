"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
3 journey-time horizon exceeded.
"""

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import export, geometry, linalg, oracle, problemfile, solver

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_HORIZON = 0, 1, 2, 3

log = logging.getLogger("qzermelo")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pair(a):
    a = np.asarray(a, dtype=complex)
    return {"real": a.real.tolist(), "imag": a.imag.tolist()}


def _clean(obj):
    """Make a structure JSON-safe: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _json(doc):
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def _load(args):
    if args.tol_linalg is not None:
        linalg.HERMITIAN_TOL = args.tol_linalg
    pf = problemfile.load(args.problem)
    if args.dump_normalized:
        problemfile.dump(pf, args.dump_normalized)
    return pf


def _problem(pf, args, epsilon=None):
    return pf.to_problem(epsilon=epsilon, t_max=args.t_max)


def solution_document(sol):
    d = sol.diagnostics
    return {
        "t_star": sol.t_star,
        "theta": sol.theta,
        "trivial": sol.trivial,
        "h1_initial": _pair(sol.h1_initial),
        "aligned_psi_f": _pair(sol.aligned_psi_f),
        "diagnostics": d.to_dict(),
        "failures": d.failures(),
    }


def vertical_generator(psi):
    """``2(|psi><psi| - I/n)``: traceless, fixes ``psi``, equals sigma_z at ``psi = (1, 0)``."""
    n = psi.shape[0]
    return 2.0 * (np.outer(psi, psi.conj()) - np.eye(n) / n)


def cmd_solve(args):
    pf = _load(args)
    p = _problem(pf, args)
    sol = solver.solve(p)
    export.write_text(_json(solution_document(sol)), args.out)
    fails = sol.diagnostics.failures()
    if fails:
        print(f"residual check failed: {', '.join(fails)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_trajectory(args):
    pf = _load(args)
    p = _problem(pf, args)
    sol = solver.solve(p)
    header, rows = export.trajectory_table(p, sol, args.dt)
    export.write_text(export.format_csv(header, rows), args.out)
    fails = sol.diagnostics.failures()
    if fails:
        print(f"residual check failed: {', '.join(fails)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _sweep_row(pf, args, eps):
    try:
        sol = solver.solve(_problem(pf, args, epsilon=eps))
    except (solver.NavigationError, geometry.UnreachableError, linalg.LinalgError) as exc:
        return [eps, math.nan, math.nan, "FAIL", str(exc)]
    fails = sol.diagnostics.failures()
    status = "FAIL" if fails else "PASS"
    return [eps, sol.t_star, sol.theta, status, ";".join(fails)]


def sweep_rows(pf, args, eps_values):
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        return list(pool.map(lambda e: _sweep_row(pf, args, float(e)), eps_values))


def cmd_sweep(args):
    if args.steps < 1:
        raise problemfile.ProblemFileError("--steps must be at least 1")
    pf = _load(args)
    eps_values = np.linspace(args.eps_min, args.eps_max, args.steps)
    rows = sweep_rows(pf, args, eps_values)
    header = ["epsilon", "t_star", "theta", "status", "error"]
    export.write_text(export.format_csv(header, rows), args.out)
    return EXIT_OK if all(r[3] == "PASS" for r in rows) else EXIT_NUMERIC


def _table(residuals, limits, failures):
    lines = [f"{'check':<16}{'residual':>14}{'limit':>10}  status"]
    for name, value in residuals.items():
        status = "FAIL" if name in failures else "PASS"
        lines.append(f"{name:<16}{value:>14.3e}{limits[name]:>10.0e}  {status}")
    lines.append(f"overall: {'FAIL' if failures else 'PASS'}")
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    pf = _load(args)
    p = _problem(pf, args)
    sol = solver.solve(p)
    if args.perturb:
        sol.h1_initial = sol.h1_initial + args.perturb * vertical_generator(p.psi_i)
        sol.trivial = False
        sol.diagnostics = solver.verify_solution(p, sol, n_grid=args.grid)
    diag = sol.diagnostics
    fails = diag.failures()
    sys.stdout.write(_table(diag.residuals(), solver.DEFAULT_THRESHOLDS, fails))
    if args.out:
        doc = solution_document(sol)
        doc["perturb"] = args.perturb
        doc["passed"] = not fails
        export.write_text(_json(doc), args.out)
    return EXIT_NUMERIC if fails else EXIT_OK


def cmd_oracle(args):
    pf = _load(args)
    p = _problem(pf, args)
    report = oracle.optimality_certificate(
        p, n_samples=args.samples, dt=args.dt, fid_threshold=args.fid_threshold, seed=args.seed
    )
    d = report.to_dict()
    lines = [
        f"t_star           {report.t_star:.12f}",
        f"solver arrival   {report.solver_arrival}",
        f"min competitor   {report.min_observed}  (must be >= t_star - {report.margin:g})",
        f"arrival bound    {report.ball_entry_time}  (earliest possible entry into the arrival ball)",
        f"arrived          {report.arrived_adjoint_orbit} adjoint-orbit, "
        f"{report.arrived_piecewise} piecewise of {report.n_samples} each",
        f"certificate: {'PASS' if report.passed else 'FAIL'} ({report.note})",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        export.write_text(_json(d), args.out)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True, help="problem file (JSON)")
    common.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
    common.add_argument("--t-max", type=float, default=None, help="root search horizon")
    common.add_argument("--tol-linalg", type=float, default=None,
                        help="Hermiticity tolerance for operators (default 1e-12)")
    common.add_argument("--dump-normalized", default=None, metavar="PATH",
                        help="write the parsed, normalized problem file to PATH")

    parser = _Parser(prog="qzermelo", description="Time-optimal quantum navigation through a drift Hamiltonian.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="journey time and optimal control (JSON)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("trajectory", parents=[common], help="optimal trajectory (CSV)")
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("sweep", parents=[common], help="journey time over a family of wind scales (CSV)")
    p.add_argument("--eps-min", type=float, default=0.0)
    p.add_argument("--eps-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="residual table for the solved instance")
    p.add_argument("--perturb", type=float, default=0.0,
                   help="add this multiple of a vertical generator to H1(0) before checking")
    p.add_argument("--grid", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="sampled optimality certificate")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fid-threshold", type=float, default=oracle.DEFAULT_FID_THRESHOLD)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except problemfile.ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except linalg.LinalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except solver.HorizonExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    except (solver.NavigationError, geometry.UnreachableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``fracpn {solve,sweep,batch,list-systems}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import receiver
from .core import IterationTrace, SolverConfig, Status, solve
from .report import FORMATS, ReportRow, RunReport, parse_complex, render, rows_from_records, write_trace
from .sweep import InsufficientData, SweepConfig, collect_roots, estimate_order, sweep_solves
from .systems import available_systems, get_system, system_entry

log = logging.getLogger("fracpn")

#: Environment variable naming a default receiver parameter file.
PARAMS_ENV = "FRACPN_PARAMS"


class CLIError(Exception):
    pass


def _parse_x0(text: str) -> list[complex]:
    try:
        return [parse_complex(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CLIError(f"cannot parse --x0 {text!r}") from None


def _receiver_params(args) -> receiver.ReceiverParams:
    """Built-in defaults, overridden by the params file, overridden by flags."""
    params = receiver.ReceiverParams()
    path = args.params or os.environ.get(PARAMS_ENV)
    if path:
        try:
            params = receiver.load_params(path, params)
        except (OSError, ValueError) as err:
            raise CLIError(str(err)) from None
    dni = getattr(args, "dni", None)
    t_air = getattr(args, "t_air", None)
    if dni is not None or t_air is not None:
        params = params.with_measurement(
            params.dni if dni is None else dni,
            params.t_air if t_air is None else t_air,
        )
    return params


def _solver_config(args, alpha: float, epsilon: float, tol: float) -> SolverConfig:
    try:
        return SolverConfig(
            alpha=alpha,
            epsilon=epsilon if args.eps is None else args.eps,
            tol=tol if args.tol is None else args.tol,
            max_iter=args.max_iter,
            round_digits=args.m,
            diverge_bound=args.diverge_bound,
        )
    except ValueError as err:
        raise CLIError(str(err)) from None


def _system_and_x0(args):
    try:
        entry = system_entry(args.system)
    except KeyError as err:
        raise CLIError(err.args[0]) from None
    params = _receiver_params(args) if entry.needs_params else None
    system = get_system(args.system, params)
    x0 = _parse_x0(args.x0)
    if len(x0) != system.dimension:
        raise CLIError(
            f"system {args.system} has dimension {system.dimension}, "
            f"but --x0 has {len(x0)} component(s)"
        )
    return entry, system, x0


def cmd_solve(args) -> int:
    entry, system, x0 = _system_and_x0(args)
    cfg = _solver_config(args, args.alpha, entry.epsilon, entry.tol)
    trace = IterationTrace() if args.trace else None
    t0 = time.perf_counter()
    result = solve(system, x0, cfg, trace)
    report = RunReport(
        [ReportRow.from_result(result)],
        grid_size=1,
        converged=int(result.converged),
        wall_time=time.perf_counter() - t0,
    )
    if trace is not None:
        write_trace(args.trace, trace)
        try:
            report.extra["estimated order"] = f"{estimate_order(trace):.4f}"
        except InsufficientData:
            report.extra["estimated order"] = "n/a"
    sys.stdout.write(render(report, args.format))
    print(report.summary(), file=sys.stderr)
    return 0 if result.converged else 2


def cmd_sweep(args) -> int:
    entry, system, x0 = _system_and_x0(args)
    template = _solver_config(args, 0.5, entry.epsilon, entry.tol)
    try:
        sweep_cfg = SweepConfig(
            alpha_min=args.alpha_min,
            alpha_max=args.alpha_max,
            alpha_step=args.alpha_step,
            integer_exclusion_radius=args.exclusion_radius,
            dedup_tol=args.dedup_tol,
        )
    except ValueError as err:
        raise CLIError(str(err)) from None
    t0 = time.perf_counter()
    solves = sweep_solves(system, x0, template, sweep_cfg, workers=args.workers)
    records = collect_roots(solves, sweep_cfg.dedup_tol)
    report = RunReport(
        rows_from_records(records),
        grid_size=len(solves),
        converged=sum(r.status is Status.CONVERGED for _, r in solves),
        wall_time=time.perf_counter() - t0,
    )
    sys.stdout.write(render(report, args.format))
    print(report.summary(), file=sys.stderr)
    return 0


def cmd_batch(args) -> int:
    try:
        rows = receiver.read_measurements(args.input)
    except OSError as err:
        raise CLIError(f"cannot read {args.input}: {err}") from None
    except receiver.MeasurementError as err:
        raise CLIError(f"{args.input}: {err}") from None
    params = _receiver_params(args)
    template = _solver_config(args, 1.5, receiver.RECEIVER_EPSILON, receiver.RECEIVER_TOL)
    t0 = time.perf_counter()
    solutions = receiver.batch_solve(rows, params, template, workers=args.workers)
    if args.output:
        receiver.write_solutions(args.output, solutions)
    else:
        receiver.write_solutions(sys.stdout, solutions)
    failed = [i for i, s in enumerate(solutions, start=1) if s.status is not Status.CONVERGED]
    for i in failed:
        print(f"row {i}: {solutions[i - 1].status}", file=sys.stderr)
    print(
        f"{len(solutions) - len(failed)}/{len(solutions)} rows converged, "
        f"wall time {time.perf_counter() - t0:.3f} s",
        file=sys.stderr,
    )
    return 2 if failed else 0


def cmd_list_systems(args) -> int:
    for e in available_systems():
        print(f"{e.name:<10} n={e.dimension}  eps={e.epsilon:g}  tol={e.tol:g}  {e.description}")
    return 0


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--eps", type=float, help="regularizer epsilon (system default if omitted)")
    g.add_argument("--tol", type=float, help="stopping tolerance (system default if omitted)")
    g.add_argument("--max-iter", type=int, default=5000)
    g.add_argument("--m", type=int, default=5, help="rounding digits")
    g.add_argument("--diverge-bound", type=float, default=1e8)


def _add_receiver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("receiver")
    g.add_argument("--params", help=f"parameter file (name=value lines); default ${PARAMS_ENV}")
    g.add_argument("--dni", type=float, help="override DNI [W/m^2]")
    g.add_argument("--t-air", type=float, help="override ambient temperature [degC]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracpn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one solve of a named system")
    p.add_argument("--system", required=True)
    p.add_argument("--x0", required=True, help="comma-separated start, e.g. 53,19 or 1+2i,0")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--trace", help="write the iteration trace (JSON lines) here")
    p.add_argument("--format", choices=FORMATS, default="text")
    _add_solver_flags(p)
    _add_receiver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="alpha sweep from one starting point")
    p.add_argument("--system", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--alpha-min", type=float, default=-2.0)
    p.add_argument("--alpha-max", type=float, default=2.0)
    p.add_argument("--alpha-step", type=float, default=0.005)
    p.add_argument("--exclusion-radius", type=float, default=0.01)
    p.add_argument("--dedup-tol", type=float, default=1e-4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=FORMATS, default="text")
    _add_solver_flags(p)
    _add_receiver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("batch", help="solve the receiver for every measurement row")
    p.add_argument("input", help="CSV with columns dni,t_air,x0_2,x0_3[,alpha]")
    p.add_argument("-o", "--output", help="output CSV (stdout if omitted)")
    p.add_argument("--params", help=f"parameter file (name=value lines); default ${PARAMS_ENV}")
    p.add_argument("--workers", type=int, default=1)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("list-systems", help="show registered systems")
    p.set_defaults(func=cmd_list_systems)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CLIError as err:
        print(f"fracpn: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Re-run every reference solve and compare against the published values.

    python scripts/reproduce_tables.py            # all tables
    python scripts/reproduce_tables.py si50 receiver

Reference values live in tests/tables.py.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import tables  # noqa: E402
from fracpn.core import SolverConfig, solve  # noqa: E402
from fracpn.receiver import (  # noqa: E402
    MeasurementRow,
    ReceiverParams,
    back_substitute,
    batch_solve,
    derive_constants,
    full_system,
    reduced_system,
)
from fracpn.report import ReportRow, RunReport, render  # noqa: E402
from fracpn.systems import make_example2, make_example3, make_sine_integral_tail  # noqa: E402


def bench(name, system, x0, rows):
    print(f"== {name} from x0={x0} (eps=1e-3, tol=1e-6)")
    report_rows, errs = [], []
    for i, (alpha, ref) in rows.items():
        r = solve(system, x0, SolverConfig(alpha=alpha))
        report_rows.append(ReportRow.from_result(r))
        errs.append((i, float(np.max(np.abs(r.root - np.array(ref))))))
    print(render(RunReport(report_rows), "text"), end="")
    for i, e in errs:
        flag = "ok" if e <= 1e-4 else "MISMATCH"
        print(f"  row {i:2d}: max |x - ref| = {e:.2e}  {flag}")
    print()


def receiver():
    c = derive_constants(ReceiverParams())
    print("== receiver, full model (eps=1e-4, tol=1e-2)")
    r = solve(full_system(c), tables.FULL_X0, SolverConfig(alpha=tables.FULL_ALPHA, epsilon=1e-4, tol=1e-2))
    print(render(RunReport([ReportRow.from_result(r)]), "text"), end="")
    print(f"  max |x - ref| = {np.max(np.abs(r.root - tables.FULL_ROOT)):.2e}\n")

    print("== receiver, reduced model (eps=1e-4, tol=1e-2)")
    r = solve(reduced_system(c), tables.REDUCED_X0,
              SolverConfig(alpha=tables.REDUCED_ALPHA, epsilon=1e-4, tol=1e-2))
    print(render(RunReport([ReportRow.from_result(r)]), "text"), end="")
    x1, x4, x5 = back_substitute(r.root[0].real, r.root[1].real, c)
    print(f"  back substitution: T_cell={x1.real:.8f} eta_cell={x4.real:.8f} eta_teg={x5.real:.8f}")
    print(f"  reference:         {tables.BACK_SUBSTITUTED}\n")


def measurements():
    print("== measurement batch")
    rows = [MeasurementRow(*m[:5]) for m in tables.MEASUREMENTS]
    t0 = time.perf_counter()
    sols = batch_solve(rows)
    dt = time.perf_counter() - t0
    print(f"{'dni':>9} {'t_air':>7} {'alpha':>8} {'t_hot':>12} {'t_cold':>12} {'|err|':>9} {'n':>5}")
    for m, s in zip(tables.MEASUREMENTS, sols):
        err = max(abs(s.t_hot - m[5]), abs(s.t_cold - m[6])) if s.t_hot is not None else float("nan")
        print(f"{s.dni:9.3f} {s.t_air:7.3f} {s.alpha:8.5f} {s.t_hot:12.8f} {s.t_cold:12.8f} "
              f"{err:9.2e} {s.iterations:5d}")
    print(f"  {sum(s.status == 'Converged' for s in sols)}/{len(sols)} converged in {dt:.2f} s\n")


SECTIONS = {
    "si50": lambda: bench("si50", make_sine_integral_tail(50), tables.SI50_X0, tables.SI50_ROWS),
    "example2": lambda: bench("example2", make_example2(), tables.EXAMPLE2_X0, tables.EXAMPLE2_ROWS),
    "example3": lambda: bench("example3", make_example3(), tables.EXAMPLE3_X0, tables.EXAMPLE3_ROWS),
    "receiver": receiver,
    "batch": measurements,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("sections", nargs="*", help=f"any of {', '.join(SECTIONS)} (default: all)")
    args = ap.parse_args()
    unknown = set(args.sections) - set(SECTIONS)
    if unknown:
        ap.error(f"unknown section(s): {', '.join(sorted(unknown))}")
    for name in args.sections or SECTIONS:
        SECTIONS[name]()


if __name__ == "__main__":
    main()

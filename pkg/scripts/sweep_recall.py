"""How many reference roots does an alpha sweep recover from one start?

    python scripts/sweep_recall.py example2 --alpha-min 0.5 --alpha-max 1.5 --step 0.001
    python scripts/sweep_recall.py si50 --alpha-min -0.83718 --alpha-max 1.2
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import tables  # noqa: E402
from fracpn.core import SolverConfig  # noqa: E402
from fracpn.sweep import SweepConfig, alpha_sweep  # noqa: E402
from fracpn.systems import get_system  # noqa: E402

REFERENCE = {
    "si50": (tables.SI50_X0, tables.SI50_ROWS),
    "example2": (tables.EXAMPLE2_X0, tables.EXAMPLE2_ROWS),
    "example3": (tables.EXAMPLE3_X0, tables.EXAMPLE3_ROWS),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("system", choices=sorted(REFERENCE))
    ap.add_argument("--alpha-min", type=float, default=-2.0)
    ap.add_argument("--alpha-max", type=float, default=2.0)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--match-tol", type=float, default=1e-3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    x0, rows = REFERENCE[args.system]
    cfg = SweepConfig(args.alpha_min, args.alpha_max, args.step)
    t0 = time.perf_counter()
    records = alpha_sweep(get_system(args.system), x0, SolverConfig(alpha=0.5), cfg, args.workers)
    dt = time.perf_counter() - t0

    distinct = {}
    for i, (_, ref) in rows.items():
        key = tuple(np.round(ref, 6))
        distinct.setdefault(key, []).append(i)
    found = [
        rows_for_root for key, rows_for_root in distinct.items()
        if any(np.linalg.norm(r.root - np.array(key)) <= args.match_tol for r in records)
    ]
    print(f"{len(records)} distinct roots in {dt:.1f} s; "
          f"{len(found)}/{len(distinct)} reference roots recovered: rows {sorted(sum(found, []))}")


if __name__ == "__main__":
    main()

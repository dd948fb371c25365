"""Result tables for the CLI: aligned text, CSV and JSON lines, plus trace files."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import IterationTrace, SolveResult
from .sweep import RootRecord

__all__ = [
    "ReportRow",
    "RunReport",
    "format_complex",
    "format_complex_exact",
    "parse_complex",
    "read_trace",
    "render",
    "write_trace",
]

FORMATS = ("text", "csv", "json-lines")


@dataclass(frozen=True)
class ReportRow:
    alpha: float
    root: np.ndarray
    step_norm: float
    residual_norm: float
    iterations: int
    status: str

    @classmethod
    def from_result(cls, r: SolveResult) -> "ReportRow":
        return cls(r.alpha_used, r.root, r.step_norm, r.residual_norm, r.iterations, str(r.status))

    @classmethod
    def from_record(cls, r: RootRecord) -> "ReportRow":
        return cls(r.alpha, r.root, r.step_norm, r.residual_norm, r.iterations, "Converged")


@dataclass
class RunReport:
    rows: list[ReportRow]
    grid_size: int = 1
    converged: int = 0
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.rows = sorted(self.rows, key=lambda r: r.alpha)

    def summary(self) -> str:
        parts = [
            f"grid size {self.grid_size}",
            f"converged {self.converged}",
            f"distinct roots {len(self.rows)}",
        ]
        parts += [f"{k} {v}" for k, v in self.extra.items()]
        parts.append(f"wall time {self.wall_time:.3f} s")
        return ", ".join(parts)


def format_complex(z: complex, digits: int = 8) -> str:
    """``a + bi`` / ``a - bi`` with fixed decimals; plain ``a`` when real."""
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.{digits}f}"
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{digits}f} {sign} {abs(z.imag):.{digits}f}i"


def format_complex_exact(z: complex) -> str:
    """Lossless text form accepted by :func:`parse_complex` (``1.5-2.25j``)."""
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}j"


def parse_complex(text: str) -> complex:
    """Parse ``3``, ``-1.5+2j`` or ``-1.5 + 2i``."""
    s = text.strip().replace(" ", "").replace("i", "j")
    return complex(s)


def _norm_text(v: float) -> str:
    return f"{v:.5e}" if math.isfinite(v) else str(v)


def _render_text(report: RunReport) -> str:
    n = max((r.root.size for r in report.rows), default=1)
    header = ["alpha"] + [f"[x_n]_{k + 1}" for k in range(n)] + [
        "||x_n - x_n-1||", "||f(x_n)||", "n", "status"
    ]
    table = [header]
    for r in report.rows:
        table.append(
            [f"{r.alpha:.5f}"]
            + [format_complex(z) for z in r.root]
            + [_norm_text(r.step_norm), _norm_text(r.residual_norm), str(r.iterations), r.status]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    return "\n".join(lines) + "\n"


def _render_csv(report: RunReport) -> str:
    n = max((r.root.size for r in report.rows), default=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha"] + [f"x{k + 1}" for k in range(n)]
               + ["step_norm", "residual_norm", "iterations", "status"])
    for r in report.rows:
        w.writerow([repr(float(r.alpha))] + [format_complex_exact(z) for z in r.root]
                   + [repr(float(r.step_norm)), repr(float(r.residual_norm)), r.iterations, r.status])
    return buf.getvalue()


def _json_float(v: float):
    return v if math.isfinite(v) else None


def _render_jsonl(report: RunReport) -> str:
    lines = []
    for r in report.rows:
        lines.append(json.dumps({
            "alpha": r.alpha,
            "root": [[z.real, z.imag] for z in map(complex, r.root)],
            "step_norm": _json_float(r.step_norm),
            "residual_norm": _json_float(r.residual_norm),
            "iterations": r.iterations,
            "status": r.status,
        }))
    return "".join(line + "\n" for line in lines)


def render(report: RunReport, fmt: str = "text") -> str:
    if fmt == "text":
        return _render_text(report)
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "json-lines":
        return _render_jsonl(report)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def write_trace(path, trace: IterationTrace) -> None:
    """One JSON object per iterate: index, step norm, residual norm, iterate."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, (x, s, r) in enumerate(zip(trace.iterates, trace.step_norms, trace.residual_norms)):
            fh.write(json.dumps({
                "i": i,
                "step_norm": _json_float(s),
                "residual_norm": _json_float(r),
                "x": [[z.real, z.imag] for z in map(complex, x)],
            }) + "\n")


def read_trace(path) -> IterationTrace:
    trace = IterationTrace()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            x = np.array([complex(re, im) for re, im in d["x"]], dtype=complex)
            s = d["step_norm"]
            r = d["residual_norm"]
            trace.append(x, math.nan if s is None else s, math.nan if r is None else r)
    return trace


def rows_from_records(records: Sequence[RootRecord]) -> list[ReportRow]:
    return [ReportRow.from_record(r) for r in records]

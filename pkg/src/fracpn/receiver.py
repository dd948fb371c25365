"""Steady state of a hybrid photovoltaic / thermoelectric solar receiver.

Unknowns are ``(T_cell, T_hot, T_cold, eta_cell, eta_TEG)`` with temperatures
in degrees Celsius.  The full model has five equations; eliminating
``T_cell``, ``eta_cell`` and ``eta_TEG`` leaves two transcendental equations
in ``(T_hot, T_cold)``, from which the rest follows in closed form.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from functools import partial
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import SolverConfig, Status, solve
from .special import DomainError, as_cvector
from .sweep import SweepConfig, alpha_grid
from .systems import NonlinearSystem

log = logging.getLogger(__name__)

__all__ = [
    "MeasurementError",
    "MeasurementRow",
    "ReceiverConstants",
    "ReceiverParams",
    "ReceiverSolution",
    "back_substitute",
    "batch_solve",
    "derive_constants",
    "f_full",
    "f_reduced",
    "full_system",
    "load_params",
    "read_measurements",
    "reduced_system",
    "solve_row",
    "write_solutions",
]

KELVIN_OFFSET = 273.15

#: Solver defaults for receiver solves.
RECEIVER_EPSILON = 1e-4
RECEIVER_TOL = 1e-2

#: Order grid used when a measurement row carries no alpha.  For alpha in
#: (1, 2) the factor 1/Gamma(1 - alpha) is negative, which is the sign that
#: makes the receiver fixed point attracting.
FALLBACK_SWEEP = SweepConfig(alpha_min=1.01, alpha_max=1.99, alpha_step=0.005)


@dataclass(frozen=True)
class ReceiverParams:
    """Physical parameters; the defaults are the reference design.

    Thermal resistivities ``r_*`` are in m^2 K/W, areas in m^2, lengths in m,
    ``dni`` in W/m^2, ``t_air`` in degrees Celsius.

    ``r_sol`` is 1.6026e-6 (often quoted rounded as 1.603e-6); the unrounded
    value is what reproduces the reference solutions to eight digits.
    """

    eta_opt: float = 0.85
    c_g: float = 800.0
    dni: float = 900.0
    r_cell: float = 3e-6
    r_sol: float = 1.6026e-6
    r_cop: float = 7.5e-7
    r_cer: float = 8e-6
    r_intercon: float = 2.331e-7
    t_air: float = 20.0
    a_cell: float = 9e-6
    a_teg: float = 5.04e-5
    r_heat_exch: float = 0.5
    eta_cell_ref: float = 0.43
    f_star: float = 0.7
    gamma_cell: float = 4.6e-4
    b: float = 5e-4
    l: float = 5e-4
    zt: float = 1.0
    k_teg: float = 1.5

    def __post_init__(self) -> None:
        for name in ("a_cell", "a_teg", "b", "l", "k_teg"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.f_star <= 1.0:
            raise ValueError("f_star must lie in (0, 1]")
        if self.zt < 0:
            raise ValueError("zt must be non-negative")

    def with_measurement(self, dni: float, t_air: float) -> "ReceiverParams":
        return replace(self, dni=dni, t_air=t_air)


@dataclass(frozen=True)
class ReceiverConstants:
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float
    a9: float


def derive_constants(p: ReceiverParams) -> ReceiverConstants:
    spreading = 0.5 * math.sqrt(p.f_star * p.a_teg) * (
        p.b * math.sqrt(p.f_star) + math.sqrt(p.a_teg)
    )
    a3_denom = p.f_star * p.a_teg * p.k_teg
    if spreading <= 0 or a3_denom <= 0:
        raise DomainError("non-positive denominator in receiver constants")
    intercon = p.r_intercon / spreading
    return ReceiverConstants(
        a1=p.eta_opt * p.c_g * p.dni,
        a2=p.r_cell + p.r_sol + p.a_cell * ((p.r_cop + p.r_cer) / p.a_teg + intercon),
        a3=p.a_cell * p.l / a3_denom,
        a4=p.t_air,
        a5=p.a_cell * (intercon + p.r_cer / p.a_teg + p.r_heat_exch),
        a6=-p.eta_cell_ref * p.gamma_cell,
        a7=p.eta_cell_ref * (1.0 + 25.0 * p.gamma_cell),
        a8=math.sqrt(1.0 + p.zt),
        a9=KELVIN_OFFSET,
    )


def _nonzero(value: complex, what: str) -> complex:
    if value == 0:
        raise DomainError(f"{what} vanishes")
    return value


def f_full(x, c: ReceiverConstants) -> np.ndarray:
    """Residual of the five-equation model at ``x = (T_cell, T_hot, T_cold, eta_cell, eta_TEG)``."""
    x1, x2, x3, x4, x5 = (complex(v) for v in as_cvector(x))
    ratio = (x3 + c.a9) / _nonzero(x2 + c.a9, "T_hot + 273.15")
    teg = (c.a8 - 1.0) * (1.0 - ratio) / _nonzero(c.a8 + ratio, "Carnot denominator")
    return np.array([
        x1 - x2 - c.a1 * c.a2 * (1.0 - x4),
        x2 - x3 - c.a1 * c.a3 * (1.0 - x4) * (1.0 - x5),
        x3 - c.a4 - c.a1 * c.a5 * (1.0 - x4) * (1.0 - x5),
        x4 - c.a6 * x1 - c.a7,
        x5 - teg,
    ], dtype=complex)


def _reduced_factor(x2: complex, x3: complex, c: ReceiverConstants) -> complex:
    den = _nonzero(1.0 + c.a1 * c.a2 * c.a6, "1 + a1 a2 a6") * _nonzero(
        c.a8 * (x2 + c.a9) + (x3 + c.a9), "a8 (T_hot + a9) + (T_cold + a9)"
    )
    return (c.a6 * x2 + c.a7 - 1.0) * (c.a8 * (x3 + c.a9) + (x2 + c.a9)) / den


def f_reduced(x, c: ReceiverConstants) -> np.ndarray:
    """Residual of the two-equation model at ``x = (T_hot, T_cold)``."""
    x2, x3 = (complex(v) for v in as_cvector(x))
    q = _reduced_factor(x2, x3, c)
    return np.array([
        x2 - x3 + c.a1 * c.a3 * q,
        x3 - c.a4 + c.a1 * c.a5 * q,
    ], dtype=complex)


def back_substitute(x2: complex, x3: complex, c: ReceiverConstants) -> tuple[complex, complex, complex]:
    """Recover ``(T_cell, eta_cell, eta_TEG)`` from ``(T_hot, T_cold)``."""
    a12 = c.a1 * c.a2
    den = _nonzero(1.0 + a12 * c.a6, "1 + a1 a2 a6")
    carnot = _nonzero(c.a8 * (x2 + c.a9) + (x3 + c.a9), "a8 (T_hot + a9) + (T_cold + a9)")
    x1 = (x2 - a12 * (c.a7 - 1.0)) / den
    x4 = (c.a6 * (a12 + x2) + c.a7) / den
    x5 = (c.a8 - 1.0) * (x2 - x3) / carnot
    return x1, x4, x5


# The solver runs on g(x) - x, i.e. the negated residual.  Zeros and norms
# are unchanged, but with 1/Gamma(1 - alpha) < 0 (alpha in (1, 2)) only this
# orientation makes the physical fixed point attracting.
def _neg_full(x: np.ndarray, c: ReceiverConstants) -> np.ndarray:
    return -f_full(x, c)


def _neg_reduced(x: np.ndarray, c: ReceiverConstants) -> np.ndarray:
    return -f_reduced(x, c)


def full_system(c: ReceiverConstants) -> NonlinearSystem:
    """Five-variable receiver system in fixed-point orientation ``g(x) - x``."""
    return NonlinearSystem("receiver1", 5, partial(_neg_full, c=c))


def reduced_system(c: ReceiverConstants) -> NonlinearSystem:
    """Two-variable ``(T_hot, T_cold)`` system in fixed-point orientation ``g(x) - x``."""
    return NonlinearSystem("receiver2", 2, partial(_neg_reduced, c=c))


# --- batch pipeline -------------------------------------------------------

class MeasurementError(ValueError):
    """Malformed measurement input; the message names the offending line."""


@dataclass(frozen=True)
class MeasurementRow:
    dni: float
    t_air: float
    x0_2: float
    x0_3: float
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.dni < 0:
            raise ValueError(f"dni must be non-negative, got {self.dni}")


@dataclass(frozen=True)
class ReceiverSolution:
    dni: float
    t_air: float
    alpha: float | None
    t_cell: float | None
    t_hot: float | None
    t_cold: float | None
    eta_cell: float | None
    eta_teg: float | None
    step_norm: float
    residual_norm: float
    iterations: int
    status: Status


def solve_row(
    row: MeasurementRow,
    params: ReceiverParams = ReceiverParams(),
    template: SolverConfig | None = None,
    fallback: SweepConfig = FALLBACK_SWEEP,
) -> ReceiverSolution:
    """Solve the reduced model for one measurement and back-substitute.

    Without a row alpha, the fallback grid is walked upwards and the first
    converging alpha is kept.
    """
    c = derive_constants(params.with_measurement(row.dni, row.t_air))
    system = reduced_system(c)
    x0 = [row.x0_2, row.x0_3]
    if template is None:
        template = SolverConfig(alpha=1.5, epsilon=RECEIVER_EPSILON, tol=RECEIVER_TOL)

    if row.alpha is not None:
        result = solve(system, x0, template.with_alpha(row.alpha))
    else:
        result = None
        for a in alpha_grid(fallback):
            result = solve(system, x0, template.with_alpha(a))
            if result.converged:
                break
        if result is None:
            raise ValueError("fallback alpha grid is empty")

    common = dict(
        dni=row.dni, t_air=row.t_air, alpha=result.alpha_used,
        step_norm=result.step_norm, residual_norm=result.residual_norm,
        iterations=result.iterations,
    )
    x2, x3 = result.root
    if not result.converged:
        return ReceiverSolution(t_cell=None, t_hot=None, t_cold=None, eta_cell=None,
                                eta_teg=None, status=result.status, **common)
    if max(abs(x2.imag), abs(x3.imag)) > 10.0 ** (-template.round_digits):
        return ReceiverSolution(t_cell=None, t_hot=None, t_cold=None, eta_cell=None,
                                eta_teg=None, status=Status.NON_PHYSICAL, **common)
    t_hot, t_cold = float(x2.real), float(x3.real)
    x1, x4, x5 = back_substitute(t_hot, t_cold, c)
    return ReceiverSolution(
        t_cell=x1.real, t_hot=t_hot, t_cold=t_cold, eta_cell=x4.real,
        eta_teg=x5.real, status=Status.CONVERGED, **common,
    )


def batch_solve(
    rows: Sequence[MeasurementRow],
    params: ReceiverParams = ReceiverParams(),
    template: SolverConfig | None = None,
    workers: int = 1,
    fallback: SweepConfig = FALLBACK_SWEEP,
) -> list[ReceiverSolution]:
    """Solve every measurement row; output order always matches ``rows``."""
    if not rows:
        raise ValueError("no measurement rows")
    job = partial(solve_row, params=params, template=template, fallback=fallback)
    if workers > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(job, rows))
    else:
        out = [job(r) for r in rows]
    for i, sol in enumerate(out, start=1):
        log.info("row %d: %s after %d iterations", i, sol.status, sol.iterations)
    return out


_REQUIRED = ("dni", "t_air", "x0_2", "x0_3")
OUTPUT_COLUMNS = (
    "dni", "t_air", "alpha", "t_cell", "t_hot", "t_cold", "eta_cell", "eta_teg",
    "step_norm", "residual_norm", "iterations", "status",
)


def read_measurements(path: str | Path) -> list[MeasurementRow]:
    """Parse a measurement CSV with header ``dni,t_air,x0_2,x0_3[,alpha]``.

    Raises
    ------
    MeasurementError
        On a missing header column, an unparseable or negative value (the
        message carries the file line number), or when there are no data rows.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [col for col in _REQUIRED if col not in header]
        if missing:
            raise MeasurementError(f"line 1: missing column(s) {', '.join(missing)}")
        reader.fieldnames = header
        for rec in reader:
            line = reader.line_num
            if not any((v or "").strip() for v in rec.values() if isinstance(v, str)):
                continue
            values = {}
            for col in _REQUIRED + ("alpha",):
                raw = (rec.get(col) or "").strip()
                if col == "alpha" and raw == "":
                    values[col] = None
                    continue
                try:
                    values[col] = float(raw)
                except ValueError:
                    raise MeasurementError(
                        f"line {line}: cannot parse {col}={raw!r}"
                    ) from None
                if not math.isfinite(values[col]):
                    raise MeasurementError(f"line {line}: {col} is not finite")
            try:
                rows.append(MeasurementRow(**values))
            except ValueError as err:
                raise MeasurementError(f"line {line}: {err}") from None
    if not rows:
        raise MeasurementError("no data rows")
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Status):
        return v.value
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_solutions(path_or_file, solutions: Iterable[ReceiverSolution]) -> None:
    """Write solutions as CSV with full float precision; missing values are blank."""
    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OUTPUT_COLUMNS)
        for s in solutions:
            d = asdict(s)
            w.writerow([_cell(d[col]) for col in OUTPUT_COLUMNS])

    if hasattr(path_or_file, "write"):
        dump(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            dump(fh)


def load_params(path: str | Path, base: ReceiverParams = ReceiverParams()) -> ReceiverParams:
    """Override ``base`` with ``name=value`` lines from a text file.

    Names are the :class:`ReceiverParams` fields, matched case-insensitively
    (``eta_opt=0.85``, ``C_g=800``).  Blank lines and ``#`` comments are skipped.
    """
    names = {f.name for f in fields(ReceiverParams)}
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or key not in names:
            raise ValueError(f"{path}:{lineno}: expected '<parameter>=<value>', got {raw!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from None
    return replace(base, **overrides)

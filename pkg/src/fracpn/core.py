"""Fractional pseudo-Newton iteration.

One step maps ``x`` to ``x - P(x) f(x)`` where ``P`` is diagonal, with
entries equal to the Riemann-Liouville derivative of order ``beta`` of the
constant ``1`` taken at ``[x]_k`` plus a small regularizer ``epsilon``.
Because that derivative is ``x**-beta / Gamma(1 - beta)``, no derivative of
``f`` is ever needed.  After every step, imaginary parts at or below
``10**-m`` are dropped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .special import DomainError, as_cvector, complex_pow, gamma_real, norm2

__all__ = [
    "IterationTrace",
    "NumericalFailure",
    "SolveResult",
    "SolverConfig",
    "Status",
    "beta_select",
    "frac_deriv_const",
    "monomial_derivative",
    "p_diagonal",
    "p_matrix",
    "phi_step",
    "rnd",
    "solve",
]


class NumericalFailure(ArithmeticError):
    """An iterate or residual stopped being a finite complex number."""


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"
    NUMERICAL_FAILURE = "NumericalFailure"
    #: Only produced by the receiver pipeline: converged, but not real.
    NON_PHYSICAL = "NonPhysical"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one fractional pseudo-Newton solve.

    ``alpha`` must lie in ``[-2, 2]`` and stay at least 0.01 away from every
    integer; ``round_digits`` is the ``m`` of the rounding operator.
    """

    alpha: float
    epsilon: float = 1e-3
    tol: float = 1e-6
    max_iter: int = 5000
    round_digits: int = 5
    diverge_bound: float = 1e8

    def __post_init__(self) -> None:
        if not -2.0 <= self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in [-2, 2], got {self.alpha}")
        if abs(self.alpha - round(self.alpha)) < 0.01:
            raise ValueError(f"alpha={self.alpha} is too close to an integer")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")
        if self.round_digits < 1:
            raise ValueError(f"round_digits must be positive, got {self.round_digits}")
        if not self.diverge_bound > 0.0:
            raise ValueError(f"diverge_bound must be positive, got {self.diverge_bound}")

    def with_alpha(self, alpha: float) -> "SolverConfig":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class SolveResult:
    root: np.ndarray
    step_norm: float
    residual_norm: float
    iterations: int
    status: Status
    alpha_used: float

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


@dataclass
class IterationTrace:
    """Iterates with their step and residual norms.

    Entry 0 is the starting point, whose step norm is ``nan``.
    """

    iterates: list[np.ndarray] = field(default_factory=list)
    step_norms: list[float] = field(default_factory=list)
    residual_norms: list[float] = field(default_factory=list)

    def append(self, x: np.ndarray, step_norm: float, residual_norm: float) -> None:
        self.iterates.append(x)
        self.step_norms.append(step_norm)
        self.residual_norms.append(residual_norm)

    def __len__(self) -> int:
        return len(self.iterates)


def beta_select(alpha: float, xk: complex) -> float:
    """Order actually used for component ``xk``: ``alpha``, or 1 at exactly 0."""
    return 1.0 if xk == 0 else alpha


def monomial_derivative(mu: float, order: float) -> tuple[float, float]:
    """Riemann-Liouville derivative (base point 0) of ``x**mu``.

    Returns ``(coefficient, exponent)`` such that the derivative of the given
    ``order`` equals ``coefficient * x**exponent``; negative orders are
    fractional integrals.  The coefficient is
    ``Gamma(mu + 1) / Gamma(mu - order + 1)`` and is exactly 0 when the
    denominator sits on a pole (e.g. the classical derivative of a constant).
    """
    denom_arg = mu - order + 1.0
    if denom_arg <= 0 and denom_arg == round(denom_arg):
        return 0.0, mu - order
    return gamma_real(mu + 1.0) / gamma_real(denom_arg), mu - order


def frac_deriv_const(x: complex, beta: float) -> complex:
    """Derivative of order ``beta`` of the constant 1, evaluated at ``x``.

    Equals ``x**-beta / Gamma(1 - beta)`` on the principal branch and 0 for
    ``beta == 1``.  ``x == 0`` with ``beta != 1`` raises ``DomainError``;
    route zero components through :func:`beta_select` first.
    """
    coef, exponent = monomial_derivative(0.0, beta)
    if coef == 0.0:
        return 0j
    if x == 0:
        raise DomainError("the fractional derivative of a constant is singular at 0")
    return coef * complex_pow(x, exponent)


def p_diagonal(x: np.ndarray, alpha: float, epsilon: float) -> np.ndarray:
    """Diagonal of :func:`p_matrix` as a vector."""
    return np.array(
        [frac_deriv_const(xk, beta_select(alpha, xk)) + epsilon for xk in x],
        dtype=complex,
    )


def p_matrix(x: Sequence[complex], alpha: float, epsilon: float) -> np.ndarray:
    """Diagonal ``n x n`` matrix of fractional derivatives of constants plus ``epsilon``.

    Off-diagonal entries are the derivative of the constant 0 and are exactly 0.
    """
    return np.diag(p_diagonal(as_cvector(x), alpha, epsilon))


def phi_step(
    f: Callable[[np.ndarray], np.ndarray],
    x: Sequence[complex],
    alpha: float,
    epsilon: float,
) -> np.ndarray:
    """One fractional pseudo-Newton step ``x - P(x) f(x)`` (before rounding)."""
    x = as_cvector(x)
    fx = np.asarray(f(x), dtype=complex)
    if fx.shape != x.shape:
        raise ValueError(f"system returned shape {fx.shape} for input of shape {x.shape}")
    with np.errstate(invalid="ignore", over="ignore"):
        out = x - p_diagonal(x, alpha, epsilon) * fx
    if not np.all(np.isfinite(out)):
        raise NumericalFailure(f"non-finite iterate {out}")
    return out


def rnd(v: Sequence[complex], m: int) -> np.ndarray:
    """Drop imaginary parts whose magnitude is at most ``10**-m``."""
    v = as_cvector(v)
    small = np.abs(v.imag) <= 10.0 ** (-m)
    return np.where(small, v.real + 0j, v)


# Failures raised by system evaluations or the step itself that end a solve
# with NumericalFailure instead of propagating.
_EVAL_ERRORS = (ArithmeticError, ValueError)


def solve(
    f: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[complex],
    config: SolverConfig,
    trace: IterationTrace | None = None,
) -> SolveResult:
    """Iterate ``x <- rnd(phi_step(f, x), m)`` from ``x0``.

    Stops with ``Converged`` once both the step norm and the residual norm
    are at most ``config.tol``, ``Diverged`` when the iterate norm exceeds
    ``config.diverge_bound``, ``MaxIterations`` after ``config.max_iter``
    steps, and ``NumericalFailure`` when something non-finite (or a domain
    error in ``f``) shows up.  Norms are measured after rounding.

    If ``trace`` is given, every iterate is appended to it.
    """
    x = as_cvector(x0)
    dim = getattr(f, "dimension", None)
    if dim is not None and dim != x.size:
        raise ValueError(f"system has dimension {dim} but x0 has {x.size} entries")
    alpha, eps, tol = config.alpha, config.epsilon, config.tol

    def finish(status: Status, step: float, res: float, it: int) -> SolveResult:
        return SolveResult(x, step, res, it, status, alpha)

    # overflow inside f is reported through the status, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            res = norm2(f(x))
        except _EVAL_ERRORS:
            return finish(Status.NUMERICAL_FAILURE, math.nan, math.nan, 0)
        if trace is not None:
            trace.append(x, math.nan, res)
        if not math.isfinite(res):
            return finish(Status.NUMERICAL_FAILURE, math.nan, res, 0)

        step = math.nan
        for it in range(1, config.max_iter + 1):
            try:
                x_new = rnd(phi_step(f, x, alpha, eps), config.round_digits)
                step = norm2(x_new - x)
                x = x_new
                res = norm2(f(x))
            except _EVAL_ERRORS:
                return finish(Status.NUMERICAL_FAILURE, step, math.nan, it)
            if trace is not None:
                trace.append(x, step, res)
            if not (math.isfinite(step) and math.isfinite(res)):
                return finish(Status.NUMERICAL_FAILURE, step, res, it)
            if step <= tol and res <= tol:
                return finish(Status.CONVERGED, step, res, it)
            if norm2(x) > config.diverge_bound:
                return finish(Status.DIVERGED, step, res, it)
        return finish(Status.MAX_ITERATIONS, step, res, config.max_iter)

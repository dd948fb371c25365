"""Real gamma function, principal complex powers and complex vector norms.

Vectors of complex numbers (``CVector``) are plain one-dimensional
``complex128`` NumPy arrays throughout the package.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable

import numpy as np

__all__ = [
    "DomainError",
    "PoleError",
    "POLE_GUARD",
    "as_cvector",
    "complex_pow",
    "gamma_real",
    "norm2",
]

#: Distance from a non-positive integer below which the gamma function is
#: treated as singular.
POLE_GUARD = 1e-8

# Lanczos approximation with g = 7 and nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """Argument outside the domain of a function (zero denominators, 0**-w)."""


class PoleError(DomainError):
    """Gamma function evaluated at (or too close to) one of its poles."""


def gamma_real(x: float) -> float:
    """Gamma function of a real argument.

    Uses the Lanczos approximation for ``x >= 0.5`` and the reflection
    formula ``Gamma(x) Gamma(1 - x) = pi / sin(pi x)`` below that, so
    negative non-integer arguments are supported.

    Raises
    ------
    PoleError
        If ``x`` lies within :data:`POLE_GUARD` of ``0, -1, -2, ...``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_real needs a finite argument, got {x!r}")
    nearest = round(x)
    if nearest <= 0 and abs(x - nearest) < POLE_GUARD:
        raise PoleError(f"gamma_real({x!r}) is at a pole (near {nearest})")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))
    if x > 171.6:
        return math.inf

    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so that t**(z + 0.5) does not overflow before exp(-t)
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def complex_pow(z: complex, w: float) -> complex:
    """Principal-branch power ``exp(w * Log z)`` with ``arg z`` in ``(-pi, pi]``.

    A negative zero imaginary part is treated as ``+0`` so that the negative
    real axis always maps to ``arg = pi``.
    """
    z = complex(z)
    if z == 0:
        if w > 0:
            return 0j
        raise DomainError(f"0 cannot be raised to the non-positive power {w!r}")
    # adding 0.0 turns -0.0 into +0.0
    z = complex(z.real, z.imag + 0.0)
    return cmath.exp(w * cmath.log(z))


def norm2(v: Iterable[complex]) -> float:
    """Euclidean norm of a complex vector, ``sqrt(sum |v_k|**2)``.

    Computed with scaling so that very large iterates give ``inf`` only when
    the norm really overflows.
    """
    moduli = np.abs(np.asarray(v, dtype=complex).ravel())
    if moduli.size == 0:
        return 0.0
    return math.hypot(*moduli.tolist())


def as_cvector(values) -> np.ndarray:
    """Copy ``values`` into a fresh one-dimensional ``complex128`` array."""
    if np.isscalar(values):
        values = [values]
    arr = np.array(values, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    return arr

"""Benchmark nonlinear systems and the name registry used by the CLI.

Evaluation maps are module-level functions bound with ``functools.partial``
so that systems pickle cleanly into worker processes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np

from .special import as_cvector

__all__ = [
    "NonlinearSystem",
    "SystemEntry",
    "available_systems",
    "get_system",
    "make_example2",
    "make_example3",
    "make_sine_integral_tail",
    "system_entry",
]

_INV_4PI = 1.0 / (4.0 * math.pi)


@dataclass(frozen=True)
class NonlinearSystem:
    """A map ``C^n -> C^n`` whose zeros are sought."""

    name: str
    dimension: int
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    def __call__(self, x) -> np.ndarray:
        x = as_cvector(x)
        if x.size != self.dimension:
            raise ValueError(
                f"{self.name} expects {self.dimension} components, got {x.size}"
            )
        out = np.asarray(self.func(x), dtype=complex)
        if out.shape != (self.dimension,):
            raise ValueError(f"{self.name} returned shape {out.shape}")
        return out


def _sine_integral_tail(x: np.ndarray, k: int) -> list[complex]:
    z = complex(x[0])
    z2 = z * z
    term = z  # (-1)^m z^(2m+1) / (2m+1)!
    total = 0j
    for m in range(k + 1):
        total += term / (2 * m + 1)
        term = -term * z2 / ((2 * m + 2) * (2 * m + 3))
    return [math.pi / 2 - total]


def make_sine_integral_tail(k: int = 50) -> NonlinearSystem:
    """``pi/2`` minus the degree ``2k+1`` Taylor polynomial of ``Si(x)``.

    As ``k`` grows this tends to ``int_x^inf sin(t)/t dt``.  Terms come from
    the ratio recurrence, since ``(2m+1)!`` overflows for ``k`` around 85.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    return NonlinearSystem(f"si{k}", 1, partial(_sine_integral_tail, k=k))


def _example2(x: np.ndarray) -> list[complex]:
    x1, x2 = complex(x[0]), complex(x[1])
    e = math.e
    return [
        0.5 * x1 * (cmath.sin(x1 * x2) - 1.0) - x2 * _INV_4PI,
        (1.0 - _INV_4PI) * (cmath.exp(2.0 * x1) - e) + e * (x2 / math.pi - 2.0 * x1),
    ]


def make_example2() -> NonlinearSystem:
    return NonlinearSystem("example2", 2, _example2)


def _example3(x: np.ndarray) -> list[complex]:
    x1, x2, x3 = complex(x[0]), complex(x[1]), complex(x[2])
    return [
        -3.6 * x2 * (cmath.cos(x2 * x2) + x1**3 * x3) - 3.6 * x3 + 10.8,
        -1.6 * x1 * (x1 + x2**3 * x3) - 1.6 * cmath.sinh(x3) + 6.4,
        -4.6 * x2 * (x1 * x3**3 + 1.0) - 4.6 * cmath.cosh(x1) + 27.6,
    ]


def make_example3() -> NonlinearSystem:
    return NonlinearSystem("example3", 3, _example3)


@dataclass(frozen=True)
class SystemEntry:
    """Registry record: how to build a system and the solver defaults it ships with."""

    name: str
    dimension: int
    description: str
    build: Callable[..., NonlinearSystem] = field(repr=False)
    epsilon: float = 1e-3
    tol: float = 1e-6
    needs_params: bool = False


def _receiver(kind: str, params=None) -> NonlinearSystem:
    from . import receiver

    c = receiver.derive_constants(params or receiver.ReceiverParams())
    return receiver.full_system(c) if kind == "full" else receiver.reduced_system(c)


_REGISTRY = {
    e.name: e
    for e in (
        SystemEntry("si50", 1, "pi/2 minus the k=50 sine-integral series",
                    partial(make_sine_integral_tail, 50)),
        SystemEntry("example2", 2, "two-variable sin/exp system",
                    make_example2),
        SystemEntry("example3", 3, "three-variable cos/sinh/cosh system",
                    make_example3),
        SystemEntry("receiver1", 5, "hybrid PV-TEG receiver, full 5-equation model",
                    partial(_receiver, "full"), epsilon=1e-4, tol=1e-2,
                    needs_params=True),
        SystemEntry("receiver2", 2, "hybrid PV-TEG receiver, reduced (T_hot, T_cold) model",
                    partial(_receiver, "reduced"), epsilon=1e-4, tol=1e-2,
                    needs_params=True),
    )
}


def available_systems() -> list[SystemEntry]:
    return list(_REGISTRY.values())


def get_system(name: str, params=None) -> NonlinearSystem:
    """Build a registered system by name; ``params`` only affects receiver systems."""
    try:
        entry = _REGISTRY[name]
    except KeyError:
        known = ", ".join(_REGISTRY)
        raise KeyError(f"unknown system {name!r} (known: {known})") from None
    return entry.build(params) if entry.needs_params else entry.build()


def system_entry(name: str) -> SystemEntry:
    if name not in _REGISTRY:
        raise KeyError(f"unknown system {name!r}")
    return _REGISTRY[name]

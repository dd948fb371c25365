"""Fractional pseudo-Newton root finding for nonlinear systems over complex vectors."""

from .core import (
    IterationTrace,
    NumericalFailure,
    SolveResult,
    SolverConfig,
    Status,
    beta_select,
    frac_deriv_const,
    monomial_derivative,
    p_matrix,
    phi_step,
    rnd,
    solve,
)
from .special import DomainError, PoleError, complex_pow, gamma_real, norm2
from .sweep import (
    InsufficientData,
    RootRecord,
    SweepConfig,
    alpha_sweep,
    dedup_roots,
    estimate_order,
)
from .systems import (
    NonlinearSystem,
    get_system,
    make_example2,
    make_example3,
    make_sine_integral_tail,
)

__version__ = "0.1.0"

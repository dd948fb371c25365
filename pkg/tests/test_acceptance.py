"""Acceptance criteria 1-9, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line to the terminal
(outside pytest's capture) before asserting.
"""

import functools
import math
import time

import mpmath
import numpy as np
import pytest

from fracpn.core import (
    IterationTrace,
    SolverConfig,
    frac_deriv_const,
    monomial_derivative,
    p_matrix,
    phi_step,
    rnd,
    solve,
)
from fracpn.receiver import (
    MeasurementRow,
    ReceiverParams,
    back_substitute,
    batch_solve,
    derive_constants,
    full_system,
    reduced_system,
)
from fracpn.special import gamma_real
from fracpn.sweep import RootRecord, dedup_roots, estimate_order
from fracpn.systems import make_example2, make_example3, make_sine_integral_tail
from tables import (
    BACK_SUBSTITUTED,
    EXAMPLE2_CONJ_PAIRS,
    EXAMPLE2_ROWS,
    EXAMPLE2_X0,
    EXAMPLE3_CONJ_PAIRS,
    EXAMPLE3_ROWS,
    EXAMPLE3_X0,
    FULL_ALPHA,
    FULL_ROOT,
    FULL_X0,
    MEASUREMENTS,
    REDUCED_ALPHA,
    REDUCED_ROOT,
    REDUCED_X0,
    SI50_ROWS,
    SI50_X0,
)

RECEIVER_CFG = dict(epsilon=1e-4, tol=1e-2)
BENCH_CFG = dict(epsilon=1e-3, tol=1e-6)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def _max_err(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# Each run_* helper is cached so criterion 6 can reuse the roots accepted by
# criteria 1-5 regardless of test order.  An accepted root is recorded as
# (system, root, alpha, epsilon, tol).

@functools.cache
def run_full():
    c = derive_constants(ReceiverParams())
    system = full_system(c)
    t0 = time.perf_counter()
    r = solve(system, FULL_X0, SolverConfig(alpha=FULL_ALPHA, **RECEIVER_CFG))
    elapsed = time.perf_counter() - t0
    err = _max_err(r.root, FULL_ROOT)
    ok = r.converged and err <= 1e-3 and r.residual_norm <= 1e-2 and elapsed < 1.0
    accepted = [(system, r.root, FULL_ALPHA, *RECEIVER_CFG.values())] if ok else []
    detail = (f"status={r.status}, max|dx|={err:.2e}, residual={r.residual_norm:.5e}, "
              f"time={elapsed:.3f}s")
    return ok, detail, accepted


@functools.cache
def run_reduced():
    c = derive_constants(ReceiverParams())
    system = reduced_system(c)
    t0 = time.perf_counter()
    r = solve(system, REDUCED_X0, SolverConfig(alpha=REDUCED_ALPHA, **RECEIVER_CFG))
    x1, x4, x5 = back_substitute(r.root[0], r.root[1], c)
    elapsed = time.perf_counter() - t0
    err = _max_err(r.root, REDUCED_ROOT)
    bs_err = _max_err([x1, x4, x5], BACK_SUBSTITUTED)
    ok = r.converged and err <= 1e-3 and bs_err <= 1e-4 and elapsed < 1.0
    accepted = [(system, r.root, REDUCED_ALPHA, *RECEIVER_CFG.values())] if ok else []
    detail = (f"status={r.status}, max|dx|={err:.2e}, back-substitution max|dx|={bs_err:.2e}, "
              f"time={elapsed:.3f}s")
    return ok, detail, accepted


@functools.cache
def run_batch():
    rows = [MeasurementRow(*m[:5]) for m in MEASUREMENTS]
    t0 = time.perf_counter()
    sols = batch_solve(rows)
    elapsed = time.perf_counter() - t0
    converged = sum(s.status == "Converged" for s in sols)
    worst = max(
        max(abs(s.t_hot - m[5]), abs(s.t_cold - m[6])) if s.t_hot is not None else math.inf
        for s, m in zip(sols, MEASUREMENTS)
    )
    ok = converged == len(rows) and worst <= 1e-3 and elapsed < 30.0
    accepted = []
    if ok:
        params = ReceiverParams()
        for row, s in zip(rows, sols):
            system = reduced_system(derive_constants(params.with_measurement(row.dni, row.t_air)))
            accepted.append((system, np.array([s.t_hot, s.t_cold], dtype=complex), row.alpha,
                             *RECEIVER_CFG.values()))
    detail = f"{converged}/{len(rows)} converged, worst |dx|={worst:.2e}, time={elapsed:.2f}s"
    return ok, detail, accepted


@functools.cache
def run_si50():
    system = make_sine_integral_tail(50)
    parts, ok, accepted = [], True, []
    for i in (1, 4, 5, 13):
        alpha, ref = SI50_ROWS[i]
        r = solve(system, SI50_X0, SolverConfig(alpha=alpha, **BENCH_CFG))
        err = _max_err(r.root, ref)
        row_ok = r.converged and err <= 1e-4 and r.residual_norm <= 1e-6
        ok &= row_ok
        parts.append(f"row {i} |dx|={err:.1e}")
        if row_ok:
            accepted.append((system, r.root, alpha, *BENCH_CFG.values()))
    return ok, ", ".join(parts), accepted


def _reproduced_rows(system, x0, rows, accepted):
    good = []
    for i, (alpha, ref) in rows.items():
        r = solve(system, x0, SolverConfig(alpha=alpha, **BENCH_CFG))
        if r.converged and _max_err(r.root, ref) <= 1e-4 and r.residual_norm <= 1e-6:
            good.append(i)
            accepted.append((system, r.root, alpha, *BENCH_CFG.values()))
    return good


@functools.cache
def run_multivariate():
    accepted = []
    good2 = _reproduced_rows(make_example2(), EXAMPLE2_X0, EXAMPLE2_ROWS, accepted)
    good3 = _reproduced_rows(make_example3(), EXAMPLE3_X0, EXAMPLE3_ROWS, accepted)
    pair2 = [p for p in EXAMPLE2_CONJ_PAIRS if set(p) <= set(good2)]
    pair3 = [p for p in EXAMPLE3_CONJ_PAIRS if set(p) <= set(good3)]
    ok = len(good2) >= 4 and len(good3) >= 4 and bool(pair2 or pair3)
    detail = (f"two-variable {len(good2)}/{len(EXAMPLE2_ROWS)}, "
              f"three-variable {len(good3)}/{len(EXAMPLE3_ROWS)}, "
              f"conjugate pairs {pair2 + pair3}")
    return ok, detail, accepted


def test_criterion_1_full_receiver(verdict):
    ok, detail, _ = run_full()
    verdict(1, ok, detail)


def test_criterion_2_reduced_receiver(verdict):
    ok, detail, _ = run_reduced()
    verdict(2, ok, detail)


def test_criterion_3_measurement_batch(verdict):
    ok, detail, _ = run_batch()
    verdict(3, ok, detail)


def test_criterion_4_si50_rows(verdict):
    ok, detail, _ = run_si50()
    verdict(4, ok, detail)


def test_criterion_5_multivariate_rows(verdict):
    ok, detail, _ = run_multivariate()
    verdict(5, ok, detail)


def test_criterion_6_fixed_point_invariance(verdict):
    runs = (run_full, run_reduced, run_batch, run_si50, run_multivariate)
    accepted = [a for run in runs for a in run()[2]]
    worst = 0.0
    for system, root, alpha, eps, tol in accepted:
        moved = float(np.linalg.norm(phi_step(system, root, alpha, eps) - root))
        worst = max(worst, moved / tol)
    ok = bool(accepted) and worst <= 10.0
    verdict(6, ok, f"{len(accepted)} accepted roots, worst move = {worst:.3f} tol")


# --- 7 ---------------------------------------------------------------------

def test_criterion_7_fractional_calculus(verdict):
    xs = np.linspace(-1.995, 5.0, 1000)
    xs = [x + 2e-3 if x < 0.5 and abs(x - round(x)) < 1e-3 else float(x) for x in xs]
    gamma_err = max(abs(gamma_real(x) - float(mpmath.gamma(x))) / abs(float(mpmath.gamma(x)))
                    for x in xs)

    orders = np.linspace(-0.95, -0.05, 19)
    semi_err = 0.0
    for mu in (0.0, 1.0, 2.0):
        for a in orders:
            for b in orders:
                c1, e1 = monomial_derivative(mu, a)
                c2, e2 = monomial_derivative(e1, b)
                c12, e12 = monomial_derivative(mu, a + b)
                for x in (0.5, 1.0, 2.0):
                    lhs, rhs = c1 * c2 * x**e2, c12 * x**e12
                    semi_err = max(semi_err, abs(lhs - rhs) / abs(rhs))

    cont = 0.0
    for r in np.linspace(0.5, 10.0, 40):
        for theta in np.linspace(-math.pi, math.pi, 25):
            x = r * complex(math.cos(theta), math.sin(theta))
            for beta in (1 - 1e-4, 1 + 1e-4):
                cont = max(cont, abs(frac_deriv_const(x, beta)))

    ok = len(xs) == 1000 and gamma_err <= 1e-10 and semi_err <= 1e-12 and cont <= 1e-3
    verdict(7, ok, f"gamma rel err {gamma_err:.1e}, semigroup rel err {semi_err:.1e}, "
                   f"max |D^(1+-1e-4) 1| {cont:.1e}")


# --- 8 ---------------------------------------------------------------------

def test_criterion_8_structure(verdict):
    rng = np.random.default_rng(20261018)
    diag_ok = True
    for _ in range(200):
        n = int(rng.integers(1, 7))
        x = rng.normal(size=n) * 5 + 1j * rng.normal(size=n) * 5
        x[rng.random(n) < 0.2] = 0
        alpha = float(rng.choice([-1.7, -0.6, 0.3, 0.77, 1.5]))
        P = p_matrix(x, alpha, 1e-3)
        diag_ok &= bool(np.all(P[~np.eye(n, dtype=bool)] == 0))

    rnd_ok = True
    for _ in range(200):
        v = rng.normal(size=4) + 1j * rng.normal(size=4) * 10.0 ** rng.integers(-9, 1, size=4)
        once = rnd(v, 5)
        rnd_ok &= bool(np.array_equal(rnd(once, 5), once))

    dedup_ok = True
    for _ in range(50):
        pts = rng.normal(size=30) * 0.01 + 1j * rng.normal(size=30) * 0.01
        recs = [RootRecord(np.array([z]), i * 0.01, float(rng.random()) * 1e-7, 1)
                for i, z in enumerate(pts)]
        out = dedup_roots(recs, 5e-3)
        dedup_ok &= all(abs(a.root[0] - b.root[0]) > 5e-3
                        for i, a in enumerate(out) for b in out[i + 1:])

    rows = [MeasurementRow(*m[:5]) for m in MEASUREMENTS]
    order = list(rng.permutation(len(rows)))
    shuffled = [rows[i] for i in order]
    order_ok = True
    for workers in (1, 2, 4):
        out = batch_solve(shuffled, workers=workers)
        order_ok &= [s.dni for s in out] == [r.dni for r in shuffled]

    ok = diag_ok and rnd_ok and dedup_ok and order_ok
    verdict(8, ok, f"diagonal={diag_ok}, rnd idempotent={rnd_ok}, dedup separated={dedup_ok}, "
                   f"batch order={order_ok}")


# --- 9 ---------------------------------------------------------------------

def test_criterion_9_convergence_order(verdict):
    trace = IterationTrace()
    system = reduced_system(derive_constants(ReceiverParams()))
    r = solve(system, REDUCED_X0, SolverConfig(alpha=REDUCED_ALPHA, **RECEIVER_CFG), trace)
    p = estimate_order(trace)
    ok = r.converged and 0.8 <= p <= 1.2
    verdict(9, ok, f"estimated order {p:.4f} from {len(trace)} iterates")

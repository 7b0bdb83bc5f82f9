"""The twelve acceptance criteria at their stated tolerances.

Each test records one or more parts through the ``criterion`` fixture; the
summary at the end of the run prints one pass/fail line per criterion.
Claims that are false as stated are kept as strict xfails next to a
passing check of the corrected value.
"""
import math
import warnings
from fractions import Fraction as F

import numpy as np
import pytest

from expbern import (
    EigenSystem,
    build_basis,
    build_basis_linsolve,
    build_basis_recursive,
    build_operator,
    check_basis,
    convergence_diag,
    d_coeffs,
    derivative_formula_residual,
    eval_exppoly,
    even_ratio,
    genfun,
    p_poly_exact,
    phi,
    phi_taylor,
    recursion_s5,
    verify_shape,
    zero_set_scan,
)
from expbern.bernbasis import basis_discrepancy, classical_basis_function, zero_set_scan_detailed
from expbern.bernop import reproduction_residual, weight_recursion_residual
from expbern.expspace import coeff_distance, derivatives_at
from expbern.fundamental import phi_taylor_bruteforce
from expbern.plusminus import (
    even_ratio_algebraic,
    identity_residual,
    p_derivative_residual,
    p_recurrence_residual,
)

X5 = np.linspace(0, 5, 51)
PATHOLOGY = EigenSystem((7j, -7j, (7 - math.pi) * 1j, -(7 - math.pi) * 1j, 1j, -1j))

# the five polynomials as listed (ascending coefficients)
LISTED_P = {
    0: (F(1, 2),),
    1: (F(-1, 4), F(1, 4)),
    2: tuple(F(c, 2**5) for c in (6, -6, 2)),
    3: tuple(F(1, 2**6) * c for c in (F(-20), F(20), F(-8), F(4, 3))),
    4: tuple(F(1, 2**9) * c for c in (F(70), F(-70), F(30), F(-20, 3), F(2, 3))),
}


def pm_system(s):
    return EigenSystem((1.0,) * (s + 1) + (-1.0,) * (s + 1))


# 1 -----------------------------------------------------------------------


def test_criterion_01_closed_forms(criterion):
    sinh = eval_exppoly(phi(EigenSystem.of(1, -1)), X5).real
    r1 = np.max(np.abs(sinh - np.sinh(X5))[1:] / np.abs(np.sinh(X5[1:])))
    ref = 0.5 * (X5 * np.cosh(X5) - np.sinh(X5))
    got = eval_exppoly(phi(EigenSystem.of(1, 1, -1, -1)), X5).real
    r2 = np.max(np.abs(got - ref)[1:] / np.abs(ref[1:]))
    ok = r1 < 1e-10 and r2 < 1e-10 and abs(sinh[0]) < 1e-300 and abs(got[0]) < 1e-300
    criterion(1, ok, f"sinh rel {r1:.1e}, (x cosh - sinh)/2 rel {r2:.1e}")
    assert ok


# 2 -----------------------------------------------------------------------


@pytest.mark.parametrize("s", [0, 1, 2, 4])
def test_criterion_02_listed_polynomials(criterion, s):
    ok = p_poly_exact(s, 0) == LISTED_P[s]
    criterion(2, ok, f"s={s} exact")
    assert ok


@pytest.mark.xfail(strict=True, reason="listed P_3^0 carries 1/2^6 where the residue gives 1/2^7")
def test_criterion_02_listed_s3(criterion):
    ok = p_poly_exact(3, 0) == LISTED_P[3]
    criterion(2, ok, "s=3 listed value is twice the residue (strict xfail)")
    assert ok


def test_criterion_02_corrected_s3():
    assert p_poly_exact(3, 0) == tuple(c / 2 for c in LISTED_P[3])
    assert p_poly_exact(3, 0) == tuple(F(c, 2**7) for c in (-20, 20, -8)) + (F(4, 3 * 2**7),)


# 3 -----------------------------------------------------------------------


def test_criterion_03_recurrences(criterion):
    worst = {
        "P recurrence": max(p_recurrence_residual(s, X5) for s in range(1, 21)),
        "P-derivative": max(p_derivative_residual(s, X5) for s in range(1, 21)),
        "rec3": max(identity_residual("rec3", s, X5) for s in range(1, 21)),
        "neuid+": max(identity_residual("neuid_plus", s, X5) for s in range(1, 21)),
        "neuid-": max(identity_residual("neuid_minus", s, X5) for s in range(1, 21)),
        "correc2": max(identity_residual("correc2", s, X5) for s in range(2, 21)),
    }
    util = max(identity_residual("ratio_bound", s, X5[1:]) for s in range(1, 21))
    ok = max(worst.values()) < 1e-8 and util < 1
    criterion(3, ok, f"max residual {max(worst.values()):.1e}, ratio-to-bound max {util:.8f}")
    assert ok


# 4 -----------------------------------------------------------------------


def test_criterion_04_even_ratio(criterion):
    vals = [even_ratio(s, 1.0) for s in range(2, 51)]
    dec = all(u > v for u, v in zip(vals, vals[1:]))
    gap = abs(vals[-1] - 1)
    alg = max(abs(even_ratio_algebraic(s, 1.0) - even_ratio(s, 1.0)) / even_ratio(s, 1.0) for s in range(1, 51))
    ok = dec and gap < 0.02 and alg < 1e-10
    criterion(4, ok, f"|ratio(50) - 1| = {gap:.6f}, decreasing={dec}, algebraic form {alg:.1e}")
    assert ok


# 5 -----------------------------------------------------------------------


def test_criterion_05_generating_functions(criterion):
    worst = 0.0
    for kind in ("p_alpha", "odd", "full"):
        for x in (0.5, 1.0, 2.0):
            for y in (0.2, 0.5, 0.5j):
                closed, trunc = genfun(kind, x, y, N=40)
                worst = max(worst, abs(closed - trunc))
    ok = worst < 1e-8
    criterion(5, ok, f"max |closed - truncated| {worst:.1e}")
    assert ok


# 6 -----------------------------------------------------------------------


def _integer_systems():
    rng = np.random.default_rng(6)
    for n in range(5):
        for _ in range(6):
            yield EigenSystem(tuple(float(v) for v in rng.integers(-3, 4, n + 1)))


def test_criterion_06_taylor_oracle(criterion):
    exact = all(
        phi_taylor(s, s.n + e) == phi_taylor_bruteforce(s, s.n + e) for s in _integer_systems() for e in range(6)
    )
    rng = np.random.default_rng(66)
    worst = 0.0
    for n in range(7):
        s = EigenSystem(tuple(np.round(rng.uniform(-2, 2, n + 1), 3)))
        d = derivatives_at(phi(s), 0.0, n + 6)
        want = np.array([phi_taylor(s, k) for k in range(n + 7)])
        worst = max(worst, float(np.max(np.abs(d - want) / np.maximum(1, np.abs(want)))))
    third = all(phi_taylor(pm_system(s), 2 * s + 3) == s + 1 for s in range(11))
    ok = exact and worst < 1e-8 and third
    criterion(6, ok, f"enumeration exact={exact}, symbolic {worst:.1e}, Phi^(2s+3)(0)=s+1: {third}")
    assert ok


@pytest.mark.xfail(strict=True, reason="Phi^(n)(0) = 1 by normalization and n = 2s+1 here")
def test_criterion_06_literal_order_2s1(criterion):
    ok = all(phi_taylor(pm_system(s), 2 * s + 1) == 0 for s in range(11))
    criterion(6, ok, "Phi^(2s+1)(0) = 0 as stated is the normalization value 1 (strict xfail)")
    assert ok


def test_criterion_06_corrected_orders():
    for s in range(11):
        sys_ = pm_system(s)
        assert phi_taylor(sys_, 2 * s + 1) == 1
        assert phi_taylor(sys_, 2 * s + 2) == 0
        assert phi_taylor(sys_, 2 * s + 3) == s + 1


# 7 -----------------------------------------------------------------------


def test_criterion_07_basis(criterion):
    rng = np.random.default_rng(7)
    bad, worst = [], 0.0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        lams = np.round(rng.uniform(-2, 2, n + 1), 3)
        if n >= 2 and rng.random() < 0.3:
            lams[1] = lams[0]
        s = EigenSystem(tuple(lams))
        for b in (1.0, 2.5):
            p = build_basis_recursive(s, 0.0, b)
            q = build_basis_linsolve(s, 0.0, b)
            d = basis_discrepancy(p, q)
            worst = max(worst, d)
            chk = check_basis(p)
            rep = verify_shape(p)
            if not (d < 1e-8 and chk.zero_orders_ok and chk.max_norm_error < 1e-8 and rep.ok):
                bad.append((s.to_text(), b))
            elif not all(e.ok for e in rep.entries):
                bad.append((s.to_text(), b))
    classical = max(
        coeff_distance(build_basis(EigenSystem((0.0,) * (n + 1)), 0, b)[k], classical_basis_function(n, k, b))
        for n in range(1, 11)
        for b in (1.0, 2.5)
        for k in range(n + 1)
    )
    ok = not bad and classical < 1e-8
    criterion(7, ok, f"200 bases, failures {len(bad)}, max discrepancy {worst:.1e}, classical {classical:.1e}")
    assert ok, bad[:5]


# 8 -----------------------------------------------------------------------


def test_criterion_08_recursions(criterion):
    worst = 0.0
    for s in range(1, 7):
        for k in range(2 * s):
            worst = max(worst, recursion_s5("thmR1_plus", s, k).residual, recursion_s5("thmR1_minus", s, k).residual)
        for k in range(2 * s - 2) if s >= 2 else ():
            worst = max(worst, recursion_s5("thmR2", s, k).residual)
    spec_ok = True
    for s in range(2, 7):
        c = recursion_s5("thmR2", s, 2 * s - 3).constants
        spec_ok &= abs(c["A"] - 4 * s * (s - 1)) <= 1e-8 * 4 * s * (s - 1) and abs(c["B"]) < 1e-8
    ok = worst < 1e-8 and spec_ok
    criterion(8, ok, f"max residual {worst:.1e}, k=2s-3 gives A=4s(s-1), B=0: {spec_ok}")
    assert ok


# 9 -----------------------------------------------------------------------


@pytest.mark.xfail(strict=True, reason="det A_{5,1} vanishes at b = 1.6407, before the first zero of Phi")
def test_criterion_09_first_flag(criterion):
    flags = zero_set_scan(PATHOLOGY, 0.0, (0.1, 5.0, 0.01))
    ok = 3.15 <= flags[0] <= 3.25
    criterion(9, ok, f"first flagged b = {flags[0]:.4f} from a higher Hankel minor (strict xfail)")
    assert ok


def test_criterion_09_first_phi_zero(criterion):
    flags = zero_set_scan_detailed(PATHOLOGY, 0.0, 0.1, 5.0, 0.01)
    b0 = next(f.b for f in flags if f.k == 0)
    ok = 3.15 <= b0 <= 3.25
    criterion(9, ok, f"first zero of Phi (k=0 minor) at b = {b0:.4f}")
    assert ok


def test_criterion_09_relative_maxima(criterion):
    rep = verify_shape(build_basis(PATHOLOGY, 0.0, 3.0))
    ok = rep.max_relative_maxima >= 2
    criterion(9, ok, f"[0,3]: up to {rep.max_relative_maxima} relative maxima (proxy {rep.interval_chebyshev_proxy}, findings only)")
    assert ok


# 10 ----------------------------------------------------------------------


def test_criterion_10_operator(criterion):
    op = build_operator(EigenSystem.of(0, 1), 0, 1)
    closed = np.max(np.abs(op.knots - [0, 1])) < 1e-12 and np.max(np.abs(op.weights - [1, 1 / (math.e - 1)])) < 1e-12
    rng = np.random.default_rng(10)
    repro, recur, bad = 0.0, 0.0, 0
    for i in range(50):
        n = int(rng.integers(1, 11))
        lams = np.round(rng.uniform(-2, 2, n + 1), 3)
        if i % 2 == 0:
            lams[0] = 0.0
        while lams[1] == lams[0]:
            lams[1] = round(rng.uniform(-2, 2), 3)
        op = build_operator(EigenSystem(tuple(lams)), 0.0, 1.0)
        repro = max(repro, *reproduction_residual(op))
        t = op.knots
        if not (np.all(np.diff(t) > 0) and abs(t[0]) <= 1e-10 and abs(t[-1] - 1) <= 1e-10 and np.all(op.weights > 0)):
            bad += 1
        if lams[0] == 0:
            recur = max(recur, weight_recursion_residual(op))
    ok = closed and repro < 1e-9 and bad == 0 and recur < 1e-8
    criterion(10, ok, f"n=1 closed form {closed}, reproduction {repro:.1e}, knot/weight failures {bad}, weight recursion {recur:.1e}")
    assert ok


# 11 ----------------------------------------------------------------------


def test_criterion_11_derivative_formula(criterion):
    worst_classic, worst_d = 0.0, 0.0
    for n in range(1, 9):
        basis = build_basis(EigenSystem((0.0,) * (n + 1)), 0, 1)
        y = np.sin(3 * np.arange(n + 1) / n) + 0.2
        worst_classic = max(worst_classic, derivative_formula_residual(basis, y, 0))
        d = d_coeffs(EigenSystem((0.0,) * (n + 1)), 0, 1, 0).values
        worst_d = max(worst_d, float(np.max(np.abs(d - [-(n - k) for k in range(n)]))))
    worst_fam = 0.0
    for n in range(2, 11):
        for tail in ((0.0,) * (n - 2), tuple((-1.0) ** i for i in range(n - 2))):
            op = build_operator(EigenSystem((0.0, 1.0, -1.0) + tail), 0, 1)
            y = np.exp(-op.knots) * np.cos(2 * op.knots) + op.knots**2
            for j in range(n + 1):
                worst_fam = max(worst_fam, derivative_formula_residual(op, y, j))
    ok = worst_classic < 1e-8 and worst_fam < 1e-8 and worst_d < 1e-10
    criterion(11, ok, f"classical {worst_classic:.1e}, (0,1,-1) families {worst_fam:.1e}, d^(k,0)+(n-k) {worst_d:.1e}")
    assert ok


# 12 ----------------------------------------------------------------------


def test_criterion_12_diagnostics(criterion):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # degrees above 24 are intended here
        diag = convergence_diag("pm", range(1, 31), 0.0, 1.0)
    top = dict(diag.top_a())
    vals = [top[2 * s + 1] for s in range(1, 31)]
    err = max(abs(v - even_ratio(s, 1.0)) / even_ratio(s, 1.0) for s, v in zip(range(1, 31), vals))
    dec = all(u > v > 1 for u, v in zip(vals, vals[1:]))
    ok = err < 1e-10 and dec and vals[-1] - 1 < 0.05
    criterion(12, ok, f"a(n,n) vs even ratio {err:.1e}, decreasing to {vals[-1]:.5f}")
    assert ok

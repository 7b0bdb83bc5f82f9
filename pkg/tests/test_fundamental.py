import math
from itertools import combinations_with_replacement

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expbern import EigenSystem, eval_exppoly, phi, phi_taylor, taylor_data
from expbern.errors import ZeroScale
from expbern.expspace import derivatives_at
from expbern.fundamental import (
    check_reality_positivity,
    phi_derivative_data,
    phi_derivatives_at,
    phi_eval_dd,
    phi_eval_series,
    phi_taylor_bruteforce,
    transform_system,
    wronskian_residual,
)

small_real = st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 2))
systems = st.lists(small_real, min_size=1, max_size=6).map(tuple).map(EigenSystem)


def h_oracle(lams, m):
    # multisets of size m drawn from the index set: each is one exponent tuple
    total = 0
    for combo in combinations_with_replacement(range(len(lams)), m):
        total += math.prod(lams[i] for i in combo)
    return total


def test_phi_closed_forms():
    xs = np.linspace(0, 5, 51)
    assert np.allclose(eval_exppoly(phi(EigenSystem.of(1, -1)), xs).real, np.sinh(xs), rtol=1e-12)
    ref = 0.5 * (xs * np.cosh(xs) - np.sinh(xs))
    got = eval_exppoly(phi(EigenSystem.of(1, 1, -1, -1)), xs).real
    assert np.allclose(got, ref, rtol=1e-10, atol=1e-300)


def test_phi_confluent_cases():
    xs = np.linspace(0, 2, 9)
    # all-zero system gives x^n / n!
    assert np.allclose(eval_exppoly(phi(EigenSystem.of(0, 0, 0)), xs), xs**2 / 2)
    # (c, c) gives x e^{cx}
    assert np.allclose(eval_exppoly(phi(EigenSystem.of(0.5, 0.5)), xs), xs * np.exp(0.5 * xs))
    # (i, -i) gives sin
    assert np.allclose(eval_exppoly(phi(EigenSystem.of(1j, -1j)), xs), np.sin(xs))


@settings(max_examples=60, deadline=None)
@given(systems, st.floats(0, 3))
def test_three_evaluators_agree(system, x):
    a = complex(eval_exppoly(phi(system, check=False), x))
    b = phi_eval_series(system, x)
    scale = max(1.0, abs(b))
    assert abs(a - b) <= 1e-7 * scale
    if len(set(system.lambdas)) == len(system.lambdas):
        gaps = [abs(u - v) for i, u in enumerate(system.lambdas) for v in system.lambdas[i + 1 :]]
        if not gaps or min(gaps) > 0.2:
            assert abs(phi_eval_dd(system, x) - b) <= 1e-8 * scale


@settings(max_examples=40, deadline=None)
@given(systems)
def test_wronskian_conditions(system):
    f = phi(system)
    n = system.n
    d = derivatives_at(f, 0.0, n)
    assert np.allclose(d[:n], 0, atol=1e-8)
    assert abs(d[n] - 1) < 1e-8
    assert wronskian_residual(system, f) < 1e-6


@settings(max_examples=100)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=5), st.integers(0, 5))
def test_taylor_exact_on_integers(lams, extra):
    system = EigenSystem(tuple(lams))
    k = system.n + extra
    assert phi_taylor(system, k) == h_oracle(lams, extra)
    assert phi_taylor_bruteforce(system, k) == h_oracle(lams, extra)
    assert phi_taylor(system, system.n - 1 if system.n else 0) == (1 if system.n == 0 else 0)


def test_taylor_data_matches_phi_taylor():
    s = EigenSystem.of(0.3, -1.2, 2, 2)
    td = taylor_data(s, 10)
    assert all(td.coeffs[k] == pytest.approx(phi_taylor(s, k), abs=1e-15) for k in range(11))


def test_derivative_data_consistent():
    s = EigenSystem.of(1, 1, -1, -1.5, 0.25)
    want = phi_derivatives_at(s, 1.3, 8, method="canonical")
    got = phi_derivative_data(s, 1.3, 8).values
    assert np.allclose(got, want, rtol=1e-10, atol=1e-14)
    assert np.allclose(phi_derivatives_at(s, 1.3, 8, method="mp"), want, rtol=1e-10, atol=1e-14)


def test_clustered_auto_falls_back_to_series():
    s = EigenSystem(tuple(1e-3 * np.arange(9)))
    auto = phi_derivatives_at(s, 0.5, 3)
    # roughly x^(8-i)/(8-i)!, and equal to the stable series value
    assert auto[0].real == pytest.approx(phi_eval_series(s, 0.5).real, rel=1e-12)
    assert auto[3].real == pytest.approx(0.5**5 / 120, rel=1e-2)


@pytest.mark.parametrize("c_add, c_mul", [(0.5, 1), (0, 2), (-1, -0.5), (1j, 1)])
def test_transform_rules(c_add, c_mul):
    s = EigenSystem.of(1, -0.5, 2)
    new, predicted = transform_system(s, c_add, c_mul)
    xs = np.linspace(0, 1.5, 7)
    assert np.allclose(eval_exppoly(predicted, xs), eval_exppoly(phi(new), xs), rtol=1e-10, atol=1e-14)


def test_transform_rejects_zero_scale():
    with pytest.raises(ZeroScale):
        transform_system(EigenSystem.of(1, 2), 0, 0)


def test_reality_and_positivity():
    rep = check_reality_positivity(EigenSystem.of(2j, -2j, 1), np.linspace(0.1, 3, 20))
    assert rep.real_valued and rep.ok
    rep = check_reality_positivity(EigenSystem.of(1, -2, 0.5, 0.5), np.linspace(0.1, 5, 30))
    assert rep.positive and rep.min_value > 0
    with pytest.raises(ValueError):
        check_reality_positivity(EigenSystem.of(1, 2), [0.0, 1.0])

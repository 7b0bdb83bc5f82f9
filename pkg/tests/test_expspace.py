import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expbern import EigenSystem, ExpPoly, eval_exppoly, parse_lambdas
from expbern.errors import ParseError
from expbern.expspace import (
    coeff_distance,
    derivatives_at,
    differentiate,
    format_complex,
    mul_by_x,
    nth_derivative,
    shift_argument,
    vanishing_order,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_parse_lambdas_forms():
    assert parse_lambdas("1,1,-1,-1") == (1, 1, -1, -1)
    assert parse_lambdas("7i, -7i") == (7j, -7j)
    assert parse_lambdas("1+2i,3-i,-i,2.5e-1") == (1 + 2j, 3 - 1j, -1j, 0.25)
    assert parse_lambdas("1e-3+1e+2i") == (0.001 + 100j,)


@pytest.mark.parametrize("bad", ["", "1,,2", "x", "1+", "i2", "1..2"])
def test_parse_lambdas_rejects(bad):
    with pytest.raises(ParseError):
        parse_lambdas(bad)


@given(finite, finite)
def test_format_parse_round_trip(re_, im_):
    z = complex(re_, im_)
    assert parse_lambdas(format_complex(z)) == (z,)


def test_eigensystem_groups_and_without():
    s = EigenSystem.parse("1,-1,1,0")
    assert s.n == 3
    assert s.groups == [(1, 2), (-1, 1), (0, 1)]
    assert s.grouped() == (1, 1, -1, 0)
    assert s.without(0).lambdas == (-1, 1, 0)
    assert s.equivalent(EigenSystem.of(0, 1, 1, -1))
    assert EigenSystem.parse("2i,-2i").is_conjugation_closed()
    assert not EigenSystem.parse("2i,2i").is_conjugation_closed()


def test_degree_warning():
    with pytest.warns(RuntimeWarning):
        EigenSystem(tuple(range(26)))


def test_exppoly_eval_matches_numpy():
    f = ExpPoly.from_dict({1: [1, 2], -0.5j: [0, 0, 3]})
    xs = np.linspace(-1, 2, 7)
    ref = (1 + 2 * xs) * np.exp(xs) + 3 * xs**2 * np.exp(-0.5j * xs)
    assert np.allclose(eval_exppoly(f, xs), ref, rtol=1e-14)


@settings(max_examples=50)
@given(st.lists(finite, min_size=1, max_size=4), st.floats(-2, 2), st.floats(-1, 1))
def test_derivative_against_finite_difference(coeffs, lam, x):
    f = ExpPoly.from_dict({lam: coeffs})
    h = 1e-5
    fd = (eval_exppoly(f, x + h) - eval_exppoly(f, x - h)) / (2 * h)
    d = eval_exppoly(differentiate(f), x)
    scale = max(1.0, abs(d), sum(abs(c) for c in coeffs) * math.e**3)
    assert abs(fd - d) <= 1e-6 * scale


def test_nth_derivative_and_derivatives_at():
    f = ExpPoly.exp(2.0) + ExpPoly.poly([0, 0, 1])
    d = derivatives_at(f, 0.0, 4)
    assert np.allclose(d, [1, 2, 6, 8, 16])
    assert coeff_distance(nth_derivative(f, 3), ExpPoly.exp(2.0, 8.0)) < 1e-15


def test_shift_and_mul_by_x():
    f = ExpPoly.from_dict({1.5: [1, -1]})
    g = shift_argument(f, 0.7)
    xs = np.linspace(0, 1, 5)
    assert np.allclose(eval_exppoly(g, xs), eval_exppoly(f, xs - 0.7))
    assert np.allclose(eval_exppoly(mul_by_x(f), xs), xs * eval_exppoly(f, xs))


def test_vanishing_order():
    f = ExpPoly.poly([0, 0, 0, 1, 1])
    assert vanishing_order(f, 0.0, 6) == 3
    assert vanishing_order(ExpPoly.poly([1, -2, 1]), 1.0, 4) == 2


def test_belongs_to():
    s = EigenSystem.parse("1,1,-1")
    assert ExpPoly.from_dict({1: [0, 1], -1: [2]}).belongs_to(s)
    assert not ExpPoly.from_dict({1: [0, 0, 1]}).belongs_to(s)

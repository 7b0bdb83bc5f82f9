"""The special family with eigenvalues +1 and -1.

Notation used throughout this module:

* ``odd(s)``  is the fundamental function of ``(1 x (s+1), -1 x (s+1))``;
* ``even(s, "plus")`` that of ``(1 x (s+1), -1 x s)``;
* ``even(s, "minus")`` that of ``(1 x s, -1 x (s+1))``.

These are built from the polynomials ``P_s^alpha`` (the residue at 0 of
``e^{xz} / (z^{s+1} (z+2)^{s+1+alpha})``) through
``odd(s)(x) = e^x P_s^0(x) - e^{-x} P_s^0(-x)`` and
``even(s, plus)(x) = e^x P_s^{-1}(x) + e^{-x} P_{s-1}^1(-x)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .errors import DivisionNearZero, DomainError
from .expspace import EigenSystem, ExpPoly, eval_exppoly
from .fundamental import _phi_series

Sign = Literal["plus", "minus"]


# ---------------------------------------------------------------------------
# P polynomials


def _gen_binom(a: int, j: int) -> Fraction:
    """Generalized binomial ``C(a, j)`` for integer ``a`` (possibly negative)."""
    num = Fraction(1)
    for i in range(j):
        num *= a - i
    return num / math.factorial(j)


@lru_cache(maxsize=None)
def p_poly_exact(s: int, alpha: int) -> tuple[Fraction, ...]:
    """Rational coefficients (ascending powers of x) of ``P_s^alpha``.

    Coefficient of ``x^m`` is ``[z^{s-m}] (z+2)^{-(s+1+alpha)} / m!``. For
    ``s = -1`` the zero polynomial (empty tuple) is returned.
    """
    if s < -1:
        raise ValueError("s must be >= -1")
    if s == -1:
        return ()
    N = s + 1 + alpha
    if N < 0:
        raise ValueError("need s + 1 + alpha >= 0")
    out = []
    for m in range(s + 1):
        j = s - m
        # (z+2)^{-N} = sum_j C(-N, j) 2^{-N-j} z^j
        c = _gen_binom(-N, j) / Fraction(2) ** (N + j)
        out.append(c / math.factorial(m))
    return tuple(out)


def p_poly(s: int, alpha: int = 0) -> list[float]:
    """Float coefficients of ``P_s^alpha`` (ascending powers)."""
    return [float(c) for c in p_poly_exact(s, alpha)]


def p_poly_closed_sum(s: int) -> tuple[Fraction, ...]:
    """``P_s^0`` from the closed sum ``(-1)^s 2^{-2s-1} sum_k (2s-k)! / (k! (s-k)! s!) (-2x)^k``."""
    out = []
    for k in range(s + 1):
        c = Fraction(math.factorial(2 * s - k), math.factorial(k) * math.factorial(s - k) * math.factorial(s))
        out.append((-1) ** s * c * (-2) ** k / 2 ** (2 * s + 1))
    return tuple(out)


def _poly_eval(coeffs: Sequence, x):
    xa = np.asarray(x, dtype=float)
    acc = np.zeros(xa.shape)
    for c in reversed(coeffs):
        acc = acc * xa + float(c)
    return acc


def _padd(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [u + v for u, v in zip(a, b)]


def _pscale(a, c):
    return [c * u for u in a]


def _pshift(a, k=1):
    """Multiply by ``x^k``."""
    return [0] * k + list(a)


def _pderiv(a):
    return [m * a[m] for m in range(1, len(a))]


def _trim_exact(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def p_recurrence_exact(s: int) -> bool:
    """``4s(s+1) P_{s+1} == x^2 P_{s-1} - 2s(2s+1) P_s`` in exact rationals."""
    lhs = _pscale(p_poly_exact(s + 1, 0), 4 * s * (s + 1))
    rhs = _padd(_pshift(p_poly_exact(s - 1, 0), 2), _pscale(p_poly_exact(s, 0), -2 * s * (2 * s + 1)))
    return _trim_exact(_padd(lhs, _pscale(rhs, -1))) == []


def p_derivative_exact(s: int) -> bool:
    """``P_s' == (x / 2s) P_{s-1} - P_s`` in exact rationals."""
    lhs = _pderiv(p_poly_exact(s, 0))
    rhs = _padd(_pscale(_pshift(p_poly_exact(s - 1, 0), 1), Fraction(1, 2 * s)), _pscale(p_poly_exact(s, 0), -1))
    return _trim_exact(_padd(lhs, _pscale(rhs, -1))) == []


def _grid_residual(lhs, rhs) -> float:
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    scale = max(1.0, float(np.abs(lhs).max()))
    return float(np.abs(lhs - rhs).max() / scale)


def p_recurrence_residual(s: int, x_grid) -> float:
    """Grid residual of ``4s(s+1) P_{s+1}^0 = x^2 P_{s-1}^0 - 2s(2s+1) P_s^0``."""
    if s < 1:
        raise ValueError("recurrence needs s >= 1")
    x = np.asarray(x_grid, dtype=float)
    lhs = 4 * s * (s + 1) * _poly_eval(p_poly(s + 1), x)
    rhs = x**2 * _poly_eval(p_poly(s - 1), x) - 2 * s * (2 * s + 1) * _poly_eval(p_poly(s), x)
    return _grid_residual(lhs, rhs)


def p_derivative_residual(s: int, x_grid) -> float:
    """Grid residual of ``d/dx P_s^0 = (1/s)(x/2) P_{s-1}^0 - P_s^0``."""
    if s < 1:
        raise ValueError("derivative identity needs s >= 1")
    x = np.asarray(x_grid, dtype=float)
    lhs = _poly_eval(_pderiv(p_poly(s)), x)
    rhs = x / (2 * s) * _poly_eval(p_poly(s - 1), x) - _poly_eval(p_poly(s), x)
    return _grid_residual(lhs, rhs)


@dataclass(frozen=True)
class PTriangle:
    alpha: int
    rows: tuple[tuple[float, ...], ...]


def p_triangle(s_max: int, alpha: int = 0) -> PTriangle:
    return PTriangle(alpha, tuple(tuple(p_poly(s, alpha)) for s in range(s_max + 1)))


# ---------------------------------------------------------------------------
# fundamental functions of the family


def _reflect(coeffs):
    """Coefficients of ``p(-x)``."""
    return tuple(c * (-1) ** m for m, c in enumerate(coeffs))


def odd_system(s: int) -> EigenSystem:
    return EigenSystem((1.0,) * (s + 1) + (-1.0,) * (s + 1))


def even_system(s: int, sign: Sign = "plus") -> EigenSystem:
    if sign == "plus":
        return EigenSystem((1.0,) * (s + 1) + (-1.0,) * s)
    if sign == "minus":
        return EigenSystem((1.0,) * s + (-1.0,) * (s + 1))
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


@lru_cache(maxsize=None)
def phi_odd(s: int) -> ExpPoly:
    """``e^x P_s^0(x) - e^{-x} P_s^0(-x)``."""
    if s < 0:
        raise ValueError("s must be >= 0")
    p = tuple(p_poly(s, 0))
    return ExpPoly(((1.0, p), (-1.0, tuple(-c for c in _reflect(p)))))


@lru_cache(maxsize=None)
def phi_even(s: int, sign: Sign = "plus") -> ExpPoly:
    """Plus: ``e^x P_s^{-1}(x) + e^{-x} P_{s-1}^1(-x)``; minus by reflection ``x -> -x``."""
    if s < 0:
        raise ValueError("s must be >= 0")
    plus_pos = tuple(p_poly(s, -1))
    plus_neg = _reflect(p_poly(s - 1, 1))
    if sign == "plus":
        return ExpPoly(((1.0, plus_pos), (-1.0, plus_neg)))
    if sign == "minus":
        # Phi_{-L}(x) = (-1)^{-n} Phi_L(-x) with n = 2s even
        return ExpPoly(((-1.0, _reflect(plus_pos)), (1.0, _reflect(plus_neg))))
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def pm_value(n_plus: int, n_minus: int, x: float) -> float:
    """High-relative-accuracy value of the fundamental function of ``(1 x n_plus, -1 x n_minus)``."""
    return _phi_series((1.0,) * n_plus + (-1.0,) * n_minus, float(x)).real


def odd_value(s: int, x: float) -> float:
    return pm_value(s + 1, s + 1, x)


def even_value(s: int, sign: Sign, x: float) -> float:
    return pm_value(s + 1, s, x) if sign == "plus" else pm_value(s, s + 1, x)


@dataclass(frozen=True)
class PMFamily:
    s_max: int
    odd: tuple[ExpPoly, ...]
    even_plus: tuple[ExpPoly, ...]
    even_minus: tuple[ExpPoly, ...]


def pm_family(s_max: int) -> PMFamily:
    return PMFamily(
        s_max,
        tuple(phi_odd(s) for s in range(s_max + 1)),
        tuple(phi_even(s, "plus") for s in range(s_max + 1)),
        tuple(phi_even(s, "minus") for s in range(s_max + 1)),
    )


# ---------------------------------------------------------------------------
# identities


IDENTITY_KINDS = ("neuid_plus", "neuid_minus", "rec3", "correc2", "even_sum", "ratio_bound")
_MIN_S = {"neuid_plus": 1, "neuid_minus": 1, "rec3": 1, "correc2": 2, "even_sum": 0, "ratio_bound": 1}


def _identity_sides(kind: str, s: int, x: np.ndarray):
    ev = eval_exppoly
    if kind == "neuid_plus":
        return ev(phi_odd(s), x), ev(phi_even(s, "plus"), x) - x / (2 * s) * ev(phi_odd(s - 1), x)
    if kind == "neuid_minus":
        return ev(phi_odd(s), x), -ev(phi_even(s, "minus"), x) + x / (2 * s) * ev(phi_odd(s - 1), x)
    if kind == "rec3":
        rhs = x**2 / (4 * s * (s + 1)) * ev(phi_odd(s - 1), x) - (2 * s + 1) / (2 * s + 2) * ev(phi_odd(s), x)
        return ev(phi_odd(s + 1), x), rhs
    if kind == "correc2":
        rhs = x**2 / (4 * s * (s - 1)) * ev(phi_odd(s - 2), x) - (2 * s - 1) / (2 * s) * ev(phi_odd(s - 1), x)
        return ev(phi_odd(s), x), rhs
    if kind == "even_sum":
        return ev(phi_even(s, "plus"), x) - ev(phi_even(s, "minus"), x), 2 * ev(phi_odd(s), x)
    raise ValueError(f"unknown identity kind {kind!r}")


def ratio_bound_check(s: int, x_grid) -> tuple[float, float]:
    """``(min ratio, max ratio / bound)`` for ``0 <= odd(s)/odd(s-1) < x^2 / (2s(2s+1))``.

    The bound holds strictly on the grid iff the first value is >= 0 and
    the second is < 1. Values come from the stable series evaluator.
    """
    xs = np.asarray(x_grid, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("the ratio bound is stated for x > 0")
    ratios = np.array([odd_value(s, x) / odd_value(s - 1, x) for x in xs])
    util = ratios * 2 * s * (2 * s + 1) / xs**2
    return float(ratios.min()), float(util.max())


def identity_residual(kind: str, s: int, x_grid) -> float:
    """Relative grid residual of one of the family identities.

    Residuals are ``max |LHS - RHS| / max(1, max |LHS|)``. For
    ``ratio_bound`` the return value is the largest ratio-to-bound quotient
    (the bound holds iff it is < 1), or ``inf`` if a ratio is negative.
    """
    if kind not in IDENTITY_KINDS:
        raise ValueError(f"unknown identity kind {kind!r}")
    if s < _MIN_S[kind]:
        raise ValueError(f"{kind} needs s >= {_MIN_S[kind]}")
    if kind == "ratio_bound":
        lo, util = ratio_bound_check(s, x_grid)
        return util if lo >= 0 else math.inf
    x = np.asarray(x_grid, dtype=float)
    lhs, rhs = _identity_sides(kind, s, x)
    return _grid_residual(lhs, rhs)


def even_ratio(s: int, x: float) -> float:
    """``even(s, plus)(x) / even(s, minus)(x)``."""
    if s < 1 or x <= 0:
        raise ValueError("even_ratio needs s >= 1 and x > 0")
    den = even_value(s, "minus", x)
    if abs(den) < 1e-300:
        raise DivisionNearZero(f"even(s={s}, minus)({x}) = {den!r}")
    return even_value(s, "plus", x) / den


def even_ratio_algebraic(s: int, x: float) -> float:
    """The same ratio through ``(s y + x/2) / (x/2 - s y)`` with ``y = odd(s)(x) / odd(s-1)(x)``."""
    y = odd_value(s, x) / odd_value(s - 1, x)
    return (s * y + x / 2) / (x / 2 - s * y)


# ---------------------------------------------------------------------------
# generating functions


def _sinhc(x: float, u: complex) -> complex:
    """``sinh(x sqrt(u)) / sqrt(u)``; entire in ``u``, series near ``u = 0``."""
    if abs(u) < 1e-8:
        # sum_k x^{2k+1} u^k / (2k+1)!
        return x + x**3 * u / 6 + x**5 * u**2 / 120
    w = cmath.sqrt(u)
    return cmath.sinh(x * w) / w


def genfun_closed(kind: str, x: float, y: complex, alpha: int = 0) -> complex:
    y = complex(y)
    if kind == "p_alpha":
        if abs(y) >= 1:
            raise DomainError("the P generating function converges only for |y| < 1")
        w = cmath.sqrt(y + 1)
        return cmath.exp(-x) * cmath.exp(x * w) / (2 * w * (w + 1) ** alpha)
    if kind == "odd":
        return _sinhc(x, y + 1)
    if kind == "full":
        u = y * y + 1
        return (1 + y) * _sinhc(x, u) + cmath.cosh(x * cmath.sqrt(u))
    raise ValueError(f"unknown generating function kind {kind!r}")


def genfun_truncated(kind: str, x: float, y: complex, N: int, alpha: int = 0) -> complex:
    """Partial sum of the series through index ``N`` (inclusive)."""
    y = complex(y)
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    if kind == "p_alpha":
        if abs(y) >= 1:
            raise DomainError("the P generating function converges only for |y| < 1")
        return complex(sum(_poly_eval(p_poly(n, alpha), x) * y**n for n in range(N + 1)))
    if kind == "odd":
        return complex(sum(eval_exppoly(phi_odd(s), x) * y**s for s in range(N + 1)))
    if kind == "full":
        total = 0j
        for m in range(N + 1):
            s, r = divmod(m, 2)
            f = phi_odd(s) if r else phi_even(s, "plus")
            total += eval_exppoly(f, x) * y**m
        return total
    raise ValueError(f"unknown generating function kind {kind!r}")


def genfun(kind: str, x: float, y: complex, N: int = 40, alpha: int = 0) -> tuple[complex, complex]:
    """``(closed form, truncated series)`` for ``kind`` in ``{p_alpha, odd, full}``."""
    return genfun_closed(kind, x, y, alpha), genfun_truncated(kind, x, y, N, alpha)

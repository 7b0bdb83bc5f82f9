"""Extended-precision helpers (gmpy2 numbers in numpy object arrays)."""
from __future__ import annotations

import math

import gmpy2
import mpmath
import numpy as np


def context(prec: int):
    """Context manager setting the gmpy2 working precision to ``prec`` bits."""
    return gmpy2.context(gmpy2.get_context(), precision=prec)


def working_prec(lams, x: float) -> int:
    """Bits for the Taylor sums (terms reach ``exp(max|lam| |x|)``) plus ``4n``.

    The extra bits cover the Hankel solves and triangular expansions built on
    these values, whose conditioning worsens geometrically with ``n``.
    """
    rad = max([abs(complex(l)) for l in lams] + [1.0]) * abs(x)
    return int((30 + rad / math.log(10)) * 3.33) + 16 + 4 * (len(lams) - 1)


def is_real(lams) -> bool:
    return all(complex(l).imag == 0 for l in lams)


def number(z: complex, real: bool):
    z = complex(z)
    return gmpy2.mpfr(z.real) if real else gmpy2.mpc(z)


def to_complex(v) -> complex:
    return complex(v)


def complete_homogeneous(lams, M: int, prec: int) -> np.ndarray:
    """``h_m(lams)`` for ``m = 0..M`` at ``prec`` bits."""
    real = is_real(lams)
    with context(prec):
        L = [number(l, real) for l in lams]
        h = [number(0, real)] * (M + 1)
        h[0] = number(1, real)
        for lam in L:
            for d in range(1, M + 1):
                h[d] = h[d] + lam * h[d - 1]
    return np.array(h, dtype=object)


def series_terms(lams, xmax: float, K: int, prec: int) -> int:
    rad = max([abs(complex(l)) for l in lams] + [1.0]) * abs(xmax)
    return int(2 * rad + prec / 3.3) + K + 10


def series_data(lams, xs, K: int, prec: int):
    """Exact ``Phi^(i)(x)`` and their Taylor term magnitudes, ``i = 0..K``, for each ``x``.

    ``Phi^(i)(x) = sum_m h_m x^(m+n-i) / (m+n-i)!``. Returns an object array of
    shape ``(K+1, len(xs))`` and a float array of the same shape.
    """
    xs = [float(x) for x in xs]
    n = len(lams) - 1
    M = series_terms(lams, max(abs(x) for x in xs), K, prec)
    h = complete_homogeneous(lams, M, prec)
    habs = np.array([float(abs(v)) for v in h])
    with context(prec):
        X = np.array([gmpy2.mpfr(x) for x in xs], dtype=object)
        rows = [np.array([gmpy2.mpfr(1)] * len(xs), dtype=object)]
        for j in range(1, M + n + 1):
            rows.append(rows[-1] * X / j)
        T = np.array(rows, dtype=object)
        exact = np.empty((K + 1, len(xs)), dtype=object)
        for i in range(K + 1):
            lo = max(0, i - n)
            exact[i] = h[lo:].dot(T[lo + n - i : M + n - i + 1])
    # magnitudes in double: x^j / j! through logs to avoid overflow
    ax = np.abs(np.array(xs))
    j = np.arange(M + n + 1)
    with np.errstate(divide="ignore"):
        logt = j[:, None] * np.log(np.where(ax > 0, ax, 1.0))[None, :] - np.array([math.lgamma(v + 1) for v in j])[:, None]
    tabs = np.exp(logt)
    tabs[1:, ax == 0] = 0.0
    mags = np.empty((K + 1, len(xs)))
    for i in range(K + 1):
        lo = max(0, i - n)
        mags[i] = habs[lo:] @ tabs[lo + n - i : M + n - i + 1]
    return exact, mags


def dot(coeffs, values, prec: int):
    with context(prec):
        total = 0
        for c, v in zip(coeffs, values):
            total = total + c * v
    return total


def mpf(v):
    """Exact conversion of a gmpy2 ``mpfr`` to an mpmath ``mpf``."""
    m, e = v.as_mantissa_exp()
    return mpmath.mpf((int(m), int(e)))


def to_mpmath(v):
    if isinstance(v, type(gmpy2.mpc(0))):
        return mpmath.mpc(mpf(v.real), mpf(v.imag))
    return mpf(v)


def from_mpmath(v, real: bool):
    def conv(x):
        sign, man, exp, _ = x._mpf_
        v = gmpy2.mpfr(man) * gmpy2.mpfr(2) ** exp if man else gmpy2.mpfr(0)
        return -v if sign else v

    if real:
        return conv(mpmath.mpf(mpmath.re(v)))
    return gmpy2.mpc(conv(mpmath.mpf(mpmath.re(v))), conv(mpmath.mpf(mpmath.im(v))))


def lu_solve(A, rhs, prec: int, real: bool):
    """Solve ``A x = rhs`` by LU with partial pivoting (mpmath) at ``prec`` bits.

    Raises ``ZeroDivisionError`` when mpmath finds the matrix singular.
    """
    with mpmath.workprec(prec):
        M = mpmath.matrix([[to_mpmath(v) for v in row] for row in A])
        b = mpmath.matrix([to_mpmath(v) for v in rhs])
        x = mpmath.lu_solve(M, b)
        with context(prec):
            return [from_mpmath(x[i], real) for i in range(len(rhs))]


def is_real_number(v) -> bool:
    return isinstance(v, type(gmpy2.mpfr(0)))


def log(v):
    return gmpy2.log(v)

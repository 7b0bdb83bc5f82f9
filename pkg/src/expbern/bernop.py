"""Bernstein operators ``B f = sum_k alpha_k f(t_k) p_{n,k}`` on exponential spaces.

Knots and weights are fixed by reproducing ``e^{lam0 x}`` and ``e^{lam1 x}``.
Both exponentials are expanded in the Bernstein basis by matching
derivatives at ``a``: the matrix ``(p_{n,j}^{(m)}(a))`` is unit lower
triangular, so forward substitution gives the coefficients. With ``c_k``
and ``d_k`` the coefficients of the two exponentials, ``d_k / c_k =
e^{(lam1 - lam0) t_k}`` and ``alpha_k = c_k e^{-lam0 t_k}``.

Limits ``x -> b`` of quotients of basis functions are taken as quotients of
leading Taylor coefficients at ``b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import _highprec
from .bernbasis import EPS_SING, BernsteinBasis, build_basis_recursive
from .errors import (
    DegenerateLimit,
    KnotLogDomain,
    KnotsNotIncreasing,
    NonPositiveWeight,
    RequiresZeroEigenvalue,
    UndefinedDiagnostic,
)
from .expspace import EigenSystem, ExpPoly, differentiate, eval_exppoly, linear_combination
from .plusminus import even_ratio, odd_system

ENDPOINT_TOL = 1e-10


@lru_cache(maxsize=256)
def _basis(system: EigenSystem, a: float, b: float) -> BernsteinBasis:
    return build_basis_recursive(system, a, b)


def basis_for(system: EigenSystem, a: float, b: float) -> BernsteinBasis:
    """Recursive Bernstein basis, cached per ``(system, a, b)``."""
    return _basis(system, float(a), float(b))


def expansion_coefficients(basis: BernsteinBasis, lam: float):
    """``c'_k`` with ``e^{lam x} = e^{lam a} sum_k c'_k p_{n,k}(x)`` (extended precision)."""
    n = basis.n
    real = _highprec.is_real(basis.system.lambdas) and complex(lam).imag == 0
    with _highprec.context(basis.prec):
        L = _highprec.number(lam, real)
        c = []
        for m in range(n + 1):
            v = L**m
            for j in range(m):
                v = v - c[j] * basis.end_derivative_exact("a", j, m)
            c.append(v / basis.end_derivative_exact("a", m, m))
    return c


@dataclass(frozen=True)
class BernsteinOperator:
    basis: BernsteinBasis
    knots: np.ndarray
    weights: np.ndarray

    @property
    def system(self) -> EigenSystem:
        return self.basis.system

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def reproduced(self) -> tuple[float, float]:
        lams = self.system.lambdas
        return lams[0].real, lams[1].real

    def __call__(self, f: Callable) -> ExpPoly:
        return as_exppoly(self, [f(t) for t in self.knots])


def _validate(op: BernsteinOperator) -> None:
    a, b = op.basis.interval.a, op.basis.interval.b
    t, w = op.knots, op.weights
    for k, v in enumerate(w):
        if not v > 0:
            raise NonPositiveWeight(k, float(v))
    tol = ENDPOINT_TOL * max(1.0, abs(a), abs(b))
    if abs(t[0] - a) > tol:
        raise KnotsNotIncreasing(0, f"t_0 = {t[0]!r} is not the left end point {a!r}")
    if abs(t[-1] - b) > tol:
        raise KnotsNotIncreasing(len(t) - 1, f"t_n = {t[-1]!r} is not the right end point {b!r}")
    for k in range(1, len(t)):
        if not t[k] > t[k - 1]:
            raise KnotsNotIncreasing(k)


def build_operator(system: EigenSystem, a: float, b: float) -> BernsteinOperator:
    """Operator reproducing ``e^{lam0 x}`` and ``e^{lam1 x}`` (the first two eigenvalues)."""
    if not system.is_real:
        raise ValueError("Bernstein operators need real eigenvalues")
    if system.n < 1:
        raise ValueError("need at least two eigenvalues")
    lam0, lam1 = system.lambdas[0].real, system.lambdas[1].real
    if lam0 == lam1:
        raise ValueError("the reproduced exponents lam0 and lam1 must differ")
    basis = basis_for(system, a, b)
    c = expansion_coefficients(basis, lam0)
    d = expansion_coefficients(basis, lam1)
    knots, weights = [], []
    with _highprec.context(basis.prec):
        for k, (ck, dk) in enumerate(zip(c, d)):
            ratio = dk / ck if ck != 0 else ck
            if not ratio > 0:
                raise KnotLogDomain(k, float(ratio))
            # e^{lam x} = e^{lam a} sum c'_k p_k, so t_k - a = log(d'_k / c'_k) / (lam1 - lam0)
            tk = float(a) + float(_highprec.log(ratio)) / (lam1 - lam0)
            knots.append(tk)
            weights.append(float(ck) * math.exp(lam0 * (a - tk)))
    op = BernsteinOperator(basis, np.array(knots), np.array(weights))
    _validate(op)
    return op


def apply(op: BernsteinOperator, samples: Sequence[float], x, exact: bool = True):
    """``sum_k alpha_k y_k p_{n,k}(x)`` for samples ``y_k = f(t_k)``."""
    y = np.asarray(samples, dtype=float)
    if y.size != op.n + 1:
        raise ValueError(f"expected {op.n + 1} samples, got {y.size}")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    vals = op.basis.evaluate_exact(xs) if exact else op.basis.evaluate(xs)
    out = ((op.weights * y) @ vals).real
    return float(out[0]) if np.ndim(x) == 0 else out


def as_exppoly(op, samples: Sequence[float], weights=None) -> ExpPoly:
    """``B f`` as an element of the space (``op`` may also be a bare basis with ``weights``)."""
    basis = op.basis if isinstance(op, BernsteinOperator) else op
    w = op.weights if weights is None else np.asarray(weights)
    return linear_combination(np.asarray(w) * np.asarray(samples, dtype=float), basis.funcs)


def reproduction_residual(op: BernsteinOperator, grid=None, exact: bool = True) -> tuple[float, float]:
    """Sup-norm errors of ``B(e^{lam0 .})`` and ``B(e^{lam1 .})`` on the grid."""
    a, b = op.basis.interval.a, op.basis.interval.b
    xs = np.linspace(a, b, 101) if grid is None else np.asarray(grid, dtype=float)
    vals = op.basis.evaluate_exact(xs) if exact else op.basis.evaluate(xs)
    out = []
    for lam in op.reproduced:
        approx = ((op.weights * np.exp(lam * op.knots)) @ vals).real
        out.append(float(np.abs(approx - np.exp(lam * xs)).max()))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# limits at b


@dataclass
class DCoeffs:
    """``values[k] = d^{k, lam_j}`` for ``k = 0..n-1``; ``j`` is the removed index."""

    removed: int
    eigenvalue: complex
    values: np.ndarray


def leading_ratio(num: BernsteinBasis, den: BernsteinBasis, k: int, m_num: int, m_den: int) -> complex:
    """``num_k^{(m_num)}(b) / den_k^{(m_den)}(b)``, guarding a vanishing denominator.

    The end derivatives are exact sums over the coefficient vectors, so the
    denominator counts as zero only when it is lost in the rounding of those
    sums (``EPS_SING`` times their term magnitude for double data).
    """
    top = num.end_derivative_exact("b", k, m_num)
    bot = den.end_derivative_exact("b", k, m_den)
    rel = 2.0 ** (30 - den.prec)
    if top is None or bot is None:
        top, bot = num.deriv_at_b(k, m_num), den.deriv_at_b(k, m_den)
        rel = EPS_SING
    r = den.r[k]
    scale = float(np.abs(r) @ np.abs(den.data_b[m_den : m_den + len(r)]))
    if abs(complex(bot)) <= rel * scale:
        raise DegenerateLimit(k)
    with _highprec.context(max(num.prec, den.prec)):
        return complex(top / bot)


def d_coeffs(system: EigenSystem, a: float, b: float, removed: int) -> DCoeffs:
    """``d^{k,lam_j} = lim_{x -> b} p'_{Lambda,k}(x) / p_{Lambda minus lam_j, k}(x)``.

    ``p'_{Lambda,k}`` vanishes to order ``n-k-1`` at ``b`` like the
    denominator, so the limit is ``p_{Lambda,k}^{(n-k)}(b) / p_{Lambda - lam_j,k}^{(n-k-1)}(b)``.
    """
    n = system.n
    if n < 1:
        raise ValueError("need at least two eigenvalues")
    full = basis_for(system, a, b)
    red = basis_for(system.without(removed), a, b)
    vals = [leading_ratio(full, red, k, n - k, n - k - 1) for k in range(n)]
    return DCoeffs(removed, system.lambdas[removed], np.array(vals))


def _residual(lv, rv) -> float:
    lv, rv = np.atleast_1d(lv), np.atleast_1d(rv)
    return float(np.abs(lv - rv).max() / max(1.0, np.abs(lv).max()))


def _lhs_values(basis: BernsteinBasis, w, lam: complex, xs: np.ndarray, exact: bool):
    """``(D - lam) sum_k w_k p_{n,k}`` on ``xs``."""
    if exact:
        return w @ basis.evaluate_exact(xs, 1) - lam * (w @ basis.evaluate_exact(xs, 0))
    F = linear_combination(w, basis.funcs)
    return eval_exppoly(differentiate(F) - F.scale(lam), xs)


def _combination_values(basis: BernsteinBasis, w, xs: np.ndarray, exact: bool):
    if exact:
        return np.asarray(w) @ basis.evaluate_exact(xs)
    return eval_exppoly(linear_combination(w, basis.funcs), xs)


def prop_abl_residual(system: EigenSystem, a: float, b: float, k: int, grid=None, exact: bool = True) -> float:
    """Grid residual of ``(D - lam_n) p_{Lambda,k} = p_{Lambda',k-1} + d^{k,lam_n} p_{Lambda',k}``.

    ``Lambda'`` drops the last eigenvalue; the first term is absent for
    ``k = 0`` and the second for ``k = n``. With ``exact`` both sides are
    evaluated from the extended-precision coefficient vectors (the derivative
    is a shift of the vector); otherwise by canonical ``ExpPoly`` arithmetic.
    """
    n = system.n
    if not 0 <= k <= n or n < 1:
        raise ValueError("need n >= 1 and 0 <= k <= n")
    xs = np.linspace(a, b, 101) if grid is None else np.asarray(grid, dtype=float)
    lam = system.lambdas[-1]
    full = basis_for(system, a, b)
    red = basis_for(system.without(n), a, b)
    w = np.zeros(n + 1, dtype=complex)
    w[k] = 1
    lhs = _lhs_values(full, w, lam, xs, exact)
    v = np.zeros(n, dtype=complex)
    if k >= 1:
        v[k - 1] = 1
    if k <= n - 1:
        v[k] = d_coeffs(system, a, b, n).values[k]
    return _residual(lhs, _combination_values(red, v, xs, exact))


def _zero_index(system: EigenSystem) -> int:
    for i, lam in enumerate(system.lambdas):
        if lam == 0:
            return i
    raise RequiresZeroEigenvalue("the derivative formula needs a zero eigenvalue")


def derivative_formula_residual(op, samples: Sequence[float], j: int, grid=None, exact: bool = True) -> float:
    """Grid residual of ``(D - lam_j) B f = sum_k (Delta y)_k alpha_k p_{Lambda - lam_j, k}``.

    ``(Delta y)_k = d^{k,lam_j} y_k - d^{k,0} y_{k+1}`` and ``alpha`` are the
    weights reproducing the constants. ``op`` is an operator or a bare
    basis (for example of the all-zero system, which has no operator); the
    weights always come from expanding ``1``, which is the operator's own
    weight vector when its first eigenvalue is zero.
    """
    basis = op.basis if isinstance(op, BernsteinOperator) else op
    system = basis.system
    z = _zero_index(system)
    n = system.n
    a, b = basis.interval.a, basis.interval.b
    xs = np.linspace(a, b, 101) if grid is None else np.asarray(grid, dtype=float)
    y = np.asarray(samples, dtype=float)
    if y.size != n + 1:
        raise ValueError(f"expected {n + 1} samples, got {y.size}")
    if isinstance(op, BernsteinOperator) and system.lambdas[0] == 0:
        alpha = op.weights
    else:
        alpha = np.array([float(c) for c in expansion_coefficients(basis, 0.0)])
    lam = system.lambdas[j]
    lhs = _lhs_values(basis, alpha * y, lam, xs, exact)
    red = basis_for(system.without(j), a, b)
    dj = d_coeffs(system, a, b, j).values
    d0 = d_coeffs(system, a, b, z).values
    coeffs = [(dj[k] * y[k] - d0[k] * y[k + 1]) * alpha[k] for k in range(n)]
    return _residual(lhs, _combination_values(red, coeffs, xs, exact))


def weight_recursion_residual(op: BernsteinOperator) -> float:
    """Largest relative error of ``alpha_{k+1} = -alpha_k d^{k,lam0}`` (needs ``lam0 = 0``)."""
    if op.system.lambdas[0] != 0:
        raise RequiresZeroEigenvalue("the weight recursion is stated for lam0 = 0")
    a, b = op.basis.interval.a, op.basis.interval.b
    d = d_coeffs(op.system, a, b, 0).values.real
    w = op.weights
    return float(max(abs(w[k + 1] + w[k] * d[k]) / abs(w[k + 1]) for k in range(op.n)))


# ---------------------------------------------------------------------------
# convergence diagnostics


def _reduced_ratio(system: EigenSystem, a: float, b: float, drop_num: int, drop_den: int, k: int) -> float:
    """``lim_{x -> b} p_{Lambda - lam_{drop_num}, k} / p_{Lambda - lam_{drop_den}, k}``."""
    num = basis_for(system.without(drop_num), a, b)
    den = basis_for(system.without(drop_den), a, b)
    m = system.n - 1 - k
    return leading_ratio(num, den, k, m, m).real


def a_coefficient(system: EigenSystem, a: float, b: float, k: int) -> float:
    """``a(n,k)``: numerator drops ``lam1``, denominator drops ``lam0``; ``k`` indexes the reduced bases."""
    return _reduced_ratio(system, a, b, 1, 0, k)


def b_coefficient(system: EigenSystem, a: float, b: float, k: int) -> float:
    """``b(n,k)``: numerator drops ``lam2``, denominator drops ``lam0``."""
    l0, l1, l2 = system.lambdas[:3] if system.n >= 2 else (0, 0, 0)
    if system.n < 2 or len({l0, l1, l2}) < 3:
        raise UndefinedDiagnostic("b(n,k) needs three pairwise distinct leading eigenvalues")
    return _reduced_ratio(system, a, b, 2, 0, k)


@dataclass
class DiagRow:
    n: int
    s: int | None
    k: int
    a_nk: float
    b_nk: float | None
    knot_gap: float | None
    log_ratio: float | None
    even_ratio: float | None


@dataclass
class ConvergenceDiag:
    """Rows keyed by ``(n, k)``. ``k = n - 1`` is the top reduced index, where
    ``a(n,k)`` is the quotient of fundamental functions at ``b - a``."""

    family: str
    interval: tuple[float, float]
    rows: list[DiagRow] = field(default_factory=list)

    def top_a(self) -> list[tuple[int, float]]:
        """``(n, a(n,n))`` with the top index of every ``n``."""
        out = {}
        for r in self.rows:
            if r.k == r.n - 1:
                out[r.n] = r.a_nk
        return sorted(out.items())

    def max_knot_gap(self) -> list[tuple[int, float]]:
        out: dict[int, float] = {}
        for r in self.rows:
            if r.knot_gap is not None:
                out[r.n] = max(out.get(r.n, 0.0), r.knot_gap)
        return sorted(out.items())


def pm_operator_system(s: int) -> EigenSystem:
    """``Lambda_{2s+1}(1, -1)`` ordered so the operator reproduces ``e^x`` and ``e^{-x}``."""
    lams = list(odd_system(s).lambdas)
    lams.remove(1)
    lams.remove(-1)
    return EigenSystem((1.0, -1.0) + tuple(lams))


def _diag_rows(system: EigenSystem, a: float, b: float, s: int | None) -> list[DiagRow]:
    n = system.n
    op = build_operator(system, a, b)
    t = op.knots
    er = even_ratio(s, b - a) if s is not None else None
    rows = []
    for k in range(n):
        a_nk = a_coefficient(system, a, b, k)
        try:
            b_nk = b_coefficient(system, a, b, k)
        except UndefinedDiagnostic:
            b_nk = None
        gap = float(t[k] - t[k - 1]) if k >= 1 else None
        lr = None
        if b_nk is not None and b_nk > 0:
            lr = math.log(b_nk) / float(t[k] - t[k + 1])
        rows.append(DiagRow(n, s, k, a_nk, b_nk, gap, lr, er))
    rows.append(DiagRow(n, s, n, float("nan"), None, float(t[n] - t[n - 1]), None, er))
    return rows


def convergence_diag(
    family: str,
    values: Sequence,
    a: float = 0.0,
    b: float = 1.0,
) -> ConvergenceDiag:
    """Diagnostics per ``(n, k)``.

    ``family='pm'``: ``values`` are ``s`` and the systems are
    ``Lambda_{2s+1}(1, -1)`` (``b(n,k)`` undefined). ``family='custom'``:
    ``values`` are eigenvalue systems (``EigenSystem`` or sequences).
    The row with ``k = n`` only carries the last knot gap.
    """
    diag = ConvergenceDiag(family, (float(a), float(b)))
    for v in values:
        if family == "pm":
            diag.rows.extend(_diag_rows(pm_operator_system(int(v)), a, b, int(v)))
        elif family == "custom":
            system = v if isinstance(v, EigenSystem) else EigenSystem(tuple(v))
            diag.rows.extend(_diag_rows(system, a, b, None))
        else:
            raise ValueError(f"unknown family {family!r}")
    diag.rows.sort(key=lambda r: (r.n, r.k))
    return diag


TEST_FUNCTIONS: dict[str, Callable] = {
    "x": lambda x: x,
    "x^2": lambda x: x * x,
    "|x-mid|": None,  # filled per interval
    "cos": np.cos,
}


@dataclass
class ExperimentRow:
    s: int
    function: str
    sup_error: float


def operator_convergence_experiment(
    s_values: Sequence[int],
    a: float = 0.0,
    b: float = 1.0,
    grid=None,
    include_reproduced: bool = True,
) -> list[ExperimentRow]:
    """Sup-norm error of ``B f - f`` on the grid for the pm operators.

    Test functions are ``x``, ``x^2``, ``|x - (a+b)/2|`` and ``cos x``, plus
    ``e^x`` and ``e^{-x}`` (which are reproduced) when ``include_reproduced``.
    """
    xs = np.linspace(a, b, 201) if grid is None else np.asarray(grid, dtype=float)
    mid = 0.5 * (a + b)
    funcs = dict(TEST_FUNCTIONS)
    funcs["|x-mid|"] = lambda x: np.abs(x - mid)
    if include_reproduced:
        funcs["exp"] = np.exp
        funcs["exp(-x)"] = lambda x: np.exp(-x)
    rows = []
    for s in s_values:
        op = build_operator(pm_operator_system(s), a, b)
        # canonical coefficients of these bases cancel badly, so evaluate exactly once
        vals = op.basis.evaluate_exact(xs).real
        for name, f in funcs.items():
            approx = (op.weights * f(op.knots)) @ vals
            rows.append(ExperimentRow(s, name, float(np.abs(approx - f(xs)).max())))
    return rows

"""Bernstein-like bases of ``E_Lambda`` relative to two points ``a < b``.

``p_{n,k}`` has a zero of exact order ``k`` at ``a`` and ``n - k`` at ``b``
and is normalized by ``p_{n,k}^{(k)}(a) = 1``. Every such function is a
combination ``sum_j r_j Phi^{(j)}(x - a)`` with ``j <= n - k`` and
``r_{n-k} = 1``. Two independent constructions of the coefficient vectors
``r`` are provided: the derivative recursion seeded with ``Phi(x - a)``
(:func:`build_basis_recursive`) and the Hankel solve
(:func:`build_basis_linsolve`). Both need only the values ``Phi^{(i)}(b - a)``,
which are computed in extended precision when the canonical form cancels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from . import _highprec
from .errors import NotChebyshevPair, SingularHankel
from .expspace import (
    EigenSystem,
    ExpPoly,
    coeff_distance,
    differentiate,
    eval_exppoly,
    linear_combination,
    mul_by_x,
    shift_argument,
    derivatives_at,
    vanishing_order,
)
from .fundamental import phi, phi_derivative_data, phi_derivatives_at, taylor_data

EPS_SING = 1e-10


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"interval needs a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True, eq=False)
class BernsteinBasis:
    """``funcs[k] = p_{n,k}``; ``r[k]`` are its coefficients on ``Phi^{(j)}(x - a)``.

    ``data_b`` holds ``Phi^{(i)}(b - a)`` and ``data_a`` holds ``Phi^{(i)}(0)``, so
    end point derivatives of the basis are available without cancellation.
    """

    system: EigenSystem
    interval: Interval
    funcs: tuple[ExpPoly, ...]
    method: str = ""
    r: tuple[np.ndarray, ...] = ()
    data_a: np.ndarray | None = None
    data_b: np.ndarray | None = None
    r_exact: tuple = ()
    prec: int = 53
    exact_a: tuple = ()
    exact_b: tuple = ()

    @property
    def n(self) -> int:
        return self.system.n

    def __getitem__(self, k: int) -> ExpPoly:
        return self.funcs[k]

    def __len__(self) -> int:
        return len(self.funcs)

    def __iter__(self):
        return iter(self.funcs)

    def evaluate(self, x) -> np.ndarray:
        """Rows ``k = 0..n`` of ``p_{n,k}(x)``."""
        return np.array([eval_exppoly(f, x) for f in self.funcs])

    def evaluate_exact(self, x, m: int = 0) -> np.ndarray:
        """Rows ``k = 0..n`` of ``p_{n,k}^{(m)}(x)`` from the exact coefficient vectors.

        Uses extended-precision values of ``Phi^{(j)}(x - a)``, so the result is
        accurate even where the canonical form cancels completely.
        """
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        n = self.n
        t = xs - self.interval.a
        prec = max(self.prec, _highprec.working_prec(self.system.lambdas, float(np.abs(t).max())))
        exact, _ = _highprec.series_data(self.system.lambdas, t, n + m, prec)
        with _highprec.context(prec):
            vals = self._r_matrix.dot(exact[m : m + n + 1])
        return np.array([[complex(v) for v in row] for row in vals])

    @cached_property
    def _r_matrix(self) -> np.ndarray:
        """``r_exact`` as a zero-padded object matrix of gmpy2 numbers."""
        n = self.n
        real = _highprec.is_real(self.system.lambdas)
        R = np.empty((n + 1, n + 1), dtype=object)
        with _highprec.context(self.prec):
            R[:] = _highprec.number(0, real)
            for k, row in enumerate(self.r_exact):
                for j, c in enumerate(row):
                    R[k, j] = c
        return R

    TAYLOR_EXTRA = 2

    @cached_property
    def _taylor(self):
        """Exact Taylor coefficients of every ``p_{n,k}`` at ``a`` and at ``b``, rounded.

        Returns ``(M, C_a, C_b)`` with ``C[k, m] = p_{n,k}^{(m)}(end)`` for
        ``m <= M + TAYLOR_EXTRA``; ``M`` terms reach the middle of the interval
        with the truncation far below double rounding.
        """
        n = self.n
        lams = self.system.lambdas
        half = 0.5 * self.interval.length
        rho = max([abs(complex(l)) for l in lams] + [1.0])
        M = int(3 * rho * half) + n + 40
        L = M + self.TAYLOR_EXTRA
        R = self._r_matrix
        prec = max(self.prec, _highprec.working_prec(lams, self.interval.length))
        h = _highprec.complete_homogeneous(lams, L + n, prec)
        with _highprec.context(prec):
            zero = h[0] * 0
            # Phi^{(i)}(0) = h_{i-n}; column m of A holds Phi^{(l+m)}(0), l = 0..n
            A = np.empty((n + 1, L + 1), dtype=object)
            for l in range(n + 1):
                for m in range(L + 1):
                    i = l + m - n
                    A[l, m] = h[i] if i >= 0 else zero
            Ca = R.dot(A)
        exact_b, _ = _highprec.series_data(lams, [self.interval.length], n + L, prec)
        with _highprec.context(prec):
            B = np.empty((n + 1, L + 1), dtype=object)
            for l in range(n + 1):
                B[l] = exact_b[l : l + L + 1, 0]
            Cb = R.dot(B)
        conv = np.vectorize(complex, otypes=[complex])
        return M, conv(Ca), conv(Cb)

    def evaluate_taylor(self, x, m: int = 0):
        """``(values, noise)`` of ``p_{n,k}^{(m)}(x)`` from the Taylor series at the nearer end.

        ``noise`` bounds the double rounding of the series sum.
        """
        if m > self.TAYLOR_EXTRA:
            raise ValueError(f"derivative order m <= {self.TAYLOR_EXTRA} only")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        M, Ca, Cb = self._taylor
        a, b = self.interval.a, self.interval.b
        left = xs - a <= b - xs
        t = np.where(left, xs - a, xs - b)
        j = np.arange(M + 1)
        logfact = np.array([math.lgamma(v + 1) for v in j])
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.exp(j[:, None] * np.log(np.abs(t))[None, :] - logfact[:, None])
        mag[0] = 1.0
        mag[1:, t == 0] = 0.0
        T = mag * np.where(t < 0, (-1.0) ** j[:, None], 1.0)
        vals = np.empty((self.n + 1, xs.size), dtype=complex)
        noise = np.empty((self.n + 1, xs.size))
        for side, C in ((left, Ca), (~left, Cb)):
            if np.any(side):
                Cm = C[:, m : m + M + 1]
                vals[:, side] = Cm @ T[:, side]
                noise[:, side] = 4 * (M + 1) * 1.2e-16 * (np.abs(Cm) @ mag[:, side])
        return vals, noise

    def end_derivative_exact(self, end: str, k: int, m: int):
        """``p_{n,k}^{(m)}`` at ``a`` or ``b`` as an extended-precision number (``None`` if out of range)."""
        data = self.exact_a if end == "a" else self.exact_b
        R = self.r_exact[k] if self.r_exact else ()
        if not R or m + len(R) > len(data):
            return None
        return _highprec.dot(R, data[m : m + len(R)], self.prec)

    def _end_derivative(self, end: str, k: int, m: int) -> complex:
        v = self.end_derivative_exact(end, k, m)
        if v is not None:
            return complex(v)
        data = self.data_a if end == "a" else self.data_b
        r = self.r[k]
        if m + len(r) > len(data):
            point = self.interval.a if end == "a" else self.interval.b
            return complex(derivatives_at(self.funcs[k], point, m)[m])
        return complex(np.dot(r, data[m : m + len(r)]))

    def deriv_at_a(self, k: int, m: int) -> complex:
        """``p_{n,k}^{(m)}(a)``."""
        return self._end_derivative("a", k, m)

    def deriv_at_b(self, k: int, m: int) -> complex:
        """``p_{n,k}^{(m)}(b)``."""
        return self._end_derivative("b", k, m)


@dataclass(frozen=True)
class HankelMatrix:
    order: int
    x: float
    entries: np.ndarray

    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))


def _hankel_from_values(vals: np.ndarray, k: int) -> np.ndarray:
    idx = np.arange(k + 1)
    return vals[..., idx[:, None] + idx[None, :]]


def hankel(system: EigenSystem, k: int, x: float) -> HankelMatrix:
    """``(Phi^{(i+j)}(x))_{i,j=0..k}``."""
    if not 0 <= k <= system.n:
        raise ValueError(f"Hankel order must satisfy 0 <= k <= n = {system.n}")
    vals = phi_derivatives_at(system, x, 2 * k)
    return HankelMatrix(k, float(x), _hankel_from_values(vals, k))


def _dets_from_values(vals: np.ndarray, n: int) -> list[complex]:
    return [complex(np.linalg.det(_hankel_from_values(vals, k))) for k in range(n + 1)]


def hankel_dets(system: EigenSystem, c) -> np.ndarray:
    """``det A_{n,k}(c)`` for ``k = 0..n``; for array ``c`` the shape is ``(n+1, len(c))``.

    Uses the canonical form of ``Phi`` (vectorized); intended for scans.
    """
    n = system.n
    f = phi(system)
    cs = np.atleast_1d(np.asarray(c, dtype=float))
    rows = []
    for _ in range(2 * n + 1):
        rows.append(np.atleast_1d(eval_exppoly(f, cs)))
        f = differentiate(f)
    vals = np.array(rows).T
    dets = np.array([np.linalg.det(_hankel_from_values(vals, k)) for k in range(n + 1)])
    return dets[:, 0] if np.ndim(c) == 0 else dets


# ---------------------------------------------------------------------------
# the derivative recursion on coefficient vectors


@dataclass
class PivotRun:
    """Output of the recursion: monic ``q_k`` coefficient vectors and the pivots.

    ``pivots[k] = q_k^{(k)}(b) = det A_{n,k}(b-a) / det A_{n,k-1}(b-a)``;
    ``ratios[k]`` is the relative distance of ``c = b - a`` to a zero of that
    pivot (see :func:`_pivot_test`). ``failed`` is the first ``k`` whose pivot
    is numerically zero (``None`` if all pass).
    """

    q: list
    pivots: list
    ratios: list
    failed: int | None
    q_exact: list = field(default_factory=list)


def _pivot(R, data, m: int) -> tuple:
    """``sum_l R_l Phi^{(l+m)}(c)`` (exact) and its term-magnitude scale."""
    total = _highprec.dot(R, data.exact[m : m + len(R)], data.prec)
    scale = float(sum(abs(complex(r)) * sc for r, sc in zip(R, data.scale[m : m + len(R)])))
    return total, scale


def _pivot_test(R, data, k: int):
    """``(pivot, N, ratio)`` for the monic vector ``R`` of order ``k``.

    ``pivot = pi_k(c) = D_k(c) / D_{k-1}(c)`` and ``N = q_k^{(k+1)}(c)``.
    Since ``d log D_k / dc = al_k = N / pivot`` and the second highest entry
    of ``R`` is ``-al_{k-1}``, ``pi_k'(c) = N + R_{k-1} pivot``. ``ratio =
    |pi_k| / (|c| |pi_k'|)`` is scale free: a pivot is numerically zero when
    a relative change of ``c`` by less than ``ratio`` could cancel it. It is
    also zero (undetermined) when it is lost in the working precision.
    """
    lead, scale = _pivot(R, data, k)
    N = _pivot(R, data, k + 1)[0]
    with _highprec.context(data.prec):
        deriv = N + R[k - 1] * lead if k else N
    big = abs(complex(deriv)) * abs(data.x)
    small = abs(complex(lead))
    if scale == 0 or small <= scale * 2.0 ** (30 - data.prec):
        return lead, N, 0.0
    return lead, N, (small / big if big > 0 else math.inf)


def _recursion(data, n: int, eps: float = EPS_SING) -> PivotRun:
    """Run ``q_k = q_{k-1}' - (al_{k-1} - al_{k-2}) q_{k-1} - be_k q_{k-2}`` on coefficients.

    ``data`` holds ``Phi^{(i)}(b - a)`` for ``i <= 2n + 1``. In the basis
    ``Phi^{(j)}(x - a)`` differentiation shifts the coefficient vector, so the
    recursion is carried out on vectors of length ``k + 1`` in the working
    precision of ``data``.
    """
    with _highprec.context(data.prec):
        one = data.exact[0] * 0 + 1
        q = [[one]]
        pivots, ratios, alpha = [], [], []
        failed = None
        for k in range(n + 1):
            R = q[k]
            lead, N, ratio = _pivot_test(R, data, k)
            pivots.append(lead)
            ratios.append(ratio)
            if ratio <= eps:
                failed = k
                break
            alpha.append(N / lead)
            if k == n:
                break
            # (d/dx) q_k in coefficients: shift up by one
            nxt = [one * 0] + list(R)
            da = alpha[k] - (alpha[k - 1] if k else 0)
            for l, c in enumerate(R):
                nxt[l] -= da * c
            if k:
                beta = pivots[k] / pivots[k - 1]
                for l, c in enumerate(q[k - 1]):
                    nxt[l] -= beta * c
            q.append(nxt)
    return PivotRun(
        [np.array([complex(c) for c in R]) for R in q],
        [complex(p) for p in pivots],
        ratios,
        failed,
        q,
    )


def pivot_run(system: EigenSystem, a: float, b: float) -> PivotRun:
    return _recursion(phi_derivative_data(system, b - a, 2 * system.n + 1), system.n)


def is_chebyshev_pair(system: EigenSystem, a: float, b: float):
    """``(ok, dets)``: every ``A_{n,k}(b - a)``, ``k = 0..n``, is invertible.

    The determinants are returned as computed by LU. The decision uses the
    Schur pivots ``det A_k / det A_{k-1} = q_k^{(k)}(b)`` of the derivative
    recursion, computed from extended-precision values of ``Phi^{(i)}(b-a)``:
    a pivot is zero when a relative change of ``b - a`` by ``EPS_SING`` could
    cancel it. (Hankel matrices of real systems are far too ill-conditioned
    for moderate ``n`` for a threshold on the raw determinant.)
    """
    if a == b:
        raise ValueError("a and b must differ")
    data = phi_derivative_data(system, b - a, 2 * system.n + 1)
    run = _recursion(data, system.n)
    return run.failed is None, _dets_from_values(data.values, system.n)


# ---------------------------------------------------------------------------
# constructions


def _assemble(system: EigenSystem, a: float, b: float, coeffs: list, data, method: str) -> BernsteinBasis:
    """Build ``p_{n,n-k} = sum_j r_j Phi^{(j)}(x - a)`` from monic exact coefficient vectors."""
    n = system.n
    K = 2 * n + 2
    data_a = np.asarray(taylor_data(system, K).coeffs, dtype=complex)
    # Phi^{(i)}(0) = h_{i-n}(Lambda), exactly
    h = _highprec.complete_homogeneous(system.lambdas, K - n, data.prec)
    zero = h[0] * 0
    exact_a = [zero] * n + list(h)
    v = data.values
    if len(v) < K + 1:
        v = phi_derivatives_at(system, b - a, K)
    f = phi(system)
    shifted = []
    for _ in range(n + 1):
        shifted.append(shift_argument(f, a))
        f = differentiate(f)
    funcs = [None] * (n + 1)
    rs = [None] * (n + 1)
    exact = [None] * (n + 1)
    with _highprec.context(data.prec):
        for k, R in enumerate(coeffs):
            # p_{n,n-k}^{(n-k)}(a) = sum_j r_j Phi^{(j+n-k)}(0) = r_k since Phi^{(i)}(0) = 0 for i < n
            R = [c / R[-1] for c in R]
            exact[n - k] = R
            rs[n - k] = np.array([complex(c) for c in R])
            funcs[n - k] = linear_combination(rs[n - k], shifted[: k + 1])
    return BernsteinBasis(
        system,
        Interval(float(a), float(b)),
        tuple(funcs),
        method,
        tuple(rs),
        data_a,
        v,
        tuple(exact),
        data.prec,
        tuple(exact_a),
        tuple(data.exact),
    )


def build_basis_recursive(system: EigenSystem, a: float, b: float) -> BernsteinBasis:
    """Bernstein basis from the recursion ``q_k = q_{k-1}' - (al_{k-1} - al_{k-2}) q_{k-1} - be_k q_{k-2}``.

    ``q_k = p_{n,n-k}`` up to normalization and ``q_0 = Phi(x - a)``;
    ``al_j = q_j^{(j+1)}(b) / q_j^{(j)}(b)`` and ``be_k = q_{k-1}^{(k-1)}(b) / q_{k-2}^{(k-2)}(b)``.
    Each ``q_k`` is renormalized at the end so that ``p_{n,k}^{(k)}(a) = 1``.
    Raises :class:`NotChebyshevPair` at the first vanishing quotient denominator.
    """
    Interval(float(a), float(b))
    n = system.n
    data = phi_derivative_data(system, b - a, 2 * n + 2)
    run = _recursion(data, n)
    if run.failed is not None:
        raise NotChebyshevPair(run.failed + 1)
    return _assemble(system, a, b, run.q_exact, data, "recursive")


def hankel_coefficients(data, k: int) -> list:
    """Monic ``r = (r_0..r_k)`` with ``A_{n,k-1}(c) r[:k] = -(Phi^{(k)}(c), ..., Phi^{(2k-1)}(c))``.

    Solved by LU with partial pivoting in the working precision of ``data``.
    """
    v = data.exact
    with _highprec.context(data.prec):
        one = v[0] * 0 + 1
    if k == 0:
        return [one]
    A = [[v[i + j] for j in range(k)] for i in range(k)]
    rhs = [-v[k + i] for i in range(k)]
    try:
        r = _highprec.lu_solve(A, rhs, data.prec, _highprec.is_real_number(one))
    except ZeroDivisionError:
        raise SingularHankel(k - 1) from None
    return r + [one]


def build_basis_linsolve(system: EigenSystem, a: float, b: float) -> BernsteinBasis:
    """Bernstein basis ``p_{n,n-k}(x) = sum_j r_j Phi^{(j)}(x - a)`` from Hankel solves.

    Raises :class:`SingularHankel` when ``A_{n,k}(b-a)`` is singular, judged
    by the Schur pivot ``sum_j r_j Phi^{(j+k)}(b-a)`` of the solution.
    """
    Interval(float(a), float(b))
    n = system.n
    data = phi_derivative_data(system, b - a, 2 * n + 2)
    coeffs = []
    for k in range(n + 1):
        r = hankel_coefficients(data, k)
        if _pivot_test(r, data, k)[2] <= EPS_SING:
            raise SingularHankel(k)
        coeffs.append(r)
    return _assemble(system, a, b, coeffs, data, "linsolve")


def build_basis(system: EigenSystem, a: float, b: float, method: str = "recursive") -> BernsteinBasis:
    if method == "recursive":
        return build_basis_recursive(system, a, b)
    if method == "linsolve":
        return build_basis_linsolve(system, a, b)
    raise ValueError(f"unknown construction method {method!r}")


def basis_discrepancy(p: BernsteinBasis, q: BernsteinBasis) -> float:
    """Largest per-function canonical coefficient discrepancy between two bases."""
    return max(coeff_distance(f, g) for f, g in zip(p.funcs, q.funcs))


# ---------------------------------------------------------------------------
# verification


@dataclass
class BasisCheck:
    zero_orders_ok: bool
    max_norm_error: float
    orders_at_a: list[int]
    orders_at_b: list[int]


def _end_order(basis: BernsteinBasis, end: str, k: int, tol: float) -> int:
    """Vanishing order of ``p_{n,k}`` at an end point.

    With exact end data a derivative is zero when it is lost in the rounding
    of its sum (below ``2^(30 - prec)`` times the magnitude of its terms;
    genuine leading derivatives can cancel to ``1e-6`` of that magnitude).
    Otherwise the rule of ``vanishing_order`` with ``tol`` is applied to the
    double values.
    """
    n = basis.n
    exact = [basis.end_derivative_exact(end, k, m) for m in range(n + 1)]
    if all(v is not None for v in exact):
        data = basis.exact_a if end == "a" else basis.exact_b
        R = np.array([float(abs(c)) for c in basis.r_exact[k]])
        rel = min(tol, 2.0 ** (30 - basis.prec))
        for m, v in enumerate(exact):
            mag = float(R @ np.array([float(abs(d)) for d in data[m : m + len(R)]]))
            if float(abs(v)) > rel * mag:
                return m
        return n + 1
    point = basis.interval.a if end == "a" else basis.interval.b
    return vanishing_order(basis.funcs[k], point, n, tol)


def check_basis(basis: BernsteinBasis, tol: float = 1e-8) -> BasisCheck:
    """Exact zero orders at both ends and the normalization ``p_{n,k}^{(k)}(a) = 1``.

    End derivatives come from the extended-precision coefficient vectors
    (the canonical form loses digits when eigenvalues cluster).
    """
    n = basis.n
    at_a = [_end_order(basis, "a", k, tol) for k in range(n + 1)]
    at_b = [_end_order(basis, "b", k, tol) for k in range(n + 1)]
    norm_err = max(abs(basis.deriv_at_a(k, k) - 1.0) for k in range(n + 1))
    ok = at_a == list(range(n + 1)) and at_b == [n - k for k in range(n + 1)]
    return BasisCheck(ok, norm_err, at_a, at_b)


def classical_basis_function(n: int, k: int, b: float) -> ExpPoly:
    """``x^k (b - x)^{n-k} / (k! b^{n-k})`` as a plain polynomial (for ``a = 0``)."""
    from math import comb, factorial

    coeffs = [0.0] * (n + 1)
    for j in range(n - k + 1):
        coeffs[k + j] = comb(n - k, j) * b ** (n - k - j) * (-1) ** j
    scale = 1.0 / (factorial(k) * b ** (n - k))
    return ExpPoly.poly([c * scale for c in coeffs])


def _sign_changes(signs: np.ndarray) -> list[tuple[int, int]]:
    """Consecutive sign flips ignoring unresolved entries: ``(from, to)`` signs."""
    nz = signs[signs != 0]
    return [(int(u), int(v)) for u, v in zip(nz[:-1], nz[1:]) if u != v]


@dataclass
class ShapeEntry:
    k: int
    positive: bool
    max_imag: float
    derivative_sign_changes: int
    relative_maxima: int
    increasing_first: bool
    ok: bool


@dataclass
class ShapeReport:
    system: str
    interval: tuple[float, float]
    conjugation_closed: bool
    interval_chebyshev_proxy: bool
    entries: list[ShapeEntry] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def max_relative_maxima(self) -> int:
        return max((e.relative_maxima for e in self.entries), default=0)

    @property
    def ok(self) -> bool:
        return not self.violations


def interval_chebyshev_proxy(system: EigenSystem, a: float, b: float, pieces: int = 32) -> bool:
    """``is_chebyshev_pair`` on every pair of a uniform subdivision of ``[a, b]``.

    Only the differences ``t_j - t_i`` matter, so this checks ``pieces``
    lengths. For conjugation-closed systems the (real) determinants must also
    keep their sign from one length to the next, which catches zeros that
    fall between subdivision points.
    """
    lengths = (b - a) * np.arange(1, pieces + 1) / pieces
    datas = phi_derivative_data(system, lengths, 2 * system.n + 1)
    runs = [_recursion(d, system.n) for d in datas]
    if any(r.failed is not None for r in runs):
        return False
    if system.is_conjugation_closed():
        signs = np.sign(np.cumprod(np.array([r.pivots for r in runs]).real, axis=1))
        if np.any(signs[1:] != signs[:-1]):
            return False
    return True


def _accurate_values(basis: BernsteinBasis, xs: np.ndarray, m: int, rtol: float) -> np.ndarray:
    """Values of ``p_{n,k}^{(m)}`` from the end point Taylor series, recomputed
    exactly where rounding could flip a sign."""
    vals, noise = basis.evaluate_taylor(xs, m)
    bad = np.any(np.abs(vals.real) <= noise / rtol, axis=0)
    if np.any(bad):
        vals[:, bad] = basis.evaluate_exact(xs[bad], m)
    return vals


def verify_shape(basis: BernsteinBasis, grid_size: int = 400, noise_rtol: float = 1e-4) -> ShapeReport:
    """Sampled positivity and unimodality of every basis function on the open interval.

    Samples where a canonical value is within ``1/noise_rtol`` of its
    rounding scale are recomputed from the exact coefficient vectors. Shape
    violations are only recorded as violations when the space is closed
    under conjugation and passes the interval-Chebyshev proxy; otherwise
    they are findings.
    """
    a, b = basis.interval.a, basis.interval.b
    n = basis.n
    xs = np.linspace(a, b, grid_size + 2)[1:-1]
    closed = basis.system.is_conjugation_closed()
    proxy = interval_chebyshev_proxy(basis.system, a, b)
    rep = ShapeReport(basis.system.to_text(), (a, b), closed, proxy)
    enforce = closed and proxy
    values = _accurate_values(basis, xs, 0, noise_rtol)
    slopes = _accurate_values(basis, xs, 1, noise_rtol).real
    for k in range(n + 1):
        vals = values[k]
        scale = max(1e-300, float(np.abs(vals).max()))
        max_imag = float(np.abs(vals.imag).max()) / scale
        positive = bool(np.all(vals.real > 0))
        ds = np.sign(slopes[k])
        changes = _sign_changes(ds)
        maxima = sum(1 for u, v in changes if u > 0 and v < 0)
        first = ds[ds != 0]
        inc_first = bool(first.size and first[0] > 0)
        if 1 <= k <= n - 1:
            ok = positive and len(changes) == 1 and inc_first
        elif k == n:
            ok = positive and len(changes) <= 1 and inc_first
        else:
            ok = positive and len(changes) <= 1
        rep.entries.append(ShapeEntry(k, positive, max_imag, len(changes), maxima, inc_first, ok))
        if closed and max_imag > 1e-10:
            msg = f"p_{{{n},{k}}} has imaginary part {max_imag:.2e}"
            (rep.violations if enforce else rep.findings).append(msg)
        if not ok:
            msg = (
                f"p_{{{n},{k}}}: positive={positive}, derivative sign changes={len(changes)}, "
                f"relative maxima={maxima}"
            )
            (rep.violations if enforce else rep.findings).append(msg)
    return rep


# ---------------------------------------------------------------------------
# recursions for the +1/-1 family on [0, 1]


def _pm_system(kind: str, s: int) -> EigenSystem:
    from .plusminus import even_system, odd_system

    if kind == "odd":
        return odd_system(s)
    return even_system(s, kind)


_basis_cache: dict = {}


def pm_basis(kind: str, s: int, a: float = 0.0, b: float = 1.0) -> BernsteinBasis:
    """Bernstein basis of the odd (``kind='odd'``) or even (``'plus'``/``'minus'``) system."""
    key = (kind, s, a, b)
    if key not in _basis_cache:
        _basis_cache[key] = build_basis_recursive(_pm_system(kind, s), a, b)
    return _basis_cache[key]


_values_cache: dict = {}


def _pm_values(basis: BernsteinBasis, xs: np.ndarray) -> np.ndarray:
    key = (basis.system.lambdas, basis.interval, xs.tobytes())
    if key not in _values_cache:
        _values_cache[key] = basis.evaluate_exact(xs)
    return _values_cache[key]


@dataclass
class RecursionResult:
    kind: str
    s: int
    k: int
    residual: float
    coeff_residual: float
    constants: dict




def recursion_s5(
    kind: Literal["thmR1_plus", "thmR1_minus", "thmR2"],
    s: int,
    k: int,
    grid=None,
    a: float = 0.0,
    b: float = 1.0,
    exact: bool = True,
) -> RecursionResult:
    """Residual of the basis recursions for the +1/-1 family.

    ``thmR1_pm``: ``A p_{2s+1,k+2} = x p_{2s-1,k} - (k+1) p_{2s pm,k+1}`` with
    ``A = (k+2) p_{2s-1,k}^{(k+1)}(0) - (k+1) p_{2s pm,k+1}^{(k+2)}(0)``.

    ``thmR2``: ``A p_{2s+1,k+4} = x^2 p_{2s-3,k} - (k+1)(k+2) p_{2s-1,k+2} + B x p_{2s-1,k+2}``.

    The grid residual uses values from the extended-precision coefficient
    vectors when ``exact`` (the canonical forms cancel for larger ``s``);
    ``coeff_residual`` always compares the canonical forms.
    """
    if grid is None:
        grid = np.linspace(a, b, 101)
    xs = np.asarray(grid, dtype=float)
    if a != 0:
        # the multiplier x in the recursions is measured from the left end point
        raise ValueError("the recursions are stated for a = 0")
    if kind in ("thmR1_plus", "thmR1_minus"):
        if s < 1 or not 0 <= k <= 2 * s - 1:
            raise ValueError("thmR1 needs s >= 1 and 0 <= k <= 2s-1")
        sign = "plus" if kind.endswith("plus") else "minus"
        top = pm_basis("odd", s, a, b)
        low = pm_basis("odd", s - 1, a, b)
        mid = pm_basis(sign, s, a, b)
        A = ((k + 2) * low.deriv_at_a(k, k + 1) - (k + 1) * mid.deriv_at_a(k + 1, k + 2)).real
        lhs = top[k + 2].scale(A)
        rhs = mul_by_x(low[k]) - mid[k + 1].scale(k + 1)
        consts = {"A": A}
        if exact:
            lv = A * _pm_values(top, xs)[k + 2]
            rv = xs * _pm_values(low, xs)[k] - (k + 1) * _pm_values(mid, xs)[k + 1]
    elif kind == "thmR2":
        if s < 2 or not 0 <= k <= 2 * s - 3:
            raise ValueError("thmR2 needs s >= 2 and 0 <= k <= 2s-3")
        top = pm_basis("odd", s, a, b)
        low = pm_basis("odd", s - 2, a, b)
        mid = pm_basis("odd", s - 1, a, b)
        lo1 = low.deriv_at_a(k, k + 1).real
        lo2 = low.deriv_at_a(k, k + 2).real
        mi3 = mid.deriv_at_a(k + 2, k + 3).real
        mi4 = mid.deriv_at_a(k + 2, k + 4).real
        B = (k + 2) / (k + 3) * ((k + 1) * mi3 - (k + 3) * lo1)
        A = (k + 3) * (k + 4) * lo2 - (k + 1) * (k + 2) * mi4 + (k + 4) * mi3 * B
        lhs = top[k + 4].scale(A)
        rhs = mul_by_x(mul_by_x(low[k])) - mid[k + 2].scale((k + 1) * (k + 2)) + mul_by_x(mid[k + 2]).scale(B)
        consts = {"A": A, "B": B}
        if exact:
            lv = A * _pm_values(top, xs)[k + 4]
            m = _pm_values(mid, xs)[k + 2]
            rv = xs**2 * _pm_values(low, xs)[k] - (k + 1) * (k + 2) * m + B * xs * m
    else:
        raise ValueError(f"unknown recursion kind {kind!r}")
    if not exact:
        lv = np.atleast_1d(eval_exppoly(lhs, xs))
        rv = np.atleast_1d(eval_exppoly(rhs, xs))
    resid = float(np.abs(lv - rv).max() / max(1.0, np.abs(lv).max()))
    return RecursionResult(kind, s, k, resid, coeff_distance(lhs, rhs), consts)


# ---------------------------------------------------------------------------
# zero set of the Hankel determinants


@dataclass(frozen=True)
class ZeroFlag:
    b: float
    k: int
    kind: str  # "sign-change" or "near-zero"


def zero_set_scan_detailed(system: EigenSystem, a: float, lo: float, hi: float, step: float, width: float = 1e-6):
    """Flag ``b`` in ``[lo, hi]`` where some ``det A_{n,k}(b - a)`` vanishes.

    Brackets sign changes of each determinant (of the real part, or of the
    imaginary part when that dominates), bisecting each bracket to
    ``width``, and flags grid points where a recursion pivot is numerically
    zero (zeros of even order give no sign change).
    """
    if not lo > a or step <= 0:
        raise ValueError("need lo > a and step > 0")
    n = system.n
    bs = np.arange(lo, hi + 0.5 * step, step)
    datas = phi_derivative_data(system, bs - a, 2 * n + 1)
    dets = np.array([_dets_from_values(d.values, n) for d in datas]).T  # (n+1, len(bs))

    def det_k(k, bval):
        v = phi_derivative_data(system, bval - a, 2 * k).values
        return complex(np.linalg.det(_hankel_from_values(v, k)))

    flags: list[ZeroFlag] = []
    for k in range(n + 1):
        d = dets[k]
        use_real = np.abs(d.real).max() >= np.abs(d.imag).max()
        part = d.real if use_real else d.imag
        for i in range(len(bs) - 1):
            u, w = part[i], part[i + 1]
            if u == 0:
                flags.append(ZeroFlag(float(bs[i]), k, "sign-change"))
                continue
            if u * w >= 0:
                continue
            left, right, fl = bs[i], bs[i + 1], u
            while right - left > width:
                mid = 0.5 * (left + right)
                dm = det_k(k, mid)
                fm = dm.real if use_real else dm.imag
                if fm == 0:
                    left = right = mid
                    break
                if (fm < 0) == (fl < 0):
                    left, fl = mid, fm
                else:
                    right = mid
            flags.append(ZeroFlag(float(0.5 * (left + right)), k, "sign-change"))
    for bi, d in zip(bs, datas):
        k = _recursion(d, n).failed
        if k is not None and not any(abs(f.b - bi) <= step for f in flags if f.k == k):
            flags.append(ZeroFlag(float(bi), k, "near-zero"))
    flags.sort(key=lambda f: (f.b, f.k))
    return flags


def zero_set_scan(system: EigenSystem, a: float, b_range: tuple[float, float, float]) -> list[float]:
    """Sorted flagged ``b`` values (see :func:`zero_set_scan_detailed`)."""
    lo, hi, step = b_range
    out: list[float] = []
    for f in zero_set_scan_detailed(system, a, lo, hi, step):
        if not out or abs(f.b - out[-1]) > 1e-6:
            out.append(f.b)
    return out

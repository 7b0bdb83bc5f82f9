"""The fundamental function of an eigenvalue system.

``phi(L)`` is the unique element of ``E_L`` whose derivatives of order
``0..n-1`` vanish at 0 and whose ``n``-th derivative there is 1. Three
independent numerical routes are provided:

* :func:`phi` returns exact canonical coefficients (residue expansion of
  ``exp(xz) / prod (z - lam_j)``, checked against the confluent Wronskian
  system it must solve). This is the representation everything downstream
  differentiates.
* :func:`phi_eval_dd` evaluates the confluent divided difference
  ``[lam_0, ..., lam_n] exp(xz)``.
* :func:`phi_eval_series` sums the Taylor series at 0 after shifting the
  eigenvalues so the series has nonnegative terms for real systems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _highprec
from .errors import IllConditioned, ZeroScale
from .expspace import (
    EigenSystem,
    ExpPoly,
    differentiate,
    eval_abs_bound,
    eval_exppoly,
    mul_by_exp,
    scale_argument,
)

WRONSKIAN_RTOL = 1e-6


def _local_taylor(g, j: int, order: int) -> np.ndarray:
    """Taylor coefficients at ``lam_j`` of ``prod_{i != j} (z - lam_i)^(-m_i)`` up to ``order``."""
    lam_j = g[j][0]
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    for i, (lam_i, m_i) in enumerate(g):
        if i == j:
            continue
        d = lam_j - lam_i
        # (d + w)^(-m) = d^(-m) * sum_r C(m+r-1, r) (-w/d)^r
        series = np.array(
            [math.comb(m_i + r - 1, r) * (-1.0 / d) ** r for r in range(order + 1)], dtype=complex
        ) * d ** (-m_i)
        out = np.convolve(out, series)[: order + 1]
    return out


def _residue_coefficients(system: EigenSystem) -> ExpPoly:
    g = system.groups
    terms = []
    for j, (lam, m) in enumerate(g):
        t = _local_taylor(g, j, m - 1)
        # Res_{z=lam} e^{xz}/(z-lam)^m * h(z) = sum_s x^s/s! * h_{m-1-s}
        terms.append((lam, tuple(t[m - 1 - s] / math.factorial(s) for s in range(m))))
    return ExpPoly(tuple(terms))


def wronskian_matrix(system: EigenSystem) -> tuple[np.ndarray, list[tuple[complex, int]]]:
    """Rows ``k = 0..n``: k-th derivatives at 0 of the canonical basis ``x^s e^{lam x}``."""
    n = system.n
    cols = [(lam, s) for lam, m in system.groups for s in range(m)]
    W = np.zeros((n + 1, n + 1), dtype=complex)
    for c, (lam, s) in enumerate(cols):
        for k in range(s, n + 1):
            W[k, c] = math.perm(k, s) * lam ** (k - s)
    return W, cols


def wronskian_residual(system: EigenSystem, f: ExpPoly) -> float:
    """Relative residual of ``f`` in the Wronskian system ``W c = e_n``."""
    W, cols = wronskian_matrix(system)
    coef = np.array([(f.coeffs(lam) + (0j,) * (s + 1))[s] for lam, s in cols], dtype=complex)
    rhs = np.zeros(system.n + 1, dtype=complex)
    rhs[-1] = 1.0
    resid = np.abs(W @ coef - rhs).max()
    scale = max(1.0, float((np.abs(W) @ np.abs(coef)).max()))
    return float(resid / scale)


def phi(system: EigenSystem, check: bool = True) -> ExpPoly:
    """Fundamental function of ``system`` in canonical coefficient form.

    Raises :class:`IllConditioned` if the coefficients fail the Wronskian
    conditions (``Phi^(k)(0) = 0`` for ``k < n``, ``Phi^(n)(0) = 1``) by
    more than ``1e-6`` relative.
    """
    f = _residue_coefficients(system)
    if check:
        r = wronskian_residual(system, f)
        if not np.isfinite(r) or r > WRONSKIAN_RTOL:
            raise IllConditioned(f"Wronskian residual {r:.3e} for system {system}")
    return f


def phi_eval_dd(system: EigenSystem, x: float) -> complex:
    """``[lam_0..lam_n] exp(xz)`` by a confluent divided-difference table.

    Equal eigenvalues are grouped adjacently (input order otherwise kept);
    a cell spanning ``m+1`` copies of one node takes ``x^m e^{x lam} / m!``.
    """
    z = system.grouped()
    n = len(z) - 1
    col = [np.exp(x * zi) for zi in z]
    for j in range(1, n + 1):
        nxt = []
        for i in range(n + 1 - j):
            if z[i] == z[i + j]:
                nxt.append(x**j * np.exp(x * z[i]) / math.factorial(j))
            else:
                nxt.append((col[i + 1] - col[i]) / (z[i + j] - z[i]))
        col = nxt
    return complex(col[0])


def complete_homogeneous(lams, m: int) -> complex:
    """``h_m(lam_0, ..., lam_n)`` by the DP ``H[j][m] = H[j-1][m] + lam_j H[j][m-1]``."""
    if m < 0:
        return 0j
    h = np.zeros(m + 1, dtype=complex)
    h[0] = 1.0
    for lam in lams:
        for d in range(1, m + 1):
            h[d] = h[d] + lam * h[d - 1]
    return complex(h[m])


def phi_taylor(system: EigenSystem, k: int) -> complex:
    """``Phi^(k)(0)``: zero below ``n``, else the complete homogeneous sum of degree ``k - n``."""
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    if k < system.n:
        return 0j
    return complete_homogeneous(system.lambdas, k - system.n)


def phi_taylor_bruteforce(system: EigenSystem, k: int) -> complex:
    """Reference enumeration over all exponent tuples ``s_0 + ... + s_n = k - n`` (tests only)."""
    n = system.n
    if k < n:
        return 0j
    deg = k - n
    total = 0j
    for exps in product(range(deg + 1), repeat=n + 1):
        if sum(exps) == deg:
            term = 1 + 0j
            for lam, e in zip(system.lambdas, exps):
                term *= lam**e
            total += term
    return total


@dataclass(frozen=True)
class TaylorData:
    system: EigenSystem
    coeffs: tuple[complex, ...] = field(default=())


def taylor_data(system: EigenSystem, K: int) -> TaylorData:
    """``Phi^(k)(0)`` for ``k = 0..K`` in one DP pass."""
    n = system.n
    vals = [0j] * (K + 1)
    if K >= n:
        h = np.zeros(K - n + 1, dtype=complex)
        h[0] = 1.0
        for lam in system.lambdas:
            for d in range(1, K - n + 1):
                h[d] += lam * h[d - 1]
        for k in range(n, K + 1):
            vals[k] = complex(h[k - n])
    return TaylorData(system, tuple(vals))


def _phi_series(lams, x: float) -> complex:
    n = len(lams) - 1
    if x == 0.0:
        return 1.0 + 0j if n == 0 else 0j
    reals = [complex(lam).real for lam in lams]
    c = min(reals) if x > 0 else max(reals)
    mu = [(complex(lam) - c) * x for lam in lams]
    r = max(abs(v) for v in mu)
    M = int(3 * r) + 40
    # w[j][m] = h_m(mu_0..mu_j) / (m + j)!  (mu already carries the factor x)
    w = np.empty(M + 1, dtype=complex)
    w[0] = 1.0
    for m in range(1, M + 1):
        w[m] = w[m - 1] * mu[0] / m
    for j in range(1, n + 1):
        nw = np.empty_like(w)
        nw[0] = w[0] / j
        for m in range(1, M + 1):
            nw[m] = (w[m] + mu[j] * nw[m - 1]) / (m + j)
        w = nw
    return complex(np.exp(c * x) * x**n * w.sum())


def phi_eval_series(system: EigenSystem, x: float) -> complex:
    """Evaluate ``Phi(x)`` from its Taylor series at 0.

    The eigenvalues are first shifted by ``c`` (the smallest real part for
    ``x >= 0``, the largest for ``x < 0``) using ``Phi_{c+L}(x) = e^{cx} Phi_L(x)``,
    so for real systems every series term is nonnegative and the sum keeps
    full relative precision even where the canonical form cancels badly.
    """
    return _phi_series(system.lambdas, float(x))


DERIVATIVE_RTOL = 1e-14


@dataclass
class DerivativeData:
    """``Phi^(i)(x)`` for ``i = 0..K`` in extended precision.

    ``exact`` holds gmpy2 numbers at ``prec`` bits and ``values`` their
    double rounding. ``scale[i]`` is the smaller of two term-magnitude sums
    that represent ``Phi^(i)(x)`` (canonical form and Taylor series at 0); a
    quantity far below it is numerically zero.
    """

    x: float
    prec: int
    exact: list
    values: np.ndarray
    scale: np.ndarray


def _working_prec(lams, x: float) -> int:
    return _highprec.working_prec(lams, x)


def _series_data(lams, xs, K: int, prec: int):
    """Exact values (gmpy2) and term magnitudes of ``Phi^(i)(x)`` for every ``x`` in ``xs``."""
    exact, mags = _highprec.series_data(lams, xs, K, prec)
    return [(list(exact[:, j]), mags[:, j].copy()) for j in range(len(xs))]


def _phi_derivatives_mp(lams, x: float, K: int) -> np.ndarray:
    """``Phi^(i)(x)``, ``i = 0..K``, from the Taylor series at 0 in extended precision."""
    exact, _ = _series_data(lams, [x], K, _working_prec(lams, x))[0]
    return np.array([complex(v) for v in exact])


def phi_derivative_data(system: EigenSystem, x, K: int):
    """:class:`DerivativeData` at ``x`` (or a list of them for a sequence ``x``)."""
    xs = [float(v) for v in np.atleast_1d(x)]
    prec = _working_prec(system.lambdas, max(abs(v) for v in xs))
    series = _series_data(system.lambdas, xs, K, prec)
    f = phi(system)
    canon = np.empty((K + 1, len(xs)))
    for i in range(K + 1):
        canon[i] = eval_abs_bound(f, np.array(xs))
        if i < K:
            f = differentiate(f)
    out = []
    for j, (xv, (exact, mags)) in enumerate(zip(xs, series)):
        values = np.array([complex(v) for v in exact])
        out.append(DerivativeData(xv, prec, exact, values, np.minimum(canon[:, j], mags)))
    return out[0] if np.ndim(x) == 0 else out


def phi_derivatives_at(system: EigenSystem, x: float, K: int, method: str = "auto") -> np.ndarray:
    """``[Phi(x), Phi'(x), ..., Phi^(K)(x)]``.

    ``method='canonical'`` evaluates symbolic derivatives of :func:`phi`.
    ``'mp'`` sums the Taylor series at 0 in extended precision. ``'auto'``
    uses the canonical values unless their rounding scale (relative to the
    value) exceeds ``DERIVATIVE_RTOL``, which happens when clustered
    eigenvalues make the canonical coefficients large.
    """
    if method == "mp":
        return _phi_derivatives_mp(system.lambdas, x, K)
    f = phi(system)
    out = np.empty(K + 1, dtype=complex)
    worst = 0.0
    for i in range(K + 1):
        v = eval_exppoly(f, x)
        out[i] = v
        if method == "auto":
            noise = 1.1e-16 * eval_abs_bound(f, x) * (len(f.terms) + 1)
            worst = max(worst, noise / max(abs(v), 1e-300))
        if i < K:
            f = differentiate(f)
    if method == "canonical" or worst <= DERIVATIVE_RTOL:
        return out
    return _phi_derivatives_mp(system.lambdas, x, K)


def transform_system(system: EigenSystem, c_add: complex = 0.0, c_mul: complex = 1.0):
    """Return ``(c_add + c_mul * L, predicted Phi)`` using the shift and scale rules.

    ``Phi_{c + L}(x) = e^{cx} Phi_L(x)`` and ``Phi_{cL}(x) = c^{-n} Phi_L(cx)``.
    """
    c_mul = complex(c_mul)
    c_add = complex(c_add)
    if c_mul == 0:
        raise ZeroScale("scale factor must be nonzero")
    new = EigenSystem(tuple(c_add + c_mul * lam for lam in system.lambdas))
    base = phi(system)
    predicted = scale_argument(base, c_mul).scale(c_mul ** (-system.n))
    predicted = mul_by_exp(predicted, c_add)
    return new, predicted


@dataclass
class RealityPositivityReport:
    system: str
    conjugation_closed: bool
    all_real: bool
    max_rel_imag: float | None = None
    real_valued: bool | None = None
    min_value: float | None = None
    positive: bool | None = None
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_reality_positivity(system: EigenSystem, x_grid, imag_rtol: float = 1e-10) -> RealityPositivityReport:
    """Check (a) real values for conjugation-closed systems and (b) positivity for real ones.

    Violations are collected in the report, never raised.
    """
    xs = np.asarray(list(x_grid), dtype=float)
    if xs.size == 0 or np.any(xs <= 0):
        raise ValueError("grid must be nonempty and strictly positive")
    rep = RealityPositivityReport(
        system=system.to_text(),
        conjugation_closed=system.is_conjugation_closed(),
        all_real=system.is_real,
    )
    f = phi(system, check=False)
    if rep.conjugation_closed:
        vals = np.atleast_1d(eval_exppoly(f, xs))
        scale = max(1.0, float(np.abs(vals).max()))
        rep.max_rel_imag = float(np.abs(vals.imag).max()) / scale
        rep.real_valued = rep.max_rel_imag < imag_rtol
        if not rep.real_valued:
            rep.violations.append(f"imaginary part {rep.max_rel_imag:.3e} exceeds {imag_rtol:g}")
    if rep.all_real:
        vals = np.array([phi_eval_series(system, x).real for x in xs])
        rep.min_value = float(vals.min())
        rep.positive = bool(np.all(vals > 0))
        if not rep.positive:
            bad = xs[vals <= 0]
            rep.violations.append(f"nonpositive values at x = {bad.tolist()}")
    return rep

"""Exponential polynomials in the canonical basis ``x**s * exp(lam * x)``.

An :class:`EigenSystem` fixes the space ``E_Lambda`` (the kernel of
``prod_j (d/dx - lam_j)``); an :class:`ExpPoly` is a finite sum
``sum_j p_j(x) exp(lam_j x)`` with complex polynomial factors ``p_j``.
Both are immutable. Eigenvalues are compared bitwise, never fuzzily.
"""
from __future__ import annotations

import math
import re
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError

#: Above this degree the Hankel and Wronskian solves lose too many digits.
MAX_SUPPORTED_DEGREE = 24

_TOKEN = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _parse_complex(tok: str) -> complex:
    t = tok.replace("I", "i").replace("j", "i")
    if not t:
        raise ParseError("empty eigenvalue literal")
    try:
        if t.endswith("i"):
            body = t[:-1]
            # the form "a+bi" or "a-bi" has a sign past position 0 that is not an exponent sign
            split = None
            for pos in range(len(body) - 1, 0, -1):
                if body[pos] in "+-" and body[pos - 1] not in "eE":
                    split = pos
                    break
            if split is None:
                re_part, im_txt = "0", body
            else:
                re_part, im_txt = body[:split], body[split:]
            if im_txt in ("", "+"):
                im_txt = "1"
            elif im_txt == "-":
                im_txt = "-1"
            for part in (re_part, im_txt):
                if not _TOKEN.match(part):
                    raise ValueError(part)
            return complex(float(re_part), float(im_txt))
        if not _TOKEN.match(t):
            raise ValueError(t)
        return complex(float(t), 0.0)
    except ValueError:
        raise ParseError(f"cannot parse eigenvalue literal {tok!r}") from None


def parse_lambdas(text: str) -> tuple[complex, ...]:
    """Parse ``"1,1,-1,-1"`` or ``"7i,-7i,3.8584i"`` into a tuple of complex numbers."""
    cleaned = "".join(text.split())
    if not cleaned:
        raise ParseError("no eigenvalues given")
    return tuple(_parse_complex(tok) for tok in cleaned.split(","))


def format_complex(z: complex) -> str:
    """Inverse of the eigenvalue literal parser (round-trips through ``repr`` floats)."""
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    if z.real == 0:
        return f"{z.imag!r}i"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


@dataclass(frozen=True)
class EigenSystem:
    """The ordered eigenvalue vector ``(lam_0, ..., lam_n)`` with repetitions."""

    lambdas: tuple[complex, ...]

    def __post_init__(self):
        lams = tuple(complex(v) for v in self.lambdas)
        if not lams:
            raise ValueError("an eigenvalue system needs at least one eigenvalue")
        object.__setattr__(self, "lambdas", lams)
        if len(lams) - 1 > MAX_SUPPORTED_DEGREE:
            warnings.warn(
                f"degree n={len(lams) - 1} exceeds {MAX_SUPPORTED_DEGREE}; "
                "double-precision solves may be inaccurate",
                RuntimeWarning,
                stacklevel=3,
            )

    @classmethod
    def parse(cls, text: str) -> "EigenSystem":
        return cls(parse_lambdas(text))

    @classmethod
    def of(cls, *values) -> "EigenSystem":
        return cls(tuple(values))

    @property
    def n(self) -> int:
        return len(self.lambdas) - 1

    def __len__(self) -> int:
        return len(self.lambdas)

    def __iter__(self):
        return iter(self.lambdas)

    def __getitem__(self, i):
        return self.lambdas[i]

    @property
    def groups(self) -> list[tuple[complex, int]]:
        """Distinct eigenvalues with multiplicities, in order of first appearance."""
        counts = Counter(self.lambdas)
        seen = []
        for lam in self.lambdas:
            if lam not in seen:
                seen.append(lam)
        return [(lam, counts[lam]) for lam in seen]

    def multiplicity(self, lam: complex) -> int:
        return self.lambdas.count(complex(lam))

    def grouped(self) -> tuple[complex, ...]:
        """The same multiset with equal eigenvalues made adjacent."""
        return tuple(lam for lam, m in self.groups for _ in range(m))

    def equivalent(self, other: "EigenSystem") -> bool:
        """Order-insensitive equality: same eigenvalue multiset."""
        return Counter(self.lambdas) == Counter(other.lambdas)

    def conjugate(self) -> "EigenSystem":
        return EigenSystem(tuple(lam.conjugate() for lam in self.lambdas))

    def is_conjugation_closed(self) -> bool:
        return self.equivalent(self.conjugate())

    @property
    def is_real(self) -> bool:
        return all(lam.imag == 0 for lam in self.lambdas)

    def without(self, index: int) -> "EigenSystem":
        """Drop the eigenvalue at position ``index`` (one copy only)."""
        lams = list(self.lambdas)
        del lams[index]
        return EigenSystem(tuple(lams))

    def extended(self, *values) -> "EigenSystem":
        return EigenSystem(self.lambdas + tuple(complex(v) for v in values))

    def to_text(self) -> str:
        return ",".join(format_complex(z) for z in self.lambdas)

    def __str__(self) -> str:
        return self.to_text()


def _trim(coeffs: Iterable[complex]) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class ExpPoly:
    """``sum over (lam, coeffs) of (sum_s coeffs[s] x**s) * exp(lam x)``.

    ``terms`` is a tuple of ``(lam, coeffs)`` pairs with distinct ``lam``;
    it is kept in normalized form (trailing exact zeros trimmed, empty
    terms dropped), so the zero function has no terms.
    """

    terms: tuple[tuple[complex, tuple[complex, ...]], ...] = ()

    def __post_init__(self):
        merged: dict[complex, list[complex]] = {}
        for lam, coeffs in self.terms:
            lam = complex(lam)
            acc = merged.setdefault(lam, [])
            for s, c in enumerate(coeffs):
                if s < len(acc):
                    acc[s] += complex(c)
                else:
                    acc.append(complex(c))
        norm = []
        for lam, acc in merged.items():
            cs = _trim(acc)
            if cs:
                norm.append((lam, cs))
        object.__setattr__(self, "terms", tuple(norm))

    # construction -------------------------------------------------------
    @classmethod
    def from_dict(cls, mapping: Mapping[complex, Sequence[complex]]) -> "ExpPoly":
        return cls(tuple((lam, tuple(cs)) for lam, cs in mapping.items()))

    @classmethod
    def exp(cls, lam: complex, coeff: complex = 1.0) -> "ExpPoly":
        return cls(((lam, (coeff,)),))

    @classmethod
    def poly(cls, coeffs: Sequence[complex]) -> "ExpPoly":
        """A plain polynomial (eigenvalue 0)."""
        return cls(((0j, tuple(coeffs)),))

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls(())

    # views ----------------------------------------------------------------
    def as_dict(self) -> dict[complex, tuple[complex, ...]]:
        return dict(self.terms)

    def coeffs(self, lam: complex) -> tuple[complex, ...]:
        return self.as_dict().get(complex(lam), ())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for _, cs in self.terms for c in cs), default=0.0)

    def belongs_to(self, system: EigenSystem) -> bool:
        """Membership in ``E_Lambda``: each key occurs in Lambda often enough."""
        return all(len(cs) <= system.multiplicity(lam) for lam, cs in self.terms)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return ExpPoly(self.terms + other.terms)

    def __neg__(self) -> "ExpPoly":
        return self.scale(-1.0)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c: complex) -> "ExpPoly":
        c = complex(c)
        return ExpPoly(tuple((lam, tuple(c * v for v in cs)) for lam, cs in self.terms))

    def __mul__(self, c):
        if isinstance(c, ExpPoly):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __call__(self, x):
        return eval_exppoly(self, x)

    def real_part_max_imag(self, xs) -> float:
        vals = np.asarray(eval_exppoly(self, xs))
        return float(np.max(np.abs(vals.imag))) if vals.size else 0.0


def _horner(coeffs: Sequence[complex], x):
    acc = np.zeros_like(x, dtype=complex)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def eval_exppoly(f: ExpPoly, x):
    """Evaluate ``f`` at a real scalar or array ``x`` (Horner per polynomial factor)."""
    xa = np.asarray(x, dtype=float)
    total = np.zeros(xa.shape, dtype=complex)
    for lam, cs in f.terms:
        total = total + _horner(cs, xa) * np.exp(lam * xa)
    if np.ndim(x) == 0:
        return complex(total)
    return total


def eval_abs_bound(f: ExpPoly, x):
    """``sum |c_s| |x|**s |exp(lam x)|``: the magnitude that rounding errors scale with."""
    xa = np.abs(np.asarray(x, dtype=float))
    xr = np.asarray(x, dtype=float)
    total = np.zeros(xa.shape, dtype=float)
    for lam, cs in f.terms:
        acc = np.zeros(xa.shape, dtype=float)
        for c in reversed(cs):
            acc = acc * xa + abs(c)
        total = total + acc * np.exp(lam.real * xr)
    return float(total) if np.ndim(x) == 0 else total


def differentiate(f: ExpPoly) -> ExpPoly:
    """Exact derivative: ``d/dx[x^s e^{lam x}] = s x^{s-1} e^{lam x} + lam x^s e^{lam x}``."""
    out = []
    for lam, cs in f.terms:
        m = len(cs)
        new = [lam * cs[s] + ((s + 1) * cs[s + 1] if s + 1 < m else 0) for s in range(m)]
        out.append((lam, tuple(new)))
    return ExpPoly(tuple(out))


def nth_derivative(f: ExpPoly, k: int) -> ExpPoly:
    for _ in range(k):
        f = differentiate(f)
    return f


def derivatives_at(f: ExpPoly, x: float, kmax: int) -> np.ndarray:
    """``[f(x), f'(x), ..., f^(kmax)(x)]`` by symbolic differentiation."""
    out = np.empty(kmax + 1, dtype=complex)
    g = f
    for k in range(kmax + 1):
        out[k] = eval_exppoly(g, x)
        if k < kmax:
            g = differentiate(g)
    return out


def apply_shift_op(f: ExpPoly, mu: complex) -> ExpPoly:
    """``(d/dx - mu) f``."""
    return differentiate(f) - f.scale(mu)


def mul_by_x(f: ExpPoly) -> ExpPoly:
    return ExpPoly(tuple((lam, (0j,) + cs) for lam, cs in f.terms))


def mul_by_exp(f: ExpPoly, c: complex) -> ExpPoly:
    """``exp(c x) * f(x)``: every eigenvalue moves by ``c``."""
    c = complex(c)
    return ExpPoly(tuple((lam + c, cs) for lam, cs in f.terms))


def shift_argument(f: ExpPoly, a: float) -> ExpPoly:
    """``x -> f(x - a)`` re-expanded in the canonical basis."""
    if a == 0:
        return f
    out = []
    for lam, cs in f.terms:
        new = [0j] * len(cs)
        for s, c in enumerate(cs):
            for r in range(s + 1):
                new[r] += c * math.comb(s, r) * (-a) ** (s - r)
        factor = np.exp(-lam * a)
        out.append((lam, tuple(factor * v for v in new)))
    return ExpPoly(tuple(out))


def scale_argument(f: ExpPoly, c: complex) -> ExpPoly:
    """``x -> f(c x)``: eigenvalue ``lam`` becomes ``c lam``, ``x^s`` picks up ``c^s``."""
    c = complex(c)
    return ExpPoly(tuple((c * lam, tuple(v * c**s for s, v in enumerate(cs))) for lam, cs in f.terms))


def vanishing_order(f: ExpPoly, point: float, max_order: int, tol: float = 1e-8) -> int:
    """Smallest ``k <= max_order`` with ``|f^(k)(point)| > tol * scale``.

    ``scale`` is the largest ``|f^(j)(point)|`` for ``j <= max_order``,
    floored at 1. Returns ``max_order + 1`` if every tested derivative vanishes.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    ders = np.abs(derivatives_at(f, point, max_order))
    scale = max(1.0, float(ders.max()))
    for k, v in enumerate(ders):
        if v > tol * scale:
            return k
    return max_order + 1


def linear_combination(coeffs: Sequence[complex], funcs: Sequence[ExpPoly]) -> ExpPoly:
    terms = []
    for c, f in zip(coeffs, funcs):
        c = complex(c)
        terms.extend((lam, tuple(c * v for v in cs)) for lam, cs in f.terms)
    return ExpPoly(tuple(terms))


def coeff_distance(f: ExpPoly, g: ExpPoly) -> float:
    """Largest coefficient discrepancy relative to ``max(1, largest coefficient)``."""
    diff = f - g
    scale = max(1.0, f.max_abs_coeff(), g.max_abs_coeff())
    return diff.max_abs_coeff() / scale

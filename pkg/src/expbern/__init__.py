"""Exponential polynomial spaces: fundamental functions, Bernstein-like bases and operators."""
from .bernbasis import (
    BernsteinBasis,
    Interval,
    build_basis,
    build_basis_linsolve,
    build_basis_recursive,
    check_basis,
    hankel,
    hankel_dets,
    is_chebyshev_pair,
    recursion_s5,
    verify_shape,
    zero_set_scan,
)
from .bernop import (
    BernsteinOperator,
    apply,
    build_operator,
    convergence_diag,
    d_coeffs,
    derivative_formula_residual,
    operator_convergence_experiment,
    prop_abl_residual,
)
from .errors import ExpBernError
from .expspace import EigenSystem, ExpPoly, eval_exppoly, parse_lambdas
from .fundamental import phi, phi_taylor, taylor_data
from .plusminus import even_ratio, genfun, p_poly, p_poly_exact

__all__ = [
    "BernsteinBasis",
    "BernsteinOperator",
    "EigenSystem",
    "ExpBernError",
    "ExpPoly",
    "Interval",
    "apply",
    "build_basis",
    "build_basis_linsolve",
    "build_basis_recursive",
    "build_operator",
    "check_basis",
    "convergence_diag",
    "d_coeffs",
    "derivative_formula_residual",
    "eval_exppoly",
    "even_ratio",
    "genfun",
    "hankel",
    "hankel_dets",
    "is_chebyshev_pair",
    "operator_convergence_experiment",
    "p_poly",
    "p_poly_exact",
    "parse_lambdas",
    "phi",
    "phi_taylor",
    "prop_abl_residual",
    "recursion_s5",
    "taylor_data",
    "verify_shape",
    "zero_set_scan",
]

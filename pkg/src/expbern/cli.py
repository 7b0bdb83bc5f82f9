"""Command-line front end: ``expbern <command> [options]``.

Every command builds a table (CSV on stdout by default) plus a list of
checks; with ``--format json`` the whole report is emitted as one object
``{command, system, interval, tolerances, results, violations}``. Exit status
is 0 when every asserted check passed, 1 when one failed or the computation
raised, and 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bernbasis, bernop, fundamental, plusminus
from .errors import ExpBernError, ParseError
from .expspace import EigenSystem, derivatives_at, eval_exppoly, format_complex

DEFAULT_TOL = 1e-8


def parse_grid(text: str) -> np.ndarray:
    """``"start:stop:step"`` -> points from start to stop inclusive (within half a step)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"grid must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad number in grid {text!r}") from None
    if not step > 0 or not math.isfinite(start + stop + step):
        raise ParseError("grid step must be positive and finite")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    if count < 2:
        raise ParseError(f"grid {text!r} has fewer than two points")
    return start + step * np.arange(count)


def parse_int_range(text: str) -> list[int]:
    """``"4:12"`` -> ``[4, ..., 12]``; a single integer is a one-element range."""
    try:
        if ":" in text:
            lo, hi = (int(p) for p in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise ParseError(f"bad integer range {text!r}") from None


def parse_values(text: str) -> list[complex]:
    from .expspace import parse_lambdas

    return list(parse_lambdas(text))


def fmt(v) -> str:
    """17 significant digits for floats; integers and strings as they are."""
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class Check:
    name: str
    value: object
    tol: float | None
    ok: bool
    asserted: bool = True


@dataclass
class Report:
    command: str
    system: str | None = None
    interval: tuple[float, float] | None = None
    tolerances: dict = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name, value, ok, tol=None, asserted=True):
        self.checks.append(Check(name, value, tol, bool(ok), asserted))

    def add_complex(self, row: list, z) -> None:
        z = complex(z)
        row.extend([z.real, z.imag])

    @property
    def violations(self) -> list[str]:
        return [f"{c.name}: {c.value}" for c in self.checks if c.asserted and not c.ok]

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "system": self.system,
            "interval": list(self.interval) if self.interval else None,
            "tolerances": self.tolerances,
            "results": {
                "columns": self.columns,
                "rows": _jsonable(self.rows),
                "checks": [_jsonable(c.__dict__) for c in self.checks],
                "notes": self.notes,
            },
            "violations": self.violations,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def _system(args) -> EigenSystem:
    if not args.lambdas:
        raise ParseError("--lambdas is required")
    return EigenSystem.parse(args.lambdas)


def cmd_phi(args, rep: Report):
    system = _system(args)
    rep.system = system.to_text()
    f = fundamental.phi(system)
    rep.columns = ["x", "re", "im"]
    for x in parse_grid(args.grid):
        row = [float(x)]
        rep.add_complex(row, eval_exppoly(f, float(x)))
        rep.rows.append(row)
    rep.check("wronskian residual", fundamental.wronskian_residual(system, f), True, asserted=False)


def cmd_taylor(args, rep: Report):
    system = _system(args)
    rep.system = system.to_text()
    rep.columns = ["k", "re", "im"]
    symbolic = derivatives_at(fundamental.phi(system), 0.0, args.K)
    worst = 0.0
    for k in range(args.K + 1):
        v = fundamental.phi_taylor(system, k)
        row = [k]
        rep.add_complex(row, v)
        rep.rows.append(row)
        worst = max(worst, abs(v - symbolic[k]) / max(1.0, abs(v)))
    rep.check("taylor vs symbolic derivatives", worst, worst < args.tol, args.tol)


def cmd_pfam(args, rep: Report):
    rep.columns = ["s", "j", "numerator", "denominator", "value"]
    for s in range(args.s_max + 1):
        for j, c in enumerate(plusminus.p_poly_exact(s, args.alpha)):
            c = Fraction(c)
            rep.rows.append([s, j, c.numerator, c.denominator, float(c)])
    xs = parse_grid(args.grid or "0:5:0.05")
    if args.alpha == 0:
        for s in range(1, args.s_max + 1):
            rep.check(f"P recurrence s={s} (exact)", plusminus.p_recurrence_exact(s), plusminus.p_recurrence_exact(s))
            r = plusminus.p_recurrence_residual(s, xs)
            rep.check(f"P recurrence s={s}", r, r < args.tol, args.tol)
            r = plusminus.p_derivative_residual(s, xs)
            rep.check(f"P derivative s={s}", r, r < args.tol, args.tol)


def cmd_genfun(args, rep: Report):
    rep.columns = ["kind", "x", "y_re", "y_im", "closed_re", "closed_im", "truncated_re", "truncated_im", "abs_diff"]
    kinds = ["p_alpha", "odd", "full"] if args.kind == "all" else [args.kind]
    xs = [v.real for v in parse_values(args.x)]
    ys = parse_values(args.y)
    for kind in kinds:
        for x in xs:
            for y in ys:
                if kind == "p_alpha" and abs(y) >= 1:
                    continue
                closed, trunc = plusminus.genfun(kind, x, y, args.N, args.alpha)
                row = [kind, x]
                rep.add_complex(row, y)
                rep.add_complex(row, closed)
                rep.add_complex(row, trunc)
                diff = abs(closed - trunc)
                row.append(diff)
                rep.rows.append(row)
                rep.check(f"{kind} x={fmt(x)} y={format_complex(y)}", diff, diff < args.tol, args.tol)


def cmd_basis(args, rep: Report):
    system = _system(args)
    a, b = args.a, args.b
    rep.system, rep.interval = system.to_text(), (a, b)
    methods = ["recursive", "linsolve"] if args.method == "both" else [args.method]
    bases = {m: bernbasis.build_basis(system, a, b, m) for m in methods}
    basis = bases[methods[0]]
    xs = parse_grid(args.grid) if args.grid else np.linspace(a, b, 11)
    vals = basis.evaluate_exact(xs)
    real = system.is_conjugation_closed()
    rep.columns = ["x"]
    for k in range(basis.n + 1):
        rep.columns += [f"p{k}"] if real else [f"p{k}_re", f"p{k}_im"]
    for j, x in enumerate(xs):
        row = [float(x)]
        for k in range(basis.n + 1):
            if real:
                row.append(vals[k, j].real)
            else:
                rep.add_complex(row, vals[k, j])
        rep.rows.append(row)
    for m, B in bases.items():
        chk = bernbasis.check_basis(B)
        rep.check(f"{m}: zero orders", {"a": chk.orders_at_a, "b": chk.orders_at_b}, chk.zero_orders_ok)
        rep.check(f"{m}: normalization error", chk.max_norm_error, chk.max_norm_error < 1e-10, 1e-10)
    if len(bases) == 2:
        d = bernbasis.basis_discrepancy(bases["recursive"], bases["linsolve"])
        ok = d < args.tol
        rep.check("constructions agree" if ok else "constructions disagree", d, ok, args.tol)
    if args.shape:
        shape = bernbasis.verify_shape(basis)
        rep.check("interval Chebyshev proxy", shape.interval_chebyshev_proxy, True, asserted=False)
        rep.check("shape", shape.violations or "ok", not shape.violations)
        rep.notes.extend(shape.findings)


def cmd_cheb(args, rep: Report):
    system = _system(args)
    a, b = args.a, args.b
    rep.system, rep.interval = system.to_text(), (a, b)
    ok, dets = bernbasis.is_chebyshev_pair(system, a, b)
    rep.check("Chebyshev pair", ok, True, asserted=False)
    rep.notes.append("det A_{n,k}(b-a): " + ", ".join(format_complex(complex(d)) for d in dets))
    rep.columns = ["b", "k", "kind"]
    if args.scan:
        lo, hi, step = (float(v) for v in args.scan.split(":"))
        for f in bernbasis.zero_set_scan_detailed(system, a, lo, hi, step):
            rep.rows.append([f.b, f.k, f.kind])


def cmd_operator(args, rep: Report):
    system = _system(args)
    a, b = args.a, args.b
    rep.system, rep.interval = system.to_text(), (a, b)
    op = bernop.build_operator(system, a, b)
    rep.columns = ["k", "knot", "weight"]
    for k, (t, w) in enumerate(zip(op.knots, op.weights)):
        rep.rows.append([k, float(t), float(w)])
    bound = args.tol_repro * math.exp(max(abs(l.real) for l in system.lambdas) * max(abs(a), abs(b)))
    r0, r1 = bernop.reproduction_residual(op)
    rep.check("reproduction of exp(lam0 x)", r0, r0 < bound, bound)
    rep.check("reproduction of exp(lam1 x)", r1, r1 < bound, bound)
    if system.lambdas[0] == 0:
        r = bernop.weight_recursion_residual(op)
        rep.check("weight recursion", r, r < args.tol, args.tol)


def cmd_converge(args, rep: Report):
    a, b = args.a, args.b
    rep.interval = (a, b)
    with warnings.catch_warnings():
        # large pm systems exceed the double-precision degree limit; the
        # quantities here use the extended-precision path
        warnings.simplefilter("ignore", RuntimeWarning)
        if args.experiment:
            rep.columns = ["s", "function", "sup_error"]
            for r in bernop.operator_convergence_experiment(range(1, args.s_max + 1), a, b):
                rep.rows.append([r.s, r.function, r.sup_error])
                if r.function.startswith("exp"):
                    rep.check(f"s={r.s} reproduces {r.function}", r.sup_error, r.sup_error < 1e-9, 1e-9)
            return
        if args.family == "pm":
            diag = bernop.convergence_diag("pm", range(1, args.s_max + 1), a, b)
        else:
            system = _system(args)
            rep.system = system.to_text()
            systems = []
            for n in parse_int_range(args.n_range):
                lams = list(system.lambdas)[: n + 1]
                lams += [complex(args.pad)] * (n + 1 - len(lams))
                systems.append(EigenSystem(tuple(lams)))
            diag = bernop.convergence_diag("custom", systems, a, b)
    rep.columns = ["n", "s", "k", "a_nk", "b_nk", "knot_gap", "log_ratio", "even_ratio"]
    for r in diag.rows:
        rep.rows.append([r.n, r.s, r.k, r.a_nk, r.b_nk, r.knot_gap, r.log_ratio, r.even_ratio])
    if args.family == "pm":
        top = diag.top_a()
        worst = max(abs(v - plusminus.even_ratio((n - 1) // 2, b - a)) for n, v in top)
        rep.check("a(n,n) equals the even ratio", worst, worst < 1e-10, 1e-10)
        vals = [v for _, v in top]
        mono = all(y < x for x, y in zip(vals, vals[1:])) and all(v > 1 for v in vals)
        rep.check("a(n,n) decreases toward 1", mono, mono, asserted=False)


COMMANDS = {
    "phi": cmd_phi,
    "taylor": cmd_taylor,
    "pfam": cmd_pfam,
    "genfun": cmd_genfun,
    "basis": cmd_basis,
    "cheb": cmd_cheb,
    "operator": cmd_operator,
    "converge": cmd_converge,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambdas", help='eigenvalues, e.g. "1,-1" or "7i,-7i,1i,-1i"')
    common.add_argument("--a", type=float, default=0.0)
    common.add_argument("--b", type=float, default=1.0)
    common.add_argument("--grid", help="start:stop:step, endpoints inclusive")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = _Parser(prog="expbern", description="Fundamental functions, Bernstein bases and operators of exponential spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("phi", parents=[common], help="evaluate the fundamental function on a grid")
    s = sub.add_parser("taylor", parents=[common], help="Taylor data at 0")
    s.add_argument("--K", type=int, default=10)
    s = sub.add_parser("pfam", parents=[common], help="P polynomial tables and their recursions")
    s.add_argument("--s-max", type=int, default=4)
    s.add_argument("--alpha", type=int, default=0)
    s = sub.add_parser("genfun", parents=[common], help="generating functions, closed vs truncated")
    s.add_argument("--kind", choices=["p_alpha", "odd", "full", "all"], default="all")
    s.add_argument("--x", default="0.5,1,2")
    s.add_argument("--y", default="0.2,0.5,0.5i")
    s.add_argument("--N", type=int, default=40)
    s.add_argument("--alpha", type=int, default=0)
    s = sub.add_parser("basis", parents=[common], help="Bernstein basis and its verification")
    s.add_argument("--method", choices=["recursive", "linsolve", "both"], default="recursive")
    s.add_argument("--shape", action="store_true", help="also sample positivity and unimodality")
    s = sub.add_parser("cheb", parents=[common], help="Chebyshev pair test and zero-set scan")
    s.add_argument("--scan", help="lo:hi:step for the right end point b")
    s = sub.add_parser("operator", parents=[common], help="knots, weights and reproduction residuals")
    s.add_argument("--tol-repro", type=float, default=1e-9)
    s = sub.add_parser("converge", parents=[common], help="convergence diagnostics and experiment")
    s.add_argument("--family", choices=["pm", "custom"], default="pm")
    s.add_argument("--s-max", type=int, default=10)
    s.add_argument("--n-range", default="4:12", help="n values for the custom family")
    s.add_argument("--pad", type=float, default=0.0, help="eigenvalue appended to reach each n")
    s.add_argument("--experiment", action="store_true", help="sup-norm errors of B f - f instead")
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    fmt_json = "--format=json" in argv or any(
        u == "--format" and v == "json" for u, v in zip(argv, argv[1:])
    )
    try:
        args = build_parser().parse_args(argv)
        if args.tol <= 0:
            raise ParseError("--tol must be positive")
        if args.command == "phi" and not args.grid:
            raise ParseError("phi needs --grid")
        rep = Report(args.command, tolerances={"tol": args.tol})
        COMMANDS[args.command](args, rep)
    except ParseError as exc:
        return _fail(fmt_json, "parse", str(exc), 2, argv)
    except (ExpBernError, ValueError, ZeroDivisionError) as exc:
        return _fail(fmt_json, type(exc).__name__, str(exc), 1, argv)
    if args.format == "json":
        _emit(json.dumps(rep.to_json(), indent=2) + "\n", args.output)
    else:
        _emit(rep.to_csv(), args.output)
        for c in rep.checks:
            mark = "ok" if c.ok else ("FAIL" if c.asserted else "no")
            print(f"# {mark} {c.name}: {c.value}", file=sys.stderr)
        for note in rep.notes:
            print(f"# {note}", file=sys.stderr)
    return 1 if rep.violations else 0


def _fail(as_json: bool, kind: str, message: str, status: int, argv) -> int:
    if as_json:
        err = {"command": argv[0] if argv else None, "error": {"kind": kind, "message": message}, "violations": [message]}
        sys.stdout.write(json.dumps(err, indent=2) + "\n")
    else:
        print(f"error ({kind}): {message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())

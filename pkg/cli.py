"""
Command-line front end
Every operation behind one argparse parser; result documents go to stdout, diagnostics to stderr
"""

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy as sym

import identities
from closed_images import BUILTIN_SOURCES, Rule, builtin_source, table_rows
from diffeq_solver import DifferenceEquation, solve
from errors import LaplaceTypeError, UsageError
from laguerre_inverse import coefficients_from_image, reconstruct
from nabla_calculus import NablaRequest, composed_fractional_image, derivative_image
from rational_residue import S, RationalFn, image_rule, residue_inverse
from serialization import records_frame, write_document
from settings import get_settings
from special_functions import (
    HurwitzParams,
    hurwitz_bernoulli_representation,
    hurwitz_em_with_error,
    hurwitz_integral,
    hurwitz_integral_shifted,
    hurwitz_series,
    series_tail_bound,
)
from suite import run_suite
from transform_core import forward_transform, gamma_transform, sequence_from_values
from worked_examples import CASES, verify_mapped_equation

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_USAGE = 2
EXIT_VERIFICATION = 3

N_SYMBOL = sym.Symbol('n')


@dataclass(frozen=True)
class CliConfig:
    """Parsed command plus the settings it runs under"""

    command: str
    args: argparse.Namespace
    fmt: str
    tol: float
    jobs: int
    color: bool


def _rationals(text):
    try:
        return [Fraction(part.strip()) for part in text.split(',') if part.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from e


def _number(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"expected a number, got {text!r}") from e


def _fn_params(args):
    params = {k: _number(getattr(args, k)) for k in ('a', 'b', 'c') if getattr(args, k) is not None}
    if args.rule is not None:
        params['rule'] = args.rule
    return params


# ---------------------------------------------------------------------------
# Handlers: each returns (document, frame or None, verification passed)
# ---------------------------------------------------------------------------

def _transform(cfg):
    args = cfg.args
    f, image = builtin_source(args.fn, _fn_params(args))
    s = float(_number(args.s))
    if args.alpha is not None:
        alpha = float(_number(args.alpha))
        value, err = gamma_transform(f, s, alpha, cfg.tol)
        return {'function': f.label, 's': s, 'alpha': alpha, 'value': value, 'error': err}, None, True
    seq = forward_transform(f, s, args.n, cfg.tol, cfg.jobs)
    doc = {'function': f.label, 'image': seq.to_json()}
    if image is not None:
        closed = image.sequence(s, args.n)
        doc['closed_form'] = [float(v) for v in closed.values]
        doc['max_deviation'] = float(np.max(np.abs(seq.as_array() - closed.as_array())))
    return doc, seq.to_frame(), True


def _image_values(args):
    if args.values is not None:
        return _rationals(args.values)
    if args.fn is None:
        raise UsageError("give the image either as --values or through --fn")
    _, image = builtin_source(args.fn, _fn_params(args))
    if image is None:
        raise UsageError(f"{args.fn} has no closed-form image; pass --values")
    return list(image.sequence(float(_number(args.s)), args.n).values)


def _invert_laguerre(cfg):
    args = cfg.args
    s = _number(args.s)
    phi = sequence_from_values(s, _image_values(args), label='phi')
    coeffs = coefficients_from_image(phi)
    doc = {'coefficients': coeffs.to_json()}
    if args.x is not None:
        xs = [float(x) for x in _rationals(args.x)]
        doc['reconstruction'] = [{'x': x, 'f': reconstruct(coeffs, x)} for x in xs]
    return doc, coeffs.to_frame(), True


def _residue_rule(args):
    if args.expr is not None:
        try:
            expr = sym.sympify(args.expr, locals={'s': S, 'n': N_SYMBOL})
        except (sym.SympifyError, SyntaxError) as e:
            raise UsageError(f"cannot parse --expr {args.expr!r}") from e
        return lambda n: RationalFn.from_sympy(expr.subs(N_SYMBOL, n))
    if args.fn is None:
        raise UsageError("give the image rule as --expr or through --fn")
    _, image = builtin_source(args.fn, _fn_params(args))
    if image is None:
        raise UsageError(f"{args.fn} has no closed-form image")
    return image_rule(image)


def _invert_residue(cfg):
    f, report = residue_inverse(_residue_rule(cfg.args), cfg.args.n)
    return {'function': f.to_json(), 'expression': str(f.as_expr()), 'report': report}, None, True


def _nabla(cfg):
    args = cfg.args
    s = _number(args.s)
    values = _image_values(args)
    init = _rationals(args.init) if args.init else []
    indices = range(len(values)) if args.index is None else [args.index]
    if args.alpha is not None:
        alpha = float(_number(args.alpha))
        floats = [float(v) for v in values]
        rows = [{'n': n, 'value': composed_fractional_image(floats, alpha, float(s), n, [float(v) for v in init])}
                for n in indices]
        return {'alpha': alpha, 's': float(s), 'values': rows}, records_frame(rows), True
    req = NablaRequest(values, args.p, s, tuple(init))
    rows = [{'n': n, 'value': derivative_image(req, n)} for n in indices]
    return {'p': args.p, 's': s, 'values': rows}, records_frame(rows), True


def _solve_diffeq(cfg):
    args = cfg.args
    rhs = _rationals(args.rhs) if args.rhs else None
    if rhs is not None and len(rhs) < args.check + 1:
        raise UsageError(f"--rhs needs at least {args.check + 1} terms for --check {args.check}")
    eq = DifferenceEquation(tuple(_rationals(args.coeffs)), tuple(_rationals(args.init or '')), rhs)
    solution = solve(eq, N_check=args.check)
    frame = records_frame([{'n': n, 'f_n': float(solution.evaluate(n))} for n in range(args.check + 1)])
    return {'solution': solution.to_json()}, frame, True


def _verify_mapped(cfg):
    report = verify_mapped_equation(case_id=cfg.args.case)
    return report, records_frame(report['checks']), report['all_expected_passed']


def _zeta(cfg):
    args = cfg.args
    params = HurwitzParams(float(_number(args.s)), float(_number(args.a)))
    method = args.method
    if method == 'bernoulli':
        value, report = hurwitz_bernoulli_representation(params.s, _number(args.a), args.terms or 12,
                                                           args.convention)
        frame = records_frame([{'K': k, 'partial_sum': p, 'discrepancy': d}
                               for k, (p, d) in enumerate(zip(report['partial_sums'], report['discrepancies']))])
        doc = {'value': value, 'method': method, 'error_estimate': abs(report['discrepancies'][-1]),
               'partial_sums': report['partial_sums'], 'report': report}
        return doc, frame, True
    if method == 'em':
        value, err = hurwitz_em_with_error(params)
    elif method == 'series':
        terms = args.terms or 2000
        value, err = hurwitz_series(params, terms), series_tail_bound(params, terms)
    elif method == 'integral':
        value, err = hurwitz_integral(params, cfg.tol), cfg.tol
    else:
        value, err = hurwitz_integral_shifted(params, cfg.tol), cfg.tol
    return {'s': params.s, 'a': params.a, 'value': value, 'method': method, 'error_estimate': err}, None, True


def _verify_identities(cfg):
    args = cfg.args
    sweep = identities.SWEEPS[args.which]
    if args.which == 'laguerre':
        report = sweep(args.max_m or 40, args.max_n or 40, jobs=cfg.jobs)
    elif args.which == 'legendre-table':
        report = sweep(args.max_n or 40, cfg.jobs)
    elif args.max_m is not None:
        report = sweep(args.max_m, cfg.jobs)
    else:
        report = sweep(jobs=cfg.jobs)
    return report, None, report['all_passed']


def _table(cfg):
    rows = table_rows()
    return {'rules': rows}, records_frame(rows), True


def _suite(cfg):
    def progress_callback(stage, progress, message, total=None):
        if stage in ('done', 'fail'):
            _status(stage == 'done', message, cfg.color)

    frame = run_suite(cfg.args.profile, cfg.jobs, progress_callback)
    passed = bool(frame['passed'].all())
    doc = {'profile': cfg.args.profile, 'all_passed': passed, 'checks': frame.to_dict(orient='records')}
    return doc, frame, passed


HANDLERS = {
    'transform': _transform,
    'invert-laguerre': _invert_laguerre,
    'invert-residue': _invert_residue,
    'nabla': _nabla,
    'solve-diffeq': _solve_diffeq,
    'verify-mapped': _verify_mapped,
    'zeta': _zeta,
    'verify-identities': _verify_identities,
    'table': _table,
    'suite': _suite,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_fn_flags(p, required=False):
    p.add_argument('--fn', choices=BUILTIN_SOURCES, required=required, help='built-in function')
    p.add_argument('--a', help='first parameter of the function')
    p.add_argument('--b', help='second parameter (power-exp)')
    p.add_argument('--c', help='constant value (const)')
    p.add_argument('--rule', choices=[r.value for r in Rule], help='table row for custom-table-row')


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, help='quadrature tolerance')
    common.add_argument('--format', dest='fmt', choices=('json', 'csv', 'text'), default='json')
    common.add_argument('--jobs', type=int, help='worker threads')

    parser = argparse.ArgumentParser(prog='laplace-type', description='Laplace-type transform toolkit')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('transform', parents=[common], help='image sequence of a built-in function')
    _add_fn_flags(p, required=True)
    p.add_argument('--s', required=True)
    p.add_argument('--n', type=int, default=10)
    p.add_argument('--alpha', help='general order: (1/Gamma(alpha)) int e^(-st) t^(alpha-1) f(t) dt')

    p = sub.add_parser('invert-laguerre', parents=[common], help='Fourier-Laguerre coefficients from an image')
    _add_fn_flags(p)
    p.add_argument('--values', help='phi_0,...,phi_N')
    p.add_argument('--s', required=True)
    p.add_argument('--n', type=int, default=12)
    p.add_argument('--x', help='points at which to reconstruct f')

    p = sub.add_parser('invert-residue', parents=[common], help='inverse of a rational image by residues')
    _add_fn_flags(p)
    p.add_argument('--expr', help="phi_n(s) as an expression in s and n, e.g. '1/(s-2)**(n+1)'")
    p.add_argument('--n', type=int, default=0)

    p = sub.add_parser('nabla', parents=[common], help='derivative or fractional-derivative image')
    _add_fn_flags(p)
    p.add_argument('--values', help='phi_0,...,phi_N')
    p.add_argument('--s', required=True)
    p.add_argument('--n', type=int, default=10)
    p.add_argument('--p', type=int, default=1)
    p.add_argument('--init', help="f(0),f'(0),...")
    p.add_argument('--index', type=int, help='single index instead of the whole range')
    p.add_argument('--alpha', help='real order instead of --p')

    p = sub.add_parser('solve-diffeq', parents=[common], help='closed form of a linear recurrence')
    p.add_argument('--coeffs', required=True, help='a_0,a_1,...,a_p')
    p.add_argument('--init', help='f_0,...,f_{p-1}')
    p.add_argument('--rhs', help='g_0,g_1,...')
    p.add_argument('--check', type=int, default=50)

    p = sub.add_parser('verify-mapped', parents=[common], help='residuals of the worked examples')
    p.add_argument('--case', type=int, required=True, choices=sorted(CASES))

    p = sub.add_parser('zeta', parents=[common], help='Hurwitz zeta function')
    p.add_argument('--s', required=True)
    p.add_argument('--a', default='1')
    p.add_argument('--method', choices=('em', 'series', 'integral', 'integral-shifted', 'bernoulli'), default='em')
    p.add_argument('--terms', type=int, help='series terms (default 2000) or Bernoulli truncation K (default 12)')
    p.add_argument('--convention', choices=('printed', 'derived'), default='printed')

    p = sub.add_parser('verify-identities', parents=[common], help='exact identity sweeps')
    p.add_argument('--which', choices=sorted(identities.SWEEPS), required=True)
    p.add_argument('--max-m', type=int)
    p.add_argument('--max-n', type=int)

    sub.add_parser('table', parents=[common], help='print the table of images')

    p = sub.add_parser('suite', parents=[common], help='run the verification suite')
    p.add_argument('--profile', choices=('quick', 'full'), default='quick')
    return parser


def _status(ok, message, color):
    tag = '[OK]' if ok else '[FAIL]'
    if color:
        tag = f"\033[32m{tag}\033[0m" if ok else f"\033[31m{tag}\033[0m"
    print(f"{tag} {message}", file=sys.stderr)


def _banner(title):
    print("=" * 80, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 80, file=sys.stderr)


def execute_command(cfg):
    """Dispatch one command; failures come back as an error document and an exit code"""
    try:
        handler = HANDLERS.get(cfg.command)
        if handler is None:
            raise UsageError(f"unknown command: {cfg.command}")
        doc, frame, passed = handler(cfg)
        return write_document(doc, cfg.fmt, frame), EXIT_OK if passed else EXIT_VERIFICATION
    except UsageError as e:
        return write_document({'error': str(e)}, 'json'), EXIT_USAGE
    except LaplaceTypeError as e:
        return write_document({'error': str(e), 'type': type(e).__name__}, 'json'), EXIT_COMPUTATION


def run(argv=None):
    """Parse argv, run the command and return the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        settings = get_settings().with_overrides(tol=args.tol, jobs=args.jobs)
    except LaplaceTypeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    cfg = CliConfig(args.command, args, args.fmt, settings.tol, settings.jobs, settings.color)

    if cfg.command == 'suite':
        _banner(f"VERIFICATION SUITE ({args.profile})")
    output, code = execute_command(cfg)
    print(output)
    if code == EXIT_VERIFICATION:
        _status(False, f"{cfg.command}: verification failed", cfg.color)
    elif code != EXIT_OK:
        _status(False, f"{cfg.command}: exit code {code}", cfg.color)
    return code


if __name__ == '__main__':
    sys.exit(run())

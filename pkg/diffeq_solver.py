"""
Difference-equation solver
Linear constant-coefficient recurrences solved through the coefficient polynomial Q_p, the equivalent
differential equation and the s = 1 images of its exponential-polynomial solutions
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import sympy as sym

from errors import DegenerateRoot, InvalidParams, LengthMismatch, SingularFit
from nabla_calculus import nabla_power
from rational_residue import S, ExpPolyFunction, RationalFn, poles
from transform_core import exact_sum

NSYM = sym.Symbol('n', integer=True, nonnegative=True)

# precision for evaluating solutions with surd or numeric bases
EVAL_DPS = 50


def _rational(x):
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12)
    return Fraction(x)


@dataclass(frozen=True)
class DifferenceEquation:
    """a_0 f_n + a_1 f_{n-1} + ... + a_p f_{n-p} = g_n with initial terms f_0 .. f_{p-1}"""

    coeffs: tuple
    initial: tuple = ()
    rhs: object = None

    def __post_init__(self):
        coeffs = tuple(_rational(a) for a in self.coeffs)
        if not coeffs or coeffs[0] == 0 or coeffs[-1] == 0:
            raise InvalidParams("a_0 and a_p must be non-zero")
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'initial', tuple(_rational(f) for f in self.initial))

    @property
    def order(self):
        return len(self.coeffs) - 1

    def g(self, n):
        """Right-hand side g_n (zero when homogeneous)"""
        if self.rhs is None:
            return 0
        if callable(self.rhs):
            return self.rhs(n)
        if n >= len(self.rhs):
            raise LengthMismatch(f"right-hand side has {len(self.rhs)} terms, g_{n} requested")
        return self.rhs[n]

    def lhs(self, f, n):
        """sum_k a_k f_{n-k}"""
        return exact_sum(a * f[n - k] for k, a in enumerate(self.coeffs))

    def iterate(self, N):
        """f_0 .. f_N by forward recursion from the initial terms"""
        p = self.order
        if len(self.initial) < p:
            raise InvalidParams(f"order {p} needs {p} initial terms, got {len(self.initial)}")
        f = list(self.initial[:p])
        a0 = self.coeffs[0]
        for n in range(p, N + 1):
            f.append((self.g(n) - exact_sum(self.coeffs[k] * f[n - k] for k in range(1, p + 1))) / a0)
        return f[:N + 1]


@dataclass(frozen=True)
class OdeSpec:
    """sum_k b_k y^(k) = 0 with b_k = (-1)^k Q^(k)(1)/k!"""

    b: tuple
    Q: sym.Poly

    def characteristic(self):
        return sym.Poly(sum((sym.Rational(b.numerator, b.denominator) * S ** k for k, b in enumerate(self.b)),
                            sym.Integer(0)), S)

    def lhs(self, f, n):
        """sum_k b_k nabla^k f_n at s = 1"""
        return exact_sum(b * nabla_power(f, k, 1, n) for k, b in enumerate(self.b))


def build_Q(eq):
    """Q_p(s) = a_0 + a_1 s + ... + a_p s^p"""
    return sym.Poly(sum((sym.Rational(a.numerator, a.denominator) * S ** k for k, a in enumerate(eq.coeffs)),
                        sym.Integer(0)), S)


def ode_coefficients(Q):
    b = []
    for k in range(Q.degree() + 1):
        value = Q.diff((S, k)).eval(1) / sym.factorial(k) if k else Q.eval(1)
        value = sym.Rational(value) * (-1) ** k
        b.append(Fraction(int(value.p), int(value.q)))
    return OdeSpec(tuple(b), Q)


@dataclass
class SolutionTerm:
    """P(n) beta^n with P given by its coefficients in increasing powers of n"""

    poly: tuple
    base: sym.Expr

    def __post_init__(self):
        with mpmath.workdps(EVAL_DPS):
            self._mp_poly = [_to_mp(c) for c in self.poly]
            self._mp_base = _to_mp(self.base)

    def to_json(self):
        values = [complex(sym.N(c, 30)) for c in self.poly]
        base = complex(sym.N(self.base, 30))
        return {'poly': [[v.real, v.imag] for v in values], 'base_re': base.real, 'base_im': base.imag}


def _to_mp(expr):
    re, im = sym.N(expr, EVAL_DPS).as_real_imag()
    return mpmath.mpc(mpmath.mpf(str(re)), mpmath.mpf(str(im)))


def _is_rational(expr):
    return sym.sympify(expr).is_Rational is True


@dataclass
class ClosedFormSolution:
    """f_n = sum_i P_i(n) beta_i^n (+ a particular sequence for inhomogeneous equations)"""

    terms: list
    equation: DifferenceEquation
    residual: float = 0.0
    particular: tuple = None
    metadata: dict = field(default_factory=dict)

    @property
    def exact(self):
        return all(_is_rational(t.base) and all(_is_rational(c) for c in t.poly) for t in self.terms)

    def evaluate(self, n):
        """f_n; a Fraction when every term is rational, otherwise a float"""
        extra = 0 if self.particular is None else self.particular[n]
        if self.exact:
            total = Fraction(0)
            for t in self.terms:
                base = Fraction(int(t.base.p), int(t.base.q))
                poly = sum(Fraction(int(c.p), int(c.q)) * n ** j for j, c in enumerate(t.poly))
                total += poly * base ** n
            return total + extra
        return float(self.evaluate_mp(n))

    def evaluate_mp(self, n):
        """f_n as a real mpf at the working precision"""
        extra = 0 if self.particular is None else self.particular[n]
        with mpmath.workdps(EVAL_DPS):
            total = mpmath.mpc(0)
            for t in self.terms:
                poly = mpmath.fsum(c * n ** j for j, c in enumerate(t._mp_poly))
                total += poly * t._mp_base ** n
            if isinstance(extra, Fraction):
                extra = mpmath.mpf(extra.numerator) / extra.denominator
            return mpmath.re(total) + extra

    def sequence(self, N):
        return [self.evaluate(n) for n in range(N + 1)]

    def to_json(self):
        doc = {'terms': [t.to_json() for t in self.terms], 'residual': float(self.residual)}
        if self.metadata:
            doc['metadata'] = {k: v for k, v in self.metadata.items() if not isinstance(v, ExpPolyFunction)}
        return doc


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def characteristic_roots(ode):
    """{rho: multiplicity} of sum_k b_k rho^k"""
    return poles(RationalFn(sym.Poly(1, S), ode.characteristic()))


def direct_roots(eq):
    """{beta: multiplicity} of the recurrence's own characteristic polynomial sum_k a_k x^{p-k}"""
    p = eq.order
    char = sym.Poly(sum((sym.Rational(a.numerator, a.denominator) * S ** (p - k) for k, a in enumerate(eq.coeffs)),
                        sym.Integer(0)), S)
    return poles(RationalFn(sym.Poly(1, S), char))


def _simplify(expr):
    return expr if expr.atoms(sym.Float) else sym.radsimp(sym.simplify(expr))


def _is_one(rho):
    if rho.atoms(sym.Float):
        return abs(complex(sym.N(rho, EVAL_DPS)) - 1) < 1e-30
    return _simplify(rho - 1) == 0


def _pipeline_bases(rhos):
    """beta = 1/(1 - rho) for each characteristic root, with the map back to rho"""
    if any(_is_one(rho) for rho in rhos):
        raise DegenerateRoot("characteristic root rho = 1 puts the basis pole at s = 1")
    bases, rho_of = [], {}
    for rho, mult in rhos.items():
        beta = sym.N(1 / (1 - rho), EVAL_DPS) if rho.atoms(sym.Float) else _simplify(1 / (1 - rho))
        bases.append((beta, mult))
        rho_of[beta] = rho
    return bases, rho_of


def _basis(n, j, beta, shift):
    return sym.binomial(n + j, j) * beta ** (n + j + shift)


def _fit(bases, targets, shift):
    """Solve for one constant per (root, power) pair so the basis sequences match the targets"""
    columns = [(beta, j) for beta, mult in bases for j in range(mult)]
    numeric = any(beta.atoms(sym.Float) for beta, _ in bases)
    p = len(targets)
    if not numeric:
        M = sym.Matrix(p, p, lambda n, c: _basis(n, columns[c][1], columns[c][0], shift))
        if _simplify(M.det()) == 0:
            raise SingularFit("initial-condition system is singular")
        rhs = sym.Matrix([sym.Rational(f.numerator, f.denominator) for f in targets])
        return [_simplify(c) for c in M.LUsolve(rhs)], columns
    with mpmath.workdps(EVAL_DPS):
        M = mpmath.matrix(p, p)
        for n in range(p):
            for c, (beta, j) in enumerate(columns):
                M[n, c] = math.comb(n + j, j) * _to_mp(beta) ** (n + j + shift)
        rhs = mpmath.matrix([mpmath.mpf(f.numerator) / f.denominator for f in targets])
        if abs(mpmath.det(M)) < mpmath.mpf(10) ** (-EVAL_DPS + 10):
            raise SingularFit("initial-condition system is singular")
        solved = mpmath.lu_solve(M, rhs)
        consts = [sym.Float(mpmath.nstr(mpmath.re(c), EVAL_DPS), EVAL_DPS)
                  + sym.I * sym.Float(mpmath.nstr(mpmath.im(c), EVAL_DPS), EVAL_DPS) for c in solved]
    return consts, columns


def _terms(consts, columns, shift):
    grouped = {}
    for c, (beta, j) in zip(consts, columns):
        grouped.setdefault(beta, []).append((j, c))
    terms = []
    for beta, parts in grouped.items():
        poly = sum((c * beta ** (j + shift) * sym.expand_func(sym.binomial(NSYM + j, j)) for j, c in parts),
                   sym.Integer(0))
        coeffs = sym.Poly(sym.expand(poly), NSYM).all_coeffs()[::-1]
        terms.append(SolutionTerm(tuple(_simplify(c) for c in coeffs), beta))
    return terms


def _continuous_solution(consts, columns, rhos, ode, grid):
    """y(t) = sum c t^j e^{rho t}/j!, its Cauchy data and the residual of sum_k b_k y^(k)"""
    y = ExpPolyFunction([(c, rhos[beta], j + 1) for c, (beta, j) in zip(consts, columns)])
    derivs = [y]
    for _ in range(len(ode.b) - 1):
        derivs.append(derivs[-1].derivative())
    cauchy = [derivs[k].evaluate(0.0) for k in range(len(ode.b) - 1)]
    residual = 0.0
    for t in grid:
        value = math.fsum(float(b) * d.evaluate(t) for b, d in zip(ode.b, derivs))
        scale = max(1.0, max(abs(float(b) * d.evaluate(t)) for b, d in zip(ode.b, derivs)))
        residual = max(residual, abs(value) / scale)
    return y, cauchy, residual


def solve(eq, N_check=50):
    """Closed form of a recurrence via Q_p, b_k, characteristic roots and the s = 1 basis images"""
    p = eq.order
    if len(eq.initial) < p:
        raise InvalidParams(f"order {p} needs {p} initial terms, got {len(eq.initial)}")
    Q = build_Q(eq)
    ode = ode_coefficients(Q)
    metadata = {'Q': str(Q.as_expr()), 'b': [str(b) for b in ode.b], 'bypass': False}

    particular = None
    targets = list(eq.initial[:p])
    if eq.rhs is not None:
        Y = fundamental_solution(eq, N_check)
        g = [eq.g(n) for n in range(N_check + 1)]
        particular = tuple(particular_via_convolution(Y, g))
        targets = [_rational(f - particular[n]) for n, f in enumerate(targets)]

    if p == 0:
        terms = []
    else:
        rhos = characteristic_roots(ode)
        metadata['roots'] = [str(rho) for rho in rhos]
        try:
            bases, rho_of = _pipeline_bases(rhos)
            shift = 1
        except DegenerateRoot:
            bases, rho_of = list(direct_roots(eq).items()), None
            shift = 0
            metadata['bypass'] = True
        consts, columns = _fit(bases, targets, shift)
        terms = _terms(consts, columns, shift)
        metadata['bases'] = [str(beta) for beta, _ in bases]
        if rho_of is not None:
            y, cauchy, ode_residual = _continuous_solution(consts, columns, rho_of, ode, np.linspace(0.0, 2.0, 21))
            metadata['continuous'] = y
            metadata['cauchy_data'] = cauchy
            metadata['ode_residual'] = ode_residual

    solution = ClosedFormSolution(terms, eq, particular=particular, metadata=metadata)
    solution.residual = recurrence_residual(solution, N_check)
    return solution


def recurrence_residual(solution, N_check):
    """max |sum a_k f_{n-k} - g_n| for p <= n <= N_check, and the mismatch on the initial terms"""
    eq = solution.equation
    p = eq.order
    if solution.exact:
        f = solution.sequence(N_check)
        worst = max([abs(f[n] - f0) for n, f0 in enumerate(eq.initial[:p])]
                    + [abs(eq.lhs(f, n) - eq.g(n)) for n in range(p, N_check + 1)], default=Fraction(0))
        return worst if worst == 0 else float(worst)

    def mp(x):
        return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)

    with mpmath.workdps(EVAL_DPS):
        f = [solution.evaluate_mp(n) for n in range(N_check + 1)]
        worst = mpmath.mpf(0)
        for n, f0 in enumerate(eq.initial[:p]):
            worst = max(worst, abs(f[n] - mp(f0)))
        for n in range(p, N_check + 1):
            lhs = mpmath.fsum(mp(a) * f[n - k] for k, a in enumerate(eq.coeffs))
            worst = max(worst, abs(lhs - mp(eq.g(n))))
        return float(worst)


def fundamental_solution(eq, N):
    """Y with a_0 Y_n + ... + a_p Y_{n-p} = delta_n and Y_{<0} = 0"""
    Y = []
    for n in range(N + 1):
        acc = Fraction(1 if n == 0 else 0)
        acc -= exact_sum(eq.coeffs[k] * Y[n - k] for k in range(1, eq.order + 1) if n - k >= 0)
        Y.append(acc / eq.coeffs[0])
    return Y


def particular_via_convolution(Y, g):
    """f_n = sum_k Y_{n-k} g_k"""
    if len(Y) != len(g):
        raise LengthMismatch(f"Y has {len(Y)} terms, g has {len(g)}")
    return [exact_sum(Y[n - k] * g[k] for k in range(n + 1)) for n in range(len(g))]

"""
Rational residue inverse
Exact rational functions, partial fractions and the residue form of the inverse transform
"""

import cmath
import math
from dataclasses import dataclass

import mpmath
import sympy as sym

from closed_images import ClosedImage, Rule
from errors import ImproperRational, InvalidParams, NonCancellingPower, RootIsolationFailure

S = sym.Symbol('s')
T = sym.Symbol('t', positive=True)

# working precision for numeric poles
NUMERIC_DPS = 60


@dataclass(frozen=True)
class RationalFn:
    """num/den in s with exact coefficients, normalized: coprime and den monic"""

    num: sym.Poly
    den: sym.Poly

    def __post_init__(self):
        num, den = sym.Poly(self.num, S), sym.Poly(self.den, S)
        if den.is_zero:
            raise ImproperRational("denominator is identically zero")
        common = sym.gcd(num, den)
        if common.degree() > 0:
            num, den = sym.div(num, common)[0], sym.div(den, common)[0]
        lead = den.LC()
        object.__setattr__(self, 'num', sym.Poly(num.as_expr() / lead, S))
        object.__setattr__(self, 'den', sym.Poly(den.as_expr() / lead, S))

    @classmethod
    def from_sympy(cls, expr):
        expr = sym.sympify(expr)
        stray = expr.free_symbols - {S}
        if stray:
            raise ImproperRational(f"{expr} has symbols other than s: {', '.join(sorted(map(str, stray)))}")
        try:
            numer, denom = sym.fraction(sym.cancel(sym.together(expr)))
            return cls(sym.Poly(numer, S), sym.Poly(denom, S))
        except sym.PolynomialError as e:
            raise ImproperRational(f"not a rational function of s: {expr}") from e

    @classmethod
    def from_coeffs(cls, num, den):
        """Coefficient lists, highest power first"""
        return cls(sym.Poly([sym.nsimplify(c) for c in num], S), sym.Poly([sym.nsimplify(c) for c in den], S))

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()

    @property
    def is_proper(self):
        return self.num.is_zero or self.num.degree() < self.den.degree()

    def __call__(self, s):
        value = self.num.eval(s) / self.den.eval(s)
        return float(value) if isinstance(s, float) else value

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            return NotImplemented
        return sym.expand(self.num.as_expr() * other.den.as_expr() - other.num.as_expr() * self.den.as_expr()) == 0

    def __hash__(self):
        return hash((str(self.num.as_expr()), str(self.den.as_expr())))

    def scaled(self, c):
        return RationalFn(self.num * sym.sympify(c), self.den)

    def to_json(self):
        return {'num': str(self.num.as_expr()), 'den': str(self.den.as_expr())}


@dataclass(frozen=True)
class ExpTerm:
    """c t^{m-1} e^{pt} / (m-1)!"""

    coef: sym.Expr
    pole: sym.Expr
    m: int

    @property
    def c(self):
        return complex(sym.N(self.coef, 30))

    @property
    def p(self):
        return complex(sym.N(self.pole, 30))

    @property
    def exact(self):
        return not (self.coef.atoms(sym.Float) or self.pole.atoms(sym.Float))


def _same(x, y, tol=1e-12):
    if not (x - y).atoms(sym.Float):
        return sym.simplify(x - y) == 0
    return abs(complex(sym.N(x - y, 30))) <= tol * max(1.0, abs(complex(sym.N(x, 30))))


class ExpPolyFunction:
    """f(t) = sum c t^{m-1} e^{pt}/(m-1)! over exponential-polynomial terms"""

    def __init__(self, terms):
        self.terms = tuple(ExpTerm(sym.sympify(c), sym.sympify(p), int(m)) for c, p, m in terms)
        self._numeric = [(t.c, t.p, t.m) for t in self.terms]

    def __repr__(self):
        return f"ExpPolyFunction({sym.sstr(self.as_expr())})"

    def __len__(self):
        return len(self.terms)

    def evaluate(self, t):
        """Real part of the sum at t (the function is real when conjugate-closed)"""
        total = 0j
        for c, p, m in self._numeric:
            total += c * t ** (m - 1) * cmath.exp(p * t) / math.factorial(m - 1)
        return total.real

    __call__ = evaluate

    def as_expr(self):
        return sum((t.coef * T ** (t.m - 1) * sym.exp(t.pole * T) / sym.factorial(t.m - 1) for t in self.terms),
                   sym.Integer(0))

    def combine(self):
        """Merge terms sharing (p, m), drop zero coefficients, fix a canonical order"""
        merged = []
        for term in self.terms:
            for i, (c, p, m) in enumerate(merged):
                if m == term.m and _same(p, term.pole):
                    merged[i] = (c + term.coef, p, m)
                    break
            else:
                merged.append((term.coef, term.pole, term.m))
        kept = []
        for c, p, m in merged:
            c = sym.simplify(c) if not c.atoms(sym.Float) else c
            if c.atoms(sym.Float):
                if abs(complex(sym.N(c, 30))) > 1e-40:
                    kept.append((c, p, m))
            elif c != 0:
                kept.append((c, p, m))
        kept.sort(key=lambda term: (complex(sym.N(term[1])).real, complex(sym.N(term[1])).imag, term[2]))
        return ExpPolyFunction(kept)

    def derivative(self):
        terms = []
        for t in self.terms:
            terms.append((t.coef * t.pole, t.pole, t.m))
            if t.m >= 2:
                terms.append((t.coef, t.pole, t.m - 1))
        return ExpPolyFunction(terms).combine()

    def laplace(self):
        """Symbolic Laplace transform back to a RationalFn"""
        return RationalFn.from_sympy(sum((t.coef / (S - t.pole) ** t.m for t in self.terms), sym.Integer(0)))

    def is_real(self, tol=1e-12):
        """Conjugate closure of the terms"""
        for t in self.terms:
            if abs(t.p.imag) <= tol and abs(t.c.imag) <= tol * max(1.0, abs(t.c)):
                continue
            if abs(t.p.imag) <= tol:
                return False
            partner = [u for u in self.terms if u.m == t.m and abs(u.p - t.p.conjugate()) <= tol * max(1.0, abs(t.p))]
            if not any(abs(u.c - t.c.conjugate()) <= tol * max(1.0, abs(t.c)) for u in partner):
                return False
        return True

    def same_terms(self, other):
        a, b = self.combine().terms, other.combine().terms
        return len(a) == len(b) and all(
            x.m == y.m and _same(x.pole, y.pole) and _same(x.coef, y.coef) for x, y in zip(a, b))

    def to_json(self):
        return {'terms': [
            {'re_c': t.c.real, 'im_c': t.c.imag, 're_p': t.p.real, 'im_p': t.p.imag, 'm': t.m}
            for t in self.terms
        ]}


# ---------------------------------------------------------------------------
# Poles and partial fractions
# ---------------------------------------------------------------------------

def _exact_poles(den):
    """Poles with multiplicities when every irreducible factor has closed-form roots, else None"""
    if den.get_domain() not in (sym.ZZ, sym.QQ):
        found = sym.roots(den, cubics=False, quartics=False)
        return found if sum(found.values()) == den.degree() else None
    _, factors = sym.factor_list(den)
    poles = {}
    for factor, mult in factors:
        if factor.degree() > 2:
            return None
        for root, inner in sym.roots(factor).items():
            poles[root] = poles.get(root, 0) + inner * mult
    return poles


def _numeric_poles(den):
    """High-precision poles of each square-free factor, certified by residual and separation"""
    poles = {}
    _, factors = sym.sqf_list(den)
    with mpmath.workdps(NUMERIC_DPS):
        for factor, mult in factors:
            coeffs = [mpmath.mpmathify(complex(sym.N(c, NUMERIC_DPS))) if not c.is_Rational
                      else mpmath.mpf(c.p) / c.q for c in factor.all_coeffs()]
            try:
                found = mpmath.polyroots(coeffs, maxsteps=500, extraprec=4 * NUMERIC_DPS)
            except mpmath.NoConvergence as e:
                raise RootIsolationFailure(f"no convergence for {factor.as_expr()}") from e
            scale = max(abs(c) for c in coeffs)
            for r in found:
                if abs(mpmath.polyval(coeffs, r)) > mpmath.mpf('1e-25') * scale * max(1, abs(r)) ** factor.degree():
                    raise RootIsolationFailure(f"root {r} of {factor.as_expr()} fails the residual check")
            for i, r in enumerate(found):
                if any(abs(r - q) < mpmath.mpf('1e-20') for q in found[i + 1:]):
                    raise RootIsolationFailure(f"roots of {factor.as_expr()} are not separated")
            for r in found:
                re = sym.Float(mpmath.nstr(mpmath.re(r), NUMERIC_DPS), NUMERIC_DPS)
                im = sym.Float(mpmath.nstr(mpmath.im(r), NUMERIC_DPS), NUMERIC_DPS)
                poles[re + sym.I * im if im != 0 else re] = mult
    return poles


def poles(R):
    """{pole: multiplicity}, exact when possible"""
    found = _exact_poles(R.den)
    if found is None:
        found = _numeric_poles(R.den)
    return found


def partial_fractions(R):
    """R(s) = sum c/(s-p)^m as a list of (c, p, m)"""
    if not R.is_proper:
        raise ImproperRational(f"degree of {R.num.as_expr()} is not below degree of {R.den.as_expr()}")
    if R.num.is_zero:
        return []
    found = poles(R)
    numeric = any(p.atoms(sym.Float) for p in found)
    terms = []
    for p, mult in found.items():
        others = [(q, k) for q, k in found.items() if q is not p]
        if numeric:
            terms.extend(_numeric_residues(R, p, mult, others))
            continue
        g = R.num.as_expr() / sym.Mul(*[(S - q) ** k for q, k in others])
        for j in range(mult):
            c = sym.diff(g, S, j).subs(S, p) / sym.factorial(j)
            c = sym.radsimp(sym.simplify(c))
            if c != 0:
                terms.append((c, p, mult - j))
    return terms


def _numeric_residues(R, p, mult, others):
    with mpmath.workdps(NUMERIC_DPS):
        num = [mpmath.mpmathify(complex(sym.N(c, NUMERIC_DPS))) for c in R.num.all_coeffs()]
        pole = mpmath.mpmathify(complex(sym.N(p, NUMERIC_DPS)))
        rest = [(mpmath.mpmathify(complex(sym.N(q, NUMERIC_DPS))), k) for q, k in others]

        def g(x):
            value = mpmath.polyval(num, x)
            for q, k in rest:
                value /= (x - q) ** k
            return value

        series = mpmath.taylor(g, pole, mult - 1)
        out = []
        for j, c in enumerate(series):
            c = mpmath.mpc(c)
            coef = sym.Float(mpmath.nstr(c.real, NUMERIC_DPS), NUMERIC_DPS) + \
                sym.I * sym.Float(mpmath.nstr(c.imag, NUMERIC_DPS), NUMERIC_DPS)
            out.append((coef, p, mult - j))
        return out


def inverse_laplace_rational(R):
    """Sum of residues of e^{st} R(s): each c/(s-p)^m gives c t^{m-1} e^{pt}/(m-1)!"""
    return ExpPolyFunction(partial_fractions(R)).combine()


def residue_inverse(phi_rule, n, probes=(0, 1, 2, 3)):
    """
    f(t) = (n!/t^n) * sum of residues of e^{st} phi_n(s)

    Returns (ExpPolyFunction, report); the report compares the result across probe indices.
    """
    f = _residue_at(phi_rule, n)
    report = {'n': n, 'probes': list(probes), 'independent': True, 'mismatches': []}
    for probe in probes:
        if probe == n:
            continue
        try:
            other = _residue_at(phi_rule, probe)
        except NonCancellingPower as e:
            report['independent'] = False
            report['mismatches'].append({'probe': probe, 'reason': str(e)})
            continue
        if not f.same_terms(other):
            report['independent'] = False
            report['mismatches'].append({'probe': probe, 'reason': 'terms differ'})
    return f, report


def _residue_at(phi_rule, n):
    R = phi_rule(n)
    g = inverse_laplace_rational(R.scaled(math.factorial(n)))
    terms = []
    for t in g.terms:
        if t.m - 1 < n:
            raise NonCancellingPower(f"term t^{t.m - 1} e^({t.pole} t) cannot be divided by t^{n}")
        scale = sym.factorial(t.m - n - 1) / sym.factorial(t.m - 1)
        terms.append((t.coef * scale, t.pole, t.m - n))
    return ExpPolyFunction(terms).combine()


def image_rule(image):
    """n -> RationalFn for table rows whose n! phi_n(s) is rational in s"""
    rule, p = image.rule, image.params

    def exact(name):
        value = p[name]
        if isinstance(value, float):
            value = sym.nsimplify(value)
        return sym.Rational(value.numerator, value.denominator) if hasattr(value, 'numerator') else value

    if rule == Rule.EXP:
        a = exact('a')
        return lambda n: RationalFn.from_sympy(1 / (S - a) ** (n + 1))
    if rule in (Rule.POWER, Rule.POWER_EXP):
        a = exact('a')
        if not (a.is_integer and a >= 0):
            raise InvalidParams(f"{rule.value}: image is rational only for integer a >= 0")
        b = exact('b') if rule == Rule.POWER_EXP else 0
        a = int(a)
        return lambda n: RationalFn.from_sympy(
            sym.Rational(math.factorial(a + n), math.factorial(n)) / (S + b) ** (n + a + 1))
    if rule in (Rule.SIN, Rule.COS):
        a = exact('a')

        # Re/Im of (s + ia)^{n+1}: even k for cos, odd k for sin
        def trig(n):
            first = 1 if rule == Rule.SIN else 0
            part = sum((sym.binomial(n + 1, k) * S ** (n + 1 - k) * (-1) ** (k // 2) * a ** k
                        for k in range(first, n + 2, 2)), sym.Integer(0))
            return RationalFn.from_sympy(part / (S ** 2 + a ** 2) ** (n + 1))

        return trig
    if rule == Rule.EXP_SHIFT:
        a = exact('a')
        inner = image_rule(image.base)
        return lambda n: RationalFn.from_sympy(inner(n).as_expr().subs(S, S - a))
    if rule == Rule.COMPOSITE:
        parts = [(sym.nsimplify(c), image_rule(part)) for c, part in image.parts]
        return lambda n: RationalFn.from_sympy(sum((c * r(n).as_expr() for c, r in parts), sym.Integer(0)))
    raise InvalidParams(f"{rule.value}: image is not a rational function of s")


def inverse_closed_image(image: ClosedImage, n=0):
    return residue_inverse(image_rule(image), n)

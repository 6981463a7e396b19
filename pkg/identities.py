"""
Combinatorial identities
Exact rational checks of the Laguerre image identity, the mapped Legendre coefficients A(n, j)
and the identities read off Bonnet's recursion
"""

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache

import mpmath
import sympy as sym
from scipy.special import eval_legendre

from errors import IndexOutOfRange, InvalidParams, ZeroAbscissa

X = sym.Symbol('x')


def binom(n, k):
    """C(n, k) with C(n, k) = 0 for k < 0 or k > n >= 0"""
    if k < 0:
        return 0
    if n < 0:
        return binom_signed(n, k)
    return math.comb(n, k)


def binom_signed(n, k):
    """C(n, k) for any integer n: C(-m, k) = (-1)^k C(m+k-1, k)"""
    if k < 0:
        return 0
    if n >= 0:
        return math.comb(n, k)
    return (-1) ** k * math.comb(-n + k - 1, k)


def _exact_abscissa(s):
    s = Fraction(s)
    if s == 0:
        raise ZeroAbscissa("exact abscissa must be non-zero")
    return s


# ---------------------------------------------------------------------------
# Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre_image_term(m, n, s, printed_sign=False):
    """Image of L_m at (n, s): sum_k (-1)^k C(m,k) C(n+k,k) / s^{n+k+1}"""
    s = _exact_abscissa(s)
    sign = (-1) ** n if printed_sign else 1
    return sign * sum((Fraction((-1) ** k * binom(m, k) * binom(n + k, k)) / s ** (n + k + 1)
                       for k in range(m + 1)), Fraction(0))


def verify_laguerre_identity(m, n, s):
    """
    sum_k C(m,k) sum_j (-1)^{k+j} s^{-j} C(k,j) C(n+j,j) = C(m+n, n) s^{-m}

    Returns (holds, witness). The witness also carries the left side rebuilt from
    image terms, s^{n+1} sum_k (-1)^k C(m,k) image(L_k).
    """
    s = _exact_abscissa(s)
    lhs = sum((binom(m, k) * sum((Fraction((-1) ** (k + j) * binom(k, j) * binom(n + j, j)) / s ** j
                                  for j in range(k + 1)), Fraction(0))
               for k in range(m + 1)), Fraction(0))
    rhs = Fraction(binom(m + n, n)) / s ** m
    via_images = s ** (n + 1) * sum(((-1) ** k * binom(m, k) * laguerre_image_term(k, n, s)
                                     for k in range(m + 1)), Fraction(0))
    witness = {'m': m, 'n': n, 's': s, 'lhs': lhs, 'rhs': rhs, 'lhs_from_images': via_images}
    return lhs == rhs == via_images, witness


# ---------------------------------------------------------------------------
# Legendre polynomials pulled back by x = 1 - 2 e^{-t}
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _legendre_A(n, j):
    total = sum((-1) ** (j + k) * binom(n, k) * binom(2 * n - 2 * k, n) * binom(n - 2 * k, j)
                for k in range(n // 2 + 1))
    return Fraction(total, 2 ** (n - j))


def legendre_A(n, j):
    """Coefficient of e^{-jt} in P_n(1 - 2e^{-t})"""
    if n < 0 or not 0 <= j <= n:
        raise IndexOutOfRange(f"A({n}, {j}) needs 0 <= j <= n")
    return _legendre_A(n, j)


def _A(n, j):
    # zero outside the table
    if n < 0 or j < 0 or j > n:
        return Fraction(0)
    return _legendre_A(n, j)


def legendre_A_row(n):
    return tuple(legendre_A(n, j) for j in range(n + 1))


def legendre_A_by_expansion(n):
    """Row n of the table from expanding P_n(1 - 2x) in powers of x"""
    if n < 0:
        raise IndexOutOfRange(f"row index must be nonnegative, got {n}")
    poly = sym.Poly(sym.expand(sym.legendre(n, 1 - 2 * X)), X)
    coeffs = poly.all_coeffs()[::-1]
    coeffs += [sym.Integer(0)] * (n + 1 - len(coeffs))
    return tuple(Fraction(int(c.p), int(c.q)) for c in coeffs)


def legendre_mapped_eval(n, t):
    """sum_j A(n, j) e^{-jt}, summed at 50 digits"""
    if t < 0:
        raise InvalidParams(f"t must be nonnegative, got {t}")
    with mpmath.workdps(50):
        x = mpmath.exp(-mpmath.mpf(t))
        total = mpmath.fsum(mpmath.mpf(a.numerator) / a.denominator * x ** j
                            for j, a in enumerate(legendre_A_row(n)))
        return float(total)


def legendre_reference(n, t):
    """P_n(1 - 2e^{-t}) by the standard recurrence"""
    return float(eval_legendre(n, 1 - 2 * math.exp(-t)))


# ---------------------------------------------------------------------------
# Identities from Bonnet's recursion
# ---------------------------------------------------------------------------

def _central_sum(m, j=None):
    """sum_k (-1)^k C(m,k) C(2m-2k, m) [C(m-2k, j)]"""
    return sum((-1) ** k * binom(m, k) * binom(2 * m - 2 * k, m) * (1 if j is None else binom(m - 2 * k, j))
               for k in range(m // 2 + 1))


def verify_identity_1(m):
    """C(2m+2, m+1) = (4m+2)/(m+1) C(2m, m)"""
    if m < 1:
        raise InvalidParams(f"m must be at least 1, got {m}")
    lhs = Fraction(binom(2 * m + 2, m + 1))
    rhs = Fraction(4 * m + 2, m + 1) * binom(2 * m, m)
    return lhs == rhs, {'m': m, 'lhs': lhs, 'rhs': rhs}


def verify_identity_2(m):
    """Three-term relation of sum_k (-1)^k C(m,k) C(2m-2k, m), from the A(., 0) column"""
    if m < 1:
        raise InvalidParams(f"m must be at least 1, got {m}")
    lhs = Fraction(_central_sum(m + 1))
    rhs = Fraction(4 * m + 2, m + 1) * _central_sum(m) - Fraction(4 * m, m + 1) * _central_sum(m - 1)
    return lhs == rhs, {'m': m, 'lhs': lhs, 'rhs': rhs}


def verify_identity_3(m, j):
    """General column j of the relation, 1 <= j <= m-1"""
    if m < 1:
        raise InvalidParams(f"m must be at least 1, got {m}")
    if not 1 <= j <= m - 1:
        raise IndexOutOfRange(f"j must lie in 1..{m - 1}, got {j}")
    middle = sum((-1) ** k * binom(m, k) * binom(2 * m - 2 * k, m) * binom(m - 2 * k + 1, j)
                 for k in range(m // 2 + 1))
    lhs = Fraction(_central_sum(m + 1, j))
    rhs = Fraction(4 * m + 2, m + 1) * middle - Fraction(4 * m, m + 1) * _central_sum(m - 1, j)
    return lhs == rhs, {'m': m, 'j': j, 'lhs': lhs, 'rhs': rhs}


def bonnet_mapped_check(m):
    """(m+1) A(m+1, j) = (2m+1)(A(m, j) - 2 A(m, j-1)) - m A(m-1, j) for every j, plus both endpoints"""
    if m < 1:
        raise InvalidParams(f"m must be at least 1, got {m}")
    failures = []
    for j in range(m + 2):
        lhs = (m + 1) * _A(m + 1, j)
        rhs = (2 * m + 1) * (_A(m, j) - 2 * _A(m, j - 1)) - m * _A(m - 1, j)
        if lhs != rhs:
            failures.append({'m': m, 'j': j, 'lhs': lhs, 'rhs': rhs})
    top = (m + 1) * _A(m + 1, m + 1) == -2 * (2 * m + 1) * _A(m, m)
    bottom = (m + 1) * _A(m + 1, 0) == (2 * m + 1) * _A(m, 0) - m * _A(m - 1, 0)
    if not top:
        failures.append({'m': m, 'j': m + 1, 'relation': 'top endpoint'})
    if not bottom:
        failures.append({'m': m, 'j': 0, 'relation': 'bottom endpoint'})
    return not failures, failures


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _collect(identity, label, cases, check, jobs=1):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda args: check(*args), cases))
    else:
        results = [check(*args) for args in cases]
    counterexamples = [w for ok, w in results if not ok]
    return {
        'identity': identity,
        'range': label,
        'checked': len(results),
        'all_passed': not counterexamples,
        'counterexamples': counterexamples,
    }


def sweep_identity_1(max_m=200, jobs=1):
    return _collect('1', f"1 <= m <= {max_m}", [(m,) for m in range(1, max_m + 1)], verify_identity_1, jobs)


def sweep_identity_2(max_m=80, jobs=1):
    return _collect('2', f"1 <= m <= {max_m}", [(m,) for m in range(1, max_m + 1)], verify_identity_2, jobs)


def sweep_identity_3(max_m=60, jobs=1):
    cases = [(m, j) for m in range(2, max_m + 1) for j in range(1, m)]
    return _collect('3', f"2 <= m <= {max_m}, 1 <= j <= m-1", cases, verify_identity_3, jobs)


def _bonnet_case(m):
    ok, failures = bonnet_mapped_check(m)
    return ok, {'m': m, 'failures': failures}


def sweep_bonnet(max_m=80, jobs=1):
    return _collect('bonnet', f"1 <= m <= {max_m}", [(m,) for m in range(1, max_m + 1)], _bonnet_case, jobs)


def sweep_laguerre(max_m=40, max_n=40, abscissae=(1, 2, Fraction(1, 3)), jobs=1):
    cases = [(m, n, Fraction(s)) for s in abscissae for m in range(max_m + 1) for n in range(max_n + 1)]
    label = f"m <= {max_m}, n <= {max_n}, s in {[str(Fraction(s)) for s in abscissae]}"
    return _collect('laguerre', label, cases, verify_laguerre_identity, jobs)


def _table_case(n):
    summed, expanded = legendre_A_row(n), legendre_A_by_expansion(n)
    return summed == expanded, {'n': n, 'summed': summed, 'expanded': expanded}


def sweep_legendre_table(max_n=40, jobs=1):
    return _collect('legendre-table', f"0 <= n <= {max_n}", [(n,) for n in range(max_n + 1)], _table_case, jobs)


SWEEPS = {
    '1': sweep_identity_1,
    '2': sweep_identity_2,
    '3': sweep_identity_3,
    'bonnet': sweep_bonnet,
    'laguerre': sweep_laguerre,
    'legendre-table': sweep_legendre_table,
}

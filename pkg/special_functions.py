"""
Special functions
Gamma, Bernoulli polynomials and the Hurwitz zeta function by series, Euler-Maclaurin, transform integral
and the Bernoulli-number expansion
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from scipy.special import gamma, gammaln, rgamma

from closed_images import builtin_source
from errors import DivergentSeries, InvalidParams, NonPositiveArgument
from transform_core import SourceFunction, gamma_transform

# Euler-Maclaurin correction terms
EM_ORDER = 8
EM_DPS = 40


def gamma_fn(x):
    """Gamma(x) for x > 0"""
    if not x > 0:
        raise NonPositiveArgument(f"gamma_fn needs x > 0, got {x}")
    return float(gamma(x))


def recip_gamma(x):
    """1/Gamma(x), zero at the non-positive integers"""
    return float(rgamma(x))


def pochhammer(x, k):
    """(x)_k = x (x+1) ... (x+k-1) by direct product"""
    return math.prod((x + i for i in range(k)), start=1.0)


def pochhammer_gamma(x, k):
    """(x)_k = Gamma(x+k)/Gamma(x) for x > 0"""
    return math.exp(gammaln(x + k) - gammaln(x))


@lru_cache(maxsize=None)
def bernoulli_number(k):
    """B_k with B_1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0"""
    if k == 0:
        return Fraction(1)
    total = sum(math.comb(k + 1, j) * bernoulli_number(j) for j in range(k))
    return -total / (k + 1)


@dataclass(frozen=True)
class BernoulliPoly:
    """B_k(a) with exact coefficients, lowest power first"""

    k: int
    coefficients: tuple

    @classmethod
    def of_degree(cls, k):
        if k < 0:
            raise InvalidParams(f"degree must be nonnegative, got {k}")
        return cls(k, tuple(math.comb(k, j) * bernoulli_number(k - j) for j in range(k + 1)))

    def __call__(self, a):
        if isinstance(a, float):
            return math.fsum(float(c) * a ** j for j, c in enumerate(self.coefficients))
        a = Fraction(a)
        return sum((c * a ** j for j, c in enumerate(self.coefficients)), Fraction(0))

    def derivative(self):
        """Coefficients of d/da B_k(a)"""
        return tuple(j * c for j, c in enumerate(self.coefficients))[1:]


def bernoulli_poly(k, a):
    """B_k(a), exact for rational a"""
    return BernoulliPoly.of_degree(k)(a)


@dataclass(frozen=True)
class HurwitzParams:
    s: float
    a: float

    def __post_init__(self):
        if not 0 < self.a <= 1:
            raise InvalidParams(f"a must lie in (0, 1], got {self.a}")


def hurwitz_series(params, K=2000):
    """Partial sum of sum_k (k+a)^{-s} with the integral and half-term tail corrections"""
    s, a = float(params.s), float(params.a)
    if not s > 1:
        raise DivergentSeries(f"the series diverges for s={s} <= 1")
    head = math.fsum((k + a) ** -s for k in range(K))
    return head + (K + a) ** (1 - s) / (s - 1) + (K + a) ** -s / 2


def series_tail_bound(params, K=2000):
    """Size of the first neglected Euler-Maclaurin term of the series tail"""
    s, a = float(params.s), float(params.a)
    return s * (K + a) ** (-s - 1) / 12


def _hurwitz_em(s, a, N):
    with mpmath.workdps(EM_DPS):
        s, a = mpmath.mpf(s), mpmath.mpf(a)
        if s == 1:
            raise DivergentSeries("zeta(s, a) has a pole at s = 1")
        x = N + a
        total = mpmath.fsum((k + a) ** -s for k in range(N))
        total += x ** (1 - s) / (s - 1) + x ** -s / 2
        rising, last = s, mpmath.mpf(0)
        for j in range(1, EM_ORDER + 2):
            b = bernoulli_number(2 * j)
            term = mpmath.mpf(b.numerator) / b.denominator / mpmath.factorial(2 * j) * rising * x ** (-s - 2 * j + 1)
            if j <= EM_ORDER:
                total += term
            else:
                last = term
            rising *= (s + 2 * j - 1) * (s + 2 * j)
        return float(total), float(abs(last))


def hurwitz_em(params, N=None):
    """zeta(s, a) by Euler-Maclaurin summation, valid for every real s != 1"""
    return hurwitz_em_with_error(params, N)[0]


def hurwitz_em_with_error(params, N=None):
    s = float(params.s)
    N = N if N is not None else max(20, int(abs(s)) + 20)
    return _hurwitz_em(s, float(params.a), N)


def _one_over_exp_minus_one(t):
    return 1.0 / math.expm1(t)


def hurwitz_integral(params, tol=None):
    """(1/Gamma(s)) int t^{s-1} e^{-at}/(1-e^{-t}) dt: the order-s transform of 1/(1-e^{-t}) at abscissa a"""
    s, a = float(params.s), float(params.a)
    if not s > 1:
        raise DivergentSeries(f"the integral diverges for s={s} <= 1")
    f, _ = builtin_source('one-over-one-minus-exp-neg')
    return gamma_transform(f, a, s, tol)[0]


def hurwitz_integral_shifted(params, tol=None):
    """The order-s transform of 1/(e^t-1) at abscissa a, which is zeta(s, a+1)"""
    s, a = float(params.s), float(params.a)
    if not s > 1:
        raise DivergentSeries(f"the integral diverges for s={s} <= 1")
    f = SourceFunction(_one_over_exp_minus_one, exp_order=-1.0, bound=3.0, origin_exponent=-1.0,
                       label='1/(e^t-1)')
    return gamma_transform(f, a, s, tol)[0]


def zeta_negative(k, a):
    """zeta(1-k, a) = -B_k(a)/k for k >= 1"""
    if k < 1:
        raise InvalidParams(f"k must be positive, got {k}")
    return -bernoulli_poly(k, a) / k


def hurwitz_bernoulli_representation(s, a, K, convention='printed'):
    """
    Bernoulli-number expansion of zeta(s, a+1) around its leading term 1/((2a)^{s-1}(s-1))

    convention='printed' divides the k-th term by k!, 'derived' by (k-1)!. The expansion is
    asymptotic, so the report carries every partial sum and the index of the smallest term.
    """
    if convention not in ('printed', 'derived'):
        raise InvalidParams(f"unknown convention: {convention}")
    params = HurwitzParams(s, a)
    if not s > 1:
        raise DivergentSeries(f"representation needs s > 1, got {s}")
    if K < 1:
        raise InvalidParams(f"truncation K must be at least 1, got {K}")
    s = float(s)
    if not isinstance(a, float):
        a = Fraction(a)
    two_a = 2 * float(a)
    leading = 1.0 / (two_a ** (s - 1) * (s - 1))
    terms = []
    for k in range(1, K + 1):
        denominator = math.factorial(k) if convention == 'printed' else math.factorial(k - 1)
        z = float(zeta_negative(k, a))
        terms.append(-z / two_a ** (s + k - 1) * pochhammer(s, k - 1) / denominator)
    partial = [leading]
    for term in terms:
        partial.append(partial[-1] + term)
    target = hurwitz_em(HurwitzParams(params.s, float(params.a))) - float(params.a) ** -s
    nonzero = [(abs(t), k) for k, t in enumerate(terms, start=1) if t != 0]
    minimal = min(nonzero)[1] if nonzero else 1
    return partial[-1], {
        'convention': convention,
        'target': target,
        'leading': leading,
        'terms': terms,
        'partial_sums': partial,
        'discrepancies': [p - target for p in partial],
        'minimal_term_index': minimal,
        'value_at_minimal_term': partial[minimal],
    }

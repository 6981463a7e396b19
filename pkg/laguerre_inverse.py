"""
Laguerre inverse transform
Orthonormal Laguerre functions L*_n(x,s), the coefficient bridge a_n(s) <-> phi_n(s) and the truncated series inverse
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy import integrate

from errors import InsufficientLength, NonPositiveScale
from transform_core import ImageSeq, exact_sum


def _check_scale(s):
    if not s > 0:
        raise NonPositiveScale(f"Laguerre scale s must be positive, got {s}")


def _sqrt(s):
    """Exact square root for squares of rationals, float otherwise"""
    if isinstance(s, (int, Fraction)):
        s = Fraction(s)
        num, den = math.isqrt(s.numerator), math.isqrt(s.denominator)
        if num * num == s.numerator and den * den == s.denominator:
            return Fraction(num, den)
    return math.sqrt(float(s))


def laguerre_eval(n, x):
    """L_n(x) by the three-term recurrence; exact for rational x"""
    if n < 0:
        raise ValueError("Laguerre degree must be nonnegative")
    prev, cur = 0, 1
    for k in range(n):
        if isinstance(x, (int, Fraction)):
            nxt = (Fraction(2 * k + 1) - x) * cur / (k + 1) - Fraction(k, k + 1) * prev
        else:
            nxt = ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
        prev, cur = cur, nxt
    return cur


def laguerre_explicit(n, x):
    """L_n(x) = sum_k (-1)^k C(n,k) x^k / k!"""
    exact = not isinstance(x, float)
    terms = []
    for k in range(n + 1):
        weight = Fraction((-1) ** k * math.comb(n, k), math.factorial(k))
        terms.append(weight * x ** k if exact else float(weight) * x ** k)
    return exact_sum(terms)


def laguerre_all(N, x):
    """L_0(x) .. L_N(x) for scalar or array x, one recurrence pass"""
    x = np.asarray(x, dtype=float)
    values = [np.ones_like(x)]
    if N >= 1:
        values.append(1.0 - x)
    for k in range(1, N):
        values.append(((2 * k + 1 - x) * values[k] - k * values[k - 1]) / (k + 1))
    return values


def laguerre_star_eval(n, x, s):
    """L*_n(x,s) = (-1)^n sqrt(s) L_n(sx)"""
    _check_scale(s)
    return (-1) ** n * _sqrt(s) * laguerre_eval(n, s * x)


@dataclass(frozen=True)
class LaguerreBasis:
    """The system L*_0 .. L*_{n_max} at scale s"""

    s: float
    n_max: int

    def __post_init__(self):
        _check_scale(self.s)

    def __call__(self, n, x):
        return laguerre_star_eval(n, x, self.s)

    def evaluate_all(self, x):
        s = float(self.s)
        root = math.sqrt(s)
        return [(-1) ** k * root * v for k, v in enumerate(laguerre_all(self.n_max, s * np.asarray(x, dtype=float)))]


@dataclass(frozen=True)
class CoefficientSeq:
    """Fourier-Laguerre coefficients a_0(s) .. a_N(s)"""

    s: float
    a: tuple
    errors: tuple = None

    def __post_init__(self):
        _check_scale(self.s)
        object.__setattr__(self, 'a', tuple(self.a))
        if self.errors is None:
            object.__setattr__(self, 'errors', (0.0,) * len(self.a))

    @property
    def n_max(self):
        return len(self.a) - 1

    def truncated(self, N):
        return CoefficientSeq(self.s, self.a[:N + 1], self.errors[:N + 1])

    def to_json(self):
        return {'s': float(self.s), 'a': [float(v) for v in self.a]}

    def to_frame(self):
        return pd.DataFrame({'k': range(len(self.a)), 'a_k': [float(v) for v in self.a],
                             'error': list(self.errors)})


def forward_difference_at_zero(phi, k):
    """Delta^k (s^n phi_n) at n = 0, as an exact binomial sum"""
    s = phi.s
    return exact_sum((-1) ** (k - j) * math.comb(k, j) * s ** j * phi[j] for j in range(k + 1))


def coefficients_from_image(phi):
    """a_n = sqrt(s) sum_k (-1)^{n-k} C(n,k) s^k phi_k"""
    s = phi.s
    _check_scale(s)
    root = _sqrt(s)
    a, errors = [], []
    for n in range(len(phi)):
        a.append(root * forward_difference_at_zero(phi, n))
        errors.append(float(root) * math.fsum(math.comb(n, k) * float(s) ** k * phi.errors[k]
                                              for k in range(n + 1)))
    return CoefficientSeq(s, tuple(a), tuple(errors))


def image_from_coefficients(coeffs):
    """phi_n = sqrt(s)/s^{n+1} sum_k C(n,k) a_k"""
    s = coeffs.s
    root = _sqrt(s)
    values, errors = [], []
    for n in range(len(coeffs.a)):
        scale = root / s ** (n + 1)
        values.append(scale * exact_sum(math.comb(n, k) * coeffs.a[k] for k in range(n + 1)))
        errors.append(float(scale) * math.fsum(math.comb(n, k) * coeffs.errors[k] for k in range(n + 1)))
    return ImageSeq(s=s, values=tuple(values), errors=tuple(errors), label='R^-1{a}')


def sc_energy(phi, K):
    """Partial S_c energy sum_{k<=K} (Delta^k (s^n phi_n)|_{n=0})^2"""
    if K < 0 or len(phi) < K + 1:
        raise InsufficientLength(f"need {K + 1} image entries, have {len(phi)}")
    return exact_sum(forward_difference_at_zero(phi, k) ** 2 for k in range(K + 1))


def reconstruct(coeffs, x):
    """Truncated inverse sum_k a_k L*_k(x,s); x may be an array"""
    basis = LaguerreBasis(coeffs.s, coeffs.n_max).evaluate_all(x)
    total = sum(float(a) * b for a, b in zip(coeffs.a, basis))
    return float(total) if np.ndim(total) == 0 else total


def _weighted_quad(g, s):
    """int_0^inf e^{-sx} g(x) dx, split at a few scale lengths"""
    cut = 40.0 / s
    head, _ = integrate.quad(lambda x: math.exp(-s * x) * g(x), 0.0, cut, limit=400, epsabs=1e-13, epsrel=1e-12)
    tail, _ = integrate.quad(lambda x: math.exp(-s * x) * g(x), cut, np.inf, limit=200, epsabs=1e-14)
    return head + tail


def weighted_l2_error(f, coeffs):
    """int_0^inf e^{-sx} (f(x) - reconstruct(x))^2 dx by quadrature"""
    s = float(coeffs.s)
    return _weighted_quad(lambda x: (f(x) - reconstruct(coeffs, x)) ** 2, s)


def weighted_norm(f, s):
    return _weighted_quad(lambda x: f(x) ** 2, float(s))


def direct_coefficients(f, s, N):
    """a_n(s) = int_0^inf e^{-sx} f(x) L*_n(x,s) dx by direct quadrature"""
    _check_scale(s)
    s = float(s)
    basis = LaguerreBasis(s, N)
    return CoefficientSeq(s, tuple(_weighted_quad(lambda x, n=n: f(x) * basis(n, x), s) for n in range(N + 1)))


def gram_matrix(s, K):
    """Quadrature Gram matrix of L*_0 .. L*_K under the weight e^{-sx}"""
    _check_scale(s)
    s = float(s)
    basis = LaguerreBasis(s, K)
    gram = np.zeros((K + 1, K + 1))
    for m in range(K + 1):
        for n in range(m, K + 1):
            gram[m, n] = gram[n, m] = _weighted_quad(lambda x: basis(m, x) * basis(n, x), s)
    return gram


def bessel_report(f, s, K, coeffs=None):
    """Coefficient energy partial sums against the weighted norm of f"""
    coeffs = coeffs if coeffs is not None else direct_coefficients(f, s, K)
    partial = np.cumsum([float(a) ** 2 for a in coeffs.a[:K + 1]])
    norm = weighted_norm(f, s)
    return {
        's': float(s),
        'K': K,
        'norm_squared': norm,
        'partial_sums': partial.tolist(),
        'holds': bool(np.all(partial <= norm + 1e-8)),
    }

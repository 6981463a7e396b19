"""
Laplace-type transform core
Numerical forward transform phi_n(s) = int_0^inf e^{-st} t^n/n! f(t) dt and the sequence-level rules
(derivative form, running integral, convolution, abscissa shift, delay)
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
import pandas as pd
from scipy import integrate
from scipy.special import gammaln

from errors import (
    AbscissaMismatch,
    AbscissaTooSmall,
    DerivativeUnavailable,
    InvalidParams,
    InvalidSource,
    NonPositiveDelay,
    QuadratureFailure,
)
from settings import get_settings

# relative floor on the per-entry error target
REL_FLOOR = 64 * np.finfo(float).eps


def exact_sum(terms):
    """Exact sum for rationals, compensated (fsum) as soon as a float is involved"""
    terms = list(terms)
    if any(isinstance(t, float) for t in terms):
        return math.fsum(float(t) for t in terms)
    return sum(terms, 0)


def _tolerance_for(errors, values):
    scale = max((abs(float(v)) for v in values), default=0.0)
    return max(max(errors, default=0.0), REL_FLOOR * scale, np.finfo(float).tiny)


@dataclass(frozen=True)
class SourceFunction:
    """
    An evaluable real function on (0, inf) together with the metadata the transform needs

    |f(t)| <= bound * e^{exp_order t}, and f(t) ~ c t^{origin_exponent} as t -> 0+.
    """

    evaluate: Callable[[float], float]
    exp_order: float = 0.0
    bound: float = 1.0
    origin_exponent: float = 0.0
    label: str = 'f'
    breakpoints: tuple = ()

    def __post_init__(self):
        if not self.bound > 0:
            raise InvalidSource(f"{self.label}: bound M must be positive")
        if not math.isfinite(self.exp_order):
            raise InvalidSource(f"{self.label}: exponential order must be finite")

    def __call__(self, t):
        return self.evaluate(t)

    def within_growth_bound(self, grid):
        """Check |f(t)| <= M e^{rt} (times t^a near the origin when a < 0) on a grid"""
        for t in grid:
            limit = self.bound * math.exp(self.exp_order * t)
            if self.origin_exponent < 0 and t < 1:
                limit *= t ** self.origin_exponent
            if abs(self.evaluate(t)) > limit * (1 + 1e-12):
                return False
        return True

    def origin_bounded(self, grid, ceiling=None):
        """Check that f(t) t^{-a} stays bounded along a decreasing grid"""
        scaled = [abs(self.evaluate(t)) * t ** (-self.origin_exponent) for t in grid]
        if not all(math.isfinite(v) for v in scaled):
            return False
        ceiling = ceiling if ceiling is not None else 10 * max(scaled[0], 1.0)
        return max(scaled) <= ceiling


@dataclass(frozen=True)
class ImageSeq:
    """A finite prefix phi_0(s) .. phi_N(s) at a fixed abscissa, with per-entry error estimates"""

    s: float
    values: tuple
    errors: tuple = None
    tolerance: float = None
    label: str = ''

    def __post_init__(self):
        values = tuple(self.values)
        errors = tuple(float(e) for e in self.errors) if self.errors is not None else (0.0,) * len(values)
        if len(errors) != len(values):
            raise InvalidParams("errors and values must have the same length")
        if not values:
            raise InvalidParams("an image sequence needs at least phi_0")
        tolerance = self.tolerance if self.tolerance is not None else _tolerance_for(errors, values)
        if not tolerance > 0:
            raise InvalidParams("tolerance must be positive")
        if max(errors) > tolerance:
            raise InvalidParams("an entry's error estimate exceeds the sequence tolerance")
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'errors', errors)
        object.__setattr__(self, 'tolerance', tolerance)

    @property
    def n_max(self):
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def as_array(self):
        return np.array([float(v) for v in self.values])

    def truncated(self, N):
        return replace(self, values=self.values[:N + 1], errors=self.errors[:N + 1], tolerance=None)

    def to_json(self):
        return {'s': float(self.s), 'tol': float(self.tolerance), 'values': [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, doc):
        return cls(s=doc['s'], values=tuple(doc['values']), tolerance=doc.get('tol'))

    def to_frame(self):
        """Export to a pandas DataFrame with columns n, phi_n, error"""
        return pd.DataFrame({
            'n': range(len(self.values)),
            'phi_n': [float(v) for v in self.values],
            'error': list(self.errors),
        })


@dataclass(frozen=True)
class ImageFamily:
    """Images of one function over a range of abscissae, produced on demand by a sampler"""

    sampler: Callable[[float, int], ImageSeq]
    abscissa: float
    label: str = ''

    def at(self, s, N):
        if s <= self.abscissa:
            raise AbscissaTooSmall(f"s={s} must exceed the convergence abscissa {self.abscissa}")
        return self.sampler(s, N)

    def shifted(self, a):
        base = self.sampler

        def sampler(s, N):
            return replace(base(s - a, N), s=s)

        return ImageFamily(sampler, self.abscissa + a, f"e^({a}t)*{self.label}")

    @classmethod
    def from_source(cls, f, tol=None):
        return cls(lambda s, N: forward_transform(f, s, N, tol), f.exp_order, f.label)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _safe(f, t):
    try:
        value = f(t)
    except OverflowError:
        return 0.0
    return value if math.isfinite(value) else 0.0


def _panels(f, s, power):
    """Split points for the finite part and the start of the tail"""
    rate = s - f.exp_order
    eff = power + f.origin_exponent
    t_star = (eff + 1) / rate
    cut = t_star + (8 * math.sqrt(eff + 1) + 8) / rate
    inner = sorted({float(b) for b in f.breakpoints if 0 < b})
    if inner and inner[-1] >= cut:
        cut = inner[-1] + 8 / rate
    points = sorted({t_star, *inner} - {0.0})
    points = [p for p in points if p < cut]
    return [0.0, *points, cut], rate, eff


def _quad(h, lo, hi, epsabs, budget):
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        return integrate.quad(h, lo, hi, epsabs=epsabs, epsrel=1e-12, limit=budget)


def _weighted_integral(f, s, power, log_scale, tol, budget):
    """
    int_0^inf e^{-st} t^power f(t) dt * e^{log_scale}, returning (value, estimated abs error)

    Panels: [0, t*] with t = u^{1/(1+eff)} when the integrand is singular at the origin,
    adaptive Gauss-Kronrod panels up to the cut point, then t = cut - ln(u)/(s - r) on (0, 1].
    """
    edges, rate, eff = _panels(f, s, power)
    n_pieces = len(edges)
    panel_tol = tol / n_pieces
    total, error = [], 0.0

    def body(t):
        return _safe(f, t) * math.exp(power * math.log(t) - s * t + log_scale)

    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        if k == 0 and eff < 0:
            q = 1.0 / (1.0 + eff)

            def h(u, q=q):
                t = u ** q
                return _safe(f, t) * math.exp(power * math.log(t) + (q - 1) * math.log(u)
                                              + math.log(q) - s * t + log_scale)

            value, err = _quad(h, 0.0, hi ** (1.0 + eff), panel_tol, budget)
        else:
            value, err = _quad(body, lo, hi, panel_tol, budget)
        total.append(value)
        error += err

    cut = edges[-1]
    r = f.exp_order

    def tail(u):
        t = cut - math.log(u) / rate
        return _safe(lambda x: f(x) * math.exp(-r * x), t) * math.exp(
            power * math.log(t) - rate * cut + log_scale - math.log(rate))

    value, err = _quad(tail, 0.0, 1.0, panel_tol, budget)
    total.append(value)
    error += err
    return math.fsum(total), error


def _check_abscissa(f, s):
    if not s > f.exp_order:
        raise AbscissaTooSmall(f"s={s} must exceed the exponential order {f.exp_order} of {f.label}")


def gamma_transform(f, s, alpha, tol=None, node_budget=None):
    """
    General-order transform (1/Gamma(alpha)) int_0^inf e^{-st} t^{alpha-1} f(t) dt

    Returns (value, estimated absolute error).
    """
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    budget = settings.node_budget if node_budget is None else node_budget
    if not tol > 0:
        raise InvalidParams(f"tolerance must be positive, got {tol}")
    if not alpha > 0:
        raise InvalidParams(f"order alpha must be positive, got {alpha}")
    if not alpha + f.origin_exponent > 0:
        raise InvalidSource(f"{f.label}: t^(alpha-1) f(t) is not integrable at the origin")
    _check_abscissa(f, s)
    value, err = _weighted_integral(f, float(s), alpha - 1.0, -float(gammaln(alpha)), tol, budget)
    target = max(tol, REL_FLOOR * abs(value))
    if not math.isfinite(value) or err > target:
        raise QuadratureFailure(
            f"{f.label}: alpha={alpha}, s={s}: achieved error {err:.3e} above target {target:.3e}",
            achieved=err, value=value)
    return value, err


def forward_transform(f, s, N, tol=None, jobs=None):
    """Image sequence phi_0(s) .. phi_N(s) of f by adaptive quadrature"""
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    jobs = settings.jobs if jobs is None else jobs
    if N < 0:
        raise InvalidParams(f"N must be nonnegative, got {N}")
    if not f.origin_exponent > -1:
        raise InvalidSource(f"{f.label}: origin exponent must exceed -1")
    _check_abscissa(f, s)

    def entry(n):
        return gamma_transform(f, s, n + 1, tol)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(entry, range(N + 1)))
    else:
        results = [entry(n) for n in range(N + 1)]

    values = tuple(v for v, _ in results)
    errors = tuple(e for _, e in results)
    tolerance = max(tol, max(REL_FLOOR * abs(v) for v in values), max(errors))
    return ImageSeq(s=s, values=values, errors=errors, tolerance=tolerance, label=f.label)


# ---------------------------------------------------------------------------
# Sequence-level rules
# ---------------------------------------------------------------------------

def image_of_shift(base, a):
    """Image of e^{at} f(t): result(n, s) = base(n, s - a)"""
    if a == 0:
        return base
    if not hasattr(base, 'shifted'):
        raise InvalidParams("shift needs a closed image or an image family, not a single ImageSeq")
    return base.shifted(a)


def image_of_delay(phi, a, convention='oracle'):
    """
    Image of f(t - a) 1_{t > a}

    The quadrature-validated convention is e^{-as} sum_k a^{n-k}/(n-k)! phi_k(s);
    convention='printed' pairs the weight with phi_{n-k} as the table prints it.
    """
    if not a > 0:
        raise NonPositiveDelay(f"delay must be positive, got {a}")
    if convention not in ('oracle', 'printed'):
        raise InvalidParams(f"unknown delay convention: {convention}")
    s = phi.s
    decay = math.exp(-float(a) * float(s))
    weights = [float(a) ** j / math.factorial(j) for j in range(len(phi))]
    values, errors = [], []
    for n in range(len(phi)):
        if convention == 'oracle':
            pairs = [(weights[n - k], k) for k in range(n + 1)]
        else:
            pairs = [(weights[n - k], n - k) for k in range(n + 1)]
        values.append(decay * exact_sum(w * phi[i] for w, i in pairs))
        errors.append(decay * math.fsum(w * phi.errors[i] for w, i in pairs))
    return ImageSeq(s=s, values=tuple(values), errors=tuple(errors), label=f"{phi.label}(t-{a})")


def integrate_image(phi):
    """Image of the running integral int_0^t f(x) dx: sum_k phi_k / s^{n-k+1}"""
    s = phi.s
    if not s > 0:
        raise AbscissaTooSmall(f"running integral needs s > 0, got {s}")
    values, errors = [], []
    for n in range(len(phi)):
        values.append(exact_sum(phi[k] / s ** (n - k + 1) for k in range(n + 1)))
        errors.append(math.fsum(phi.errors[k] / float(s) ** (n - k + 1) for k in range(n + 1)))
    return ImageSeq(s=s, values=tuple(values), errors=tuple(errors), label=f"int {phi.label}")


def convolve_images(phi, psi):
    """sum_k phi_{n-k} psi_k is the image of the convolution f*g"""
    if phi.s != psi.s:
        raise AbscissaMismatch(f"abscissae differ: {phi.s} vs {psi.s}")
    N = min(phi.n_max, psi.n_max)
    values, errors = [], []
    for n in range(N + 1):
        values.append(exact_sum(phi[n - k] * psi[k] for k in range(n + 1)))
        errors.append(math.fsum(
            abs(float(phi[n - k])) * psi.errors[k] + abs(float(psi[k])) * phi.errors[n - k]
            + phi.errors[n - k] * psi.errors[k]
            for k in range(n + 1)))
    return ImageSeq(s=phi.s, values=tuple(values), errors=tuple(errors),
                    label=f"{phi.label}*{psi.label}")


def laplace_derivatives(F, s, N, dps=40):
    """F^{(0)}(s) .. F^{(N)}(s) by high-precision numerical differentiation"""
    try:
        with mpmath.workdps(dps):
            derivs = mpmath.diffs(F, mpmath.mpf(s), N)
            values = [float(d) for d in derivs]
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise DerivativeUnavailable(f"could not differentiate F at s={s}: {e}") from e
    if not all(math.isfinite(v) for v in values):
        raise DerivativeUnavailable(f"non-finite derivative of F at s={s}")
    return values


def image_from_laplace(F_derivs, N, s, tolerance=None):
    """
    phi_n(s) = (-1)^n / n! F^{(n)}(s)

    F_derivs is a sequence of derivative values or a callable n -> F^{(n)}(s).
    """
    values = []
    for n in range(N + 1):
        try:
            d = F_derivs(n) if callable(F_derivs) else F_derivs[n]
        except (IndexError, KeyError) as e:
            raise DerivativeUnavailable(f"F^({n})({s}) not supplied") from e
        if d is None:
            raise DerivativeUnavailable(f"F^({n})({s}) not supplied")
        coef = Fraction((-1) ** n, math.factorial(n))
        values.append(d * coef if isinstance(d, (int, Fraction)) else float(d) * float(coef))
    return ImageSeq(s=s, values=tuple(values), tolerance=tolerance, label='L^-1{F}')


def sequence_from_values(s, values: Sequence, label=''):
    """Exact (error-free) ImageSeq from explicit values"""
    return ImageSeq(s=s, values=tuple(values), label=label)

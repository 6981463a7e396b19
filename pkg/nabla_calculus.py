"""
Backward-difference calculus
The operator nabla_s phi_n = s phi_n - phi_{n-1}, its powers, derivative images and the fractional-derivative image
"""

import math
from dataclasses import dataclass, field

from scipy.special import gammaln, gammasgn

from errors import (
    AbscissaMismatch,
    IndexUnderflow,
    InsufficientLength,
    InvalidParams,
    MissingInitialData,
    OrderOutOfRange,
)
from transform_core import ImageSeq, exact_sum


def _accessor(phi, s):
    """(k -> phi_k(s), s) for an ImageSeq, a ClosedImage or a plain sequence"""
    if isinstance(phi, ImageSeq):
        if s is not None and s != phi.s:
            raise AbscissaMismatch(f"sequence is at s={phi.s}, requested s={s}")
        s = phi.s
    if s is None:
        raise InvalidParams("an abscissa s is required")
    if hasattr(phi, 'eval'):
        return (lambda k: phi.eval(k, s)), s

    def get(k):
        if k >= len(phi):
            raise InsufficientLength(f"index {k} needed, sequence has {len(phi)} entries")
        return phi[k]

    return get, s


def _entry(get, k):
    # phi_k = 0 below the origin
    return 0 if k < 0 else get(k)


@dataclass(frozen=True)
class NablaRequest:
    """phi with derivative order p and initial data f(0), f'(0), ..., f^(p-1)(0)"""

    phi: object
    p: int
    s: float = None
    init: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.p < 0:
            raise InvalidParams(f"order p must be nonnegative, got {self.p}")
        object.__setattr__(self, 'init', tuple(self.init))


@dataclass(frozen=True)
class FractionalOrder:
    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise OrderOutOfRange(f"fractional order must be nonnegative, got {self.alpha}")

    @property
    def m(self):
        return math.floor(self.alpha)

    @property
    def fraction(self):
        return self.alpha - self.m


def nabla_power(phi, p, s=None, n=0):
    """nabla_s^p phi_n = sum_k (-1)^k C(p,k) s^{p-k} phi_{n-k}"""
    if n < p:
        raise IndexUnderflow(f"nabla^{p} at n={n} needs phi_{n - p}")
    get, s = _accessor(phi, s)
    return _nabla_sum(get, s, p, n)


def _nabla_sum(get, s, p, n):
    return exact_sum((-1) ** k * math.comb(p, k) * s ** (p - k) * _entry(get, n - k) for k in range(p + 1))


def nabla_iterated(phi, p, s=None, n=0):
    """p-fold application of s phi_n - phi_{n-1}"""
    if n < p:
        raise IndexUnderflow(f"nabla^{p} at n={n} needs phi_{n - p}")
    get, s = _accessor(phi, s)
    window = [get(k) for k in range(n - p, n + 1)]
    for _ in range(p):
        window = [s * window[i] - window[i - 1] for i in range(1, len(window))]
    return window[-1]


def unshift_via_nabla(phi, p, s=None, n=0):
    """phi_{n-p} recovered as sum_j (-1)^j C(p,j) s^{p-j} nabla_s^j phi_n"""
    if n < p:
        raise IndexUnderflow(f"phi_{n - p} does not exist")
    get, s = _accessor(phi, s)
    return exact_sum((-1) ** j * math.comb(p, j) * s ** (p - j) * _nabla_sum(get, s, j, n) for j in range(p + 1))


def derivative_image(req, n):
    """
    Image of f^(p) at index n

    For n >= p this is nabla_s^p phi_n. Below that the initial data enter:
    nabla_s^p phi_n - (-1)^n sum_{j=1}^{p-n} C(p-j, n) s^{p-j-n} f^(j-1)(0).
    """
    if n < 0:
        raise IndexUnderflow(f"index must be nonnegative, got {n}")
    get, s = _accessor(req.phi, req.s)
    p = req.p
    value = _nabla_sum(get, s, p, n)
    if n >= p:
        return value
    needed = p - n
    if len(req.init) < needed:
        raise MissingInitialData(f"index {n} < p={p} needs f(0) .. f^({needed - 1})(0)")
    correction = exact_sum(math.comb(p - j, n) * s ** (p - j - n) * req.init[j - 1] for j in range(1, needed + 1))
    return value - (-1) ** n * correction


def derivative_sequence(req, N):
    """Image of f^(p) at indices 0..N as an ImageSeq"""
    get, s = _accessor(req.phi, req.s)
    values = tuple(derivative_image(req, n) for n in range(N + 1))
    return ImageSeq(s=s, values=values, label=f"d^{req.p}")


def rising(x, r):
    """(x)_r = x (x+1) ... (x+r-1)"""
    return math.prod(x + i for i in range(r))


def monomial_multiply_image(phi, r, p=0, s=None, n=0, init=()):
    """Image of t^r f^(p)(t): (n+1)_r times the image of f^(p) at index n+r"""
    if r < 0:
        raise InvalidParams(f"power r must be nonnegative, got {r}")
    if n < 0:
        raise IndexUnderflow(f"index must be nonnegative, got {n}")
    if p == 0:
        get, _ = _accessor(phi, s)
        return rising(n + 1, r) * get(n + r)
    return rising(n + 1, r) * derivative_image(NablaRequest(phi, p, s, init), n + r)


def real_binom(alpha, k):
    """C(alpha, k) = alpha^(k)/k! for real alpha, through lnGamma with sign tracking"""
    if k < 0:
        return 0.0
    top = alpha - k + 1
    if top <= 0 and float(top).is_integer():
        return 0.0
    log_abs = gammaln(alpha + 1) - gammaln(k + 1) - gammaln(top)
    sign = gammasgn(alpha + 1) * gammasgn(top)
    return float(sign * math.exp(log_abs))


def fractional_image(phi, alpha, s=None, n=0):
    """
    Image of the Riemann-Liouville derivative D^alpha f, 0 <= alpha < 1

    sum_k (-1)^k C(alpha,k) s^{alpha-k} phi_{n-k}; valid when f is bounded near the origin.
    """
    order = alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(alpha)
    if order.alpha >= 1:
        raise OrderOutOfRange(f"order {order.alpha} >= 1; use composed_fractional_image")
    if n < 0:
        raise IndexUnderflow(f"index must be nonnegative, got {n}")
    get, s = _accessor(phi, s)
    a = order.alpha
    s = float(s)
    return math.fsum((-1) ** k * real_binom(a, k) * s ** (a - k) * float(get(n - k)) for k in range(n + 1))


def composed_fractional_image(phi, alpha, s=None, n=0, init=()):
    """Image of D^{alpha-m} f^(m) with m = floor(alpha): integer part through derivative_image"""
    order = alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(alpha)
    if order.m == 0:
        return fractional_image(phi, order, s, n)
    get, s = _accessor(phi, s)
    req = NablaRequest(phi, order.m, s, init)
    inner = [derivative_image(req, k) for k in range(n + 1)]
    return fractional_image(inner, order.fraction, s, n)

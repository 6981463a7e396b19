"""
Closed-form images
The table of elementary functions and their images, made executable, plus the built-in source vocabulary
"""

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from errors import AbscissaTooSmall, InvalidParams, InvalidSource
from transform_core import ImageSeq, SourceFunction


class Rule(str, enum.Enum):
    """Rows of the table of elementary images"""

    EXP = 'exp'
    EXP_SHIFT = 'exp-shift'
    POWER = 'power'
    POWER_EXP = 'power-exp'
    SIN = 'sin'
    COS = 'cos'
    DELAY = 'delay'
    LOG = 'log'
    COMPOSITE = 'composite'


# required parameters and whether the rule wraps another image
RULE_PARAMS = {
    Rule.EXP: ('a',),
    Rule.EXP_SHIFT: ('a',),
    Rule.POWER: ('a',),
    Rule.POWER_EXP: ('a', 'b'),
    Rule.SIN: ('a',),
    Rule.COS: ('a',),
    Rule.DELAY: ('a',),
    Rule.LOG: (),
    Rule.COMPOSITE: (),
}

RULE_FORMULAS = {
    Rule.EXP: ('e^(at)', '1/(s-a)^(n+1)'),
    Rule.EXP_SHIFT: ('e^(at) f(t)', 'phi_n(s-a)'),
    Rule.POWER: ('t^a, a > -1', 'Gamma(a+n+1)/(s^(n+a+1) Gamma(n+1))'),
    Rule.POWER_EXP: ('t^a e^(-bt), a > -1', 'Gamma(a+n+1)/((s+b)^(n+a+1) Gamma(n+1))'),
    Rule.SIN: ('sin(at)', 'sin((n+1) arctan(a/s)) / (s^2+a^2)^((n+1)/2)'),
    Rule.COS: ('cos(at)', 'cos((n+1) arctan(a/s)) / (s^2+a^2)^((n+1)/2)'),
    Rule.DELAY: ('f(t-a), a > 0', 'e^(-as) sum_k a^(n-k)/(n-k)! phi_k(s)'),
    Rule.LOG: ('ln t', '(H_n - gamma - ln s)/s^(n+1)'),
    Rule.COMPOSITE: ('sum_i c_i f_i(t)', 'sum_i c_i phi_n[f_i](s)'),
}


def harmonic(n):
    """H_n = 1 + 1/2 + ... + 1/n"""
    return math.fsum(1.0 / k for k in range(1, n + 1))


# slack in the exponential order of sources that grow slower than any exponential
GROWTH_SLACK = 1e-3


def power_growth_bound(a, slack=GROWTH_SLACK):
    """M with t^a <= M e^{slack t} for t >= 1; the maximum of t^a e^{-slack t} sits at t = a/slack"""
    a = float(a)
    if a <= slack:
        return 1.0
    try:
        return max(1.0, math.exp(a * math.log(a / (slack * math.e))))
    except OverflowError:
        return math.inf


def _exact(value):
    if isinstance(value, float):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class ClosedImage:
    """One table row with exact parameters; eval(n, s) is the image in closed form"""

    rule: Rule
    params: dict = field(default_factory=dict)
    base: 'ClosedImage' = None
    parts: tuple = ()

    def __post_init__(self):
        rule = Rule(self.rule)
        object.__setattr__(self, 'rule', rule)
        missing = [p for p in RULE_PARAMS[rule] if p not in self.params]
        if missing:
            raise InvalidParams(f"{rule.value}: missing parameter(s) {', '.join(missing)}")
        object.__setattr__(self, 'params', {k: _exact(v) for k, v in self.params.items()})
        if rule in (Rule.POWER, Rule.POWER_EXP) and not self.params['a'] > -1:
            raise InvalidParams(f"{rule.value}: a must exceed -1, got {self.params['a']}")
        if rule == Rule.DELAY and not self.params['a'] > 0:
            raise InvalidParams(f"delay: a must be positive, got {self.params['a']}")
        if rule in (Rule.EXP_SHIFT, Rule.DELAY) and self.base is None:
            raise InvalidParams(f"{rule.value}: a base image is required")
        if rule == Rule.COMPOSITE and not self.parts:
            raise InvalidParams("composite: at least one part is required")

    @property
    def abscissa(self):
        """Convergence abscissa: eval is finite for every s above it"""
        p = self.params
        if self.rule == Rule.EXP:
            return float(p['a'])
        if self.rule == Rule.EXP_SHIFT:
            return self.base.abscissa + float(p['a'])
        if self.rule == Rule.POWER_EXP:
            return -float(p['b'])
        if self.rule == Rule.DELAY:
            return self.base.abscissa
        if self.rule == Rule.COMPOSITE:
            return max(part.abscissa for _, part in self.parts)
        return 0.0

    @property
    def label(self):
        p = self.params
        if self.rule == Rule.EXP_SHIFT:
            return f"e^({p['a']}t)*[{self.base.label}]"
        if self.rule == Rule.DELAY:
            return f"[{self.base.label}](t-{p['a']})"
        if self.rule == Rule.COMPOSITE:
            return ' + '.join(f"{c}*[{part.label}]" for c, part in self.parts)
        args = ','.join(f"{k}={v}" for k, v in p.items())
        return f"{self.rule.value}({args})"

    def eval(self, n, s):
        if n < 0:
            raise InvalidParams(f"index must be nonnegative, got {n}")
        s = float(s)
        if not s > self.abscissa:
            raise AbscissaTooSmall(f"{self.label}: s={s} must exceed {self.abscissa}")
        p = {k: float(v) for k, v in self.params.items()}
        rule = self.rule

        if rule == Rule.EXP:
            return (s - p['a']) ** -(n + 1)
        if rule == Rule.EXP_SHIFT:
            return self.base.eval(n, s - p['a'])
        if rule in (Rule.POWER, Rule.POWER_EXP):
            a = p['a']
            shift = s + p.get('b', 0.0)
            return math.exp(gammaln(a + n + 1) - (n + a + 1) * math.log(shift) - gammaln(n + 1))
        if rule in (Rule.SIN, Rule.COS):
            a = p['a']
            angle = (n + 1) * math.atan2(a, s)
            trig = math.sin(angle) if rule == Rule.SIN else math.cos(angle)
            return trig * (s * s + a * a) ** (-(n + 1) / 2)
        if rule == Rule.DELAY:
            a = p['a']
            terms = [a ** (n - k) / math.factorial(n - k) * self.base.eval(k, s) for k in range(n + 1)]
            return math.exp(-a * s) * math.fsum(terms)
        if rule == Rule.LOG:
            return (harmonic(n) - np.euler_gamma - math.log(s)) / s ** (n + 1)
        return math.fsum(float(c) * part.eval(n, s) for c, part in self.parts)

    def sequence(self, s, N):
        """phi_0(s) .. phi_N(s) from the closed form"""
        return ImageSeq(s=s, values=tuple(self.eval(n, s) for n in range(N + 1)), label=self.label)

    def shifted(self, a):
        """Image of e^{at} f(t)"""
        return ClosedImage(Rule.EXP_SHIFT, {'a': a}, base=self)

    def delayed(self, a):
        return ClosedImage(Rule.DELAY, {'a': a}, base=self)

    def source(self):
        """The SourceFunction this row is the image of"""
        p = {k: float(v) for k, v in self.params.items()}
        rule = self.rule
        label = self.label

        if rule == Rule.EXP:
            a = p['a']
            return SourceFunction(lambda t: math.exp(a * t), exp_order=a, label=label)
        if rule == Rule.EXP_SHIFT:
            a = p['a']
            inner = self.base.source()
            return SourceFunction(lambda t: math.exp(a * t) * inner(t), exp_order=inner.exp_order + a,
                                  bound=inner.bound, origin_exponent=inner.origin_exponent,
                                  label=label, breakpoints=inner.breakpoints)
        if rule == Rule.POWER:
            a = p['a']
            order = GROWTH_SLACK if a > 0 else 0.0
            return SourceFunction(lambda t: t ** a, exp_order=order, bound=power_growth_bound(a),
                                  origin_exponent=min(a, 0.0), label=label)
        if rule == Rule.POWER_EXP:
            a, b = p['a'], p['b']
            order = -b + GROWTH_SLACK if a > 0 else -b
            return SourceFunction(lambda t: t ** a * math.exp(-b * t), exp_order=order, bound=power_growth_bound(a),
                                  origin_exponent=min(a, 0.0), label=label)
        if rule == Rule.SIN:
            a = p['a']
            return SourceFunction(lambda t: math.sin(a * t), label=label)
        if rule == Rule.COS:
            a = p['a']
            return SourceFunction(lambda t: math.cos(a * t), label=label)
        if rule == Rule.DELAY:
            a = p['a']
            inner = self.base.source()
            bound = inner.bound * max(1.0, math.exp(-inner.exp_order * a))
            return SourceFunction(lambda t: inner(t - a) if t > a else 0.0, exp_order=inner.exp_order,
                                  bound=bound, label=label,
                                  breakpoints=(a, *(a + b for b in inner.breakpoints)))
        if rule == Rule.LOG:
            # ln t <= t/e, and t <= e^{slack t}/(slack e)
            return SourceFunction(math.log, exp_order=GROWTH_SLACK, bound=1.0 / (GROWTH_SLACK * math.e ** 2),
                                  origin_exponent=-0.5, label=label)

        sources = [(float(c), part.source()) for c, part in self.parts]
        return SourceFunction(
            lambda t: math.fsum(c * f(t) for c, f in sources),
            exp_order=max(f.exp_order for _, f in sources),
            bound=math.fsum(abs(c) * f.bound for c, f in sources),
            origin_exponent=min(f.origin_exponent for _, f in sources),
            label=label,
            breakpoints=tuple(sorted({b for _, f in sources for b in f.breakpoints})),
        )

    def to_json(self):
        doc = {'rule': self.rule.value, 'params': {k: v for k, v in self.params.items()}}
        if self.base is not None:
            doc['base'] = self.base.to_json()
        if self.parts:
            doc['parts'] = [{'coef': c, 'image': part.to_json()} for c, part in self.parts]
        return doc


def closed_image(rule, params=None, base=None, parts=()):
    """Build the closed-form image of a table row"""
    try:
        rule = Rule(rule)
    except ValueError as e:
        raise InvalidParams(f"unknown rule: {rule}") from e
    return ClosedImage(rule, dict(params or {}), base=base, parts=tuple(parts))


def composite(*parts):
    """Linear combination: composite((c1, img1), (c2, img2), ...)"""
    return closed_image(Rule.COMPOSITE, parts=[(_exact(c), img) for c, img in parts])


def table_rows():
    """Rows of the table for display"""
    return [
        {'rule': rule.value, 'f(t)': f, 'phi_n(s)': image, 'params': ','.join(RULE_PARAMS[rule])}
        for rule, (f, image) in RULE_FORMULAS.items()
    ]


# ---------------------------------------------------------------------------
# Built-in source vocabulary
# ---------------------------------------------------------------------------

BUILTIN_SOURCES = ('const', 'exp', 'power', 'power-exp', 'sin', 'cos', 'log',
                   'one-over-one-minus-exp-neg', 'custom-table-row')


def _one_over_one_minus_exp_neg(t):
    return -1.0 / math.expm1(-t)


def builtin_source(name, params=None):
    """
    Resolve a built-in function name to (SourceFunction, ClosedImage or None)

    'custom-table-row' takes the row in params['rule'] and its parameters alongside.
    """
    params = dict(params or {})
    if name == 'const':
        c = params.get('c', 1)
        image = composite((c, closed_image(Rule.EXP, {'a': 0})))
        return image.source(), image
    if name in ('exp', 'power', 'sin', 'cos'):
        image = closed_image(name, {'a': params.get('a', 1)})
        return image.source(), image
    if name == 'power-exp':
        image = closed_image(Rule.POWER_EXP, {'a': params.get('a', 1), 'b': params.get('b', 1)})
        return image.source(), image
    if name == 'log':
        image = closed_image(Rule.LOG)
        return image.source(), image
    if name == 'one-over-one-minus-exp-neg':
        f = SourceFunction(_one_over_one_minus_exp_neg, exp_order=0.0, bound=2.0,
                           origin_exponent=-1.0, label='1/(1-e^(-t))')
        return f, None
    if name == 'custom-table-row':
        rule = params.pop('rule', None)
        if rule is None:
            raise InvalidSource("custom-table-row needs a 'rule' parameter")
        image = closed_image(rule, params)
        return image.source(), image
    raise InvalidSource(f"unknown built-in function: {name}")

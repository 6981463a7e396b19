"""Rational functions, partial fractions and the residue inverse."""

import math

import pytest
import sympy as sym

from closed_images import Rule, closed_image, composite
from errors import ImproperRational, InvalidParams, NonCancellingPower
from rational_residue import (
    S,
    ExpPolyFunction,
    RationalFn,
    image_rule,
    inverse_closed_image,
    inverse_laplace_rational,
    partial_fractions,
    poles,
    residue_inverse,
)


class TestRationalFn:

    def test_normalization(self):
        R = RationalFn.from_sympy((2 * S + 2) / (4 * (S + 1) * (S - 3)))
        assert R.den.as_expr() == S - 3
        assert R.num.as_expr() == sym.Rational(1, 2)

    def test_equality(self):
        assert RationalFn.from_sympy(1 / (S - 1)) == RationalFn.from_coeffs([2], [2, -2])

    def test_evaluate(self):
        R = RationalFn.from_sympy(1 / (S ** 2 + 1))
        assert R(2.0) == pytest.approx(0.2)

    def test_zero_denominator(self):
        with pytest.raises(ImproperRational):
            RationalFn(sym.Poly(1, S), sym.Poly(0, S))

    @pytest.mark.parametrize('expr', [sym.sin(S), sym.exp(S) / (S - 1), sym.sqrt(S)])
    def test_not_rational(self, expr):
        with pytest.raises(ImproperRational):
            RationalFn.from_sympy(expr)

    def test_other_symbols(self):
        with pytest.raises(ImproperRational):
            RationalFn.from_sympy(1 / (S - sym.Symbol('x')))


class TestPartialFractions:

    def test_simple_poles(self):
        R = RationalFn.from_sympy(1 / ((S - 1) * (S - 2)))
        terms = {(p, m): c for c, p, m in partial_fractions(R)}
        assert terms == {(1, 1): -1, (2, 1): 1}

    def test_double_pole(self):
        R = RationalFn.from_sympy(1 / (S - 2) ** 2)
        assert partial_fractions(R) == [(1, 2, 2)]

    def test_complex_poles(self):
        found = poles(RationalFn.from_sympy(1 / (S ** 2 + 4)))
        assert set(found) == {2 * sym.I, -2 * sym.I}

    def test_numeric_poles(self):
        # irreducible quintic: no closed-form roots
        R = RationalFn.from_sympy(1 / (S ** 5 - S - 1))
        found = poles(R)
        assert sum(found.values()) == 5
        f = inverse_laplace_rational(R)
        assert f.is_real()

    def test_improper(self):
        with pytest.raises(ImproperRational):
            partial_fractions(RationalFn.from_sympy(S ** 2 / (S - 1)))


class TestInverseLaplace:

    def test_sine(self):
        f = inverse_laplace_rational(RationalFn.from_sympy(1 / (S ** 2 + 1)))
        assert f.evaluate(1.3) == pytest.approx(math.sin(1.3), abs=1e-12)

    def test_round_trip(self):
        f = ExpPolyFunction([(3, -1, 1), (sym.Rational(1, 2), 2, 2), (-1, 0, 3)])
        assert inverse_laplace_rational(f.laplace()).same_terms(f)

    def test_derivative(self):
        f = ExpPolyFunction([(1, 2, 2)])
        # (t e^{2t})' = e^{2t} + 2 t e^{2t}
        assert f.derivative().same_terms(ExpPolyFunction([(1, 2, 1), (2, 2, 2)]))

    def test_combine(self):
        f = ExpPolyFunction([(1, 1, 1), (2, 1, 1), (-3, 1, 1), (1, 0, 1)]).combine()
        assert len(f) == 1

    def test_json_shape(self):
        doc = ExpPolyFunction([(1, 2, 1)]).to_json()
        assert doc == {'terms': [{'re_c': 1.0, 'im_c': 0.0, 're_p': 2.0, 'im_p': 0.0, 'm': 1}]}


class TestResidueInverse:

    @pytest.mark.parametrize('a', [-1, 0, 2])
    def test_exponential_for_every_probe(self, a):
        rule = image_rule(closed_image(Rule.EXP, {'a': a}))
        for n in range(4):
            f, report = residue_inverse(rule, n)
            assert f.same_terms(ExpPolyFunction([(1, a, 1)]))
            assert report['independent']

    def test_power_exp(self):
        # t^2 e^{-t}
        f, report = inverse_closed_image(closed_image(Rule.POWER_EXP, {'a': 2, 'b': 1}), n=1)
        assert f.same_terms(ExpPolyFunction([(2, -1, 3)]))
        assert report['independent']

    def test_cosine(self):
        f, _ = inverse_closed_image(closed_image(Rule.COS, {'a': 2}), n=2)
        assert f.evaluate(0.7) == pytest.approx(math.cos(1.4), abs=1e-12)

    def test_shifted_composite(self):
        image = composite((2, closed_image(Rule.SIN, {'a': 1}).shifted(1)), (1, closed_image(Rule.EXP, {'a': 3})))
        f, _ = inverse_closed_image(image, n=1)
        t = 0.4
        assert f.evaluate(t) == pytest.approx(2 * math.exp(t) * math.sin(t) + math.exp(3 * t), abs=1e-12)

    def test_non_image_rule(self):
        # 1/s for every n is not an image sequence: n!/t^n leaves t^{-n}
        with pytest.raises(NonCancellingPower):
            residue_inverse(lambda n: RationalFn.from_sympy(1 / S), 2)

    def test_probe_mismatch_reported(self):
        _, report = residue_inverse(lambda n: RationalFn.from_sympy(1 / S ** (n + 1) if n < 2 else 1 / S ** 2), 0)
        assert not report['independent']

    def test_irrational_power_rejected(self):
        with pytest.raises(InvalidParams):
            image_rule(closed_image(Rule.POWER, {'a': 0.5}))

    def test_log_rejected(self):
        with pytest.raises(InvalidParams):
            image_rule(closed_image(Rule.LOG))

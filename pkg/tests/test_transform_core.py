"""Forward transform by quadrature and the sequence-level rules."""

import math
from fractions import Fraction

import numpy as np
import pytest

from closed_images import Rule, builtin_source, closed_image, composite
from errors import (
    AbscissaMismatch,
    AbscissaTooSmall,
    DerivativeUnavailable,
    InvalidParams,
    InvalidSource,
    NonPositiveDelay,
)
from transform_core import (
    ImageFamily,
    ImageSeq,
    SourceFunction,
    convolve_images,
    exact_sum,
    forward_transform,
    gamma_transform,
    image_from_laplace,
    image_of_delay,
    image_of_shift,
    integrate_image,
    laplace_derivatives,
    sequence_from_values,
)

ONE = closed_image(Rule.EXP, {'a': 0})
RAMP = closed_image(Rule.POWER, {'a': 1})
DECAY = closed_image(Rule.EXP, {'a': -1})
ABSCISSAE = [1.5, 2.0, 2.5, 3.0, 4.0]


class TestForwardTransform:

    def test_exponential_matches_table(self):
        f = closed_image(Rule.EXP, {'a': 2}).source()
        seq = forward_transform(f, 3.0, 10)
        np.testing.assert_allclose(seq.as_array(), np.ones(11), rtol=1e-9)

    def test_power_matches_table(self):
        image = closed_image(Rule.POWER, {'a': Fraction(1, 2)})
        seq = forward_transform(image.source(), 2.0, 8)
        np.testing.assert_allclose(seq.as_array(), image.sequence(2.0, 8).as_array(), rtol=1e-8)

    def test_cosine_matches_table(self):
        image = closed_image(Rule.COS, {'a': 1})
        seq = forward_transform(image.source(), 1.0, 6)
        np.testing.assert_allclose(seq.as_array(), image.sequence(1.0, 6).as_array(), atol=1e-9)

    def test_parallel_matches_serial(self):
        f = closed_image(Rule.SIN, {'a': 2}).source()
        serial = forward_transform(f, 2.0, 6, jobs=1)
        parallel = forward_transform(f, 2.0, 6, jobs=3)
        assert serial.values == parallel.values

    def test_errors_within_tolerance(self):
        seq = forward_transform(closed_image(Rule.EXP, {'a': -1}).source(), 1.0, 5)
        assert max(seq.errors) <= seq.tolerance

    @pytest.mark.parametrize('image', [
        ONE,
        closed_image(Rule.POWER, {'a': Fraction(1, 2)}),
        DECAY,
        closed_image(Rule.POWER_EXP, {'a': 1, 'b': 1}),
    ], ids=lambda image: image.label)
    def test_nonnegative_source_positive_and_decreasing(self, image):
        f = image.source()
        table = np.array([forward_transform(f, s, 6).as_array() for s in (1.0, 1.5, 2.0, 3.0)])
        assert np.all(table > 0)
        assert np.all(np.diff(table, axis=0) < 0)

    def test_abscissa_too_small(self):
        f = closed_image(Rule.EXP, {'a': 2}).source()
        with pytest.raises(AbscissaTooSmall):
            forward_transform(f, 1.5, 3)

    def test_origin_exponent_rejected(self):
        f, _ = builtin_source('one-over-one-minus-exp-neg')
        with pytest.raises(InvalidSource):
            forward_transform(f, 2.0, 3)

    def test_negative_length(self):
        with pytest.raises(InvalidParams):
            forward_transform(closed_image(Rule.EXP, {'a': 0}).source(), 1.0, -1)


class TestGammaTransform:

    def test_integer_order_is_image_entry(self):
        f = closed_image(Rule.EXP, {'a': 1}).source()
        value, _ = gamma_transform(f, 3.0, 4)
        assert value == pytest.approx(1 / 2 ** 4, rel=1e-10)

    def test_real_order_of_constant(self):
        # (1/Gamma(alpha)) int e^{-st} t^{alpha-1} dt = s^{-alpha}
        f = closed_image(Rule.EXP, {'a': 0}).source()
        value, _ = gamma_transform(f, 2.0, 2.5)
        assert value == pytest.approx(2.0 ** -2.5, rel=1e-10)

    def test_singular_source_gives_zeta(self):
        f, _ = builtin_source('one-over-one-minus-exp-neg')
        value, _ = gamma_transform(f, 1.0, 2.0)
        assert value == pytest.approx(math.pi ** 2 / 6, abs=1e-8)

    def test_nonpositive_order(self):
        f = closed_image(Rule.EXP, {'a': 0}).source()
        with pytest.raises(InvalidParams):
            gamma_transform(f, 1.0, 0.0)

    def test_non_integrable_origin(self):
        f, _ = builtin_source('one-over-one-minus-exp-neg')
        with pytest.raises(InvalidSource):
            gamma_transform(f, 1.0, 1.0)


class TestSourceFunction:

    def test_growth_bound(self):
        f = closed_image(Rule.EXP, {'a': 1}).source()
        assert f.within_growth_bound(np.linspace(0.0, 10.0, 21))

    def test_growth_bound_violation(self):
        f = SourceFunction(lambda t: math.exp(2 * t), exp_order=1.0)
        assert not f.within_growth_bound([5.0])

    @pytest.mark.parametrize('image', [
        closed_image(Rule.POWER, {'a': Fraction(1, 2)}),
        closed_image(Rule.POWER, {'a': 3}),
        closed_image(Rule.POWER, {'a': 20}),
        closed_image(Rule.POWER, {'a': Fraction(-1, 2)}),
        closed_image(Rule.POWER_EXP, {'a': 2, 'b': 1}),
        closed_image(Rule.LOG),
    ], ids=lambda image: image.label)
    def test_subexponential_sources_within_bound(self, image):
        f = image.source()
        assert f.within_growth_bound(np.geomspace(1e-2, 1e5, 400))

    def test_power_source_below_unit_abscissa(self):
        image = closed_image(Rule.POWER, {'a': 1})
        seq = forward_transform(image.source(), 0.5, 4)
        np.testing.assert_allclose(seq.as_array(), image.sequence(0.5, 4).as_array(), rtol=1e-9)

    def test_origin_bounded(self):
        f = closed_image(Rule.POWER, {'a': Fraction(-1, 2)}).source()
        assert f.origin_bounded([1e-2, 1e-4, 1e-6])

    def test_invalid_bound(self):
        with pytest.raises(InvalidSource):
            SourceFunction(math.exp, bound=0.0)


class TestImageSeq:

    def test_length_mismatch(self):
        with pytest.raises(InvalidParams):
            ImageSeq(s=1.0, values=(1.0, 2.0), errors=(0.0,))

    def test_empty(self):
        with pytest.raises(InvalidParams):
            ImageSeq(s=1.0, values=())

    def test_error_above_tolerance(self):
        with pytest.raises(InvalidParams):
            ImageSeq(s=1.0, values=(1.0,), errors=(1e-3,), tolerance=1e-6)

    def test_json_shape(self):
        doc = sequence_from_values(2.0, [1.0, 0.5]).to_json()
        assert list(doc) == ['s', 'tol', 'values']
        assert ImageSeq.from_json(doc).values == (1.0, 0.5)

    def test_frame(self):
        frame = sequence_from_values(2.0, [1.0, 0.5, 0.25]).to_frame()
        assert list(frame.columns) == ['n', 'phi_n', 'error']
        assert frame['phi_n'].tolist() == [1.0, 0.5, 0.25]

    def test_truncated(self):
        seq = sequence_from_values(1, [Fraction(1), Fraction(1, 2), Fraction(1, 4)])
        assert seq.truncated(1).values == (Fraction(1), Fraction(1, 2))


class TestExactSum:

    def test_fractions_stay_exact(self):
        assert exact_sum([Fraction(1, 3), Fraction(1, 6)]) == Fraction(1, 2)

    def test_float_uses_fsum(self):
        assert exact_sum([1e16, 1.0, -1e16]) == 1.0


class TestDerivativeForm:

    def test_exact_derivatives(self):
        # F(s) = 1/(s-1) at s = 3: F^(n) = (-1)^n n! / 2^{n+1}
        derivs = [Fraction((-1) ** n * math.factorial(n), 2 ** (n + 1)) for n in range(6)]
        seq = image_from_laplace(derivs, 5, 3)
        assert seq.values == tuple(Fraction(1, 2 ** (n + 1)) for n in range(6))

    def test_numeric_derivatives(self):
        derivs = laplace_derivatives(lambda z: 1 / (z - 1), 3.0, 6)
        seq = image_from_laplace(derivs, 6, 3.0)
        np.testing.assert_allclose(seq.as_array(), [0.5 ** (n + 1) for n in range(7)], rtol=1e-12)

    @pytest.mark.parametrize('image, laplace', [
        (closed_image(Rule.EXP, {'a': 1}), lambda z: 1 / (z - 1)),
        (closed_image(Rule.SIN, {'a': 1}), lambda z: 1 / (z * z + 1)),
        (ONE, lambda z: 1 / z),
    ], ids=['exp', 'sin', 'one'])
    @pytest.mark.parametrize('s', ABSCISSAE)
    def test_matches_quadrature(self, image, laplace, s):
        N = 8
        got = image_from_laplace(laplace_derivatives(laplace, s, N), N, s)
        quad = forward_transform(image.source(), s, N)
        np.testing.assert_allclose(got.as_array(), quad.as_array(), rtol=1e-8, atol=1e-9)

    def test_missing_derivative(self):
        with pytest.raises(DerivativeUnavailable):
            image_from_laplace([1.0, -1.0], 4, 2.0)


class TestRunningIntegral:

    def test_integral_of_exponential(self):
        s, N = 3.0, 8
        exp_1 = closed_image(Rule.EXP, {'a': 1})
        expected = composite((1, exp_1), (-1, closed_image(Rule.EXP, {'a': 0})))
        got = integrate_image(exp_1.sequence(s, N))
        np.testing.assert_allclose(got.as_array(), expected.sequence(s, N).as_array(), rtol=1e-12)

    @pytest.mark.parametrize('f, running', [
        (ONE, RAMP),
        (DECAY, composite((1, ONE), (-1, DECAY))),
        (closed_image(Rule.COS, {'a': 1}), closed_image(Rule.SIN, {'a': 1})),
    ], ids=['one', 'decay', 'cos'])
    def test_matches_quadrature(self, f, running):
        s, N = 2.0, 8
        got = integrate_image(forward_transform(f.source(), s, N))
        quad = forward_transform(running.source(), s, N)
        np.testing.assert_allclose(got.as_array(), quad.as_array(), rtol=1e-8, atol=1e-9)

    def test_needs_positive_abscissa(self):
        with pytest.raises(AbscissaTooSmall):
            integrate_image(sequence_from_values(-1.0, [1.0]))


class TestConvolution:

    def test_convolution_of_exponentials(self):
        s, N = 4.0, 8
        exp_1 = closed_image(Rule.EXP, {'a': 1})
        exp_2 = closed_image(Rule.EXP, {'a': 2})
        expected = composite((1, exp_2), (-1, exp_1))
        got = convolve_images(exp_1.sequence(s, N), exp_2.sequence(s, N))
        np.testing.assert_allclose(got.as_array(), expected.sequence(s, N).as_array(), rtol=1e-12)

    @pytest.mark.parametrize('f, g, product', [
        (ONE, ONE, RAMP),
        (ONE, RAMP, composite((Fraction(1, 2), closed_image(Rule.POWER, {'a': 2})))),
        (ONE, DECAY, composite((1, ONE), (-1, DECAY))),
        (RAMP, RAMP, composite((Fraction(1, 6), closed_image(Rule.POWER, {'a': 3})))),
        (RAMP, DECAY, composite((1, RAMP), (-1, ONE), (1, DECAY))),
        (DECAY, DECAY, closed_image(Rule.POWER_EXP, {'a': 1, 'b': 1})),
    ], ids=['1*1', '1*t', '1*decay', 't*t', 't*decay', 'decay*decay'])
    def test_matches_quadrature(self, f, g, product):
        s, N = 2.0, 8
        got = convolve_images(forward_transform(f.source(), s, N), forward_transform(g.source(), s, N))
        quad = forward_transform(product.source(), s, N)
        np.testing.assert_allclose(got.as_array(), quad.as_array(), rtol=1e-8, atol=1e-9)

    def test_abscissa_mismatch(self):
        with pytest.raises(AbscissaMismatch):
            convolve_images(sequence_from_values(1.0, [1.0]), sequence_from_values(2.0, [1.0]))


class TestShiftAndDelay:

    def test_shift_of_closed_image(self):
        base = closed_image(Rule.COS, {'a': 1})
        shifted = image_of_shift(base, 2)
        assert shifted.eval(3, 4.0) == pytest.approx(base.eval(3, 2.0))

    def test_zero_shift_is_identity(self):
        base = closed_image(Rule.SIN, {'a': 1})
        assert image_of_shift(base, 0) is base

    def test_shift_needs_family(self):
        with pytest.raises(InvalidParams):
            image_of_shift(sequence_from_values(1.0, [1.0]), 1)

    def test_family_shift(self):
        family = ImageFamily(lambda s, N: closed_image(Rule.EXP, {'a': 0}).sequence(s, N), 0.0, 'one')
        got = family.shifted(1.0).at(3.0, 4)
        np.testing.assert_allclose(got.as_array(), [0.5 ** (n + 1) for n in range(5)])
        assert got.s == 3.0

    def test_delay_matches_quadrature(self):
        base = closed_image(Rule.EXP, {'a': 1})
        s, a = 2.5, 0.5
        got = image_of_delay(base.sequence(s, 6), a)
        quad = forward_transform(base.delayed(a).source(), s, 6)
        np.testing.assert_allclose(got.as_array(), quad.as_array(), rtol=1e-8)

    def test_printed_convention_differs(self):
        phi = closed_image(Rule.POWER, {'a': 1}).sequence(2.0, 4)
        oracle = image_of_delay(phi, 1.0)
        printed = image_of_delay(phi, 1.0, convention='printed')
        assert oracle[0] == pytest.approx(printed[0])
        assert abs(oracle[3] - printed[3]) > 1e-3

    def test_nonpositive_delay(self):
        with pytest.raises(NonPositiveDelay):
            image_of_delay(sequence_from_values(1.0, [1.0]), 0)

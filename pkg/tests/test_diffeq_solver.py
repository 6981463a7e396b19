"""Closed-form solution of linear recurrences through the transformed differential equation."""

import math
import random
from fractions import Fraction

import pytest
import sympy as sym

from diffeq_solver import (
    DifferenceEquation,
    build_Q,
    characteristic_roots,
    direct_roots,
    fundamental_solution,
    ode_coefficients,
    particular_via_convolution,
    solve,
)
from errors import InvalidParams, LengthMismatch
from rational_residue import S

ROOT5 = math.sqrt(5)


def _fibonacci(n):
    return ((1 + ROOT5) / 2) ** n / ROOT5 - ((1 - ROOT5) / 2) ** n / ROOT5


class TestEquation:

    def test_iterate(self):
        eq = DifferenceEquation((1, -1, -1), (0, 1))
        assert eq.iterate(10) == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55]

    def test_leading_coefficient_required(self):
        with pytest.raises(InvalidParams):
            DifferenceEquation((0, 1))

    def test_missing_initial_terms(self):
        with pytest.raises(InvalidParams):
            solve(DifferenceEquation((1, -1, -1), (0,)))

    def test_rhs_too_short(self):
        eq = DifferenceEquation((1, -1), (0,), rhs=[1, 1])
        with pytest.raises(LengthMismatch):
            eq.g(5)


class TestCoefficientMap:

    def test_fibonacci_Q(self):
        eq = DifferenceEquation((1, -1, -1), (0, 1))
        Q = build_Q(eq)
        assert Q.as_expr() == 1 - S - S ** 2
        assert ode_coefficients(Q).b == (Fraction(-1), Fraction(3), Fraction(-1))

    def test_difference_and_differential_forms_agree(self):
        rng = random.Random(8)
        for _ in range(200):
            p = rng.randint(1, 4)
            coeffs = [Fraction(rng.randint(1, 9), rng.randint(1, 5)) * rng.choice((-1, 1)) for _ in range(p + 1)]
            eq = DifferenceEquation(tuple(coeffs))
            ode = ode_coefficients(build_Q(eq))
            f = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(p + 5)]
            for n in range(p, len(f)):
                assert eq.lhs(f, n) == ode.lhs(f, n)

    def test_pipeline_roots_match_direct_roots(self):
        eq = DifferenceEquation((1, -1, -1), (0, 1))
        rhos = characteristic_roots(ode_coefficients(build_Q(eq)))
        bases = sorted(complex(sym.N(1 / (1 - rho))).real for rho in rhos)
        direct = sorted(complex(sym.N(r)).real for r in direct_roots(eq))
        assert bases == pytest.approx(direct, abs=1e-12)


class TestSolve:

    def test_binet(self):
        solution = solve(DifferenceEquation((1, -1, -1), (0, 1)), N_check=30)
        assert solution.residual <= 1e-10
        assert not solution.exact
        for n in range(31):
            assert solution.evaluate(n) == pytest.approx(_fibonacci(n), rel=1e-12, abs=1e-12)
        assert not solution.metadata['bypass']

    def test_rational_roots_are_exact(self):
        solution = solve(DifferenceEquation((1, -3, 2), (0, 1)), N_check=20)
        assert solution.exact
        assert solution.evaluate(10) == Fraction(1023)
        assert solution.residual == 0

    def test_repeated_root(self):
        # f_n = (n+1) 2^n
        solution = solve(DifferenceEquation((1, -4, 4), (1, 4)), N_check=20)
        assert solution.exact
        assert [solution.evaluate(n) for n in range(6)] == [(n + 1) * 2 ** n for n in range(6)]
        assert len(solution.terms) == 1

    def test_complex_roots(self):
        # f_n = f_{n-1} - f_{n-2}: period six
        solution = solve(DifferenceEquation((1, -1, 1), (1, 1)), N_check=24)
        assert solution.residual <= 1e-10
        expected = [1, 1, 0, -1, -1, 0]
        for n in range(24):
            assert solution.evaluate(n) == pytest.approx(expected[n % 6], abs=1e-12)

    def test_inhomogeneous(self):
        # f_n - f_{n-1} = 1 with f_0 = 0 gives f_n = n
        N = 20
        eq = DifferenceEquation((1, -1), (0,), rhs=[1] * (N + 1))
        solution = solve(eq, N_check=N)
        assert [solution.evaluate(n) for n in range(N + 1)] == list(range(N + 1))
        assert solution.residual == 0

    def test_continuous_solution(self):
        solution = solve(DifferenceEquation((1, -1, -1), (0, 1)), N_check=10)
        assert solution.metadata['ode_residual'] <= 1e-9
        assert len(solution.metadata['cauchy_data']) == 2
        y = solution.metadata['continuous']
        assert math.isfinite(y.evaluate(1.0))

    def test_json_drops_functions(self):
        doc = solve(DifferenceEquation((1, -1, -1), (0, 1)), N_check=10).to_json()
        assert set(doc) == {'terms', 'residual', 'metadata'}
        assert 'continuous' not in doc['metadata']
        assert set(doc['terms'][0]) == {'poly', 'base_re', 'base_im'}


class TestConvolution:

    def test_fundamental_solution(self):
        eq = DifferenceEquation((1, -1, -1))
        assert fundamental_solution(eq, 6) == [1, 1, 2, 3, 5, 8, 13]

    def test_particular(self):
        assert particular_via_convolution([1, 1, 1], [1, 2, 3]) == [1, 3, 6]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            particular_via_convolution([1, 1], [1])

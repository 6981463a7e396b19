"""Exact combinatorial identities from the Laguerre and mapped Legendre tables."""

import math
from fractions import Fraction

import pytest

from errors import IndexOutOfRange, InvalidParams, ZeroAbscissa
from identities import (
    SWEEPS,
    binom,
    binom_signed,
    bonnet_mapped_check,
    laguerre_image_term,
    legendre_A,
    legendre_A_by_expansion,
    legendre_A_row,
    legendre_mapped_eval,
    legendre_reference,
    sweep_identity_1,
    sweep_laguerre,
    sweep_legendre_table,
    verify_identity_1,
    verify_identity_2,
    verify_identity_3,
    verify_laguerre_identity,
)


class TestBinomial:

    def test_large_exact(self):
        assert binom(60, 30) == 118264581564861424

    def test_out_of_range(self):
        assert binom(5, -1) == 0
        assert binom(3, 5) == 0

    def test_negative_upper(self):
        assert binom(-3, 2) == 6
        assert binom_signed(-1, 3) == -1


class TestLaguerre:

    def test_example(self):
        ok, witness = verify_laguerre_identity(3, 2, 1)
        assert ok
        assert witness['rhs'] == 10

    def test_rational_abscissa(self):
        ok, witness = verify_laguerre_identity(4, 3, Fraction(1, 3))
        assert ok
        assert witness['rhs'] == 35 * 81

    def test_image_term(self):
        assert laguerre_image_term(0, 3, 2) == Fraction(1, 16)
        # L_1(t) = 1 - t
        assert laguerre_image_term(1, 0, 1) == 0
        assert laguerre_image_term(1, 1, 1) == -1
        assert laguerre_image_term(1, 1, 1, printed_sign=True) == 1

    def test_zero_abscissa(self):
        with pytest.raises(ZeroAbscissa):
            verify_laguerre_identity(1, 1, 0)

    def test_sweep(self):
        report = sweep_laguerre(max_m=5, max_n=5, jobs=2)
        assert report['checked'] == 3 * 36
        assert report['all_passed']


class TestLegendreTable:

    def test_second_row(self):
        assert legendre_A_row(2) == (1, -6, 6)

    def test_expansion_agrees(self):
        for n in range(12):
            assert legendre_A_row(n) == legendre_A_by_expansion(n)

    def test_mapped_zero(self):
        # P_1(1 - 2 e^{-t}) vanishes at t = ln 2
        assert legendre_mapped_eval(1, math.log(2)) == pytest.approx(0.0, abs=1e-15)

    def test_against_reference(self):
        for n in range(15):
            for t in (0.0, 0.3, 2.0):
                assert legendre_mapped_eval(n, t) == pytest.approx(legendre_reference(n, t), abs=1e-12)

    def test_index_range(self):
        with pytest.raises(IndexOutOfRange):
            legendre_A(3, 4)
        with pytest.raises(IndexOutOfRange):
            legendre_A_by_expansion(-1)
        with pytest.raises(InvalidParams):
            legendre_mapped_eval(2, -1.0)

    def test_sweep(self):
        assert sweep_legendre_table(max_n=10)['all_passed']


class TestBonnetIdentities:

    def test_identity_1(self):
        ok, witness = verify_identity_1(3)
        assert ok
        assert witness['lhs'] == 70

    @pytest.mark.parametrize('m', [1, 2, 5, 17])
    def test_identity_2(self, m):
        assert verify_identity_2(m)[0]

    def test_identity_3(self):
        for m in range(2, 12):
            for j in range(1, m):
                assert verify_identity_3(m, j)[0]

    def test_identity_3_range(self):
        with pytest.raises(IndexOutOfRange):
            verify_identity_3(2, 2)
        with pytest.raises(IndexOutOfRange):
            verify_identity_3(1, 1)
        with pytest.raises(InvalidParams):
            verify_identity_3(0, 1)

    def test_mapped_recursion(self):
        for m in range(1, 15):
            ok, failures = bonnet_mapped_check(m)
            assert ok, failures

    def test_sweep_report(self):
        report = sweep_identity_1(20)
        assert report == {'identity': '1', 'range': '1 <= m <= 20', 'checked': 20,
                          'all_passed': True, 'counterexamples': []}

    def test_sweep_names(self):
        assert set(SWEEPS) == {'1', '2', '3', 'bonnet', 'laguerre', 'legendre-table'}

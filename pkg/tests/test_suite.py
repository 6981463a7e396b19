"""Verification suite runner and a sample of its checks."""

import random

import pandas as pd
import pytest

import suite
from closed_images import Rule, closed_image
from errors import InvalidParams, QuadratureFailure
from rational_residue import inverse_laplace_rational


class TestRunner:

    def test_collects_rows(self, monkeypatch):
        monkeypatch.setattr(suite, 'CHECKS', [
            (1, 'passes', lambda cfg, jobs=1: (True, 'fine')),
            (2, 'fails', lambda cfg, jobs=1: (False, 'broken')),
        ])
        frame = suite.run_suite('quick')
        assert isinstance(frame, pd.DataFrame)
        assert list(frame.columns) == suite.COLUMNS
        assert list(frame['passed']) == [True, False]

    def test_error_becomes_failed_row(self, monkeypatch):
        def raising(cfg, jobs=1):
            raise QuadratureFailure("no convergence", achieved=1.0)

        monkeypatch.setattr(suite, 'CHECKS', [(1, 'raises', raising)])
        frame = suite.run_suite('quick')
        assert not frame['passed'].iloc[0]
        assert frame['detail'].iloc[0].startswith('QuadratureFailure')

    def test_unexpected_error_becomes_failed_row(self, monkeypatch):
        def crashing(cfg, jobs=1):
            raise ValueError("bad shape")

        monkeypatch.setattr(suite, 'CHECKS', [
            (1, 'crashes', crashing),
            (2, 'passes', lambda cfg, jobs=1: (True, 'fine')),
        ])
        frame = suite.run_suite('quick')
        assert list(frame['passed']) == [False, True]
        assert frame['detail'].iloc[0] == 'ValueError: bad shape'

    def test_progress(self, monkeypatch):
        monkeypatch.setattr(suite, 'CHECKS', [(1, 'passes', lambda cfg, jobs=1: (True, 'fine'))])
        calls = []
        suite.run_suite('quick', progress_callback=lambda stage, percent, message, total: calls.append((stage, message)))
        assert [stage for stage, _ in calls] == ['run', 'done']
        assert calls[-1][1].startswith('passes: fine (')

    def test_no_timings_in_table(self, monkeypatch):
        monkeypatch.setattr(suite, 'CHECKS', [(1, 'passes', lambda cfg, jobs=1: (True, 'fine'))])
        first = suite.run_suite('quick')
        second = suite.run_suite('quick')
        assert 'seconds' not in first.columns
        pd.testing.assert_frame_equal(first, second)

    def test_unknown_profile(self):
        with pytest.raises(InvalidParams):
            suite.run_suite('huge')


class TestTableOracle:

    @pytest.mark.parametrize('rule', [Rule.SIN, Rule.COS])
    @pytest.mark.parametrize('s', [1.0, 1.75, 2.5, 3.25, 4.0])
    def test_trig_rows_full_grid(self, rule, s):
        image = closed_image(rule, {'a': 2})
        f = image.source()
        worst = max(suite.table_entry_error(image, f, s, n) for n in range(suite.PROFILES['full']['table_n'] + 1))
        assert worst <= 1e-8

    def test_full_grid_abscissae(self):
        image = closed_image(Rule.SIN, {'a': 2})
        assert suite.table_abscissae(image, suite.PROFILES['full']['table_abscissae']) == [1.0, 1.75, 2.5, 3.25, 4.0]

    def test_failed_estimate_judged_by_value(self, monkeypatch):
        image = closed_image(Rule.EXP, {'a': 0})

        def flagged(f, s, alpha, tol=None, node_budget=None):
            raise QuadratureFailure("estimate above target", achieved=1.0, value=image.eval(int(alpha) - 1, s))

        monkeypatch.setattr(suite, 'gamma_transform', flagged)
        assert suite.table_entry_error(image, image.source(), 2.0, 3) == 0.0


class TestRandomExpPoly:

    def test_pole_and_multiplicity_ranges(self):
        rng = random.Random(0)
        poles, orders = set(), set()
        for _ in range(200):
            f = suite._random_exp_poly(rng)
            poles.add(len({term.pole for term in f.terms}))
            orders.update(term.m for term in f.terms)
        assert max(poles) == 4
        assert max(orders) == 3

    def test_round_trip_with_high_multiplicity(self):
        rng = random.Random(11)
        for _ in range(10):
            f = suite._random_exp_poly(rng)
            assert inverse_laplace_rational(f.laplace()).same_terms(f)


@pytest.mark.parametrize('check', [
    suite.check_transform_rules,
    suite.check_laguerre,
    suite.check_residue,
    suite.check_fractional,
    suite.check_binet,
    suite.check_equivalence,
])
def test_quick_checks_pass(check):
    passed, detail = check(suite.PROFILES['quick'])
    assert passed, detail

"""
Worked examples
Substitutes the printed solutions of the mapped difference, integral and integro-differential equations
back into their discrete forms and reports the residuals
"""

import math
from fractions import Fraction

from scipy.special import gamma, gammaln

from closed_images import Rule, closed_image, composite
from errors import UnknownCase
from nabla_calculus import NablaRequest, derivative_image
from transform_core import ImageSeq, convolve_images, forward_transform, integrate_image

CASE_KINDS = {
    3: 'system',
    4: 'integral-eq',
    5: 'system',
    6: 'integro-differential',
}


def _check(name, residual, expected_zero, tol):
    return {
        'name': name,
        'max_residual': float(residual),
        'expected_zero': expected_zero,
        'tolerance': tol,
        'passed': (residual <= tol) if expected_zero else True,
    }


def _report(case_id, checks, notes):
    return {
        'case': case_id,
        'kind': CASE_KINDS[case_id],
        'checks': checks,
        'all_expected_passed': all(c['passed'] for c in checks),
        'notes': notes,
    }


# ---------------------------------------------------------------------------
# Case 3: coupled second-order difference system from e^t cos t
# ---------------------------------------------------------------------------

def _case_3(s_values=(2.0, 3.0), n_max=10, tol=1e-10):
    x = closed_image(Rule.COS, {'a': 1}).shifted(1)
    y = composite((-2, closed_image(Rule.SIN, {'a': 1}).shifted(1)))
    # x(0) = 1, x'(0) = 1; y(0) = 0, y'(0) = -2
    worst_xy, worst_printed, worst_true = 0.0, 0.0, 0.0
    for s in s_values:
        for n in range(n_max + 1):
            d2x = derivative_image(NablaRequest(x, 2, s, (1, 1)), n)
            d2y = derivative_image(NablaRequest(y, 2, s, (0, -2)), n)
            worst_xy = max(worst_xy, abs(d2x - y.eval(n, s)))
            if n >= 2:
                worst_printed = max(worst_printed, abs(d2y + 2 * x.eval(n, s)))
                worst_true = max(worst_true, abs(d2y + 4 * x.eval(n, s)))
    checks = [
        _check('nabla2 X = Y', worst_xy, True, tol),
        _check('nabla2 Y = -4 X', worst_true, True, tol),
        _check('nabla2 Y = -2 X (as printed)', worst_printed, False, tol),
    ]
    notes = ["x = e^t cos t gives y = x'' = -2 e^t sin t and y'' = -4x; "
             "the printed coupling constant -2 leaves a non-zero residual"]
    return _report(3, checks, notes)


# ---------------------------------------------------------------------------
# Case 4: Abel-type integral equation int_0^x (x-t)^beta f(t) dt = x^lambda
# ---------------------------------------------------------------------------

CASE_4_GRID = ((2.0, 0.0), (3.0, 1.0), (2.5, 0.5), (1.5, 0.0), (4.0, 1.5))


def _case_4_oracle(lam, beta, n, s):
    """Power-row image of f(x) = Gamma(lam+1)/(Gamma(beta+1) Gamma(lam-beta)) x^{lam-beta-1}"""
    a = lam - beta - 1
    scale = gamma(lam + 1) / (gamma(beta + 1) * gamma(lam - beta))
    return scale * math.exp(gammaln(a + n + 1) - gammaln(n + 1) - (n + a + 1) * math.log(s))


def _case_4_printed(lam, beta, n, s):
    return (gamma(lam + 1) * gamma(n + lam - beta + 2) / (math.factorial(n) * gamma(beta + 1) * gamma(lam - beta))
            * s ** (n + lam - beta - 1))


def _printed_discrete(phi, lam, beta, n, s):
    lhs = math.fsum(gamma(n - k + beta + 1) * s ** (k - beta) * phi(k) for k in range(n + 1))
    rhs = gamma(n + lam + 1) * s ** (-lam)
    return abs(lhs - rhs) / abs(rhs)


def _convolution_discrete(phi, lam, beta, n, s):
    kernel = closed_image(Rule.POWER, {'a': beta}).sequence(s, n)
    seq = ImageSeq(s=s, values=tuple(phi(k) for k in range(n + 1)))
    lhs = convolve_images(kernel, seq)[n]
    rhs = closed_image(Rule.POWER, {'a': lam}).eval(n, s)
    return abs(lhs - rhs) / abs(rhs)


def _case_4(s_values=(1.0, 2.0, 3.0), n_max=6, tol=1e-10):
    worst = {'printed_eq_printed_phi': 0.0, 'printed_eq_oracle_phi': 0.0,
             'convolution_eq_oracle_phi': 0.0, 'printed_phi_vs_oracle': 0.0}
    for lam, beta in CASE_4_GRID:
        for s in s_values:
            def oracle(k):
                return _case_4_oracle(lam, beta, k, s)

            def printed(k):
                return _case_4_printed(lam, beta, k, s)

            for n in range(n_max + 1):
                worst['printed_eq_printed_phi'] = max(worst['printed_eq_printed_phi'],
                                                      _printed_discrete(printed, lam, beta, n, s))
                worst['printed_eq_oracle_phi'] = max(worst['printed_eq_oracle_phi'],
                                                     _printed_discrete(oracle, lam, beta, n, s))
                worst['convolution_eq_oracle_phi'] = max(worst['convolution_eq_oracle_phi'],
                                                         _convolution_discrete(oracle, lam, beta, n, s))
                worst['printed_phi_vs_oracle'] = max(worst['printed_phi_vs_oracle'],
                                                     abs(printed(n) - oracle(n)) / abs(oracle(n)))
    checks = [
        _check('convolution form with power-row image of f', worst['convolution_eq_oracle_phi'], True, tol),
        _check('printed discrete equation, printed phi', worst['printed_eq_printed_phi'], False, tol),
        _check('printed discrete equation, power-row phi', worst['printed_eq_oracle_phi'], False, tol),
        _check('printed phi against power-row phi (relative)', worst['printed_phi_vs_oracle'], False, tol),
    ]
    notes = [
        "the mapped equation needs the weight n!/(n-k)! and a factor s^{-(n+1)} on both sides",
        "the printed phi carries s^{n+lambda-beta-1} where the power row gives s^{-(n+lambda-beta)}",
        f"grid (lambda, beta) = {list(CASE_4_GRID)}, s = {list(s_values)}, n <= {n_max}",
    ]
    return _report(4, checks, notes)


# ---------------------------------------------------------------------------
# Case 5: system of integral equations
# ---------------------------------------------------------------------------

def _case_5_printed(n, s):
    phi = 1 / (s + 1) ** (n + 1) - (n + 1) / (s + 1) ** (n + 2)
    psi = 8 / (9 * (s - 2) ** (n + 1)) + (n + 1) / (3 * (s + 1) ** (n + 2)) - 8 / (9 * (s + 1) ** (n + 1))
    return phi, psi


def _case_5_sources():
    f1 = composite((1, closed_image(Rule.EXP, {'a': -1})),
                   (-1, closed_image(Rule.POWER_EXP, {'a': 1, 'b': 1})))
    f2 = composite((Fraction(8, 9), closed_image(Rule.EXP, {'a': 2})),
                   (Fraction(1, 3), closed_image(Rule.POWER_EXP, {'a': 1, 'b': 1})),
                   (Fraction(-8, 9), closed_image(Rule.EXP, {'a': -1})))
    return f1, f2


def _system_5_residual(phi, psi):
    """Residual of both mapped equations using the running-integral and convolution rules"""
    s = phi.s
    exp2 = closed_image(Rule.EXP, {'a': 2}).sequence(s, phi.n_max)
    ramp = closed_image(Rule.POWER, {'a': 1}).sequence(s, phi.n_max)
    kernel1 = convolve_images(phi, exp2)
    int_psi = integrate_image(psi)
    int_phi = integrate_image(phi)
    kernel2 = convolve_images(psi, ramp)
    worst = 0.0
    for n in range(phi.n_max + 1):
        r1 = phi[n] - (1 / s ** (n + 1) - 2 * kernel1[n] + int_psi[n])
        r2 = psi[n] - (4 * (n + 1) / s ** (n + 2) - int_phi[n] + 4 * kernel2[n])
        worst = max(worst, abs(r1), abs(r2))
    return worst


def _case_5(s=4.0, n_max=10, tol=1e-9):
    printed = [_case_5_printed(n, s) for n in range(n_max + 1)]
    phi = ImageSeq(s=s, values=tuple(p for p, _ in printed), label='phi')
    psi = ImageSeq(s=s, values=tuple(q for _, q in printed), label='psi')
    f1, f2 = _case_5_sources()
    phi_q = forward_transform(f1.source(), s, n_max)
    psi_q = forward_transform(f2.source(), s, n_max)
    drift = max(max(abs(a - b) for a, b in zip(phi.values, phi_q.values)),
                max(abs(a - b) for a, b in zip(psi.values, psi_q.values)))
    checks = [
        _check('printed images in the mapped system', _system_5_residual(phi, psi), True, tol),
        _check('quadrature images of printed f1, f2 in the mapped system', _system_5_residual(phi_q, psi_q), True, 1e-8),
        _check('printed images against quadrature', drift, True, 1e-8),
    ]
    return _report(5, checks, [f"s = {s}, n <= {n_max}"])


# ---------------------------------------------------------------------------
# Case 6: integro-differential equation f'' + int e^{2(t-tau)} f'(tau) dtau = e^{2t}
# ---------------------------------------------------------------------------

def _case_6_image():
    return composite((1, closed_image(Rule.POWER_EXP, {'a': 1, 'b': -1})),
                     (-1, closed_image(Rule.EXP, {'a': 1})),
                     (1, closed_image(Rule.EXP, {'a': 0})))


def _case_6(s_values=(3.0, 4.0), n_max=10, tol=1e-10):
    phi = _case_6_image()
    worst_high, worst_low, drift = 0.0, 0.0, 0.0
    for s in s_values:
        first = [derivative_image(NablaRequest(phi, 1, s, (0,)), k) for k in range(n_max + 1)]
        for n in range(n_max + 1):
            printed = (n + 1) / (s - 1) ** (n + 2) - 1 / (s - 1) ** (n + 1) + 1 / s ** (n + 1)
            drift = max(drift, abs(printed - phi.eval(n, s)))
            second = derivative_image(NablaRequest(phi, 2, s, (0, 0)), n)
            kernel = math.fsum(first[k] / (s - 2) ** (n - k + 1) for k in range(n + 1))
            residual = abs(second + kernel - 1 / (s - 2) ** (n + 1))
            if n >= 2:
                worst_high = max(worst_high, residual)
            else:
                worst_low = max(worst_low, residual)
    f = phi.source()
    quad = forward_transform(f, s_values[0], n_max)
    quad_drift = max(abs(quad[n] - phi.eval(n, s_values[0])) for n in range(n_max + 1))
    checks = [
        _check('printed phi in the mapped equation, n >= 2', worst_high, True, tol),
        _check('printed phi in the mapped equation, n < 2 with f(0) = f\'(0) = 0', worst_low, True, tol),
        _check('printed phi against the table image of t e^t - e^t + 1', drift, True, tol),
        _check('quadrature image of t e^t - e^t + 1', quad_drift, True, 1e-8),
    ]
    notes = ["F(s) = 1/(s (s-1)^2) solves the transformed equation, so the kernel e^{2(t-tau)} "
             "and the solution t e^t - e^t + 1 are consistent"]
    return _report(6, checks, notes)


CASES = {3: _case_3, 4: _case_4, 5: _case_5, 6: _case_6}


def verify_mapped_equation(kind=None, case_id=None, **options):
    """Residual report for one of the built-in worked examples"""
    if case_id not in CASES:
        raise UnknownCase(f"no worked example {case_id}; choose from {sorted(CASES)}")
    if kind is not None and CASE_KINDS[case_id] != kind:
        raise UnknownCase(f"example {case_id} is of kind {CASE_KINDS[case_id]}, not {kind}")
    return CASES[case_id](**options)

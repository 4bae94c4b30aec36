import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from killingbeck import closed_form as cf
from killingbeck.laplace_kernel import (
    DivergenceError,
    PoleAnsatz,
    cleared_residual,
    numeric_laplace,
    origin_value_inconsistent,
    pole_inverse,
    transformed_ode_residual,
)
from killingbeck.model import Channel, PotentialParams, derive_transform_params


def test_transform_of_exponential():
    assert numeric_laplace(lambda r: np.exp(-r), 2.0, abscissa=-1.0) == pytest.approx(1 / 3, abs=1e-12)


def test_transform_of_r_exp():
    assert numeric_laplace(lambda r: r * np.exp(-r), 1.0, abscissa=-1.0) == pytest.approx(0.25, abs=1e-12)


def test_transform_of_gaussian_moment_at_zero():
    with mpmath.workdps(30):
        expected = float(mpmath.quad(lambda r: r * r * mpmath.exp(-r * r), [0, mpmath.inf]))
    assert expected == pytest.approx(math.sqrt(math.pi) / 4, rel=1e-15)
    assert numeric_laplace(lambda r: r * r * np.exp(-r * r), 0.0) == pytest.approx(expected, abs=1e-12)


def test_power_law_pair():
    # L[t^k / Gamma(k+1)] = 1/s^(k+1)
    for k in (0, 1, 3):
        f = lambda r, k=k: r**k / math.gamma(k + 1)
        assert numeric_laplace(f, 2.0, abscissa=0.0) == pytest.approx(2.0 ** -(k + 1), abs=1e-12)


@pytest.mark.parametrize("s, abscissa", [(1.0, 1.0), (0.5, 2.0)])
def test_divergence_below_abscissa(s, abscissa):
    with pytest.raises(DivergenceError):
        numeric_laplace(lambda r: np.exp(abscissa * r), s, abscissa=abscissa)


def test_divergence_detected_without_abscissa():
    with pytest.raises(DivergenceError), np.errstate(over="ignore"):
        numeric_laplace(lambda r: np.exp(3.0 * r), 1.0)
    with pytest.raises(DivergenceError):
        numeric_laplace(lambda r: np.ones_like(r), 0.0, max_panels=500)


def test_divergence_uses_function_abscissa():
    f = pole_inverse(PoleAnsatz(2, -1.0))
    with pytest.raises(DivergenceError):
        numeric_laplace(f, -1.5)


def test_pole_inverse_examples():
    r = np.linspace(0, 5, 11)
    np.testing.assert_allclose(pole_inverse(PoleAnsatz(1, -1.0, 1.0))(r), np.exp(-r), rtol=1e-14)
    np.testing.assert_allclose(pole_inverse(PoleAnsatz(3, -2.0, 4.0))(r), 2 * r**2 * np.exp(-2 * r), rtol=1e-14)
    np.testing.assert_allclose(pole_inverse(PoleAnsatz(2, -1.0, -3.0))(r), -3 * r * np.exp(-r), rtol=1e-14)


def test_pole_round_trip():
    f = pole_inverse(PoleAnsatz(2, -1.0, 1.0))
    assert numeric_laplace(f, 1.0) == pytest.approx(0.25, abs=1e-8)


@pytest.mark.parametrize("v", range(1, 6))
@pytest.mark.parametrize("s0", [-1.0, -2.0])
@pytest.mark.parametrize("s", [1.0, 2.0, 5.0])
def test_inverse_pair_identity(v, s0, s):
    pole = PoleAnsatz(v, s0, 1.0)
    assert abs(numeric_laplace(pole_inverse(pole), s) - pole(s)) < 1e-8


@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_derivative_rule(s):
    f = lambda r: r * np.exp(-r)
    df = lambda r: (1 - r) * np.exp(-r)
    # f(0) = 0, so L{f'} = s L{f}
    lhs = numeric_laplace(df, s, abscissa=-1.0)
    assert lhs == pytest.approx(s * numeric_laplace(f, s, abscissa=-1.0), abs=1e-8)


@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_multiplication_by_r_rule(s):
    f = lambda r: np.exp(-r) * np.cos(r)
    h = 1e-4
    dphi = (numeric_laplace(f, s + h, abscissa=-1.0) - numeric_laplace(f, s - h, abscissa=-1.0)) / (2 * h)
    assert numeric_laplace(lambda r: r * f(r), s, abscissa=-1.0) == pytest.approx(-dphi, abs=1e-6)


def test_pole_ansatz_validation():
    with pytest.raises(ValueError):
        PoleAnsatz(0, -1.0)
    with pytest.raises(ValueError):
        PoleAnsatz(1.5, -1.0)
    with pytest.raises(ValueError):
        PoleAnsatz(1, math.inf)


def _symbolic_cleared(order, alpha, beta, lam, gamma, kappa):
    s, C = sympy.symbols("s C")
    phi = C / (s + beta) ** order
    lhs = (s + beta) * sympy.diff(phi, s, 2) + (s**2 / (4 * alpha) + lam) * sympy.diff(phi, s) + (gamma * s - kappa) * phi
    poly = sympy.Poly(sympy.cancel(lhs * (s + beta) ** (order + 1) / C), s)
    coeffs = [float(c) for c in reversed(poly.all_coeffs())]
    return coeffs + [0.0] * (3 - len(coeffs))


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=7)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 5),
    st.fractions(min_value="1/7", max_value=3, max_denominator=7),
    rationals,
    rationals,
    rationals,
    rationals,
)
def test_cleared_residual_matches_symbolic_expansion(order, alpha, beta, lam, gamma, kappa):
    args = [sympy.Rational(x.numerator, x.denominator) for x in (alpha, beta, lam, gamma, kappa)]
    expected = _symbolic_cleared(order, *args)
    got = cleared_residual(float(order), *(float(x) for x in (alpha, beta, lam, gamma, kappa)))
    np.testing.assert_allclose(got.coefficients, expected, rtol=1e-12, atol=1e-12)


def test_cleared_coefficients_are_the_three_relations():
    args = dict(order=2.0, alpha=0.7, beta=-0.3, lam=1.1, gamma=0.4, kappa=-0.9)
    poly = cleared_residual(**args)
    res = cf.identity_relations(args["order"], args["alpha"], args["beta"], args["gamma"], args["lam"], args["kappa"])
    np.testing.assert_allclose(poly.coefficients, [res.energy, res.coulomb, res.pole_order], rtol=1e-14)


def test_transformed_residual_oscillator_ground_state():
    p = PotentialParams(0.5, 0.0, 0.0, 1.0)
    ch = Channel(0, 0, 3)
    poly = transformed_ode_residual(PoleAnsatz(1, 0.0, 1.0), p, ch, 1.5)
    assert poly.coefficients[0] == pytest.approx(0.0, abs=1e-15)
    assert poly.coefficients[1] == pytest.approx(0.0, abs=1e-15)
    assert poly.coefficients[2] == pytest.approx(-0.5, abs=1e-15)
    assert not poly.is_zero()


def test_transformed_residual_independent_of_coefficient():
    p = PotentialParams(0.8, 0.6, -0.2, 1.4)
    ch = Channel(2, 1, 4)
    beta = derive_transform_params(p, ch).beta
    one = transformed_ode_residual(PoleAnsatz(3, -beta, 1.0), p, ch, 0.9)
    two = transformed_ode_residual(PoleAnsatz(3, -beta, 2.0), p, ch, 0.9)
    assert one == two


def test_transformed_residual_rejects_mismatched_pole():
    p = PotentialParams(0.8, 0.6, -0.2, 1.4)
    ch = Channel(2, 1, 4)
    beta = derive_transform_params(p, ch).beta
    with pytest.raises(ValueError):
        transformed_ode_residual(PoleAnsatz(2, -beta), p, ch, 0.9)
    with pytest.raises(ValueError):
        transformed_ode_residual(PoleAnsatz(3, beta + 1.0), p, ch, 0.9)


def test_transformed_residual_pointwise():
    """Cleared polynomial times C/(s+beta)^(n+2) reproduces the transformed left side."""
    p = PotentialParams(0.8, 0.6, -0.2, 1.4)
    ch = Channel(1, 0, 3)
    E = 1.7
    d = derive_transform_params(p, ch, energy=E)
    C, v = 2.5, ch.n + 1
    poly = transformed_ode_residual(PoleAnsatz(v, -d.beta, C), p, ch, E)
    kappa = p.mu * p.c / (2 * d.alpha)
    for s in (0.3, 1.0, 4.0):
        x = s + d.beta
        phi, dphi, d2phi = C * x**-v, -v * C * x ** (-v - 1), v * (v + 1) * C * x ** (-v - 2)
        lhs = x * d2phi + (s * s / (4 * d.alpha) + d.lam) * dphi + (d.gamma * s - kappa) * phi
        assert lhs == pytest.approx(poly(s) * C * x ** (-v - 1), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(0.05, 5.0),
    st.floats(-3.0, 3.0),
    st.floats(0.1, 5.0),
    st.integers(0, 4),
    st.integers(2, 8),
    st.booleans(),
    st.floats(-1.0, 1.0).filter(lambda x: abs(x) > 1e-3),
)
def test_zero_polynomial_iff_identities_hold(a, b, mu, l, dim, satisfied, kick):
    """Force the order to 4 alpha gamma and c to its coulomb value; optionally break one."""
    p = PotentialParams(a, b, 0.0, mu)
    d = derive_transform_params(p, Channel(0, l, dim))
    order = 4 * d.alpha * d.gamma
    kappa = d.gamma * d.beta
    lam = (order * (order + 1) - kappa * d.beta) / order if order != 0 else 0.0
    if not satisfied:
        lam += kick
    res = cf.identity_relations(order, d.alpha, d.beta, d.gamma, lam, kappa)
    poly = cleared_residual(order, d.alpha, d.beta, lam, d.gamma, kappa)
    zero_residuals = res.all_zero(atol=1e-12 * poly.scale)
    assert poly.is_zero(1e-12) == zero_residuals
    # with order 0 the energy coefficient is -kappa beta = -gamma beta^2 only
    if order != 0 or d.beta == 0:
        assert zero_residuals == satisfied


def test_origin_flag_only_for_first_order_pole():
    assert origin_value_inconsistent(PoleAnsatz(1, -0.5, 1.0))
    assert not origin_value_inconsistent(PoleAnsatz(2, -0.5, 1.0))

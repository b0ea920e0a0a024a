from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from periodscope import registry
from periodscope.involution import (
    G_over_g2,
    balance,
    delta,
    delta_rational,
    ddelta,
    has_even_energy,
    loud_P,
    phi,
    phi_closed_form,
    phi_from_definition,
    sigma,
    sigma_inverse,
)
from periodscope.potential import Potential, annulus

X = sp.symbols("x")

POLYS = {
    "hyperelliptic": (registry.hyperelliptic(-1, Fraction(1, 2)), X * (X + 1) * (X**2 - X + sp.Rational(1, 2))),
    "cubic-soft": (registry.cubic_soft(), X - X**3),
    "odd-quintic": (registry.odd_quintic(-1), X - X**3 + X**5),
    "quadratic": (Potential.polynomial([0, 1, 1]), X + X**2),
}


def sympy_forms(g):
    G = sp.integrate(g, X)
    d = sp.diff(G / g**2, X)
    ph = sp.diff(d, X) * G / g - d / 2
    return [sp.lambdify(X, e, "mpmath") for e in (G, G / g**2, d, sp.diff(d, X), ph)]


@pytest.mark.parametrize("name", list(POLYS))
def test_sigma_is_the_level_involution(name):
    p, _ = POLYS[name]
    ann = annulus(p)
    top = ann.x_M if np.isfinite(ann.x_M) else 5.0
    xs = np.linspace(0, top, 41)[1:-1]
    s = sigma(p, ann, xs)
    assert np.all(s < 0) and np.all(s > ann.x_m)
    assert np.allclose(p.G(s), p.G(xs), rtol=1e-12, atol=1e-15)
    back = sigma_inverse(p, ann, s)
    assert np.allclose(back, xs, rtol=1e-10)


@pytest.mark.parametrize("name", list(POLYS))
def test_criterion_functions_match_sympy(name):
    p, g = POLYS[name]
    _, Gg2, d, dd, ph = sympy_forms(g)
    for x in (-0.4, -0.05, 0.001, 0.07, 0.3, 0.6):
        ref = [float(f(x)) for f in (Gg2, d, dd, ph)]
        got = [float(f(p, np.array([x]))[0]) for f in (G_over_g2, delta, ddelta, phi)]
        for r, v in zip(ref, got):
            assert v == pytest.approx(r, rel=1e-9, abs=1e-12)


def test_center_values():
    # at the center G/g^2 -> 1/(2 g'(0)) and delta(0) = -g''(0)/(3 g'(0)^2)
    p = POLYS["quadratic"][0]
    assert float(G_over_g2(p, np.array([0.0]))[0]) == pytest.approx(0.5)
    assert float(delta(p, np.array([0.0]))[0]) == pytest.approx(-2.0 / 3.0)


@given(st.floats(0.01, 0.9))
def test_phi_forms_agree(x):
    p = POLYS["hyperelliptic"][0]
    a = phi_closed_form(p, np.array([x]))[0]
    b = phi_from_definition(p, np.array([x]))[0]
    assert a == pytest.approx(b, rel=1e-6, abs=1e-9)


def test_odd_g_balance_doubles_delta():
    p = POLYS["odd-quintic"][0]
    ann = annulus(p)
    assert has_even_energy(p)
    xs = np.linspace(0.05, 2.0, 30)
    assert np.allclose(balance(p, ann, "delta", xs), 2 * delta(p, xs), rtol=1e-13)


def test_loud_P_odd_case():
    p = POLYS["odd-quintic"][0]
    ann = annulus(p)
    xs = np.linspace(0.1, 2.0, 20)
    assert np.allclose(loud_P(p, ann, xs), p.G(xs) / (4 * xs**2), rtol=1e-13)


def test_delta_rational_is_reduced():
    rf = delta_rational(POLYS["cubic-soft"][0])
    num, den = rf.num, rf.den
    assert num.gcd(den).degree == 0


def test_isochronous_delta_vanishes():
    p = registry.loud_quarter()
    xs = np.linspace(-3.5, 50.0, 60)
    assert np.max(np.abs(balance(p, annulus(p), "delta", xs[xs > 0]))) < 1e-12

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodscope.fractional import (
    abel_invert,
    frac_integral,
    frac_integral_piecewise_linear,
    sign_changes,
)


@given(st.floats(0.1, 2.5), st.floats(0.0, 3.0), st.floats(0.05, 4.0))
def test_power_law(alpha, beta, x):
    ref = math.gamma(beta + 1) / math.gamma(beta + alpha + 1) * x ** (beta + alpha)
    assert frac_integral(lambda s: s**beta, alpha, x, tol=1e-12) == pytest.approx(ref, rel=1e-9)


def test_order_one_is_the_integral():
    xs = np.linspace(0, 2, 9)
    assert np.allclose(frac_integral(np.cos, 1.0, xs), np.sin(xs), atol=1e-12)


def test_vectorised_and_zero():
    out = frac_integral(np.exp, 0.5, np.array([0.0, 1.0]))
    assert out[0] == 0.0 and out[1] == pytest.approx(frac_integral(np.exp, 0.5, 1.0))


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=8), st.floats(0.2, 1.8))
def test_piecewise_linear_closed_form(values, alpha):
    knots = np.linspace(0, 2, len(values))
    xs = np.array([0.3, 1.0, 2.0, 2.7])
    got = frac_integral_piecewise_linear(knots, values, alpha, xs)
    for X, v in zip(xs, got):
        # t = (X - s)^alpha turns the kernel into dt / (alpha Gamma(alpha)); split at the kinks
        f = lambda t: mp.mpf(float(np.interp(float(X - t ** (1 / alpha)), knots, values)))  # noqa: E731
        cuts = sorted({0.0, X**alpha} | {(X - k) ** alpha for k in knots if 0 < k < X})
        ref = mp.quad(f, cuts) / mp.gamma(alpha + 1)
        assert v == pytest.approx(float(ref), abs=1e-9)


def test_abel_inversion_recovers_function():
    xs = np.linspace(0.1, 2.0, 7)
    Af = lambda t: frac_integral(np.cos, 0.5, t, tol=1e-13)  # noqa: E731
    assert np.allclose(abel_invert(Af, xs), np.cos(xs), atol=1e-6)


def test_abel_inversion_with_known_derivative():
    # I^(1/2)[1](x) = 2 sqrt(x/pi); its derivative is 1/sqrt(pi x)
    Af = lambda t: 2 * np.sqrt(np.asarray(t) / math.pi)  # noqa: E731
    dAf = lambda t: 1 / np.sqrt(math.pi * np.asarray(t))  # noqa: E731
    assert np.allclose(abel_invert(Af, np.array([0.5, 1.5]), dAf=dAf), 1.0, atol=1e-9)


def test_abel_inversion_needs_vanishing_start():
    with pytest.raises(ValueError, match="Af\\(0\\) must vanish"):
        abel_invert(lambda t: 1.0 + 0 * np.asarray(t), 1.0)


def test_bad_order():
    with pytest.raises(ValueError):
        frac_integral(np.cos, 0.0, 1.0)
    with pytest.raises(ValueError):
        frac_integral(np.cos, 0.5, -1.0)


def test_sign_changes_floor():
    assert sign_changes([1, -1, 1]) == 2
    assert sign_changes([1, -1e-15, 1], rel_floor=1e-12) == 0
    assert sign_changes([]) == 0

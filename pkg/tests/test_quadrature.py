import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodscope import registry
from periodscope.potential import Potential, annulus, turning_points
from periodscope.quadrature import (
    QuadratureError,
    center_asymptotics,
    d2period,
    default_grid,
    dperiod,
    fd_d2period,
    fd_dperiod,
    period,
    sample,
    tanh_sinh,
)

mp.mp.dps = 30


def mp_period(coeffs, h):
    """T(h) = sqrt(2) int dx / sqrt(h - G) by mpmath tanh-sinh between the turning points."""
    cs = [mp.mpf(Fraction(c).numerator) / Fraction(c).denominator for c in coeffs]
    G = lambda x: sum(c * x ** (i + 1) / (i + 1) for i, c in enumerate(cs))  # noqa: E731
    p = Potential.polynomial(coeffs)
    lev = turning_points(p, annulus(p), h)
    lo = mp.findroot(lambda x: G(x) - h, mp.mpf(lev.x_minus))
    hi = mp.findroot(lambda x: G(x) - h, mp.mpf(lev.x_plus))
    return float(mp.sqrt(2) * mp.quad(lambda x: 1 / mp.sqrt(h - G(x)), [lo, 0, hi]))


def test_harmonic_period_is_2pi():
    p = registry.linear()
    ann = annulus(p)
    for h in (1e-6, 1.0, 1e6):
        assert period(p, ann, h).T == pytest.approx(2 * math.pi, rel=1e-13)
        assert dperiod(p, ann, h) == 0.0


@pytest.mark.parametrize(
    "coeffs,frac",
    [
        ([0, 1, 0, -1], 0.5),
        ([0, 1, 0, -1], 0.999),
        ([0, 1, 1], 0.3),
        ([0, 1, Fraction(1, 2), Fraction(-1, 2), Fraction(1, 2)], 0.9),
        ([0, 0, 0, 1, 1], 0.5),
    ],
)
def test_period_matches_mpmath(coeffs, frac):
    p = Potential.polynomial(coeffs)
    ann = annulus(p)
    h = frac * ann.h_s
    ref = mp_period(coeffs, h)
    assert period(p, ann, h).T == pytest.approx(ref, rel=1e-10)
    assert period(p, ann, h, method="tanh-sinh").T == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("name", ["hyperelliptic", "cubic-soft", "odd-quintic:k=-1", "nilpotent-soft"])
def test_derivatives_match_finite_differences(name):
    p = registry.named(name)
    ann = annulus(p)
    h = 0.37 * ann.h_s if ann.bounded else 0.8
    tp = dperiod(p, ann, h)
    assert tp == pytest.approx(fd_dperiod(p, ann, h), rel=1e-6, abs=1e-8)
    assert tp == pytest.approx(dperiod(p, ann, h, method="tanh-sinh"), rel=1e-9)
    tpp = d2period(p, ann, h)
    assert tpp == pytest.approx(fd_d2period(p, ann, h), rel=1e-4)
    assert tpp == pytest.approx(d2period(p, ann, h, method="tanh-sinh"), rel=1e-8)


@given(st.floats(1e-3, 0.999))
def test_hyperelliptic_methods_agree(frac):
    p = registry.hyperelliptic(-1, Fraction(1, 2))
    ann = annulus(p)
    h = frac * ann.h_s
    a = period(p, ann, h).T
    b = period(p, ann, h, method="tanh-sinh").T
    assert a == pytest.approx(b, rel=1e-11)


def test_sample_bundles_all_orders():
    p = registry.cubic_soft()
    s = sample(p, annulus(p), 0.1)
    assert s.T > 2 * math.pi and s.Tp > 0 and s.Tpp is not None


def test_center_asymptotics_closed_form():
    # g = x + x^2: T'(0+) = pi (5 g''^2 - 3 g' g''') / 12 = 5 pi / 3
    a = center_asymptotics(Potential.polynomial([0, 1, 1]))
    assert a.T0 == pytest.approx(2 * math.pi) and a.Tp0 == pytest.approx(5 * math.pi / 3)
    assert center_asymptotics(registry.nilpotent_plus()).divergent


def test_energy_outside_annulus():
    p = registry.cubic_soft()
    with pytest.raises(ValueError):
        period(p, annulus(p), 0.25)


def test_unknown_method():
    p = registry.linear()
    with pytest.raises(ValueError):
        period(p, annulus(p), 1.0, method="simpson")


def test_default_grid_stays_inside():
    ann = annulus(registry.cubic_soft())
    hs = default_grid(ann, 50)
    assert len(hs) == 50 and np.all(np.diff(hs) > 0)
    assert hs[0] > 0 and hs[-1] < ann.h_s


def test_tanh_sinh_endpoint_singularity():
    res = tanh_sinh(lambda x, da, db: 1 / np.sqrt(da * db), 0.0, 1.0, tol=1e-12)
    assert res.value == pytest.approx(math.pi, rel=1e-11)


def test_nonconvergence_is_reported():
    with pytest.raises(QuadratureError):
        tanh_sinh(lambda x, da, db: np.sin(1e6 * x) / da, 0.0, 1.0, tol=1e-14, max_level=3)

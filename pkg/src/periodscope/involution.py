"""The involution sigma with G(sigma(x)) = G(x), balances and criterion functions.

Criterion functions:

* ``delta``     = (G/g^2)' = (g^2 - 2 G g') / g^3
* ``phi``       = delta' G/g - delta/2
* ``G_over_g2`` = G/g^2
* ``loud_P``    = G(x) / (x - sigma(x))^2

For exact polynomials (and smooth bundles that carry rational forms) delta
and phi are reduced to lowest terms once, exactly, and evaluated in floating
point near the origin, where the reduction removes the removable
singularity.  Away from it the expanded denominators lose accuracy near the
other zeros of g, so the direct formulas in g, g', g'', G take over.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .exactpoly import Poly, RationalFunction
from .potential import Potential, PeriodAnnulus, level, solve_level

TAYLOR_RADIUS = 1e-4
CRITERIA = ("delta", "phi", "G_over_g2", "loud_P")


# ---------------------------------------------------------------------------
# exact rational forms
# ---------------------------------------------------------------------------


def G_over_g2_rational(p: Potential) -> RationalFunction:
    return p._memo("Gg2", lambda: p.rational_G() / (p.rational_g() * p.rational_g()))


def delta_rational(p: Potential) -> RationalFunction:
    """delta = (G/g^2)' in lowest terms."""
    return p._memo("delta", lambda: G_over_g2_rational(p).derivative())


def ddelta_rational(p: Potential) -> RationalFunction:
    return p._memo("ddelta", lambda: delta_rational(p).derivative())


def phi_rational(p: Potential) -> RationalFunction:
    """phi = delta' G/g - delta/2 in lowest terms."""

    def build():
        G, g = p.rational_G(), p.rational_g()
        return ddelta_rational(p) * G / g - delta_rational(p) * Fraction(1, 2)

    return p._memo("phi", build)


def _float_ratfun(rf: RationalFunction):
    n = tuple(float(c) for c in rf.num.coeffs)
    d = tuple(float(c) for c in rf.den.coeffs)

    def f(x):
        x = np.asarray(x, dtype=float)
        vn = np.zeros_like(x)
        for c in reversed(n):
            vn = vn * x + c
        vd = np.zeros_like(x)
        for c in reversed(d):
            vd = vd * x + c
        with np.errstate(divide="ignore", invalid="ignore"):
            return vn / vd

    return f


def _near_radius(p: Potential) -> float:
    """Half the distance from 0 to the nearest other zero of g (at most 1/2)."""

    def build():
        from .potential import annulus

        ann = annulus(p)
        return 0.5 * min(abs(ann.a), abs(ann.b), 1.0)

    return p._memo("near_radius", build)


def _blend(p: Potential, key: str, rf_builder, x, direct):
    """Reduced rational form for |x| < radius, ``direct(x)`` elsewhere."""
    f = p._memo(key, lambda: _float_ratfun(rf_builder(p)))
    rf = rf_builder(p)
    if rf.num.degree <= 0 and rf.den.degree <= 0:
        # constant (e.g. identically zero): the direct formula would only add rounding
        return np.full(np.shape(x), float(rf.num[0]) if rf.num else 0.0)
    near = np.abs(x) < _near_radius(p)
    if np.all(near):
        return f(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        far = direct(np.where(near, 1.0, x))
    if not np.any(near):
        return far
    return np.where(near, f(np.where(near, x, 0.0)), far)


def _delta_direct(p: Potential, x):
    g, dg, G = p.g(x), p.dg(x), p.G(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (g * g - 2 * G * dg) / g**3


def _ddelta_direct(p: Potential, x):
    g, dg, d2g, G = p.g(x), p.dg(x), p.d2g(x), p.G(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -3 * dg / g**2 - 2 * G * d2g / g**3 + 6 * G * dg * dg / g**4


def _signed_blowup(x, values, sign_right: float):
    """Replace the value at x = 0 by the one-sided infinite limit."""
    x = np.asarray(x, dtype=float)
    at0 = x == 0
    if np.any(at0):
        side = np.where(np.signbit(x), -1.0, 1.0)
        values = np.where(at0, sign_right * side * np.inf, values)
    return values


# ---------------------------------------------------------------------------
# criterion functions (vectorised)
# ---------------------------------------------------------------------------


def center_values(p: Potential) -> tuple[float, float]:
    """delta(0) and delta'(0) for an elementary center, from g'(0), g''(0), g'''(0)."""
    d1, d2, d3 = (float(v) for v in p.derivatives_at_zero())
    return -d2 / (3 * d1 * d1), (5 * d2 * d2 - 3 * d1 * d3) / (12 * d1**3)


def center_values_exact(p: Potential) -> tuple[Fraction, Fraction]:
    d1, d2, d3 = p.derivatives_at_zero()
    return -d2 / (3 * d1 * d1), (5 * d2 * d2 - 3 * d1 * d3) / (12 * d1**3)


def _k(p: Potential) -> int:
    from .potential import validate

    return validate(p).k


def delta(p: Potential, x):
    """delta(x); signed infinities at the origin of a nilpotent center."""
    x = np.asarray(x, dtype=float)
    k = _k(p)
    if p.has_rational_form:
        v = _blend(p, "delta_f", delta_rational, x, lambda t: _delta_direct(p, t))
    else:
        v = _delta_direct(p, x)
        if k == 0:
            d0, d1 = center_values(p)
            v = np.where(np.abs(x) < TAYLOR_RADIUS, d0 + d1 * x, v)
    if k >= 1:
        v = _signed_blowup(x, v, -1.0)
    return v


def ddelta(p: Potential, x):
    """delta'(x)."""
    x = np.asarray(x, dtype=float)
    if p.has_rational_form:
        return _blend(p, "ddelta_f", ddelta_rational, x, lambda t: _ddelta_direct(p, t))
    v = _ddelta_direct(p, x)
    if _k(p) == 0:
        v = np.where(np.abs(x) < TAYLOR_RADIUS, center_values(p)[1], v)
    return v


def phi(p: Potential, x):
    """phi(x) = delta'(x) G(x)/g(x) - delta(x)/2."""
    x = np.asarray(x, dtype=float)
    k = _k(p)
    if p.has_rational_form:
        v = _blend(p, "phi_f", phi_rational, x, lambda t: phi_closed_form(p, t))
    else:
        v = phi_closed_form(p, x)
        if k == 0:
            v = np.where(np.abs(x) < TAYLOR_RADIUS, -0.5 * center_values(p)[0], v)
    if k >= 1:
        v = np.where(x == 0, np.nan, v)
    return v


def phi_closed_form(p: Potential, x):
    """(12 (G g')^2 - 4 g G (g'' G + g' g) - g^4) / (2 g^5)."""
    x = np.asarray(x, dtype=float)
    g, dg, d2g, G = p.g(x), p.dg(x), p.d2g(x), p.G(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (12 * (G * dg) ** 2 - 4 * g * G * (d2g * G + dg * g) - g**4) / (2 * g**5)


def phi_from_definition(p: Potential, x):
    """delta'(x) G(x)/g(x) - delta(x)/2 using the separately evaluated pieces."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return ddelta(p, x) * p.G(x) / p.g(x) - 0.5 * delta(p, x)


def G_over_g2(p: Potential, x):
    x = np.asarray(x, dtype=float)
    if p.has_rational_form:
        return _blend(p, "Gg2_f", G_over_g2_rational, x, lambda t: p.G(t) / p.g(t) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = p.G(x) / p.g(x) ** 2
    if _k(p) == 0:
        d1 = float(p.derivatives_at_zero()[0])
        v = np.where(np.abs(x) < 1e-8, 0.5 / d1, v)
    return v


# ---------------------------------------------------------------------------
# the involution
# ---------------------------------------------------------------------------


def has_even_energy(p: Potential) -> bool:
    return p.is_polynomial and p.G_poly.is_even()


def sigma(p: Potential, ann: PeriodAnnulus, x):
    """sigma(x) in (x_m, 0) for x in (0, x_M); vectorised."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0) or np.any(x >= ann.x_M):
        raise ValueError("sigma is defined on the open interval (0, x_M)")
    if has_even_energy(p):
        z = -x
    elif p.bundle is not None and p.bundle.sigma is not None:
        z = np.asarray(p.bundle.sigma(x), dtype=float)
    else:
        k = ann.k
        r = level(p, k, x)
        z = solve_level(p, ann, -r)
    return float(z[0]) if scalar else z


def sigma_inverse(p: Potential, ann: PeriodAnnulus, z):
    """The positive partner of z in (x_m, 0)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if has_even_energy(p):
        return -z
    return solve_level(p, ann, -level(p, ann.k, z))


CriterionLike = Union[str, Callable]


def _criterion(p: Potential, f: CriterionLike) -> Callable:
    if callable(f):
        return f
    table = {"delta": delta, "phi": phi, "G_over_g2": G_over_g2}
    if f not in table:
        raise ValueError(f"unknown criterion function {f!r}")
    fn = table[f]
    return lambda x: fn(p, x)


def balance(p: Potential, ann: PeriodAnnulus, f: CriterionLike, x, z=None):
    """B(f)(x) = f(x) - f(sigma(x)).  ``z`` may supply precomputed sigma(x)."""
    fn = _criterion(p, f)
    x = np.asarray(x, dtype=float)
    if z is None:
        z = sigma(p, ann, x)
    return fn(x) - fn(np.asarray(z, dtype=float))


def loud_P(p: Potential, ann: PeriodAnnulus, x, z=None):
    """G(x) / (x - sigma(x))^2."""
    x = np.asarray(x, dtype=float)
    z = sigma(p, ann, x) if z is None else np.asarray(z, dtype=float)
    return p.G(x) / (x - z) ** 2


def loud_total_derivative(p: Potential, ann: PeriodAnnulus, x, z=None):
    """d/dx of G(x)/(x - z)^2 along z = sigma(x), with dz/dx = g(x)/g(z)."""
    x = np.asarray(x, dtype=float)
    z = sigma(p, ann, x) if z is None else np.asarray(z, dtype=float)
    gx, gz, Gx = p.g(x), p.g(z), p.G(x)
    dzdx = gx / gz
    d = x - z
    return gx / d**2 - 2 * Gx * (1 - dzdx) / d**3

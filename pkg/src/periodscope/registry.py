"""Built-in potentials.

Names accept parameters after a colon, e.g. ``odd-quintic:k=-1`` or
``hyperelliptic:beta=-7/5,alpha=1/2``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .exactpoly import Poly, RationalFunction, parse_rational
from .potential import Potential, SmoothBundle


def linear() -> Potential:
    return Potential.polynomial([0, 1], name="linear")


def odd_quintic(k) -> Potential:
    """g = x + k x^3 + x^5 (a global center for k > -2)."""
    k = Fraction(k)
    return Potential.polynomial([0, 1, 0, k, 0, 1], name=f"odd-quintic:k={k}")


def hyperelliptic(beta, alpha) -> Potential:
    """g = x (x + 1) (x^2 + beta x + alpha)."""
    beta, alpha = Fraction(beta), Fraction(alpha)
    g = Poly([0, 1]) * Poly([1, 1]) * Poly([alpha, beta, 1])
    return Potential.polynomial(g, name=f"hyperelliptic:beta={beta},alpha={alpha}")


def cubic_soft() -> Potential:
    return Potential.polynomial([0, 1, 0, -1], name="cubic-soft")


def nilpotent_plus() -> Potential:
    """g = x^3 (x + 1)."""
    return Potential.polynomial([0, 0, 0, 1, 1], name="nilpotent-plus")


def nilpotent_soft() -> Potential:
    """g = x^3 (1 - x^2)."""
    return Potential.polynomial([0, 0, 0, 1, 0, -1], name="nilpotent-soft")


def loud_quarter() -> Potential:
    """g = w - w^-3 with w = 1 + x/4 on (-4, inf); an isochronous center."""

    def w(x):
        return 1.0 + np.asarray(x, dtype=float) / 4.0

    @np.errstate(divide="ignore", invalid="ignore")
    def g(x):
        v = w(x)
        # (w - 1)(w + 1)(w^2 + 1) / w^3 keeps relative accuracy near 0
        return (np.asarray(x, dtype=float) / 4.0) * (v + 1.0) * (v * v + 1.0) / v**3

    def dg(x):
        return 0.25 + 0.75 * w(x) ** -4

    def d2g(x):
        return -0.75 * w(x) ** -5

    def d3g(x):
        return (15.0 / 16.0) * w(x) ** -6

    @np.errstate(divide="ignore", invalid="ignore")
    def G(x):
        x = np.asarray(x, dtype=float)
        return x * x * (x + 8.0) ** 2 / (8.0 * (x + 4.0) ** 2)

    def sig(x):
        x = np.asarray(x, dtype=float)
        return -4.0 * x / (x + 4.0)

    xp = Poly([4, 1])
    rg = RationalFunction(xp**4 - 256, xp**3 * 4)
    rG = RationalFunction(Poly([0, 0, 1]) * Poly([8, 1]) ** 2, xp**2 * 8)
    bundle = SmoothBundle(
        name="loud-quarter",
        g=g,
        dg=dg,
        d2g=d2g,
        d3g=d3g,
        G=G,
        domain=(-4.0, math.inf),
        rational_g=rg,
        rational_G=rG,
        sigma=sig,
        boundary="unbounded-semilinear",
    )
    return Potential.smooth(bundle)


_BUILDERS: dict[str, tuple[Callable, tuple[str, ...], dict]] = {
    "linear": (linear, (), {}),
    "loud-quarter": (loud_quarter, (), {}),
    "odd-quintic": (odd_quintic, ("k",), {"k": Fraction(1)}),
    "hyperelliptic": (hyperelliptic, ("beta", "alpha"), {"beta": Fraction(-1), "alpha": Fraction(1, 2)}),
    "cubic-soft": (cubic_soft, (), {}),
    "nilpotent-plus": (nilpotent_plus, (), {}),
    "nilpotent-soft": (nilpotent_soft, (), {}),
}


def names() -> list[str]:
    return sorted(_BUILDERS)


def named(spec: str) -> Potential:
    """Look up ``name`` or ``name:key=value,...``."""
    name, _, params = spec.partition(":")
    if name not in _BUILDERS:
        raise KeyError(f"unknown potential {name!r}; known: {', '.join(names())}")
    fn, keys, defaults = _BUILDERS[name]
    kw = dict(defaults)
    if params:
        for item in params.split(","):
            key, eq, val = item.partition("=")
            key = key.strip()
            if not eq or key not in keys:
                raise KeyError(f"bad parameter {item!r} for {name}")
            kw[key] = parse_rational(val.strip())
    return fn(**kw)


def omega(k) -> Poly:
    """4u^3 + 9k u^2 + (3k^2 + 20) u + 9k: the balance numerator of odd-quintic in u = x^2."""
    k = Fraction(k)
    return Poly([9 * k, 3 * k * k + 20, 9 * k, 4])


# Reference values used by the verification suite.
TWO_CRITICAL_ROOTS = ((0.3560526240, -0.2935057702), (0.7682670211, -0.6425079942))
TWO_CRITICAL_PRINTED_BOXES = (
    ((Fraction(25, 128), Fraction(51, 256)), (Fraction(-91, 128), Fraction(-181, 256))),
    ((Fraction(51, 256), Fraction(13, 64)), (Fraction(-229, 256), Fraction(-57, 64))),
)
TWO_CRITICAL_XM = 0.9239964237


def hyperelliptic_dT0(beta, alpha) -> float:
    """(pi/6)(10 a^2 + 11 a b + 10 b^2 - 9 a) / a^(7/2)."""
    a, b = float(alpha), float(beta)
    return math.pi / 6 * (10 * a * a + 11 * a * b + 10 * b * b - 9 * a) / a**3.5

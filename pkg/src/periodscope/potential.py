"""Potentials g, energies G and the geometry of the period annulus.

A :class:`Potential` is either an exact polynomial with rational
coefficients or a smooth closed-form bundle (g and its first three
derivatives plus G), optionally carrying exact rational-function forms.
All float evaluation methods are vectorised over numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .exactpoly import BiPoly, Poly, RationalFunction, RealRoot, parse_rational, real_roots, resultant

Endpoint = Union[Fraction, RealRoot, None]

BOUNDARIES = ("saddle-polycycle", "unbounded-superlinear", "unbounded-sublinear", "unbounded-semilinear")


class PotentialError(ValueError):
    """Raised when g fails the standing assumptions on a center."""


class NoAnnulusError(PotentialError):
    pass


@dataclass(frozen=True)
class SmoothBundle:
    """Closed-form g, g', g'', g''' and G on an open domain containing 0.

    ``rational_g``/``rational_G`` are optional exact forms used for exact
    criterion functions and elimination.  ``sigma`` is an optional closed-form
    involution and ``boundary`` an optional declared growth class at infinity.
    """

    name: str
    g: Callable
    dg: Callable
    d2g: Callable
    d3g: Callable
    G: Callable
    domain: tuple[float, float] = (-math.inf, math.inf)
    rational_g: Optional[RationalFunction] = None
    rational_G: Optional[RationalFunction] = None
    sigma: Optional[Callable] = None
    boundary: Optional[str] = None


@dataclass(frozen=True, eq=False)
class Potential:
    """The force g of the system x' = -y, y' = g(x)."""

    kind: str
    poly: Optional[Poly] = None
    bundle: Optional[SmoothBundle] = None
    name: str = ""
    window: Optional[tuple[float, float]] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # construction --------------------------------------------------------
    @classmethod
    def polynomial(cls, coeffs: Union[Poly, Sequence], name: str = "", window=None) -> "Potential":
        p = coeffs if isinstance(coeffs, Poly) else Poly(coeffs)
        return cls("exact-polynomial", poly=p, name=name or f"g = {p}", window=window)

    @classmethod
    def smooth(cls, bundle: SmoothBundle, window=None) -> "Potential":
        return cls("smooth-closed-form", bundle=bundle, name=bundle.name, window=window)

    @property
    def is_polynomial(self) -> bool:
        return self.kind == "exact-polynomial"

    @property
    def has_rational_form(self) -> bool:
        return self.is_polynomial or (self.bundle is not None and self.bundle.rational_g is not None)

    @property
    def domain(self) -> tuple[float, float]:
        return (-math.inf, math.inf) if self.is_polynomial else self.bundle.domain

    # exact objects -----------------------------------------------------
    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def G_poly(self) -> Poly:
        return self._memo("G", lambda: self.poly.antiderivative())

    def rational_g(self) -> RationalFunction:
        if self.is_polynomial:
            return RationalFunction(self.poly)
        if self.bundle.rational_g is None:
            raise PotentialError("no exact form available for this potential")
        return self.bundle.rational_g

    def rational_G(self) -> RationalFunction:
        if self.is_polynomial:
            return RationalFunction(self.G_poly)
        if self.bundle.rational_G is None:
            raise PotentialError("no exact form available for this potential")
        return self.bundle.rational_G

    def derivatives_at_zero(self) -> tuple:
        """(g'(0), g''(0), g'''(0)); exact Fractions for polynomials."""
        if self.is_polynomial:
            p = self.poly
            return p[1], 2 * p[2], 6 * p[3]
        b = self.bundle
        return tuple(float(np.asarray(f(np.array([0.0])))[0]) for f in (b.dg, b.d2g, b.d3g))

    # float evaluation ----------------------------------------------------
    def _horner(self, coeffs: tuple, x):
        x = np.asarray(x, dtype=float)
        v = np.zeros_like(x)
        for c in reversed(coeffs):
            v = v * x + float(c)
        return v

    def g(self, x):
        if self.is_polynomial:
            return self._horner(self.poly.coeffs, x)
        return np.asarray(self.bundle.g(np.asarray(x, dtype=float)), dtype=float)

    def dg(self, x):
        if self.is_polynomial:
            return self._horner(self._memo("d1", lambda: self.poly.derivative()).coeffs, x)
        return np.asarray(self.bundle.dg(np.asarray(x, dtype=float)), dtype=float)

    def d2g(self, x):
        if self.is_polynomial:
            return self._horner(self._memo("d2", lambda: self.poly.derivative().derivative()).coeffs, x)
        return np.asarray(self.bundle.d2g(np.asarray(x, dtype=float)), dtype=float)

    def d3g(self, x):
        if self.is_polynomial:
            return self._horner(
                self._memo("d3", lambda: self.poly.derivative().derivative().derivative()).coeffs, x
            )
        return np.asarray(self.bundle.d3g(np.asarray(x, dtype=float)), dtype=float)

    def G(self, x):
        if self.is_polynomial:
            return self._horner(self.G_poly.coeffs, x)
        return np.asarray(self.bundle.G(np.asarray(x, dtype=float)), dtype=float)

    def G_gap(self, x0, x, d=None):
        """G(x0) - G(x) without cancellation when x is close to x0.

        ``d`` optionally supplies x0 - x exactly when it is known better than
        the rounded difference.
        """
        x0 = np.asarray(x0, dtype=float)
        x = np.asarray(x, dtype=float)
        d = x0 - x if d is None else np.asarray(d, dtype=float)
        if self.is_polynomial:
            # divided difference sum_j c_j (x0^j - x^j)/(x0 - x)
            cs = self.G_poly.coeffs
            u = np.zeros(np.broadcast(x0, x).shape)
            p0 = np.ones_like(u)  # x0^i
            acc = np.zeros_like(u)  # sum_{i<j} x0^i x^{j-1-i}
            for j in range(1, len(cs)):
                acc = acc * x + p0
                p0 = p0 * x0
                u = u + float(cs[j]) * acc
            return d * u
        near = np.abs(d) < 1e-3 * np.maximum(1.0, np.abs(x0))
        out = self.G(x0) - self.G(x)
        if np.any(near):
            m = 0.5 * (x0 + x)
            est = d * (self.g(m) + self.d2g(m) * d * d / 24.0)
            out = np.where(near, est, out)
        return out

    def __repr__(self) -> str:
        return f"Potential({self.name!r})"


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Validation:
    k: int
    diagnostics: tuple[str, ...] = ()


def validate(p: Potential) -> Validation:
    """Nilpotency order k of the center at the origin, or PotentialError."""
    if "validation" in p._cache:
        return p._cache["validation"]
    diags: list[str] = []
    if p.is_polynomial:
        g = p.poly
        if not g:
            raise PotentialError("origin not a center: g is identically zero")
        if g[0] != 0:
            raise PotentialError("origin not a center: g(0) != 0")
        j = g.valuation()
        if j % 2 == 0 or g[j] < 0:
            raise PotentialError("origin not a center")
        k = (j - 1) // 2
        if p.window is not None:
            lo, hi = (Fraction(v).limit_denominator(10**12) for v in p.window)
            xg = g * Poly.x()
            bad = [r for r in real_roots(xg, lo, hi) if r.compare(0) != 0]
            if bad:
                raise PotentialError(f"assumption violated at x={float(bad[0]):.12g}")
        diags.append(f"first nonzero derivative of g at 0 has order {j}")
    else:
        b = p.bundle
        lo, hi = b.domain
        if not (lo < 0 < hi):
            raise PotentialError("origin not a center: domain must contain 0")
        g0 = float(p.g(np.array([0.0]))[0])
        if abs(g0) > 1e-12:
            raise PotentialError("origin not a center: g(0) != 0")
        d = p.derivatives_at_zero()
        if abs(d[0]) > 1e-12:
            if d[0] < 0:
                raise PotentialError("origin not a center")
            k = 0
        elif abs(d[1]) > 1e-12:
            raise PotentialError("origin not a center")
        elif d[2] > 1e-12:
            k = 1
        else:
            raise PotentialError("origin not a center")
        xs = _window_samples(p.window or b.domain)
        xs = xs[xs != 0]
        prod = xs * p.g(xs)
        if np.any(prod <= 0):
            w = xs[np.argmax(prod <= 0)]
            if p.window is not None:
                raise PotentialError(f"assumption violated at x={w:.12g}")
            diags.append(f"x*g(x) <= 0 at x={w:.12g}; annulus ends before it")
        diags.append("order from derivative evaluation at 0 (tolerance 1e-12)")
    v = Validation(k, tuple(diags))
    p._cache["validation"] = v
    return v


def _window_samples(win, n: int = 4001) -> np.ndarray:
    lo, hi = win
    lo = max(lo, -1e6) if math.isinf(lo) else lo
    hi = min(hi, 1e6) if math.isinf(hi) else hi
    # dense near 0 and near the ends, geometric in between
    t = np.linspace(-1.0, 1.0, n)
    left = lo * (1 - 1e-9) * np.abs(t[t < 0]) ** 3
    right = hi * (1 - 1e-9) * t[t > 0] ** 3
    return np.concatenate([left, right])


# ---------------------------------------------------------------------------
# annulus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodAnnulus:
    """Projection (x_m, x_M) of the period annulus, outer energy h_s and order k.

    ``a``/``b`` are the nearest zeros of g (infinite when absent).  For exact
    polynomials the ``*_exact`` fields carry Fractions or isolated algebraic
    numbers; None stands for an infinite value.
    """

    x_m: float
    x_M: float
    h_s: float
    k: int
    boundary: str
    a: float = -math.inf
    b: float = math.inf
    x_m_exact: Endpoint = None
    x_M_exact: Endpoint = None
    h_s_exact: Optional[Fraction] = None
    a_exact: Endpoint = None
    b_exact: Endpoint = None

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.h_s)

    def to_json(self) -> dict:
        def num(v):
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

        return {
            "x_m": num(self.x_m),
            "x_M": num(self.x_M),
            "h_s": num(self.h_s),
            "h_s_exact": None if self.h_s_exact is None else str(self.h_s_exact),
            "k": self.k,
            "boundary": self.boundary,
        }


def _exact_float(v: Endpoint, default: float) -> float:
    if v is None:
        return default
    return float(v)


def _G_at(G: Poly, r: Endpoint) -> tuple[float, Optional[Fraction]]:
    if r is None:
        return math.inf, None
    if isinstance(r, Fraction):
        val = G(r)
        return float(val), val
    rr = r.refined_to(Fraction(1, 2**120))
    return float(G(rr.interval.mid)), None


def _level_root(G: Poly, c: Endpoint, h_exact, lo, hi) -> Endpoint:
    """The unique x in (lo, hi) with G(x) = G(c), as an exact object."""
    lo_q = lo.interval.lo if isinstance(lo, RealRoot) else lo
    hi_q = hi.interval.hi if isinstance(hi, RealRoot) else hi
    if h_exact is not None:
        roots = real_roots(G - h_exact, lo_q, hi_q)
    else:
        # G(x) - G(y) with y running over the conjugates of c
        X, Z = BiPoly.x(), BiPoly.z()
        Gx = BiPoly.from_poly(G, "x")
        Gz = BiPoly.from_poly(G, "z")
        R = resultant(Gx - Gz, BiPoly.from_poly(c.poly, "z"), "z")
        roots = real_roots(R, lo_q, hi_q)
    roots = [r for r in roots if (lo is None or r.compare(lo) > 0) and (hi is None or r.compare(hi) < 0)]
    if not roots:
        raise NoAnnulusError("no annulus: level set does not reach the opposite side")
    if len(roots) == 1:
        return _as_endpoint(roots[0])
    target = _G_at(G, c)[0]
    best = min(roots, key=lambda r: abs(_G_at(G, r)[0] - target))
    return _as_endpoint(best)


def _as_endpoint(r: RealRoot) -> Endpoint:
    q = r.as_rational()
    return r if q is None else q


def annulus(p: Potential) -> PeriodAnnulus:
    """Geometry of the period annulus around the origin."""
    if "annulus" in p._cache:
        return p._cache["annulus"]
    k = validate(p).k
    ann = _poly_annulus(p, k) if p.is_polynomial else _smooth_annulus(p, k)
    p._cache["annulus"] = ann
    return ann


def _poly_annulus(p: Potential, k: int) -> PeriodAnnulus:
    g, G = p.poly, p.G_poly
    neg = real_roots(g, None, 0)
    pos = real_roots(g, 0, None)
    a = _as_endpoint(neg[-1]) if neg else None
    b = _as_endpoint(pos[0]) if pos else None
    Ga, Ga_ex = _G_at(G, a)
    Gb, Gb_ex = _G_at(G, b)
    if a is None and b is None:
        deg = g.degree
        boundary = "unbounded-semilinear" if deg == 1 else "unbounded-superlinear"
        return PeriodAnnulus(-math.inf, math.inf, math.inf, k, boundary)
    # which side saturates first; equality (e.g. symmetric loops) keeps both zeros
    if a is not None and b is not None and abs(Ga - Gb) <= 1e-30 * max(1.0, abs(Ga)):
        side = "both"
    elif Ga < Gb:
        side = "a"
    else:
        side = "b"
    if side == "both":
        x_m, x_M, h_ex = a, b, Ga_ex
        h = Ga
    elif side == "a":
        h, h_ex = Ga, Ga_ex
        x_m = a
        x_M = _level_root(G, a, h_ex, 0, b)
    else:
        h, h_ex = Gb, Gb_ex
        x_M = b
        x_m = _level_root(G, b, h_ex, a, 0)
    return PeriodAnnulus(
        x_m=_exact_float(x_m, -math.inf),
        x_M=_exact_float(x_M, math.inf),
        h_s=h,
        k=k,
        boundary="saddle-polycycle",
        a=_exact_float(a, -math.inf),
        b=_exact_float(b, math.inf),
        x_m_exact=x_m,
        x_M_exact=x_M,
        h_s_exact=h_ex,
        a_exact=a,
        b_exact=b,
    )


def _bracket_zero(f, lo: float, hi: float) -> float:
    """Zero of f in [lo, hi] given a sign change (bisection to machine precision)."""
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _smooth_annulus(p: Potential, k: int) -> PeriodAnnulus:
    b = p.bundle
    lo, hi = p.window or b.domain
    xs = _window_samples((lo, hi))
    xs = np.unique(xs)
    gs = p.g(xs)

    def g1(x):
        return float(p.g(np.array([x]))[0])

    def G1(x):
        return float(p.G(np.array([x]))[0])

    pos = xs[xs > 0]
    bad = np.nonzero(p.g(pos) <= 0)[0]
    bz = _bracket_zero(g1, float(pos[bad[0] - 1]) if bad[0] else 0.0, float(pos[bad[0]])) if bad.size else math.inf
    neg = xs[xs < 0][::-1]
    bad = np.nonzero(p.g(neg) >= 0)[0]
    az = _bracket_zero(g1, float(neg[bad[0]]), float(neg[bad[0] - 1]) if bad[0] else 0.0) if bad.size else -math.inf

    def edge_energy(z, edge):
        if math.isfinite(z):
            return G1(z)
        if math.isinf(edge):
            return math.inf
        v = G1(edge - math.copysign(1e-12 * max(1.0, abs(edge)), edge))
        return math.inf if not math.isfinite(v) or v > 1e10 else v

    Ga, Gb = edge_energy(az, lo), edge_energy(bz, hi)
    h_s = min(Ga, Gb)
    if math.isinf(h_s):
        boundary = b.boundary or _growth_class(p, lo, hi)
        return PeriodAnnulus(
            max(lo, az) if math.isfinite(lo) else -math.inf,
            min(hi, bz) if math.isfinite(hi) else math.inf,
            math.inf,
            k,
            boundary,
            az,
            bz,
        )
    x_M = bz if Gb <= Ga else _bracket_zero(lambda x: G1(x) - h_s, 0.0, bz if math.isfinite(bz) else hi)
    x_m = az if Ga <= Gb else _bracket_zero(lambda x: G1(x) - h_s, az if math.isfinite(az) else lo, 0.0)
    return PeriodAnnulus(x_m, x_M, h_s, k, "saddle-polycycle", az, bz)


def _growth_class(p: Potential, lo: float, hi: float) -> str:
    ratios = []
    for edge in (lo, hi):
        if math.isinf(edge):
            xs = np.array([1e4, 1e6]) * math.copysign(1.0, edge)
            ratios.append(p.g(xs) / xs)
    if not ratios:
        return "unbounded-semilinear"
    r = np.concatenate(ratios)
    if np.all(r > 1e3) and np.all(np.diff(np.abs(np.stack(ratios)), axis=-1) > 0):
        return "unbounded-superlinear"
    if np.all(r < 1e-3):
        return "unbounded-sublinear"
    return "unbounded-semilinear"


# ---------------------------------------------------------------------------
# levels and turning points
# ---------------------------------------------------------------------------


def level(p: Potential, k: int, x):
    """Signed level coordinate sign(x) * G(x)^(1/(2k+2)); smooth and increasing through 0."""
    x = np.asarray(x, dtype=float)
    Gx = np.maximum(p.G(x), 0.0)
    return np.sign(x) * Gx ** (1.0 / (2 * k + 2))


def solve_level(p: Potential, ann: PeriodAnnulus, r, x_guess=None, tol: float = 1e-15, maxiter: int = 100):
    """Vectorised solve of level(x) = r for x in (x_m, x_M).

    Safeguarded Newton: every iterate stays in a shrinking sign bracket and
    bisection takes over when a Newton step leaves it.
    """
    r = np.asarray(r, dtype=float)
    k = ann.k
    e = 1.0 / (2 * k + 2)
    lo = np.where(r >= 0, 0.0, _finite_side(p, ann, -1, r))
    hi = np.where(r >= 0, _finite_side(p, ann, 1, r), 0.0)
    if x_guess is None:
        x = _initial(p, ann, r)
    else:
        x = np.asarray(x_guess, dtype=float).copy()
    x = np.clip(x, lo, hi)
    done = r == 0
    x = np.where(done, 0.0, x)
    for _ in range(maxiter):
        Gx = np.maximum(p.G(x), 0.0)
        f = np.sign(x) * Gx**e - r
        gx = p.g(x)
        # shrink the bracket
        pos = f > 0
        hi = np.where(pos & ~done, np.minimum(hi, x), hi)
        lo = np.where(~pos & ~done, np.maximum(lo, x), lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            df = e * np.abs(gx) * Gx ** (e - 1.0)
            step = f / df
        xn = x - step
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        conv = (np.abs(xn - x) <= tol * np.maximum(np.abs(xn), 1e-300)) | (hi - lo <= tol * np.abs(xn))
        x = np.where(done, x, xn)
        done = done | conv
        if np.all(done):
            break
    return x


def _finite_side(p: Potential, ann: PeriodAnnulus, side: int, r) -> np.ndarray:
    edge = ann.x_M if side > 0 else ann.x_m
    r = np.abs(np.asarray(r, dtype=float))
    if math.isfinite(edge):
        return np.full(r.shape, edge)
    # grow a bracket until level exceeds |r|
    k = ann.k
    out = np.full(r.shape, float(side))
    dom = p.domain[1] if side > 0 else p.domain[0]
    for _ in range(200):
        lv = np.abs(level(p, k, out))
        need = lv < r
        if not np.any(need):
            break
        out = np.where(need, out * 2.0, out)
        if math.isfinite(dom):
            out = np.where(np.abs(out) > abs(dom), dom, out)
    return out


def _initial(p: Potential, ann: PeriodAnnulus, r) -> np.ndarray:
    """Asymptotic guess x ~ r / level'(0) (exact for the leading term of G)."""
    k = ann.k
    A = _leading_A(p, k)
    c = (A / 2.0) ** (1.0 / (2 * k + 2))
    return np.asarray(r, dtype=float) / c


def _leading_A(p: Potential, k: int) -> float:
    """G(x) ~ (A/2) x^(2k+2) with A = g^(2k+1)(0) / (2k+1)! * 2/(2k+2)."""
    if p.is_polynomial:
        gj = float(p.poly[2 * k + 1])
    else:
        d = p.derivatives_at_zero()
        gj = d[0] if k == 0 else d[2] / 6.0
    return 2.0 * gj / (2 * k + 2)


@dataclass(frozen=True)
class EnergyLevel:
    h: float
    x_minus: float
    x_plus: float


def turning_points(p: Potential, ann: PeriodAnnulus, h) -> EnergyLevel:
    """Abscissas x_-(h) < 0 < x_+(h) of the orbit at energy h."""
    h = float(h)
    if not (0 < h < ann.h_s):
        raise ValueError(f"energy h={h} outside (0, h_s)")
    r = h ** (1.0 / (2 * ann.k + 2))
    xm, xp = solve_level(p, ann, np.array([-r, r]))
    return EnergyLevel(h, float(xm), float(xp))


def turning_points_many(p: Potential, ann: PeriodAnnulus, hs) -> tuple[np.ndarray, np.ndarray]:
    hs = np.asarray(hs, dtype=float)
    if np.any(hs <= 0) or np.any(hs >= ann.h_s):
        raise ValueError("energies outside (0, h_s)")
    r = hs ** (1.0 / (2 * ann.k + 2))
    x = solve_level(p, ann, np.concatenate([-r, r]))
    return x[: len(hs)], x[len(hs):]


# ---------------------------------------------------------------------------
# JSON input
# ---------------------------------------------------------------------------


class InputError(ValueError):
    """Malformed potential description; message names the offending field."""


def parse_coeffs(values) -> list[Fraction]:
    if isinstance(values, str):
        values = [v for v in values.split(",")]
    if not isinstance(values, (list, tuple)) or not values:
        raise InputError("field 'coeffs' must be a non-empty list of rational strings")
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or isinstance(v, float):
            raise InputError(f"field 'coeffs[{i}]': floating-point value {v!r}; give an exact rational string")
        try:
            out.append(parse_rational(v.strip() if isinstance(v, str) else v))
        except (ValueError, TypeError):
            raise InputError(f"field 'coeffs[{i}]': {v!r} is not an exact rational") from None
    return out


def potential_from_json(obj) -> Potential:
    """Build a Potential from {"type": "polynomial", "coeffs": [...]} or {"type": "named", "name": ...}."""
    if not isinstance(obj, dict):
        raise InputError("potential description must be a JSON object")
    kind = obj.get("type")
    if kind == "polynomial":
        if "coeffs" not in obj:
            raise InputError("field 'coeffs' is missing")
        window = obj.get("window")
        if window is not None:
            if not (isinstance(window, list) and len(window) == 2):
                raise InputError("field 'window' must be a pair")
            window = tuple(float(parse_rational(w)) for w in window)
        return Potential.polynomial(parse_coeffs(obj["coeffs"]), window=window)
    if kind == "named":
        name = obj.get("name")
        if not isinstance(name, str):
            raise InputError("field 'name' must be a string")
        from .registry import named

        try:
            return named(name)
        except KeyError as exc:
            raise InputError(f"field 'name': {exc.args[0]}") from None
    raise InputError(f"field 'type': expected 'polynomial' or 'named', got {kind!r}")

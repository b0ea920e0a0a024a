"""Period function T(h) and its first two derivatives.

Default method ("theta"): with G(x) = h sin^(2k+2)(theta) the orbit integral
becomes a smooth integral over theta in (0, pi/2)

    T   = 2(k+1) sqrt(2h) int s^(2k+1) / sqrt(S) * (1/g(x+) + 1/|g(x-)|) dtheta
    T'  = (k+1) sqrt(2/h)  int s^(2k+1) / sqrt(S) * B(delta)(x+) dtheta
    T'' = (k+1) sqrt(2) h^(-3/2) int s^(2k+1) / sqrt(S) * B(phi)(x+) dtheta

where s = sin(theta), S = 1 + s^2 + ... + s^(2k), and x+ > 0 > x- are the two
points at that theta (so x- = sigma(x+)).  It is integrated with vectorised
adaptive Gauss-Legendre.  The cross-check method ("tanh-sinh") integrates the
x-forms directly with double-exponential quadrature, using exact endpoint
distances so that h - G(x) never suffers cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .involution import balance, delta, has_even_energy, phi, sigma
from .potential import PeriodAnnulus, Potential, level, solve_level, validate


# Relative rounding level accepted for balance integrands: near a saddle the
# partner point sigma(x) is ill-conditioned and delta ~ 1/g amplifies it.
BALANCE_NOISE = 1e-12


class QuadratureError(RuntimeError):
    """Raised when an integral fails to reach the requested tolerance."""


# ---------------------------------------------------------------------------
# generic rules
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int


def adaptive_gauss_legendre(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-12,
    n: int = 16,
    max_panels: int = 20000,
    noise: float = 1e-13,
) -> QuadResult:
    """Integrate a vectorised f over [a, b].

    f may return either values or a pair (values, magnitudes); magnitudes
    (for example the size of the terms whose difference is being integrated)
    set the scale that the relative tolerance refers to.  Each panel is
    estimated by an n-point rule on the whole panel and on its two halves;
    panels whose two estimates disagree by more than their share of the
    tolerance are split.  A panel is accepted anyway when the disagreement is
    below ``noise`` times its magnitude, or when splitting stopped helping
    (the relative disagreement did not halve), which marks rounding noise in
    the integrand rather than unresolved structure.
    """
    x0, w0 = _gl(n)
    pending = [(a, b, math.inf)]
    total = 0.0
    err = 0.0
    evals = 0
    scale = None
    width = b - a
    accepted = 0
    while pending:
        lo = np.array([q[0] for q in pending])
        hi = np.array([q[1] for q in pending])
        parent = np.array([q[2] for q in pending])
        mid = 0.5 * (lo + hi)
        # whole panel, left half, right half
        starts = np.stack([lo, lo, mid])
        stops = np.stack([hi, mid, hi])
        half = 0.5 * (stops - starts)
        centre = 0.5 * (stops + starts)
        nodes = centre[..., None] + half[..., None] * x0
        out = f(nodes.ravel())
        if isinstance(out, tuple):
            vals, mags = (np.asarray(v, dtype=float).reshape(nodes.shape) for v in out)
        else:
            vals = np.asarray(out, dtype=float).reshape(nodes.shape)
            mags = np.abs(vals)
        evals += vals.size
        est = np.sum(vals * w0, axis=-1) * half
        whole, pair = est[0], est[1] + est[2]
        if not np.all(np.isfinite(pair)):
            raise QuadratureError("non-finite integrand value")
        local = np.sum(np.sum(mags[1:] * w0, axis=-1) * half[1:], axis=0)
        if scale is None:
            scale = float(local.sum())
        diff = np.abs(whole - pair)
        share = tol * max(scale, 1e-300) * (hi - lo) / width
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(local > 0, diff / local, 0.0)
        stalled = (ratio > 0.5 * parent) & (ratio < 1e-6)
        ok = (diff <= share) | (diff <= noise * local) | stalled | (hi - lo <= 1e-15 * width)
        total += float(pair[ok].sum())
        err += float(diff[ok].sum())
        accepted += int(ok.sum())
        nxt = []
        for i in np.nonzero(~ok)[0]:
            nxt.append((lo[i], mid[i], ratio[i]))
            nxt.append((mid[i], hi[i], ratio[i]))
        pending = nxt
        if accepted + len(pending) > max_panels:
            raise QuadratureError("adaptive Gauss-Legendre: panel budget exhausted")
    return QuadResult(total, err, evals)


def tanh_sinh(
    f: Callable, a: float, b: float, tol: float = 1e-12, max_level: int = 12, t_max: float = 4.0
) -> QuadResult:
    """Double-exponential quadrature of f over [a, b].

    f is called as f(x, da, db) with the exact distances da = x - a and
    db = b - x, which lets integrands with endpoint singularities avoid
    cancellation.  Levels halve the step until successive estimates agree.
    """
    L = b - a

    def rule(ts):
        u = 0.5 * math.pi * np.sinh(ts)
        e = np.exp(-2.0 * np.abs(u))
        # 1 - tanh|u| and 1 + tanh|u| computed without cancellation
        small = 2.0 * e / (1.0 + e)
        big = 2.0 / (1.0 + e)
        da = np.where(u >= 0, big, small) * (0.5 * L)
        db = np.where(u >= 0, small, big) * (0.5 * L)
        x = a + da
        w = 0.5 * L * 0.5 * math.pi * np.cosh(ts) * 4.0 * e / (1.0 + e) ** 2
        keep = (da > 0) & (db > 0) & (w > 0)
        return x[keep], da[keep], db[keep], w[keep]

    def evaluate(x, da, db):
        out = f(x, da, db)
        if isinstance(out, tuple):
            vals, mags = (np.asarray(v, dtype=float) for v in out)
        else:
            vals = np.asarray(out, dtype=float)
            mags = np.abs(vals)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("non-finite integrand value")
        return vals, mags

    step = 0.5
    ts = np.arange(-t_max, t_max + step / 2, step)
    x, da, db, w = rule(ts)
    vals, mags = evaluate(x, da, db)
    s = float(np.sum(vals * w))
    m = float(np.sum(mags * w))
    evals = x.size
    prev = s * step
    for _ in range(max_level):
        step /= 2
        ts = np.arange(-t_max + step, t_max, 2 * step)
        x, da, db, w = rule(ts)
        vals, mags = evaluate(x, da, db)
        s += float(np.sum(vals * w))
        m += float(np.sum(mags * w))
        evals += x.size
        cur = s * step
        diff = abs(cur - prev)
        if diff <= tol * max(abs(cur), m * step):
            return QuadResult(cur, max(diff, 1e-16 * abs(cur)), evals)
        prev = cur
    raise QuadratureError(f"tanh-sinh did not converge (last difference {diff:.3g})")


# ---------------------------------------------------------------------------
# period samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodSample:
    h: float
    T: float
    Tp: Optional[float] = None
    Tpp: Optional[float] = None
    method: str = "theta"
    error: float = 0.0


def _check_h(ann: PeriodAnnulus, h: float) -> float:
    h = float(h)
    if not (0.0 < h < ann.h_s):
        raise ValueError(f"energy h={h} outside (0, h_s={ann.h_s})")
    return h


def _pair_at_theta(p: Potential, ann: PeriodAnnulus, h: float, theta: np.ndarray):
    """x+(theta) > 0 > x-(theta) with G(x+-) = h sin^(2k+2)(theta)."""
    k = ann.k
    r = h ** (1.0 / (2 * k + 2)) * np.sin(theta)
    xp = solve_level(p, ann, r)
    if has_even_energy(p):
        xm = -xp
    elif p.bundle is not None and p.bundle.sigma is not None:
        xm = np.asarray(p.bundle.sigma(xp), dtype=float)
    else:
        xm = solve_level(p, ann, -r)
    return xp, xm


def _theta_weight(k: int, theta: np.ndarray) -> np.ndarray:
    s = np.sin(theta)
    s2 = s * s
    S = np.ones_like(s)
    term = np.ones_like(s)
    for _ in range(k):
        term = term * s2
        S = S + term
    return s ** (2 * k + 1) / np.sqrt(S)


def _theta_integral(p, ann, h, kernel, tol, noise=1e-13):
    k = ann.k

    def f(theta):
        xp, xm = _pair_at_theta(p, ann, h, theta)
        w = _theta_weight(k, theta)
        val = kernel(xp, xm)
        if isinstance(val, tuple):
            return w * val[0], np.abs(w) * val[1]
        return w * val

    return adaptive_gauss_legendre(f, 0.0, 0.5 * math.pi, tol=tol, noise=noise)


def _balance_kernel(p, fn):
    def ker(xp, xm):
        a, b = fn(p, xp), fn(p, xm)
        return a - b, np.abs(a) + np.abs(b)

    return ker


def _x_balance_kernel(p, ann, fn):
    def ker(x):
        z = sigma(p, ann, x)
        a, b = fn(p, x), fn(p, z)
        gx = p.g(x)
        return (a - b) * gx, (np.abs(a) + np.abs(b)) * np.abs(gx)

    return ker


def _x_integral(p, ann, h, kernel, tol, negative: bool = False):
    """int_0^{x+} kernel(x)/sqrt(h - G(x)) dx (or over (x-, 0))."""
    k = ann.k
    r = h ** (1.0 / (2 * k + 2))
    xt = float(solve_level(p, ann, np.array([-r if negative else r]))[0])

    def f(x, da, db):
        # exact distance to the turning point: db on the right, da on the left
        gap = p.G_gap(xt, x, -da if negative else db)
        with np.errstate(invalid="ignore", divide="ignore"):
            root = np.sqrt(np.abs(gap))
        val = kernel(x)
        if isinstance(val, tuple):
            return val[0] / root, val[1] / root
        return val / root

    lo, hi = (xt, 0.0) if negative else (0.0, xt)
    return tanh_sinh(f, lo, hi, tol=tol)


def period(p: Potential, ann: PeriodAnnulus, h: float, tol: float = 1e-10, method: str = "theta") -> PeriodSample:
    """T(h) = sqrt(2) * int_{x-}^{x+} dx / sqrt(h - G(x))."""
    h = _check_h(ann, h)
    k = ann.k
    if method == "theta":

        def ker(xp, xm):
            return 1.0 / p.g(xp) - 1.0 / p.g(xm)

        res = _theta_integral(p, ann, h, ker, tol)
        c = 2 * (k + 1) * math.sqrt(2 * h)
        return PeriodSample(h, c * res.value, method="theta", error=c * res.error)
    if method == "tanh-sinh":
        one = lambda x: np.ones_like(x)  # noqa: E731
        right = _x_integral(p, ann, h, one, tol)
        left = _x_integral(p, ann, h, one, tol, negative=True)
        c = math.sqrt(2.0)
        return PeriodSample(
            h, c * (right.value + left.value), method="tanh-sinh", error=c * (right.error + left.error)
        )
    raise ValueError(f"unknown method {method!r}")


def dperiod(p: Potential, ann: PeriodAnnulus, h: float, tol: float = 1e-10, method: str = "theta") -> float:
    """T'(h) from the balance of delta."""
    h = _check_h(ann, h)
    k = ann.k
    if method == "theta":
        res = _theta_integral(p, ann, h, _balance_kernel(p, delta), tol, BALANCE_NOISE)
        return (k + 1) * math.sqrt(2.0 / h) * res.value
    if method == "tanh-sinh":
        res = _x_integral(p, ann, h, _x_balance_kernel(p, ann, delta), tol)
        return res.value / (math.sqrt(2.0) * h)
    raise ValueError(f"unknown method {method!r}")


def d2period(p: Potential, ann: PeriodAnnulus, h: float, tol: float = 1e-10, method: str = "theta") -> float:
    """T''(h) from the balance of phi."""
    h = _check_h(ann, h)
    k = ann.k
    if method == "theta":
        res = _theta_integral(p, ann, h, _balance_kernel(p, phi), tol, BALANCE_NOISE)
        return (k + 1) * math.sqrt(2.0) * h**-1.5 * res.value
    if method == "tanh-sinh":
        res = _x_integral(p, ann, h, _x_balance_kernel(p, ann, phi), tol)
        return res.value / (math.sqrt(2.0) * h * h)
    raise ValueError(f"unknown method {method!r}")


def sample(p: Potential, ann: PeriodAnnulus, h: float, tol: float = 1e-10, order: int = 2) -> PeriodSample:
    """T, T' and (order 2) T'' at h with the theta method."""
    base = period(p, ann, h, tol)
    tp = dperiod(p, ann, h, tol) if order >= 1 else None
    tpp = d2period(p, ann, h, tol) if order >= 2 else None
    return PeriodSample(base.h, base.T, tp, tpp, "theta", base.error)


def fd_dperiod(p: Potential, ann: PeriodAnnulus, h: float, eps: Optional[float] = None) -> float:
    """Central difference of T with step max(1e-6 h, 1e-9)."""
    eps = max(1e-6 * h, 1e-9) if eps is None else eps
    eps = min(eps, 0.5 * h, 0.25 * (ann.h_s - h))
    f = lambda v: period(p, ann, v, tol=1e-14).T  # noqa: E731
    return (f(h + eps) - f(h - eps)) / (2 * eps)


def fd_d2period(p: Potential, ann: PeriodAnnulus, h: float, eps: Optional[float] = None) -> float:
    """Second central difference of T.

    The default step 1e-3 h balances truncation against the roundoff that a
    second difference amplifies by 1/eps^2.
    """
    eps = 1e-3 * h if eps is None else eps
    eps = min(eps, 0.5 * h, 0.25 * (ann.h_s - h))
    f = lambda v: period(p, ann, v, tol=1e-14).T  # noqa: E731
    return (f(h + eps) - 2 * f(h) + f(h - eps)) / (eps * eps)


# ---------------------------------------------------------------------------
# limits at the center
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CenterAsymptotics:
    k: int
    T0: float
    Tp0: float

    @property
    def divergent(self) -> bool:
        return self.k >= 1

    def to_json(self) -> dict:
        if self.divergent:
            return {"k": self.k, "divergent": True, "T0": "inf", "Tp0": "-inf"}
        return {"k": self.k, "divergent": False, "T0": self.T0, "Tp0": self.Tp0}


def center_asymptotics(p: Potential) -> CenterAsymptotics:
    """T(0+) and T'(0+) from g'(0), g''(0), g'''(0); infinite limits when nilpotent."""
    k = validate(p).k
    if k >= 1:
        return CenterAsymptotics(k, math.inf, -math.inf)
    d1, d2, d3 = (float(v) for v in p.derivatives_at_zero())
    T0 = 2 * math.pi / math.sqrt(d1)
    Tp0 = math.pi * (5 * d2 * d2 - 3 * d1 * d3) / (12 * d1**3.5)
    return CenterAsymptotics(0, T0, Tp0)


def default_grid(ann: PeriodAnnulus, n: int = 50, h_max: float = 1e6, h_min: Optional[float] = None) -> np.ndarray:
    """Energies log-uniform in min(h, h_s - h) (bounded annulus) or in h (up to h_max)."""
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    if math.isfinite(ann.h_s):
        hs = ann.h_s
        lo = h_min if h_min is not None else hs * 1e-6
        hi = hs * (1 - 1e-8)
        # symmetric log spacing around h_s/2
        m1 = n // 2
        m2 = n - m1
        left = np.geomspace(lo, hs / 2, m1, endpoint=False)
        right = hs - np.geomspace(hs / 2, hs - hi, m2)
        return np.concatenate([left, right])
    lo = h_min if h_min is not None else min(1e-6, h_max * 1e-12)
    return np.geomspace(lo, h_max, n)


def abel_identity_sides(p: Potential, ann: PeriodAnnulus, h: float, tol: float = 1e-10) -> tuple[float, float]:
    """(sqrt(2) h T'(h), sqrt(pi) I^(1/2)[B(delta) o x+^(-1)](h)).

    The half-order Riemann-Liouville integral carries 1/Gamma(1/2), so the
    x-form of T' equals sqrt(pi) times it; the two sides must agree.
    """
    from .fractional import frac_integral

    h = _check_h(ann, h)
    lhs = math.sqrt(2.0) * h * dperiod(p, ann, h, tol)
    k = ann.k

    def kfun(u):
        u = np.asarray(u, dtype=float)
        x = solve_level(p, ann, np.maximum(u, 0.0) ** (1.0 / (2 * k + 2)))
        out = np.zeros_like(x)
        nz = x > 0
        if np.any(nz):
            out[nz] = balance(p, ann, "delta", x[nz])
        return out

    rhs = math.sqrt(math.pi) * float(frac_integral(kfun, 0.5, h, tol=min(tol, 1e-10)))
    return lhs, rhs

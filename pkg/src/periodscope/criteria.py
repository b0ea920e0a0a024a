"""Classification of the period function.

The pipeline runs validate -> annulus -> degree bounds -> Chicone test ->
balance-zero count -> exactness -> Loud test -> numeric scan.  Every zero
count on the exact path is a certified root count; smooth potentials without
rational forms fall back to tagged numeric scans.

Balance zeros of a rational f are the solutions in (0, x_M) x (x_m, 0) of

    U(x, z) = (G(x) - G(z)) / (x - z) = 0,
    H(x, z) = numerator of (f(x) - f(z)) / (x - z) = 0,

and inside that rectangle U = 0 is exactly the graph z = sigma(x).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .exactpoly import (
    BiPoly,
    IsolationBox,
    Poly,
    RationalFunction,
    RationalInterval,
    RealRoot,
    SystemSolution,
    isolate_system,
    real_roots,
    sturm_count,
)
from .involution import (
    G_over_g2_rational,
    balance,
    ddelta_rational,
    delta,
    delta_rational,
    ddelta,
    has_even_energy,
    loud_total_derivative,
    phi_rational,
    sigma,
)
from .potential import PeriodAnnulus, Potential, annulus, solve_level, validate
from .quadrature import QuadratureError, center_asymptotics, default_grid, dperiod, period

ISOCHRONY_TOL = 1e-10


def max_workers() -> int:
    """Thread cap from PERIODSCOPE_THREADS (default: CPU count, at most 8)."""
    env = os.environ.get("PERIODSCOPE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


# ---------------------------------------------------------------------------
# exact systems
# ---------------------------------------------------------------------------


def _bi(p: Poly, var: str) -> BiPoly:
    return BiPoly.from_poly(p, var)


_DIAG = BiPoly.x() - BiPoly.z()


def divided_difference(rf: RationalFunction) -> BiPoly:
    """Primitive numerator of (rf(x) - rf(z)) / (x - z)."""
    N, D = rf.num, rf.den
    num = _bi(N, "x") * _bi(D, "z") - _bi(N, "z") * _bi(D, "x")
    if not num:
        return num
    return num.exquo(_DIAG).primitive()


def _antisym(a: RationalFunction, b: RationalFunction) -> BiPoly:
    """Primitive numerator of (a(x) b(z) - a(z) b(x)) / (x - z)."""
    Na, Da, Nb, Db = a.num, a.den, b.num, b.den
    num = _bi(Na, "x") * _bi(Nb, "z") * _bi(Da, "z") * _bi(Db, "x")
    num = num - _bi(Na, "z") * _bi(Nb, "x") * _bi(Da, "x") * _bi(Db, "z")
    if not num:
        return num
    return num.exquo(_DIAG).primitive()


def on_antidiagonal(B: BiPoly) -> Poly:
    """B(x, -x)."""
    c: dict[int, Fraction] = {}
    for (i, j), v in B.terms.items():
        c[i + j] = c.get(i + j, 0) + (-v if j % 2 else v)
    n = max(c, default=-1)
    return Poly([c.get(i, 0) for i in range(n + 1)])


def _frac_end(v: float) -> Optional[Fraction]:
    return Fraction(v) if math.isfinite(v) else None


def _ranges(ann: PeriodAnnulus, p: Potential):
    if p.is_polynomial:
        return (Fraction(0), ann.x_M_exact), (ann.x_m_exact, Fraction(0))
    return (Fraction(0), _frac_end(ann.x_M)), (_frac_end(ann.x_m), Fraction(0))


@dataclass(frozen=True)
class SASInstance:
    """G(x) = G(z), delta(x) = delta(z) on the open rectangle x_range x z_range."""

    U: BiPoly
    Psi: BiPoly
    x_range: tuple
    z_range: tuple
    even: bool

    def to_json(self) -> dict:
        def end(e):
            if e is None:
                return None
            if isinstance(e, RealRoot):
                return [str(e.interval.lo), str(e.interval.hi)]
            return str(e)

        return {
            "deg_U": self.U.total_degree,
            "deg_Psi": self.Psi.total_degree,
            "x_range": [end(e) for e in self.x_range],
            "z_range": [end(e) for e in self.z_range],
            "even_energy": self.even,
        }


def _require_exact(p: Potential) -> None:
    if not p.has_rational_form:
        raise ValueError("exact systems need a polynomial potential or rational forms")


def build_sas(p: Potential, ann: Optional[PeriodAnnulus] = None) -> SASInstance:
    """U and Psi built exactly from the reduced delta.

    Psi is not made squarefree here (bivariate gcds are expensive); the
    solver falls back to the squarefree part only when roots come out singular.
    """
    _require_exact(p)
    ann = ann or annulus(p)

    def build():
        U = divided_difference(p.rational_G())
        even = has_even_energy(p)
        Psi = divided_difference(delta_rational(p))
        xr, zr = _ranges(ann, p)
        return SASInstance(U, Psi, xr, zr, even)

    return p._memo("sas", build)


def _system_count(p: Potential, ann: PeriodAnnulus, H: BiPoly) -> SystemSolution:
    """Solutions of U = H = 0 in the annulus rectangle."""
    sas = build_sas(p, ann)
    if sas.even:
        # sigma(x) = -x, so only the antidiagonal matters
        q = on_antidiagonal(H) if H else Poly([])
        if not q:
            return SystemSolution(common_factor=BiPoly.x() + BiPoly.z())
        lo, hi = sas.x_range
        hi_out = hi.interval.hi if isinstance(hi, RealRoot) else hi
        boxes = []
        for r in real_roots(q, lo, hi_out):
            if hi is not None and r.compare(hi) >= 0:
                continue
            r = r.refined_to(Fraction(1, 2**32))
            iv = r.interval
            boxes.append(IsolationBox(iv, RationalInterval(-iv.hi, -iv.lo)))
        return SystemSolution(tuple(boxes))
    sol = isolate_system(sas.U, H, sas.x_range, sas.z_range)
    if sol.degenerate and H.total_degree > 0:
        # a repeated factor makes roots singular; retry on the squarefree part
        H2 = H.squarefree_part()
        if H2.total_degree < H.total_degree:
            sol = isolate_system(sas.U, H2, sas.x_range, sas.z_range)
    return sol


# ---------------------------------------------------------------------------
# balance zero counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BalanceCount:
    """Zeros of a balance on (0, x_M).

    ``sign`` is the constant sign when there are no zeros (0 if isochronous).
    """

    l: int
    certified: bool
    isochronous: bool
    method: str
    sign: int = 0
    boxes: tuple = ()
    points: tuple = ()
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "certified": self.certified,
            "isochronous": self.isochronous,
            "method": self.method,
            "sign": self.sign,
            "boxes": [b.to_json() for b in self.boxes],
            "points": list(self.points),
            "possibly_degenerate": self.degenerate,
        }


def _sample_x(ann: PeriodAnnulus, p: Potential, n: int) -> np.ndarray:
    """Points in (0, x_M) dense near both ends."""
    if math.isfinite(ann.x_M):
        top = ann.x_M
    else:
        top = float(solve_level(p, ann, np.array([1e6 ** (1.0 / (2 * ann.k + 2))]))[0])
    u = np.linspace(0.0, 1.0, n + 2)[1:-1]
    s = 0.5 - 0.5 * np.cos(math.pi * u)
    return top * s


def _balance_sign(p: Potential, ann: PeriodAnnulus, fn, xs=None) -> int:
    xs = _sample_x(ann, p, 7) if xs is None else xs
    v = balance(p, ann, fn, xs)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0
    return int(np.sign(v[np.argmax(np.abs(v))]))


def _count_exact(p: Potential, ann: PeriodAnnulus, rf: RationalFunction, name: str) -> BalanceCount:
    H = build_sas(p, ann).Psi if name == "delta" else divided_difference(rf)
    sol = _system_count(p, ann, H)
    if sol.is_curve:
        return BalanceCount(0, True, True, "exact", 0)
    pts = tuple(b.center[0] for b in sol.boxes)
    sign = _balance_sign(p, ann, name) if sol.count == 0 else 0
    return BalanceCount(sol.count, not sol.degenerate, False, "exact", sign, sol.boxes, pts, sol.degenerate)


def _count_numeric(p: Potential, ann: PeriodAnnulus, name: str, n: int = 2000) -> BalanceCount:
    xs = _sample_x(ann, p, n)
    v = balance(p, ann, name, xs)
    ok = np.isfinite(v)
    xs, v = xs[ok], v[ok]
    if v.size == 0 or np.max(np.abs(v)) < ISOCHRONY_TOL:
        return BalanceCount(0, False, True, "numeric, uncertified", 0)
    keep = np.abs(v) > ISOCHRONY_TOL
    xs, v = xs[keep], v[keep]
    s = np.sign(v)
    idx = np.nonzero(s[1:] != s[:-1])[0]
    pts = []
    for i in idx:
        f = lambda t: float(balance(p, ann, name, np.array([t]))[0])  # noqa: E731
        pts.append(brentq(f, xs[i], xs[i + 1], xtol=1e-14, rtol=1e-12))
    sign = int(s[0]) if not pts else 0
    return BalanceCount(len(pts), False, False, "numeric, uncertified", sign, (), tuple(pts))


def _count(p: Potential, ann: PeriodAnnulus, name: str) -> BalanceCount:
    builders = {"delta": delta_rational, "G_over_g2": G_over_g2_rational, "phi": phi_rational}
    if p.has_rational_form:
        return p._memo("count_" + name, lambda: _count_exact(p, ann, builders[name](p), name))
    return p._memo("count_" + name, lambda: _count_numeric(p, ann, name))


def count_balance_zeros(p: Potential, ann: Optional[PeriodAnnulus] = None) -> BalanceCount:
    """Zeros of B(delta) on (0, x_M)."""
    return _count(p, ann or annulus(p), "delta")


def count_phi_balance_zeros(p: Potential, ann: Optional[PeriodAnnulus] = None) -> BalanceCount:
    """Zeros of B(phi) on (0, x_M); phi controls the sign of T''."""
    return _count(p, ann or annulus(p), "phi")


@dataclass(frozen=True)
class ExactnessResult:
    exact: bool
    count: int
    isochronous: bool
    certified: bool

    def __bool__(self) -> bool:
        return self.exact


def exactness_check(p: Potential, ann: Optional[PeriodAnnulus], l: int) -> ExactnessResult:
    """Whether B(G/g^2) has exactly l zeros too."""
    ann = ann or annulus(p)
    c = _count(p, ann, "G_over_g2")
    return ExactnessResult(c.l == l and not c.isochronous, c.l, c.isochronous, c.certified)


# ---------------------------------------------------------------------------
# sign tests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiconeResult:
    verdict: str  # increasing | decreasing | inconclusive
    left_sign: int
    right_sign: int
    numerator_roots: Optional[int]
    applicable: bool
    real_zeros_bound: Optional[int]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "sign_left": self.left_sign,
            "sign_right": self.right_sign,
            "numerator_roots": self.numerator_roots,
            "applicable": self.applicable,
            "real_zeros_bound": self.real_zeros_bound,
        }


def _roots_between(q: Poly, lo, hi) -> int:
    """Roots of q in the open interval (lo, hi); endpoints may be algebraic."""
    lo_out = lo.interval.lo if isinstance(lo, RealRoot) else lo
    hi_out = hi.interval.hi if isinstance(hi, RealRoot) else hi
    n = 0
    for r in real_roots(q, lo_out, hi_out):
        if lo is not None and r.compare(lo) <= 0:
            continue
        if hi is not None and r.compare(hi) >= 0:
            continue
        n += 1
    return n


def _side_sign(values) -> int:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0
    if np.all(v > 0):
        return 1
    if np.all(v < 0):
        return -1
    return 0


def chicone_check(p: Potential, ann: Optional[PeriodAnnulus] = None) -> ChiconeResult:
    """Sign of delta' on (x_m, 0) and (0, x_M).

    A constant sign across the whole interval decides monotonicity, which
    needs delta continuous at 0, i.e. an elementary center.
    """
    ann = ann or annulus(p)
    k = ann.k
    roots = None
    if p.has_rational_form:
        (x0, xM), (xm, z0) = _ranges(ann, p)
        dd = ddelta_rational(p)
        if dd.num:
            roots = _roots_between(dd.num, xm, Fraction(0)) + _roots_between(dd.num, Fraction(0), xM)
            if dd.den.degree > 0:
                poles = _roots_between(dd.den, xm, Fraction(0)) + _roots_between(dd.den, Fraction(0), xM)
            else:
                poles = 0
            if roots == 0 and poles == 0:
                right = _side_sign(ddelta(p, _sample_x(ann, p, 3)))
                left = _side_sign(ddelta(p, _left_samples(p, ann)))
            else:
                left = right = 0
        else:
            roots = 0
            left = right = 0
    else:
        right = _side_sign(ddelta(p, _sample_x(ann, p, 400)))
        left = _side_sign(ddelta(p, _left_samples(p, ann, 400)))
    verdict = "inconclusive"
    if k == 0 and left == right != 0:
        verdict = "increasing" if left > 0 else "decreasing"
    rz = None
    if p.is_polynomial and _all_zeros_real(p.poly):
        rz = 1
    return ChiconeResult(verdict, left, right, roots, k == 0, rz)


def _left_samples(p: Potential, ann: PeriodAnnulus, n: int = 3) -> np.ndarray:
    if math.isfinite(ann.x_m):
        bottom = ann.x_m
    else:
        bottom = float(solve_level(p, ann, np.array([-(1e6 ** (1.0 / (2 * ann.k + 2)))]))[0])
    u = np.linspace(0.0, 1.0, n + 2)[1:-1]
    return bottom * (0.5 - 0.5 * np.cos(math.pi * u))


def _all_zeros_real(g: Poly) -> bool:
    sq = g.squarefree_part()
    return sturm_count(sq, None, None) == sq.degree


@dataclass(frozen=True)
class DegreeBound:
    bound: Optional[int]
    odd_bound: Optional[int]
    real_zeros_bound: Optional[int]

    def to_json(self) -> dict:
        return {"bound": self.bound, "odd_degree": self.odd_bound, "all_zeros_real": self.real_zeros_bound}


def degree_bound(p: Potential) -> DegreeBound:
    """Bounds from the degree of an odd g and from g having only real zeros."""
    if not p.is_polynomial or p.poly.degree < 2:
        return DegreeBound(None, None, None)
    g = p.poly
    odd = (g.degree - 3) // 2 if g.is_odd() else None
    if odd is not None:
        odd = max(odd, 0)
    real = 1 if _all_zeros_real(g) else None
    vals = [v for v in (odd, real) if v is not None]
    return DegreeBound(min(vals) if vals else None, odd, real)


@dataclass(frozen=True)
class RolleResult:
    sas_count: int
    reduced_count: int
    bound: int
    isochronous: bool

    def to_json(self) -> dict:
        return {
            "sas_count": self.sas_count,
            "reduced_count": self.reduced_count,
            "bound": self.bound,
            "isochronous": self.isochronous,
        }


def rolle_reduce(p: Potential, ann: Optional[PeriodAnnulus] = None) -> RolleResult:
    """Count of G(x) = G(z), delta'(x) g(z) = delta'(z) g(x); the SAS count is at most 1 + that."""
    _require_exact(p)
    ann = ann or annulus(p)
    bc = count_balance_zeros(p, ann)
    if bc.isochronous:
        return RolleResult(0, 0, 0, True)
    J = _antisym(ddelta_rational(p), p.rational_g())
    sol = _system_count(p, ann, J)
    reduced = sol.count if not sol.is_curve else -1
    return RolleResult(bc.l, reduced, 1 + reduced if reduced >= 0 else bc.l, False)


@dataclass(frozen=True)
class LoudResult:
    status: str  # consistent-with-monotone | not-monotone
    zeros: int
    certified: bool
    boxes: tuple = ()

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "total_derivative_zeros": self.zeros,
            "certified": self.certified,
            "boxes": [b.to_json() for b in self.boxes],
            "statement": "P non-monotone implies at least one critical period"
            if self.status == "not-monotone"
            else "P monotone: necessary condition for monotone T holds",
        }


def loud_numerator(p: Potential) -> BiPoly:
    """Cleared numerator of dP/dx along z = sigma(x): g(x) g(z) (x - z) - 2 G(x) (g(z) - g(x))."""
    g, G = p.rational_g(), p.rational_G()
    Ng, Dg, NG, DG = g.num, g.den, G.num, G.den
    X, Z = BiPoly.x(), BiPoly.z()
    a = _bi(Ng, "x") * _bi(Ng, "z") * (X - Z) * _bi(DG, "x")
    b = _bi(NG, "x") * (_bi(Ng, "z") * _bi(Dg, "x") - _bi(Ng, "x") * _bi(Dg, "z")) * 2
    out = a - b
    return out.primitive() if out else out


def necessary_monotone_check(p: Potential, ann: Optional[PeriodAnnulus] = None) -> LoudResult:
    """Monotonicity of P = G(x)/(x - sigma(x))^2 on (0, x_M).

    Certified simple zeros of dP/dx are transversal crossings, so P changes
    monotonicity there and T has at least one critical period.
    """
    ann = ann or annulus(p)
    if p.has_rational_form:
        L = loud_numerator(p)
        sol = _system_count(p, ann, L)
        if sol.is_curve:
            return LoudResult("consistent-with-monotone", 0, True)
        simple = [b for b in sol.boxes if b.certified]
        status = "not-monotone" if simple else "consistent-with-monotone"
        return LoudResult(status, sol.count, not sol.degenerate, sol.boxes)
    xs = _sample_x(ann, p, 2000)
    v = loud_total_derivative(p, ann, xs)
    v = v[np.isfinite(v) & (np.abs(v) > ISOCHRONY_TOL)]
    changes = int(np.count_nonzero(np.sign(v[1:]) != np.sign(v[:-1])))
    return LoudResult("not-monotone" if changes else "consistent-with-monotone", changes, False)


# ---------------------------------------------------------------------------
# numeric scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalEnergy:
    h: float
    type: str  # max | min
    T: float

    def to_json(self) -> dict:
        return {"h": self.h, "type": self.type, "T": self.T}


@dataclass(frozen=True)
class ScanResult:
    energies: tuple
    grid_too_coarse: bool
    n_points: int

    @property
    def count(self) -> int:
        return len(self.energies)


def _map(fn, items):
    w = max_workers()
    if w <= 1 or len(items) < 8:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


def _sign_changes(hs, vals):
    s = np.sign(vals)
    keep = s != 0
    hs, s = np.asarray(hs)[keep], s[keep]
    return [(hs[i], hs[i + 1], s[i]) for i in range(len(s) - 1) if s[i] != s[i + 1]]


def scan_critical_periods(
    p: Potential,
    ann: Optional[PeriodAnnulus] = None,
    n: int = 60,
    h_max: Optional[float] = None,
    tol: float = 1e-10,
) -> ScanResult:
    """Sign changes of T' on a log grid, refined by Brent's method to relative 1e-9 in h."""
    ann = ann or annulus(p)
    grid = default_grid(ann, n, h_max=h_max if h_max is not None else 1e6)
    fine = np.sort(np.concatenate([grid, np.sqrt(grid[1:] * grid[:-1])]))

    def d(h):
        return dperiod(p, ann, float(h), tol)

    def t(h):
        return period(p, ann, float(h), tol).T

    vals = np.array(_map(d, list(fine)))
    # T' this small against T/h is rounding noise
    noise = 1e-9 * abs(t(fine[len(fine) // 2])) / fine
    vals = np.where(np.abs(vals) <= noise, 0.0, vals)
    coarse = _sign_changes(fine[::2], vals[::2])
    dense = _sign_changes(fine, vals)
    out = []
    for a, b, s in dense:
        h = brentq(d, a, b, xtol=1e-300, rtol=1e-9, maxiter=200)
        out.append(CriticalEnergy(float(h), "max" if s > 0 else "min", t(h)))
    return ScanResult(tuple(out), len(coarse) != len(dense), len(fine))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def endpoint_signs(p: Potential, ann: PeriodAnnulus) -> tuple[int, int]:
    """Sign of T' near the center and near the outer boundary (0 when unknown)."""
    asym = center_asymptotics(p)
    if asym.divergent:
        s0 = -1
    else:
        s0 = int(np.sign(asym.Tp0)) if abs(asym.Tp0) > 1e-12 * asym.T0 else 0
    b = ann.boundary
    if b == "saddle-polycycle":
        s1 = 1
    elif b == "unbounded-superlinear":
        s1 = -1
    elif b == "unbounded-sublinear":
        s1 = 1
    else:
        s1 = 0
    return s0, s1


@dataclass
class AnalysisReport:
    name: str
    classification: str
    monotonicity: str
    summary: str
    l: Optional[int] = None
    l_certified: bool = False
    bound: Optional[int] = None
    bound_source: Optional[str] = None
    exact_count: Optional[int] = None
    exactness_certified: bool = False
    exactness_reason: str = ""
    critical_energies: list = field(default_factory=list)
    annulus: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "potential": self.name,
            "classification": self.classification,
            "monotonicity": self.monotonicity,
            "summary": self.summary,
            "l": self.l,
            "l_certified": self.l_certified,
            "bound": self.bound,
            "bound_source": self.bound_source,
            "exact_count": self.exact_count,
            "exactness_certified": self.exactness_certified,
            "exactness_reason": self.exactness_reason,
            "critical_energies": [c.to_json() for c in self.critical_energies],
            "annulus": self.annulus,
            "evidence": self.evidence,
            "diagnostics": list(self.diagnostics),
        }


def _feasible(bound: int, parity: Optional[int], lower: int) -> list[int]:
    return [n for n in range(lower, bound + 1) if parity is None or n % 2 == parity]


def classify(
    p: Potential,
    grid: int = 60,
    h_max: Optional[float] = None,
    tol: float = 1e-10,
    scan: bool = True,
) -> AnalysisReport:
    val = validate(p)
    ann = annulus(p)
    ev: dict = {"k": val.k}
    diags = list(val.diagnostics)
    asym = center_asymptotics(p)
    ev["center_asymptotics"] = asym.to_json()

    deg = degree_bound(p)
    ev["degree_bounds"] = deg.to_json()
    chic = chicone_check(p, ann)
    ev["chicone"] = chic.to_json()
    if p.has_rational_form:
        ev["sas"] = build_sas(p, ann).to_json()
    bc = count_balance_zeros(p, ann)
    ev["balance_delta"] = bc.to_json()

    rep = AnalysisReport(p.name, "", "", "", annulus=ann.to_json(), evidence=ev, diagnostics=diags)
    rep.l, rep.l_certified = bc.l, bc.certified

    if bc.isochronous:
        rep.classification, rep.monotonicity = "isochronous", "constant"
        rep.bound, rep.bound_source = 0, "identically-zero-balance"
        rep.exact_count, rep.exactness_certified = 0, bc.certified
        rep.exactness_reason = "balance of delta vanishes identically"
        rep.summary = "isochronous center"
    elif bc.l == 0:
        inc = bc.sign > 0
        rep.classification = "monotone-increasing" if inc else "monotone-decreasing"
        rep.monotonicity = "increasing" if inc else "decreasing"
        rep.bound, rep.bound_source = 0, "balance-constant-sign"
        rep.exact_count, rep.exactness_certified = 0, bc.certified
        rep.exactness_reason = "balance of delta has constant sign"
        rep.summary = f"monotone {rep.monotonicity}"
    else:
        _count_case(p, ann, bc, deg, chic, rep)

    if scan:
        try:
            sr = scan_critical_periods(p, ann, grid, h_max, tol)
        except QuadratureError as e:
            raise QuadratureError(f"critical period scan failed: {e}") from e
        if rep.classification == "isochronous":
            sr = ScanResult((), sr.grid_too_coarse, sr.n_points)
        rep.critical_energies = list(sr.energies)
        ev["scan"] = {"points": sr.n_points, "count": sr.count, "grid_too_coarse": sr.grid_too_coarse}
        if sr.grid_too_coarse:
            diags.append("grid too coarse: refined grid found a different number of sign changes")
        if rep.bound is not None and sr.count > rep.bound:
            diags.append(f"inconsistent: scan found {sr.count} critical periods above the bound {rep.bound}")
        if rep.exact_count is not None and rep.exactness_certified and sr.count != rep.exact_count:
            diags.append(f"scan found {sr.count} critical periods, certified count is {rep.exact_count}")
    return rep


def _count_case(p, ann, bc: BalanceCount, deg: DegreeBound, chic: ChiconeResult, rep: AnalysisReport) -> None:
    ev = rep.evidence
    bound, source = bc.l, "balance-zero-count"
    if deg.bound is not None and deg.bound < bound and bc.certified:
        bound = deg.bound
        source = "odd-degree-bound" if deg.bound == deg.odd_bound else "real-zeros-bound"
    if chic.verdict != "inconclusive":
        bound, source = 0, "chicone-monotonicity"
    if p.has_rational_form and bound > 0:
        try:
            rr = rolle_reduce(p, ann)
            ev["rolle"] = rr.to_json()
            if rr.bound < bound:
                bound, source = rr.bound, "rolle-reduction"
        except Exception as e:  # the reduced system is evidence only
            rep.diagnostics.append(f"rolle reduction skipped: {e}")
    rep.bound, rep.bound_source = bound, source

    s0, s1 = endpoint_signs(p, ann)
    ev["endpoint_signs"] = {"center": s0, "boundary": s1}
    parity = None if s0 == 0 or s1 == 0 else (1 if s0 != s1 else 0)
    ex = exactness_check(p, ann, bc.l)
    ev["balance_G_over_g2"] = {"zeros": ex.count, "isochronous": ex.isochronous, "certified": ex.certified}
    loud = necessary_monotone_check(p, ann)
    ev["loud"] = loud.to_json()
    lower = 1 if loud.status == "not-monotone" and loud.certified else 0
    if parity == 1:
        lower = max(lower, 1)
    elif parity == 0 and lower == 1:
        lower = 2

    reasons = []
    certified = bc.certified or source != "balance-zero-count"
    n_exact = None
    if ex.exact and bound == bc.l and ex.certified:
        n_exact = bc.l
        reasons.append("balance of G/g^2 has the same number of zeros")
    feas = _feasible(bound, parity, lower)
    if len(feas) == 1:
        if n_exact is None:
            n_exact = feas[0]
        why = []
        if parity is not None:
            why.append(f"endpoint signs of T' ({s0:+d} at the center, {s1:+d} at the boundary) fix the parity")
        if loud.status == "not-monotone":
            why.append("P = G/(x - sigma)^2 is not monotone, so a critical period exists")
        why.append(f"upper bound {bound}")
        reasons.append("; ".join(why))
    rep.exactness_reason = " / ".join(reasons) if reasons else "upper bound only"

    if n_exact is not None and certified:
        rep.exact_count, rep.exactness_certified = n_exact, True
        if n_exact == 0:
            inc = s0 > 0 if s0 else s1 > 0
            rep.classification = "monotone-increasing" if inc else "monotone-decreasing"
            rep.monotonicity = "increasing" if inc else "decreasing"
            rep.summary = f"monotone {rep.monotonicity}"
        else:
            rep.classification, rep.monotonicity = "exact-count", "not-monotone"
            kinds = []
            first = "max" if s0 > 0 else "min"
            for i in range(n_exact):
                kinds.append(first if i % 2 == 0 else ("min" if first == "max" else "max"))
            ev["critical_period_types"] = kinds if s0 else None
            rep.summary = f"exactly {n_exact} critical period" + ("s" if n_exact > 1 else "")
    else:
        rep.classification = "bounded-count"
        undecided = 0 in feas
        rep.monotonicity = "undecided" if undecided else "not-monotone"
        rep.summary = f"at most {bound}" + (", monotonicity undecided" if undecided else "")
        if p.has_rational_form:
            ph = count_phi_balance_zeros(p, ann)
            ev["balance_phi"] = ph.to_json()

"""Built-in reference checks run by ``periodscope verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import registry
from .criteria import (
    build_sas,
    chicone_check,
    classify,
    count_balance_zeros,
    count_phi_balance_zeros,
    necessary_monotone_check,
    scan_critical_periods,
    degree_bound,
)
from .exactpoly import BiPoly, Poly, RealRoot, bivariate_gcd
from .fractional import frac_integral, frac_integral_piecewise_linear, sign_changes
from .involution import balance, sigma
from .potential import Potential, annulus
from .quadrature import abel_identity_sides, center_asymptotics, default_grid, period


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    passed: bool
    expected: str
    actual: str

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "check": self.name,
            "passed": self.passed,
            "expected": self.expected,
            "actual": self.actual,
        }


def _c(group, name, ok, expected, actual) -> Check:
    return Check(group, name, bool(ok), str(expected), str(actual))


def _inside(box_iv, lo: Fraction, hi: Fraction) -> bool:
    a, b = sorted((lo, hi))
    return a <= box_iv.lo and box_iv.hi <= b


def check_two_critical_periods() -> list[Check]:
    g = "two-critical-periods"
    p = registry.hyperelliptic(-1, Fraction(1, 2))
    ann = annulus(p)
    rep = classify(p)
    bc = count_balance_zeros(p, ann)
    out = [
        _c(g, "classification", rep.classification == "exact-count" and rep.exact_count == 2, "exact-count, 2", f"{rep.classification}, {rep.exact_count}"),
        _c(g, "certified boxes", bc.l == 2 and bc.certified, "2 certified", f"{bc.l} certified={bc.certified}"),
        _c(g, "h_s", ann.h_s_exact == Fraction(13, 60), "13/60", ann.h_s_exact),
        _c(g, "x_M", abs(ann.x_M - registry.TWO_CRITICAL_XM) < 1e-8, registry.TWO_CRITICAL_XM, f"{ann.x_M:.10f}"),
        _c(g, "scan", len(rep.critical_energies) == 2, "2 critical energies (max, min)", [c.type for c in rep.critical_energies]),
    ]
    for i, (ref, box) in enumerate(zip(registry.TWO_CRITICAL_ROOTS, bc.boxes)):
        cx, cz = box.center
        err = max(abs(cx - ref[0]), abs(cz - ref[1]))
        out.append(_c(g, f"root {i + 1}", err < 1e-6, ref, f"({cx:.10f}, {cz:.10f})"))
    return out


def check_printed_boxes() -> list[Check]:
    """Containment of the isolating boxes in the reference rational boxes."""
    g = "printed-boxes"
    p = registry.hyperelliptic(-1, Fraction(1, 2))
    bc = count_balance_zeros(p)
    out = []
    for i, ((xl, xh), (zl, zh)) in enumerate(registry.TWO_CRITICAL_PRINTED_BOXES):
        ok = i < len(bc.boxes) and _inside(bc.boxes[i].x_interval, xl, xh) and _inside(bc.boxes[i].z_interval, zl, zh)
        act = bc.boxes[i].center if i < len(bc.boxes) else None
        out.append(_c(g, f"box {i + 1}", ok, f"[{xl}, {xh}] x [{zl}, {zh}]", act))
    return out


def check_odd_quintic() -> list[Check]:
    g = "odd-quintic"
    out = []
    for k in (0, 1, 5):
        p = registry.odd_quintic(k)
        ann = annulus(p)
        xs = np.linspace(0.0, 3.0, 501)[1:]
        b = balance(p, ann, "delta", xs)
        hs = np.geomspace(1e-3, 1e3, 50)
        T = np.array([period(p, ann, h).T for h in hs])
        ok = bool(np.all(b < 0) and np.all(np.diff(T) < 0))
        out.append(_c(g, f"k={k} decreasing", ok, "balance < 0, T strictly decreasing", f"max balance {b.max():.3g}"))
    for k in (Fraction(-19, 10), Fraction(-1), Fraction(-1, 10)):
        p = registry.odd_quintic(k)
        ann = annulus(p)
        bc = count_balance_zeros(p, ann)
        sc = scan_critical_periods(p, ann)
        types = [c.type for c in sc.energies]
        out.append(_c(g, f"k={k} one maximum", bc.l == 1 and bc.certified and types == ["max"], "l=1, [max]", f"l={bc.l}, {types}"))
        a = center_asymptotics(p)
        ok = abs(a.T0 - 2 * math.pi) < 1e-10 and abs(a.Tp0 + 1.5 * float(k) * math.pi) < 1e-12
        h = 1e-4
        slope = _richardson_slope(p, ann, h)
        ok = ok and abs(slope - a.Tp0) < 1e-3 * max(1.0, abs(a.Tp0))
        out.append(_c(g, f"k={k} center limits", ok, f"T0=2pi, T'0={-1.5 * float(k) * math.pi:.6f}", f"T0={a.T0:.12f}, slope={slope:.6f}"))
    return out


def _richardson_slope(p: Potential, ann, h: float) -> float:
    """(T(h) - T(0+))/h extrapolated to h -> 0 from h and h/2."""
    T0 = center_asymptotics(p).T0
    s1 = (period(p, ann, h, 1e-13).T - T0) / h
    s2 = (period(p, ann, h / 2, 1e-13).T - T0) / (h / 2)
    return 2 * s2 - s1


def check_isochrony() -> list[Check]:
    g = "isochrony"
    p = registry.loud_quarter()
    ann = annulus(p)
    out = []
    errs = [abs(period(p, ann, h).T / (2 * math.pi) - 1) for h in (0.01, 0.1, 1, 10, 100)]
    out.append(_c(g, "T = 2pi", max(errs) < 1e-8, "relative error < 1e-8", f"{max(errs):.2e}"))
    sas = build_sas(p, ann)
    C = bivariate_gcd(sas.U, sas.Psi) if sas.Psi else sas.U
    target = BiPoly.x() * BiPoly.z() + 4 * (BiPoly.x() + BiPoly.z())
    found = C.primitive() == target.primitive() or (C and _divides(target, C))
    out.append(_c(g, "common factor", found, "xz + 4(x + z)", C))
    xs = np.geomspace(1e-3, 1e3, 200)
    dev = float(np.max(np.abs(_numeric_sigma(p, ann, xs) - (-4 * xs / (xs + 4)))))
    out.append(_c(g, "sigma closed form", dev < 1e-12, "|sigma + 4x/(x+4)| < 1e-12", f"{dev:.2e}"))
    rep = classify(p, scan=False)
    out.append(_c(g, "classification", rep.classification == "isochronous", "isochronous", rep.classification))
    return out


def _divides(a: BiPoly, b: BiPoly) -> bool:
    try:
        b.exquo(a)
        return True
    except Exception:
        return False


def _numeric_sigma(p: Potential, ann, xs):
    """sigma by solving the level equation, bypassing the closed form."""
    from .potential import level, solve_level

    return solve_level(p, ann, -level(p, ann.k, xs))


def check_monotone_and_nilpotent() -> list[Check]:
    g = "chicone-and-nilpotent"
    out = []
    p = registry.cubic_soft()
    ch = chicone_check(p)
    rep = classify(p, scan=False)
    out.append(
        _c(g, "x(1-x^2) increasing", ch.numerator_roots == 0 and rep.classification == "monotone-increasing",
           "0 roots, monotone-increasing", f"{ch.numerator_roots} roots, {rep.classification}")
    )
    for p in (registry.nilpotent_plus(), registry.nilpotent_soft()):
        ann = annulus(p)
        rep = classify(p)
        types = [c.type for c in rep.critical_energies]
        hmid = ann.h_s / 2
        Tmid = period(p, ann, hmid).T
        Tsmall = period(p, ann, ann.h_s * 1e-8).T
        ok = rep.exact_count == 1 and types == ["min"] and Tsmall > 10 * Tmid
        out.append(_c(g, f"{p.name} one minimum", ok, "exactly 1, [min], T(h~0) > 10 T(h_mid)", f"{rep.exact_count}, {types}, {Tsmall / Tmid:.1f}x"))
    return out


def check_asymptotics(n: int = 10, seed: int = 7) -> list[Check]:
    g = "asymptotics"
    out = []
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        c1 = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        c2 = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        c3 = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        p = Potential.polynomial([0, c1, c2, c3])
        ann = annulus(p)
        a = center_asymptotics(p)
        h = min(1e-4, ann.h_s * 1e-3)
        T = period(p, ann, h * 1e-3, 1e-13).T
        slope = _richardson_slope(p, ann, h)
        worst = max(worst, abs(T - a.T0) / a.T0, abs(slope - a.Tp0) / max(abs(a.Tp0), 1.0))
    out.append(_c(g, "random elementary centers", worst < 1e-3, "relative error < 1e-3", f"{worst:.2e}"))
    p = registry.hyperelliptic(-1, Fraction(1, 2))
    ann = annulus(p)
    ref = registry.hyperelliptic_dT0(-1, 0.5)
    slope = _richardson_slope(p, ann, 1e-5)
    ok = abs(ref - 10 * math.sqrt(2) / 3 * math.pi) < 1e-12 and abs(slope - ref) / ref < 1e-3
    out.append(_c(g, "hyperelliptic T'(0+)", ok, f"{ref:.6f}", f"{slope:.6f}"))
    return out


def _test_integrands() -> list[tuple[str, Callable, Callable]]:
    return [
        ("cos", np.cos, np.sin),
        ("exp", np.exp, lambda x: np.exp(x) - 1),
        ("x^2", lambda x: x * x, lambda x: x**3 / 3),
        ("sqrt", np.sqrt, lambda x: 2 * x**1.5 / 3),
        ("1/(1+x)", lambda x: 1 / (1 + x), np.log1p),
    ]


def random_piecewise_linear(rng, max_changes: int = 4, n_knots: int = 12, top: float = 3.0):
    """Knots on [0, top] and values with at most ``max_changes`` sign changes."""
    knots = np.concatenate([[0.0], np.sort(rng.uniform(0, top, n_knots - 2)), [top]])
    changes = int(rng.integers(0, max_changes + 1))
    cuts = np.sort(rng.choice(np.arange(1, n_knots), size=changes, replace=False)) if changes else []
    sign = np.ones(n_knots)
    s = 1.0 if rng.random() < 0.5 else -1.0
    j = 0
    for i in range(n_knots):
        while j < len(cuts) and i >= cuts[j]:
            s, j = -s, j + 1
        sign[i] = s
    values = sign * rng.uniform(0.1, 2.0, n_knots)
    return knots, values


def check_fractional(n_random: int = 100, seed: int = 11) -> list[Check]:
    g = "fractional"
    out = []
    xs = np.linspace(0.0, 3.0, 13)
    worst = 0.0
    for name, f, F in _test_integrands():
        two = frac_integral(lambda s: frac_integral(f, 0.5, s, tol=1e-12), 0.5, xs, tol=1e-12)
        worst = max(worst, float(np.max(np.abs(two - F(xs)))))
    out.append(_c(g, "semigroup", worst < 1e-7, "|I^1/2 I^1/2 f - I^1 f| < 1e-7", f"{worst:.2e}"))
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_random):
        knots, values = random_piecewise_linear(rng)
        grid = np.linspace(0.0, 3.0, 3001)[1:]
        before = sign_changes(np.interp(grid, knots, values))
        after = sign_changes(frac_integral_piecewise_linear(knots, values, 0.5, grid), rel_floor=1e-12)
        bad += after > before
    out.append(_c(g, "variation diminishing", bad == 0, "0 violations", f"{bad} violations"))
    p = registry.odd_quintic(1)
    ann = annulus(p)
    rel = 0.0
    for h in (0.05, 0.5, 2.0):
        lhs, rhs = abel_identity_sides(p, ann, h)
        rel = max(rel, abs(lhs - rhs) / abs(lhs))
    out.append(_c(g, "Abel identity", rel < 1e-6, "relative gap < 1e-6", f"{rel:.2e}"))
    return out


def random_odd_polynomial(rng, degree: int) -> Potential:
    """Odd g = x + c3 x^3 + ... + c_d x^d with c_d > 0 that has a period annulus."""
    while True:
        cs = [Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4))) for _ in range((degree - 1) // 2)]
        cs[-1] = abs(cs[-1]) or Fraction(1)
        coeffs = [Fraction(0)] * (degree + 1)
        coeffs[1] = Fraction(1)
        for i, c in enumerate(cs):
            coeffs[3 + 2 * i] = c
        p = Potential.polynomial(coeffs)
        try:
            annulus(p)
        except Exception:
            continue
        return p


def random_real_zero_polynomial(rng, n_roots: int) -> Potential:
    """g = x * prod (x - r_i) / prod(-r_i) with nonzero rational roots, g'(0) = 1."""
    while True:
        roots = set()
        while len(roots) < n_roots:
            r = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 4)))
            if r:
                roots.add(r)
        g = Poly.x()
        for r in roots:
            g = g * Poly([-r, 1]) * (1 / (-r))
        p = Potential.polynomial(g)
        try:
            annulus(p)
        except Exception:
            continue
        return p


def check_degree_bounds(n: int = 50, seed: int = 5) -> list[Check]:
    from .criteria import rolle_reduce

    g = "degree-bounds"
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n):
        p = random_odd_polynomial(rng, 5 if i % 2 == 0 else 7)
        bc = count_balance_zeros(p)
        if not bc.certified or bc.l > (p.poly.degree - 3) // 2:
            bad.append(str(p.poly))
    out = [_c(g, "odd g", not bad, "l <= (deg - 3)/2", f"{len(bad)} violations {bad[:2]}")]
    bad = []
    for i in range(n):
        p = random_real_zero_polynomial(rng, 2 + i % 3)
        ch = chicone_check(p)
        bc = count_balance_zeros(p)
        if ch.numerator_roots != 0 or bc.l > 1:
            bad.append(str(p.poly))
    out.append(_c(g, "all real zeros", not bad, "no delta' roots, l <= 1", f"{len(bad)} violations {bad[:2]}"))
    return out


def check_open_cases() -> list[Check]:
    g = "open-cases"
    out = []
    for beta in (Fraction(7, 5), Fraction(-7, 5)):
        p = registry.hyperelliptic(beta, Fraction(1, 2))
        ann = annulus(p)
        rep = classify(p, scan=False)
        phi = count_phi_balance_zeros(p, ann)
        loud = necessary_monotone_check(p, ann)
        ok = rep.summary == "at most 2, monotonicity undecided" and phi.l == 2 and loud.status == "consistent-with-monotone"
        out.append(
            _c(g, f"beta={beta}", ok, "at most 2, monotonicity undecided; B(phi) 2 zeros; P consistent-with-monotone",
               f"{rep.summary}; B(phi) {phi.l} zeros; P {loud.status}")
        )
    return out


CHECKS: dict[str, Callable[[], list[Check]]] = {
    "two-critical-periods": check_two_critical_periods,
    "printed-boxes": check_printed_boxes,
    "odd-quintic": check_odd_quintic,
    "isochrony": check_isochrony,
    "chicone-and-nilpotent": check_monotone_and_nilpotent,
    "asymptotics": check_asymptotics,
    "fractional": check_fractional,
    "degree-bounds": check_degree_bounds,
    "open-cases": check_open_cases,
}


def run(only: str | None = None) -> list[Check]:
    if only is not None and only not in CHECKS:
        raise KeyError(f"unknown check {only!r}; known: {', '.join(CHECKS)}")
    names = [only] if only else list(CHECKS)
    out: list[Check] = []
    for name in names:
        try:
            out.extend(CHECKS[name]())
        except Exception as e:  # a crashing check is a failed check
            out.append(Check(name, "run", False, "completes", f"{type(e).__name__}: {e}"))
    return out

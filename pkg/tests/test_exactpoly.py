from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from periodscope.exactpoly import (
    AlgebraicError,
    BiPoly,
    Poly,
    RationalFunction,
    bivariate_gcd,
    isolate_system,
    parse_rational,
    real_roots,
    resultant,
    sturm_count,
)

X, Z = sp.symbols("x z")

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
coeff_lists = st.lists(small, min_size=1, max_size=7)
int_coeffs = st.lists(st.integers(-6, 6), min_size=2, max_size=7)


def to_sympy(p: Poly):
    return sum(sp.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(p.coeffs))


def bi_to_sympy(b: BiPoly):
    return sum(sp.Rational(c.numerator, c.denominator) * X**i * Z**j for (i, j), c in b.terms.items())


def from_sympy(expr) -> Poly:
    cs = sp.Poly(expr, X).all_coeffs()[::-1]
    return Poly([Fraction(int(c.p), int(c.q)) for c in cs])


@pytest.mark.parametrize("text,value", [("3", 3), ("-1/5", Fraction(-1, 5)), (" 2 / 4 ", Fraction(1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1.5", "1e3", "x", "1/0", ""])
def test_parse_rational_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


@given(coeff_lists, coeff_lists)
def test_ring_ops_match_sympy(a, b):
    p, q = Poly(a), Poly(b)
    assert sp.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0
    assert sp.expand(to_sympy(p - q) - (to_sympy(p) - to_sympy(q))) == 0


@given(coeff_lists, coeff_lists)
def test_divmod(a, b):
    p, q = Poly(a), Poly(b)
    assume(q)
    quo, rem = divmod(p, q)
    assert quo * q + rem == p
    assert rem.degree < q.degree or not rem


@given(int_coeffs, int_coeffs, int_coeffs)
def test_gcd_matches_sympy(a, b, c):
    p, q = Poly(a) * Poly(c), Poly(b) * Poly(c)
    assume(p and q)
    ref = sp.Poly(sp.gcd(to_sympy(p), to_sympy(q)), X).monic()
    assert to_sympy(p.gcd(q)).expand() == ref.as_expr().expand()


@given(int_coeffs)
def test_real_root_count_matches_sympy(a):
    p = Poly(a)
    assume(p.degree >= 1)
    ref = sorted(set(sp.Poly(to_sympy(p), X).real_roots()))
    roots = real_roots(p)
    assert len(roots) == len(ref)
    for r, s in zip(roots, ref):
        assert abs(float(r) - float(s)) < 1e-9


@given(int_coeffs, small, small)
def test_sturm_count_open_interval(a, lo, hi):
    p = Poly(a)
    assume(p.degree >= 1 and lo < hi)
    ref = [r for r in set(sp.Poly(to_sympy(p), X).real_roots()) if lo < r < hi]
    assert sturm_count(p, lo, hi) == len(ref)


def test_rational_roots_are_sorted_and_exact():
    # g = x(x^2-1)(x^2-2)/2: the rational roots +-1 sit between irrational ones
    p = Poly([0, 1, 0, Fraction(-3, 2), 0, Fraction(1, 2)])
    rs = real_roots(p)
    assert [round(float(r), 12) for r in rs] == [-1.414213562373, -1.0, 0.0, 1.0, 1.414213562373]
    assert rs[3].as_rational() == 1


def test_real_roots_excludes_endpoints():
    p = Poly.from_roots([0, 1, 2])
    assert len(real_roots(p, 0, 2)) == 1
    assert sturm_count(p, 0, 2) == 1


def test_refinement_width():
    r = real_roots(Poly([-2, 0, 1]), 0, None)[0]
    w = r.refined_to(Fraction(1, 10**12)).interval
    assert w.hi - w.lo <= Fraction(1, 10**12)
    assert w.lo ** 2 <= 2 <= w.hi ** 2


def test_rational_function_reduces():
    f = RationalFunction(Poly.from_roots([1, 2]), Poly.from_roots([1, 3]))
    g = RationalFunction(Poly.from_roots([2]), Poly.from_roots([3]))
    assert f == g
    assert f(Fraction(0)) == Fraction(2, 3)


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4), st.lists(st.integers(-3, 3), min_size=2, max_size=4))
def test_resultant_matches_sympy(a, b):
    F = BiPoly.from_poly(Poly(a), "x") + BiPoly.z() * BiPoly.from_poly(Poly(b), "x")
    H = BiPoly.z() ** 2 - BiPoly.x()
    assume(F)
    ref = sp.resultant(bi_to_sympy(F), bi_to_sympy(H), Z)
    mine = to_sympy(resultant(F, H, "z"))
    assert sp.expand(mine - ref) == 0


def test_bivariate_gcd_finds_common_factor():
    x, z = BiPoly.x(), BiPoly.z()
    C = x * z + 4 * (x + z)
    F, H = C * (x - z + 1), C * (x + 2 * z - 3)
    assert bivariate_gcd(F, H).primitive() == C.primitive()


def test_isolate_system_circle_and_line():
    x, z = BiPoly.x(), BiPoly.z()
    F = x**2 + z**2 - 1
    H = x + z
    sol = isolate_system(F, H, (Fraction(0), None), (None, Fraction(0)))
    assert sol.count == 1 and sol.boxes[0].certified
    cx, cz = sol.boxes[0].center
    assert abs(cx - 2**-0.5) < 1e-9 and abs(cz + 2**-0.5) < 1e-9


def test_isolate_system_reports_curve():
    x, z = BiPoly.x(), BiPoly.z()
    C = x + z
    sol = isolate_system(C * (x - 3), C * (z + 5), (Fraction(0), Fraction(1)), (Fraction(-1), Fraction(0)))
    assert sol.is_curve


def test_zero_polynomial_has_no_roots_to_isolate():
    with pytest.raises(AlgebraicError):
        real_roots(Poly([0]))

"""Exact polynomial algebra over the rationals.

Univariate polynomials (:class:`Poly`), rational functions
(:class:`RationalFunction`) and bivariate polynomials in ``x`` and ``z``
(:class:`BiPoly`), all with :class:`fractions.Fraction` coefficients, plus the
certified real-root machinery built on top of them:

* Sturm sequences and exact root counting on open intervals,
* integer gcds delegated to sympy's dense heuristic gcd,
* Descartes (Vincent-Collins-Akritas) bisection for root isolation,
* subresultant PRS resultants and bivariate gcds,
* isolation of the common real roots of two bivariate polynomials inside an
  open rectangle, each certified by an interval Krawczyk test.

No floating point enters any decision made here.  The heavy kernels work on
primitive integer coefficient lists (lowest degree first).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd

Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")

__all__ = [
    "AlgebraicError",
    "BiPoly",
    "IsolationBox",
    "Poly",
    "RationalFunction",
    "RationalInterval",
    "RealRoot",
    "SystemSolution",
    "bivariate_gcd",
    "isolate_roots",
    "isolate_system",
    "parse_rational",
    "real_roots",
    "resultant",
    "sturm_count",
]


class AlgebraicError(ValueError):
    """Raised for algebraically invalid requests (zero polynomial, inexact division)."""


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"3"``, ``"-1/5"`` etc.  Decimal and float notation is rejected."""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text.replace(" ", ""))


# ---------------------------------------------------------------------------
# integer polynomial kernel: lists of ints, lowest degree first, no trailing 0
# ---------------------------------------------------------------------------


def _trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def _add(a: list, b: list) -> list:
    if len(a) < len(b):
        a, b = b, a
    r = list(a)
    for i, c in enumerate(b):
        r[i] += c
    return _trim(r)


def _sub(a: list, b: list) -> list:
    r = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        r[i] -= c
    return _trim(r)


def _scale(a: list, c: int) -> list:
    if not c:
        return []
    return [x * c for x in a]


def _pack(a: list, k: int) -> int:
    r = 0
    for c in reversed(a):
        r = (r << k) + c
    return r


def _mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    if len(a) == 1:
        return _scale(b, a[0])
    if len(b) == 1:
        return _scale(a, b[0])
    if min(len(a), len(b)) < 24:
        r = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    r[i + j] += x * y
        return _trim(r)
    # Kronecker substitution with signed digit recovery
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    k = bound.bit_length() + 2
    c = _pack(a, k) * _pack(b, k)
    mask = (1 << k) - 1
    half = 1 << (k - 1)
    out = []
    for _ in range(len(a) + len(b) - 1):
        d = c & mask
        if d >= half:
            d -= 1 << k
        out.append(d)
        c = (c - d) >> k
    return _trim(out)


def _pow(a: list, n: int) -> list:
    r = [1]
    base = a
    while n:
        if n & 1:
            r = _mul(r, base)
        n >>= 1
        if n:
            base = _mul(base, base)
    return r


def _divexact(a: list, b: list) -> list:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return []
    if len(b) == 1:
        q = []
        for c in a:
            qi, r = divmod(c, b[0])
            if r:
                raise AlgebraicError("inexact integer polynomial division")
            q.append(qi)
        return q
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    if len(a) - 1 < db:
        raise AlgebraicError("inexact integer polynomial division")
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1 - db, -1, -1):
        c = a[i + db]
        if c:
            qi, r = divmod(c, lb)
            if r:
                raise AlgebraicError("inexact integer polynomial division")
            q[i] = qi
            for j in range(db + 1):
                a[i + j] -= qi * b[j]
    if any(a[:db]):
        raise AlgebraicError("inexact integer polynomial division")
    return _trim(q)


def _prem(a: list, b: list) -> list:
    """Pseudo-remainder lc(b)**(deg a - deg b + 1) * a mod b."""
    db = len(b) - 1
    e = len(a) - len(b) + 1
    if e <= 0:
        return list(a)
    lb = b[-1]
    r = list(a)
    while r and len(r) - 1 >= db:
        c = r[-1]
        s = len(r) - 1 - db
        r = [x * lb for x in r]
        for j in range(db + 1):
            r[s + j] -= c * b[j]
        _trim(r)
        e -= 1
    if e:
        r = _scale(r, lb**e)
    return r


def _content(a: list) -> int:
    return gcd(*a)


def _primitive(a: list) -> list:
    """Divide by the positive content; keeps the sign of the leading term."""
    c = _content(a)
    if c in (0, 1):
        return list(a)
    return [x // c for x in a]


def _normal(a: list) -> list:
    a = _primitive(a)
    if a and a[-1] < 0:
        a = [-x for x in a]
    return a


def _igcd(a: list, b: list) -> list:
    """Primitive gcd with positive leading coefficient (sympy's heuristic/modular gcd)."""
    if not a:
        return _normal(b)
    if not b:
        return _normal(a)
    g = dup_gcd([ZZ(c) for c in reversed(a)], [ZZ(c) for c in reversed(b)], ZZ)
    return _normal([int(c) for c in reversed(g)])


def _derivative(a: list) -> list:
    return _trim([i * a[i] for i in range(1, len(a))])


def _sign_at(a: list, x: Fraction) -> int:
    """Sign of a(x) evaluated exactly with homogeneous integer Horner."""
    if not a:
        return 0
    num, den = x.numerator, x.denominator
    v = a[-1]
    dp = 1
    for c in reversed(a[:-1]):
        dp *= den
        v = v * num + c * dp
    return (v > 0) - (v < 0)


def _sign_at_inf(a: list, direction: int) -> int:
    if not a:
        return 0
    s = 1 if a[-1] > 0 else -1
    if direction < 0 and (len(a) - 1) % 2:
        s = -s
    return s


def _taylor_shift(a: list, c: int) -> list:
    """Coefficients of a(x + c)."""
    a = list(a)
    n = len(a)
    if c == 0 or n <= 1:
        return a
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


def _sign_variations(a: Iterable[int]) -> int:
    v = 0
    last = 0
    for c in a:
        if c:
            if last and (c > 0) != (last > 0):
                v += 1
            last = c
    return v


def _cauchy_bound(a: list) -> Fraction:
    """A power of two strictly exceeding the modulus of every root."""
    lead = abs(a[-1])
    m = max((abs(c) for c in a[:-1]), default=0)
    bound = 1 + Fraction(m, lead)
    p = 1
    while p <= bound:
        p *= 2
    return Fraction(p)


def _to_int(coeffs: Sequence[Fraction]) -> list:
    """Clear denominators of a rational coefficient list; returns primitive ints."""
    if not coeffs:
        return []
    d = reduce(lcm, (c.denominator for c in coeffs), 1)
    return _primitive([int(c * d) for c in coeffs])


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Immutable univariate polynomial with rational coefficients (low to high)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number | str] = ()):
        cs = [c if isinstance(c, Fraction) else parse_rational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # constructors -------------------------------------------------------
    @classmethod
    def x(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def const(cls, c: Number) -> Poly:
        return cls((Fraction(c),))

    @classmethod
    def from_roots(cls, roots: Iterable[Number], lead: Number = 1) -> Poly:
        p = cls.const(lead)
        for r in roots:
            p = p * cls((-Fraction(r), 1))
        return p

    @classmethod
    def _from_int(cls, a: list) -> Poly:
        return cls(Fraction(c) for c in a)

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> Poly:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(c * other for c in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly()
        r = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    r[i + j] += a * b
        return Poly(r)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        r = Poly.const(1)
        for _ in range(n):
            r = r * self
        return r

    def __divmod__(self, other: Poly) -> tuple[Poly, Poly]:
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        q = [Fraction(0)] * (dq + 1)
        lead = other.lc
        db = other.degree
        for i in range(dq, -1, -1):
            c = r[i + db] / lead
            q[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[i + j] -= c * b
        return Poly(q), Poly(r[:db])

    def __floordiv__(self, other) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other) -> Poly:
        return divmod(self, other)[1]

    def exquo(self, other: Poly) -> Poly:
        q, r = divmod(self, other)
        if r:
            raise AlgebraicError("inexact polynomial division")
        return q

    # calculus and evaluation -------------------------------------------
    def __call__(self, x):
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v if self.coeffs else Fraction(0) * x

    def derivative(self) -> Poly:
        return Poly(i * self.coeffs[i] for i in range(1, len(self.coeffs)))

    def antiderivative(self) -> Poly:
        return Poly([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def compose(self, inner: Poly) -> Poly:
        r = Poly()
        for c in reversed(self.coeffs):
            r = r * inner + c
        return r

    def sign_at(self, x: Fraction) -> int:
        return _sign_at(_to_int(self.coeffs), Fraction(x))

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    # structure ----------------------------------------------------------
    def monic(self) -> Poly:
        return self * (1 / self.lc) if self.coeffs else self

    def primitive_int(self) -> list:
        """Primitive integer coefficient list (positive leading coefficient)."""
        return _normal(_to_int(self.coeffs))

    def gcd(self, other: Poly) -> Poly:
        if not self:
            return other.monic()
        if not other:
            return self.monic()
        return Poly._from_int(_igcd(_to_int(self.coeffs), _to_int(other.coeffs))).monic()

    def squarefree_part(self) -> Poly:
        if self.degree <= 0:
            return self.monic() if self else self
        return self.exquo(self.gcd(self.derivative())).monic()

    def is_even(self) -> bool:
        return all(not c for c in self.coeffs[1::2])

    def is_odd(self) -> bool:
        return all(not c for c in self.coeffs[0::2])

    def valuation(self) -> int:
        """Order of vanishing at 0."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise AlgebraicError("identically zero")

    # printing -----------------------------------------------------------
    def __repr__(self) -> str:
        return f"Poly([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        return _format_terms(((c, i, 0) for i, c in enumerate(self.coeffs)), ("x", "z"))


def _format_terms(terms, names) -> str:
    parts = []
    for c, i, j in sorted(terms, key=lambda t: (-(t[1] + t[2]), -t[1])):
        if not c:
            continue
        mono = []
        for v, e in zip(names, (i, j)):
            if e == 1:
                mono.append(v)
            elif e > 1:
                mono.append(f"{v}^{e}")
        mono_s = "*".join(mono)
        mag = abs(c)
        if mono_s:
            s = mono_s if mag == 1 else f"{mag}*{mono_s}"
        else:
            s = str(mag)
        parts.append(("-" if c < 0 else "+", s))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sgn, s in parts[1:]:
        out += f" {sgn} {s}"
    return out


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """num/den in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        den = Poly.const(1) if den is None else den
        if not den:
            raise ZeroDivisionError("zero denominator")
        if num and den.degree > 0:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num.exquo(g), den.exquo(g)
        if not num:
            den = Poly.const(1)
        lead = den.lc
        self.num = num * (1 / lead)
        self.den = den * (1 / lead)

    @staticmethod
    def _coerce(o) -> RationalFunction:
        if isinstance(o, RationalFunction):
            return o
        if isinstance(o, Poly):
            return RationalFunction(o)
        return RationalFunction(Poly.const(o))

    def __add__(self, o):
        o = self._coerce(o)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._coerce(o)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._coerce(o)
        return RationalFunction(self.num * o.den, self.den * o.num)

    def derivative(self) -> RationalFunction:
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den
        )

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        return self.num == o.num and self.den == o.den

    def __repr__(self) -> str:
        return f"RationalFunction(({self.num}) / ({self.den}))"


# ---------------------------------------------------------------------------
# intervals and real roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval with lo > hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def subset_of(self, other: RationalInterval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def disjoint(self, other: RationalInterval) -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class RealRoot:
    """A real algebraic number: the unique root of a squarefree ``poly`` in ``interval``.

    The interval is either degenerate (an exact rational root) or open with
    nonvanishing endpoint values of opposite sign.
    """

    poly: Poly
    interval: RationalInterval

    @property
    def is_rational(self) -> bool:
        return self.interval.lo == self.interval.hi

    def __float__(self) -> float:
        r = self
        while not r.is_rational and r.interval.width > Fraction(1, 2**60) * max(1, abs(r.interval.lo)):
            r = r.refine()
        return float(r.interval.mid)

    def refine(self) -> RealRoot:
        """Halve the isolating interval."""
        iv = self.interval
        if iv.lo == iv.hi:
            return self
        m = iv.mid
        a = self.poly.primitive_int()
        sm = _sign_at(a, m)
        if sm == 0:
            return RealRoot(self.poly, RationalInterval(m, m))
        if sm == _sign_at(a, iv.lo):
            return RealRoot(self.poly, RationalInterval(m, iv.hi))
        return RealRoot(self.poly, RationalInterval(iv.lo, m))

    def refined_to(self, eps: Fraction) -> RealRoot:
        r = self
        while r.interval.width > eps:
            r = r.refine()
        return r

    def as_rational(self) -> Fraction | None:
        """The root as a Fraction when it is rational, else None.

        A rational root of an integer polynomial has denominator dividing the
        leading coefficient, so it is the unique such fraction in a narrow
        enough interval.
        """
        if self.is_rational:
            return self.interval.lo
        a = self.poly.primitive_int()
        lead = abs(a[-1])
        r = self.refined_to(Fraction(1, 4 * lead * lead))
        cand = r.interval.mid.limit_denominator(lead)
        if cand in r.interval and _sign_at(a, cand) == 0:
            return cand
        return None

    def compare(self, other: RealRoot | Fraction | int) -> int:
        """Exact three-way comparison (-1, 0, 1)."""
        a = self
        if not isinstance(other, RealRoot):
            v = Fraction(other)
            if a.is_rational:
                return (a.interval.lo > v) - (a.interval.lo < v)
            if a.interval.lo < v < a.interval.hi and a.poly.sign_at(v) == 0:
                return 0
            while v in a.interval and not a.is_rational:
                a = a.refine()
            if a.is_rational:
                return (a.interval.lo > v) - (a.interval.lo < v)
            return 1 if a.interval.lo >= v else -1
        b = other
        if b.is_rational:
            return a.compare(b.interval.lo)
        if a.is_rational:
            return -b.compare(a.interval.lo)
        common = a.poly.gcd(b.poly)
        for _ in range(400):
            if a.interval.hi <= b.interval.lo:
                return -1
            if b.interval.hi <= a.interval.lo:
                return 1
            if common.degree > 0:
                lo = max(a.interval.lo, b.interval.lo)
                hi = min(a.interval.hi, b.interval.hi)
                if lo < hi and sturm_count(common, lo, hi) > 0:
                    # the shared root lies in both isolating intervals
                    return 0
            a, b = a.refine(), b.refine()
        raise AlgebraicError("comparison of algebraic numbers did not terminate")

    def __str__(self) -> str:
        return f"root of {self.poly} in {self.interval}"


def _deflate_at(a: list, v: Fraction) -> list:
    """Remove the (simple) rational root v from the squarefree integer poly a."""
    lin = [-v.numerator, v.denominator]
    return _divexact(a, lin)


def _prepare(p: Poly) -> list:
    if not p:
        raise AlgebraicError("identically zero")
    return _to_int(p.squarefree_part().coeffs)


def _endpoint(a: list, v: Fraction | None, direction: int) -> Fraction:
    if v is None:
        b = _cauchy_bound(a) if len(a) > 1 else Fraction(1)
        return b if direction > 0 else -b
    return Fraction(v)


def _sturm_chain(a: list) -> list[list]:
    chain = [_primitive(a), _primitive(_derivative(a))]
    while len(chain[-1]) > 1:
        u, v = chain[-2], chain[-1]
        r = _prem(u, v)
        if not r:
            break
        e = len(u) - len(v) + 1
        # prem = lc(v)**e * rem; flip so the chain holds -rem up to a positive factor
        if v[-1] > 0 or e % 2 == 0:
            r = [-c for c in r]
        chain.append(_primitive(r))
    return chain


def _chain_variations(chain: list[list], x: Fraction | None, direction: int = 1) -> int:
    if x is None:
        signs = [_sign_at_inf(c, direction) for c in chain]
    else:
        signs = [_sign_at(c, x) for c in chain]
    return _sign_variations(signs)


def sturm_count(p: Poly, lo: Number | None, hi: Number | None) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``(lo, hi)``.

    ``None`` stands for an infinite endpoint.  Rational endpoints that are roots
    are excluded exactly by deflation.
    """
    a = _prepare(p)
    if len(a) <= 1:
        return 0
    lo = None if lo is None else Fraction(lo)
    hi = None if hi is None else Fraction(hi)
    if lo is not None and hi is not None and lo >= hi:
        return 0
    for v in (lo, hi):
        if v is not None and _sign_at(a, v) == 0:
            a = _deflate_at(a, v)
    if len(a) <= 1:
        return 0
    chain = _sturm_chain(a)
    return _chain_variations(chain, lo, -1) - _chain_variations(chain, hi, 1)


# the Descartes bisection is exact on its own; the Sturm cross-check is skipped
# above this degree because pure-integer Sturm chains grow too costly
STURM_CHECK_MAX_DEGREE = 40


def _descartes_isolate(b: list) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Isolate the roots of a squarefree integer poly in (0, 1).

    Returns (intervals, exact) where each entry (c, k) denotes the interval
    (c/2^k, (c+1)/2^k) or the exact point c/2^k.
    """
    intervals: list[tuple[int, int]] = []
    exact: list[tuple[int, int]] = []
    stack = [(b, 0, 0)]
    while stack:
        q, c, k = stack.pop()
        if len(q) <= 1:
            continue
        v = _sign_variations(_taylor_shift(q[::-1], 1))
        if v == 0:
            continue
        if v == 1:
            intervals.append((c, k))
            continue
        n = len(q) - 1
        ql = _primitive([q[i] << (n - i) for i in range(n + 1)])
        qr = _taylor_shift(ql, 1)
        if qr[0] == 0:
            exact.append((2 * c + 1, k + 1))
            qr = _primitive(qr[1:])
            ql = _primitive(_divexact(ql, [-1, 1]))
        stack.append((qr, 2 * c + 1, k + 1))
        stack.append((ql, 2 * c, k + 1))
    return intervals, exact


def _isolate_int(a: list, lo: Fraction, hi: Fraction) -> list[tuple[list, RationalInterval]]:
    """Isolate roots of the squarefree int poly a in the open (lo, hi).

    Each result pairs an interval with a divisor of a that has the isolated
    root and does not vanish at the interval's endpoints.
    """
    for v in (lo, hi):
        if _sign_at(a, v) == 0:
            a = _deflate_at(a, v)
    if len(a) <= 1:
        return []
    w = hi - lo
    d = lcm(lo.denominator, w.denominator)
    u, s = int(lo * d), int(w * d)
    n = len(a) - 1
    # D^n a((u + s t)/D)
    y = [a[i] * d ** (n - i) for i in range(n + 1)]
    y = _taylor_shift(y, u)
    b = _primitive([y[i] * s**i for i in range(n + 1)])
    intervals, exact = _descartes_isolate(b)
    points = {lo + w * Fraction(c, 1 << k) for c, k in exact}
    out = []
    for c, k in intervals:
        iv = RationalInterval(lo + w * Fraction(c, 1 << k), lo + w * Fraction(c + 1, 1 << k))
        q = a
        for v in (iv.lo, iv.hi):
            if v in points:
                q = _deflate_at(q, v)
        out.append((q, iv))
    out += [(a, RationalInterval(v, v)) for v in points]
    out.sort(key=lambda t: t[1].lo)
    if len(a) - 1 > STURM_CHECK_MAX_DEGREE:
        return out
    # Sturm cross-check of the Descartes output
    chain = _sturm_chain(a)
    total = _chain_variations(chain, lo) - _chain_variations(chain, hi)
    if total != len(out):
        raise AlgebraicError("Sturm verification of root isolation failed")
    for q, iv in out:
        if iv.lo == iv.hi:
            continue
        ch = chain if q is a else _sturm_chain(q)
        if _chain_variations(ch, iv.lo) - _chain_variations(ch, iv.hi) != 1:
            raise AlgebraicError("Sturm verification of an isolating interval failed")
    return out


def real_roots(p: Poly, lo: Number | None = None, hi: Number | None = None) -> list[RealRoot]:
    """Distinct real roots of ``p`` in the open interval ``(lo, hi)``, sorted."""
    a = _prepare(p)
    if len(a) <= 1:
        return []
    lo_f, hi_f = _endpoint(a, lo, -1), _endpoint(a, hi, 1)
    if lo_f >= hi_f:
        return []
    sqf = Poly._from_int(a)
    res = []
    for q, iv in _isolate_int(a, lo_f, hi_f):
        res.append(RealRoot(sqf if q is a else Poly._from_int(q), iv))
    # exact rational roots come out of the bisection separately from interval ones
    res.sort(key=lambda r: (r.interval.lo, r.interval.hi))
    return res


def isolate_roots(
    p: Poly, lo: Number | None, hi: Number | None, eps: Fraction = Fraction(1, 2**32)
) -> list[RationalInterval]:
    """Disjoint rational intervals of width <= eps, one per root of ``p`` in ``(lo, hi)``."""
    return [r.refined_to(Fraction(eps)).interval for r in real_roots(p, lo, hi)]


# ---------------------------------------------------------------------------
# bivariate polynomials
# ---------------------------------------------------------------------------


class BiPoly:
    """Immutable polynomial in ``x`` and ``z``: a mapping (i, j) -> coefficient of x^i z^j."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        t = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v:
                t[(int(k[0]), int(k[1]))] = v
        object.__setattr__(self, "terms", t)

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def x(cls) -> BiPoly:
        return cls({(1, 0): 1})

    @classmethod
    def z(cls) -> BiPoly:
        return cls({(0, 1): 1})

    @classmethod
    def const(cls, c: Number) -> BiPoly:
        return cls({(0, 0): c})

    @classmethod
    def from_poly(cls, p: Poly, var: str = "x") -> BiPoly:
        if var == "x":
            return cls({(i, 0): c for i, c in enumerate(p.coeffs)})
        return cls({(0, j): c for j, c in enumerate(p.coeffs)})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Poly], main: str = "z") -> BiPoly:
        """Build from coefficients (polys in the other variable) of powers of ``main``."""
        t = {}
        for j, c in enumerate(coeffs):
            for i, v in enumerate(c.coeffs):
                t[(i, j) if main == "z" else (j, i)] = v
        return cls(t)

    @classmethod
    def _from_zx(cls, A: list[list], main: str = "z") -> BiPoly:
        return cls.from_coeffs([Poly._from_int(c) for c in A], main)

    # properties ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self, var: str) -> int:
        k = 0 if var == "x" else 1
        return max((m[k] for m in self.terms), default=-1)

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(o):
        if isinstance(o, BiPoly):
            return o
        if isinstance(o, (int, Fraction)):
            return BiPoly.const(o)
        if isinstance(o, Poly):
            return BiPoly.from_poly(o, "x")
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return BiPoly(t)

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return BiPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BiPoly({k: v * other for k, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                t[k] = t.get(k, 0) + a * b
        return BiPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> BiPoly:
        r = BiPoly.const(1)
        for _ in range(n):
            r = r * self
        return r

    # evaluation and calculus -------------------------------------------
    def __call__(self, x, z):
        zc = self.coeffs_in("z")
        v = 0
        for c in reversed(zc):
            v = v * z + c(x)
        return v

    def subs_x(self, x: Number) -> Poly:
        """Univariate polynomial in z obtained by fixing x."""
        return Poly(c(Fraction(x)) for c in self.coeffs_in("z"))

    def subs_z(self, z: Number) -> Poly:
        return Poly(c(Fraction(z)) for c in self.coeffs_in("x"))

    def diff(self, var: str) -> BiPoly:
        if var == "x":
            return BiPoly({(i - 1, j): i * v for (i, j), v in self.terms.items() if i})
        return BiPoly({(i, j - 1): j * v for (i, j), v in self.terms.items() if j})

    def swap(self) -> BiPoly:
        return BiPoly({(j, i): v for (i, j), v in self.terms.items()})

    def is_symmetric(self) -> bool:
        return self == self.swap()

    def coeffs_in(self, main: str = "z") -> list[Poly]:
        """Coefficients of powers of ``main``, each a Poly in the other variable."""
        k = 1 if main == "z" else 0
        n = self.degree(main)
        buckets: list[dict] = [{} for _ in range(n + 1)]
        for m, v in self.terms.items():
            buckets[m[k]][m[1 - k]] = v
        return [Poly(b.get(i, 0) for i in range(max(b, default=-1) + 1)) for b in buckets]

    def _to_zx(self, main: str = "z") -> list[list]:
        """Integer representation: list over powers of ``main`` of int coefficient lists."""
        if not self.terms:
            return []
        d = reduce(lcm, (v.denominator for v in self.terms.values()), 1)
        return [_trim([int(c * d) for c in p.coeffs]) for p in self.coeffs_in(main)]

    def exquo(self, other: BiPoly) -> BiPoly:
        """Exact division; raises AlgebraicError if ``other`` does not divide ``self``."""
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        a = self.coeffs_in("z")
        b = other.coeffs_in("z")
        db = len(b) - 1
        if len(a) - 1 < db:
            if self:
                raise AlgebraicError("inexact bivariate division")
            return BiPoly()
        q = [Poly()] * (len(a) - db)
        a = list(a)
        for i in range(len(a) - 1 - db, -1, -1):
            c = a[i + db]
            if c:
                qi = c.exquo(b[-1])
                q[i] = qi
                for j in range(db + 1):
                    a[i + j] = a[i + j] - qi * b[j]
        if any(a[:db]):
            raise AlgebraicError("inexact bivariate division")
        return BiPoly.from_coeffs(q, "z")

    def primitive(self) -> BiPoly:
        """Scaled to coprime integer coefficients with a positive leading term."""
        if not self.terms:
            return self
        d = reduce(lcm, (v.denominator for v in self.terms.values()), 1)
        ints = {k: int(v * d) for k, v in self.terms.items()}
        c = reduce(gcd, ints.values(), 0)
        lead = ints[max(ints, key=lambda m: (m[0] + m[1], m[0]))]
        s = c if lead > 0 else -c
        return BiPoly({k: Fraction(v, s) for k, v in ints.items()})

    def squarefree_part(self) -> BiPoly:
        if self.degree("z") <= 0:
            p = self.subs_z(0)
            return BiPoly.from_poly(p.squarefree_part(), "x").primitive() if p.degree > 0 else self.primitive()
        A = self._to_zx("z")
        cont = reduce(_igcd, A, [])
        ppart = [_divexact(c, cont) for c in A]
        pp = BiPoly._from_zx(ppart)
        g = bivariate_gcd(pp, pp.diff("z"))
        out = pp.exquo(g) if g.total_degree > 0 else pp
        c = Poly._from_int(cont)
        if c.degree > 0:
            out = out * BiPoly.from_poly(c.squarefree_part(), "x")
        return out.primitive()

    def __repr__(self) -> str:
        return f"BiPoly({self})"

    def __str__(self) -> str:
        return _format_terms(((v, i, j) for (i, j), v in self.terms.items()), ("x", "z"))


def _zx_prem(A: list[list], B: list[list]) -> list[list]:
    db = len(B) - 1
    e = len(A) - len(B) + 1
    if e <= 0:
        return [list(c) for c in A]
    lb = B[-1]
    r = [list(c) for c in A]
    while r and len(r) - 1 >= db:
        c = r[-1]
        s = len(r) - 1 - db
        r = [_mul(x, lb) for x in r]
        for j in range(db + 1):
            r[s + j] = _sub(r[s + j], _mul(c, B[j]))
        while r and not r[-1]:
            r.pop()
        e -= 1
    if e:
        f = _pow(lb, e)
        r = [_mul(x, f) for x in r]
    return r


def _zx_content(A: list[list]) -> list:
    c: list = []
    for a in A:
        if a:
            c = _igcd(c, a) if c else _normal(a)
            if len(c) == 1:
                return [1]
    return c


def _zx_pp(A: list[list]) -> list[list]:
    c = _zx_content(A)
    if c == [1] or not c:
        return A
    return [_divexact(a, c) for a in A]


def bivariate_gcd(F: BiPoly, H: BiPoly) -> BiPoly:
    """Greatest common divisor over Q (primitive, positive leading term)."""
    if not F:
        return H.primitive()
    if not H:
        return F.primitive()
    A, B = F._to_zx("z"), H._to_zx("z")
    c = _igcd(_zx_content(A), _zx_content(B))
    A, B = _zx_pp(A), _zx_pp(B)
    if len(A) < len(B):
        A, B = B, A
    while B and len(B) > 1:
        R = _zx_prem(A, B)
        A, B = B, (_zx_pp(R) if R else [])
    g = A if not B else [[1]]
    g = [_mul(x, c) for x in g]
    return BiPoly._from_zx(g).primitive()


def _zx_resultant(A: list[list], B: list[list]) -> list:
    """Resultant with respect to the main variable (subresultant PRS)."""
    if not A or not B:
        return []
    da, db = len(A) - 1, len(B) - 1
    if da == 0:
        return _pow(A[0], db)
    if db == 0:
        return _pow(B[0], da)
    ca, cb = _zx_content(A), _zx_content(B)
    A = [_divexact(a, ca) for a in A]
    B = [_divexact(b, cb) for b in B]
    t = _mul(_pow(ca, db), _pow(cb, da))
    s = 1
    if da < db:
        A, B = B, A
        da, db = db, da
        if da % 2 and db % 2:
            s = -s
    g: list = [1]
    h: list = [1]
    while True:
        d = da - db
        if da % 2 and db % 2:
            s = -s
        R = _zx_prem(A, B)
        if not R:
            return []
        A = B
        div = _mul(g, _pow(h, d))
        B = [_divexact(c, div) for c in R]
        g = A[-1]
        if d == 1:
            h = g
        elif d > 1:
            h = _divexact(_pow(g, d), _pow(h, d - 1))
        da, db = len(A) - 1, len(B) - 1
        if db == 0:
            break
    lb = B[0]
    if da == 1:
        hh = lb
    else:
        hh = _divexact(_pow(lb, da), _pow(h, da - 1))
    return _scale(_mul(t, hh), s)


def resultant(F: BiPoly, H: BiPoly, eliminate: str = "z") -> Poly:
    """Resultant of F and H with respect to ``eliminate``; a Poly in the other variable.

    The result is only determined up to a nonzero rational factor, since both
    inputs are first scaled to integer coefficients.
    """
    if not F or not H:
        raise AlgebraicError("resultant of the zero polynomial")
    if F.degree(eliminate) <= 0 and H.degree(eliminate) <= 0:
        raise AlgebraicError(f"neither polynomial involves {eliminate}")
    return Poly._from_int(_zx_resultant(F._to_zx(eliminate), H._to_zx(eliminate)))


# ---------------------------------------------------------------------------
# rational interval arithmetic and system isolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Iv:
    lo: Fraction
    hi: Fraction

    def __add__(self, o):
        if isinstance(o, _Iv):
            return _Iv(self.lo + o.lo, self.hi + o.hi)
        return _Iv(self.lo + o, self.hi + o)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, _Iv):
            return _Iv(self.lo - o.hi, self.hi - o.lo)
        return _Iv(self.lo - o, self.hi - o)

    def __mul__(self, o):
        if isinstance(o, _Iv):
            p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
            return _Iv(min(p), max(p))
        return _Iv(self.lo * o, self.hi * o) if o >= 0 else _Iv(self.hi * o, self.lo * o)

    __rmul__ = __mul__

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def strictly_inside(self, o: _Iv) -> bool:
        return o.lo < self.lo and self.hi < o.hi


def _iv_poly(p: Poly, X: _Iv) -> _Iv:
    v = _Iv(Fraction(0), Fraction(0))
    for c in reversed(p.coeffs):
        v = v * X + c
    return v


def _iv_bipoly(zc: list[Poly], X: _Iv, Z: _Iv) -> _Iv:
    v = _Iv(Fraction(0), Fraction(0))
    for c in reversed(zc):
        v = v * Z + _iv_poly(c, X)
    return v


def _short(v: float) -> Fraction:
    return Fraction(v).limit_denominator(2**40) if v == v and abs(v) < 1e300 else Fraction(0)


class _Pair:
    """F, H and their partial derivatives, pre-split by powers of z."""

    def __init__(self, F: BiPoly, H: BiPoly):
        self.F, self.H = F, H
        self.fc, self.hc = F.coeffs_in("z"), H.coeffs_in("z")
        self.jac = [
            [F.diff("x").coeffs_in("z"), F.diff("z").coeffs_in("z")],
            [H.diff("x").coeffs_in("z"), H.diff("z").coeffs_in("z")],
        ]

    def excludes(self, X: _Iv, Z: _Iv) -> bool:
        return not _iv_bipoly(self.fc, X, Z).contains_zero() or not _iv_bipoly(self.hc, X, Z).contains_zero()

    def krawczyk(self, X: _Iv, Z: _Iv) -> bool:
        """True when the Krawczyk operator maps the box strictly into itself."""
        mx, mz = (X.lo + X.hi) / 2, (Z.lo + Z.hi) / 2
        J = [[_iv_bipoly(c, X, Z) for c in row] for row in self.jac]
        Jm = [[float(_iv_bipoly(c, _Iv(mx, mx), _Iv(mz, mz)).lo) for c in row] for row in self.jac]
        det = Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0]
        if det == 0 or det != det:
            return False
        Y = [
            [_short(Jm[1][1] / det), _short(-Jm[0][1] / det)],
            [_short(-Jm[1][0] / det), _short(Jm[0][0] / det)],
        ]
        fm = [self.F(mx, mz), self.H(mx, mz)]
        d = [X - mx, Z - mz]
        out = []
        for i in range(2):
            centre = (mx, mz)[i] - (Y[i][0] * fm[0] + Y[i][1] * fm[1])
            acc = _Iv(centre, centre)
            for j in range(2):
                m_ij = _Iv(Fraction(int(i == j)), Fraction(int(i == j))) - (Y[i][0] * J[0][j] + Y[i][1] * J[1][j])
                acc = acc + m_ij * d[j]
            out.append(acc)
        return out[0].strictly_inside(X) and out[1].strictly_inside(Z)


@dataclass(frozen=True)
class IsolationBox:
    """Rational rectangle holding exactly one common root (when ``certified``)."""

    x_interval: RationalInterval
    z_interval: RationalInterval
    certified: bool = True

    @property
    def center(self) -> tuple[float, float]:
        return float(self.x_interval.mid), float(self.z_interval.mid)

    def to_json(self) -> dict:
        return {
            "x": [str(self.x_interval.lo), str(self.x_interval.hi)],
            "z": [str(self.z_interval.lo), str(self.z_interval.hi)],
            "certified": self.certified,
        }


@dataclass(frozen=True)
class SystemSolution:
    """Outcome of :func:`isolate_system`.

    When ``common_factor`` is set, F and H share a factor whose zero set is a
    curve crossing the domain; ``boxes`` then holds the isolated solutions of
    the cofactor system only.
    """

    boxes: tuple[IsolationBox, ...] = ()
    common_factor: BiPoly | None = None
    x_candidates: int = 0
    z_candidates: int = 0

    @property
    def is_curve(self) -> bool:
        return self.common_factor is not None

    @property
    def count(self) -> int:
        return len(self.boxes)

    @property
    def degenerate(self) -> bool:
        return any(not b.certified for b in self.boxes)


Endpoint = Union[Fraction, int, RealRoot, None]


def _outer(e: Endpoint, direction: int) -> Fraction | None:
    """Rational bound enclosing an endpoint from outside (direction +1 = upper)."""
    if e is None or not isinstance(e, RealRoot):
        return None if e is None else Fraction(e)
    return e.interval.hi if direction > 0 else e.interval.lo


def _inside(r: RealRoot, lo: Endpoint, hi: Endpoint) -> bool:
    if lo is not None and r.compare(lo) <= 0:
        return False
    if hi is not None and r.compare(hi) >= 0:
        return False
    return True


def _inner_rational(e: Endpoint, direction: int) -> Fraction | None:
    if e is None or not isinstance(e, RealRoot):
        return None if e is None else Fraction(e)
    r = e.refined_to(Fraction(1, 2**40))
    return r.interval.hi if direction > 0 else r.interval.lo


def _rational_between(a: RealRoot | Fraction, b: RealRoot | Fraction) -> Fraction:
    """A rational strictly between a < b."""
    def hi_of(v):
        return v.interval.hi if isinstance(v, RealRoot) else v

    def lo_of(v):
        return v.interval.lo if isinstance(v, RealRoot) else v

    for _ in range(400):
        if hi_of(a) < lo_of(b):
            return (hi_of(a) + lo_of(b)) / 2
        if isinstance(a, RealRoot):
            a = a.refine()
        if isinstance(b, RealRoot):
            b = b.refine()
    raise AlgebraicError("could not separate sample points")


def curve_meets(C: BiPoly, x_range: tuple[Endpoint, Endpoint], z_range: tuple[Endpoint, Endpoint]) -> bool:
    """Whether the real curve C = 0 passes through the open rectangle.

    Sampling happens between consecutive critical abscissae (discriminant,
    leading-coefficient and horizontal-edge crossings), where the number of
    fibre roots in the z-range is constant.  Isolated real points are ignored.
    """
    xlo, xhi = _inner_rational(x_range[0], -1), _inner_rational(x_range[1], 1)
    zlo, zhi = _inner_rational(z_range[0], -1), _inner_rational(z_range[1], 1)
    if C.degree("z") <= 0:
        p = C.subs_z(0)
        return p.degree > 0 and sturm_count(p, xlo, xhi) > 0
    crit_polys = [C.coeffs_in("z")[-1]]
    if C.degree("z") >= 1:
        cz = C.diff("z")
        if cz.degree("z") >= 0 and C.degree("z") >= 2:
            crit_polys.append(resultant(C, cz, "z"))
    for zv in (zlo, zhi):
        if zv is not None:
            crit_polys.append(C.subs_z(zv))
    crit: list[RealRoot] = []
    for p in crit_polys:
        if p.degree > 0:
            crit += real_roots(p, xlo, xhi)
    # merge equal critical values
    crit.sort(key=float)
    uniq: list[RealRoot] = []
    for r in crit:
        if not uniq or uniq[-1].compare(r) != 0:
            uniq.append(r)
    pts: list = [xlo if xlo is not None else None] + uniq + [xhi if xhi is not None else None]
    samples = []
    for a, b in zip(pts[:-1], pts[1:]):
        if a is None and b is None:
            samples.append(Fraction(0))
        elif a is None:
            samples.append((b.interval.lo if isinstance(b, RealRoot) else b) - 1)
        elif b is None:
            samples.append((a.interval.hi if isinstance(a, RealRoot) else a) + 1)
        else:
            samples.append(_rational_between(a, b))
    for x0 in samples:
        fib = C.subs_x(x0)
        if not fib:
            return True
        if fib.degree > 0 and sturm_count(fib, zlo, zhi) > 0:
            return True
    return False


def isolate_system(
    F: BiPoly,
    H: BiPoly,
    x_range: tuple[Endpoint, Endpoint],
    z_range: tuple[Endpoint, Endpoint],
    eps: Fraction = Fraction(1, 2**32),
    max_refine: int = 90,
) -> SystemSolution:
    """Isolate the common real roots of F and H in the open rectangle ``x_range`` x ``z_range``.

    Endpoints are rationals, :class:`RealRoot` algebraic numbers, or ``None``
    for an infinite side.  Each returned box contains exactly one solution;
    boxes flagged ``certified=False`` are singular candidates that neither the
    Krawczyk test nor exclusion could settle.
    """
    if not F or not H:
        C = (F if F else H).primitive()
        if not C:
            raise AlgebraicError("both polynomials are identically zero")
        if curve_meets(C, x_range, z_range):
            return SystemSolution(common_factor=C)
        return SystemSolution()
    common: BiPoly | None = None
    C = bivariate_gcd(F, H)
    if C.total_degree > 0:
        if curve_meets(C, x_range, z_range):
            common = C
        F, H = F.exquo(C), H.exquo(C)
        if F.total_degree <= 0 or H.total_degree <= 0:
            return SystemSolution(common_factor=common)
    if F.degree("z") > 0 or H.degree("z") > 0:
        rx = resultant(F, H, "z")
    else:
        rx = F.subs_z(0).gcd(H.subs_z(0))
    if F.degree("x") > 0 or H.degree("x") > 0:
        rz = resultant(F, H, "x")
    else:
        rz = F.subs_x(0).gcd(H.subs_x(0))
    if not rx or not rz:
        raise AlgebraicError("vanishing resultant after removing the common factor")
    xs = [] if rx.degree <= 0 else real_roots(rx, _outer(x_range[0], -1), _outer(x_range[1], 1))
    xs = [r for r in xs if _inside(r, *x_range)]
    zs = [] if rz.degree <= 0 else real_roots(rz, _outer(z_range[0], -1), _outer(z_range[1], 1))
    zs = [r for r in zs if _inside(r, *z_range)]
    pair = _Pair(F, H)
    boxes = []
    for xr in xs:
        for zr in zs:
            verdict, xr2, zr2 = _decide(pair, xr, zr, max_refine)
            if verdict is None:
                continue
            xr2, zr2 = xr2.refined_to(eps), zr2.refined_to(eps)
            boxes.append(IsolationBox(xr2.interval, zr2.interval, certified=verdict))
    boxes.sort(key=lambda b: (b.x_interval.lo, b.z_interval.lo))
    return SystemSolution(tuple(boxes), common, len(xs), len(zs))


def _decide(pair: _Pair, xr: RealRoot, zr: RealRoot, max_refine: int):
    """True: certified solution; False: unresolved singular candidate; None: excluded."""
    for _ in range(max_refine):
        X = _Iv(xr.interval.lo, xr.interval.hi)
        Z = _Iv(zr.interval.lo, zr.interval.hi)
        if xr.is_rational and zr.is_rational:
            ok = pair.F(X.lo, Z.lo) == 0 and pair.H(X.lo, Z.lo) == 0
            return (True if ok else None), xr, zr
        if pair.excludes(X, Z):
            return None, xr, zr
        if not xr.is_rational and not zr.is_rational and pair.krawczyk(X, Z):
            return True, xr, zr
        if xr.is_rational and not zr.is_rational:
            fib = pair.F.subs_x(X.lo).gcd(pair.H.subs_x(X.lo))
            if fib.degree <= 0:
                return None, xr, zr
            return (True if zr.poly.gcd(fib).degree > 0 and _shared(zr, fib) else None), xr, zr
        if zr.is_rational and not xr.is_rational:
            fib = pair.F.subs_z(Z.lo).gcd(pair.H.subs_z(Z.lo))
            if fib.degree <= 0:
                return None, xr, zr
            return (True if _shared(xr, fib) else None), xr, zr
        xr, zr = xr.refine(), zr.refine()
    return False, xr, zr


def _shared(r: RealRoot, p: Poly) -> bool:
    """Whether the algebraic number r is a root of p."""
    g = r.poly.gcd(p)
    if g.degree <= 0:
        return False
    iv = r.interval
    if iv.lo == iv.hi:
        return g(iv.lo) == 0
    return sturm_count(g, iv.lo, iv.hi) > 0

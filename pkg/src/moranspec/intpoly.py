"""Exact integer polynomial arithmetic and unit-circle root classification.

Polynomials are dense coefficient tuples over arbitrary-precision integers,
constant term first: ``IntPolynomial([1, -2, 0, 1])`` is 1 - 2x + x^3.
Everything in this module is exact; divisibility verdicts and circle-root
counts are never tolerance-dependent.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional


class IntPolynomial:
    """Immutable dense polynomial over the integers.

    The coefficient tuple never ends in a zero; the zero polynomial is the
    empty tuple and has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def x_pow(n: int, c: int = 1) -> "IntPolynomial":
        """The monomial c * x^n."""
        return IntPolynomial([0] * n + [c])

    @staticmethod
    def from_exponents(exponents: Iterable[int]) -> "IntPolynomial":
        """Sum of x^e over the given exponents (with multiplicity)."""
        exps = list(exponents)
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be nonnegative")
        cs = [0] * (max(exps) + 1 if exps else 0)
        for e in exps:
            cs[e] += 1
        return IntPolynomial(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPolynomial([other])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "IntPolynomial(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if i > 0 and abs(c) != 1:
                term = f"{abs(c)}*{term}"
            elif i == 0:
                term = str(abs(c))
            parts.append(("- " if c < 0 else "+ " if parts else "") + term)
        return f"IntPolynomial({' '.join(parts)})"

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial([-c for c in self.coeffs])

    def __add__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return IntPolynomial(a)

    __radd__ = __add__

    def __sub__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial([other])
        return self + (-other)

    def __rsub__(self, other) -> "IntPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def evaluate(self, x):
        """Horner evaluation; works for int, Fraction, float and complex x."""
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def reversed(self) -> "IntPolynomial":
        """Coefficient-reversed polynomial x^deg * f(1/x)."""
        return IntPolynomial(self.coeffs[::-1])

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Divide out the content and normalize the leading coefficient to > 0."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lead < 0:
            g = -g
        return IntPolynomial([c // g for c in self.coeffs])


def divide_exact(f: IntPolynomial, g: IntPolynomial) -> Optional[IntPolynomial]:
    """Exact quotient f / g over the integers, or None when it does not exist.

    None covers both a nonzero remainder and non-integer quotient
    coefficients.  Dividing by the zero polynomial raises.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return IntPolynomial()
    if f.degree < g.degree:
        return None
    rem = list(f.coeffs)
    quo = [0] * (f.degree - g.degree + 1)
    gl = g.lead
    gc = g.coeffs
    for i in range(f.degree - g.degree, -1, -1):
        c = rem[i + g.degree]
        if c % gl:
            return None
        t = c // gl
        quo[i] = t
        if t:
            for j, gj in enumerate(gc):
                rem[i + j] -= t * gj
    if any(rem):
        return None
    return IntPolynomial(quo)


def _pseudo_rem(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    # Remainder of lc(g)^s * f by g over the integers (s = number of steps).
    dg = g.degree
    gl = g.lead
    gc = g.coeffs
    r = list(f.coeffs)
    while True:
        while r and r[-1] == 0:
            r.pop()
        dr = len(r) - 1
        if dr < dg:
            break
        top = r[-1]
        r = [c * gl for c in r]
        shift = dr - dg
        for j, gj in enumerate(gc):
            r[shift + j] -= top * gj
    return IntPolynomial(r)


def gcd_int_poly(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over Z[x] (positive leading coefficient).

    Uses the primitive pseudo-remainder sequence, so coefficients stay
    controlled without ever leaving exact integer arithmetic.
    """
    a, b = f.primitive(), g.primitive()
    if a.is_zero():
        return b
    while not b.is_zero():
        a, b = b, _pseudo_rem(a, b).primitive()
    return a


@functools.lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    result, m = n, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


@functools.lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial, monic of degree euler_phi(n).

    Computed by exact division of x^n - 1 by the cyclotomic polynomials of
    the proper divisors of n.
    """
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    poly = IntPolynomial([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            q = divide_exact(poly, cyclotomic(d))
            assert q is not None
            poly = q
    return poly


def _phi_bounded_candidates(limit: int, max_phi: int):
    # All n <= limit with euler_phi(n) <= max_phi.  Sieve for large limits.
    if limit <= 5000:
        return [n for n in range(1, limit + 1) if euler_phi(n) <= max_phi]
    import numpy as np

    phi = np.arange(limit + 1, dtype=np.int64)
    for i in range(2, limit + 1):
        if phi[i] == i:
            phi[i::i] -= phi[i::i] // i
    return [int(n) for n in np.nonzero(phi[1:] <= max_phi)[0] + 1]


def cyclotomic_factors(f: IntPolynomial) -> set:
    """All n such that the n-th cyclotomic polynomial divides f over Z[x].

    Any cyclotomic factor of f also divides gcd(f, reversed(f)) -- roots of
    unity are closed under inversion -- so the candidate enumeration
    (n <= max(6, 2*d^2) filtered by euler_phi(n) <= d) runs against that
    usually much smaller gcd.
    """
    if f.is_zero():
        raise ValueError("zero polynomial has every factor")
    if f.degree < 1:
        return set()
    g = gcd_int_poly(f, f.reversed())
    d = g.degree
    if d < 1:
        return set()
    limit = max(6, 2 * d * d)
    orders = set()
    for n in _phi_bounded_candidates(limit, d):
        if divide_exact(g, cyclotomic(n)) is not None:
            orders.add(n)
    return orders


@dataclass(frozen=True)
class UnitCircleRootProfile:
    """Classification of a polynomial's roots on the complex unit circle.

    root_of_unity_orders holds every n with the n-th cyclotomic polynomial
    dividing the input; residual_degree is the degree of the square-free
    non-cyclotomic factor whose roots lie on the circle (always even, one
    conjugate pair per two).
    """

    root_of_unity_orders: frozenset
    has_irrational_unimodular: bool
    residual_degree: int


def _squarefree(f: IntPolynomial) -> IntPolynomial:
    # Distinct-root part f / gcd(f, f'); exact over Z by Gauss's lemma since
    # both sides are primitive.
    fp = f.primitive()
    g = gcd_int_poly(fp, fp.derivative())
    if g.degree < 1:
        return fp
    q = divide_exact(fp, g)
    assert q is not None
    return q.primitive()


def _reciprocal_to_chebyshev(p: IntPolynomial) -> IntPolynomial:
    # For palindromic p of even degree 2m: p(x) = x^m * q(x + 1/x); return q.
    cs = p.coeffs
    if cs != cs[::-1] or p.degree % 2:
        raise ValueError("expected a coefficient-palindromic even-degree polynomial")
    m = p.degree // 2
    q = IntPolynomial([cs[m]])
    d_prev = IntPolynomial([2])          # x^0 + x^-0
    d_cur = IntPolynomial([0, 1])        # x^1 + x^-1 = t
    t = IntPolynomial([0, 1])
    for j in range(1, m + 1):
        q = q + d_cur * cs[m + j]
        d_prev, d_cur = d_cur, t * d_cur - d_prev
    return q


def _sign_variations(values) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a < 0) != (b < 0))


def sturm_count_open(q: IntPolynomial, a: Fraction, b: Fraction) -> int:
    """Distinct real roots of square-free q in the open interval (a, b).

    Neither endpoint may be a root.
    """
    if q.degree < 1:
        return 0
    chain = [[Fraction(c) for c in q.coeffs],
             [Fraction(c) for c in q.derivative().coeffs]]

    def ev(cs, x):
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    if ev(chain[0], a) == 0 or ev(chain[0], b) == 0:
        raise ValueError("interval endpoint is a root")

    def frac_rem(u, v):
        u = list(u)
        dv = len(v) - 1
        while len(u) - 1 >= dv:
            t = u[-1] / v[-1]
            shift = len(u) - len(v)
            for j, vj in enumerate(v):
                u[shift + j] -= t * vj
            while u and u[-1] == 0:
                u.pop()
            if not u:
                break
        return u

    while chain[-1]:
        r = frac_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])

    va = _sign_variations([ev(cs, a) for cs in chain])
    vb = _sign_variations([ev(cs, b) for cs in chain])
    return va - vb


def poly_positive_on_integers_from(p: IntPolynomial, start: int) -> bool:
    """Exact decision of p(j) > 0 for every integer j >= start.

    Beyond the Cauchy root bound the sign is the leading coefficient's; the
    finitely many integers before that are evaluated directly.
    """
    if p.is_zero():
        return False
    if p.degree == 0:
        return p.coeffs[0] > 0
    if p.degree == 1:
        return p.lead > 0 and p.evaluate(start) > 0
    if p.lead < 0:
        return False
    bound = 1 + max(abs(c) for c in p.coeffs) // abs(p.lead)
    return all(p.evaluate(j) > 0 for j in range(start, max(start, bound) + 2))


def unit_circle_profile(f: IntPolynomial) -> UnitCircleRootProfile:
    """Classify the unit-circle roots of f exactly.

    Cyclotomic factors are extracted by divisibility; whatever remains of
    gcd(f, reversed(f)) after stripping them is palindromic, and its circle
    roots are counted through the substitution t = x + 1/x followed by a
    Sturm count of the transformed polynomial on (-2, 2).
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    orders = cyclotomic_factors(f)
    res = gcd_int_poly(f, f.reversed())
    for n in sorted(orders):
        phi_n = cyclotomic(n)
        while True:
            q = divide_exact(res, phi_n)
            if q is None:
                break
            res = q
    count = 0
    if res.degree >= 2:
        sf = _squarefree(res)
        if sf.degree >= 2:
            cheb = _reciprocal_to_chebyshev(sf)
            count = sturm_count_open(cheb, Fraction(-2), Fraction(2))
    residual_degree = 2 * count
    return UnitCircleRootProfile(
        root_of_unity_orders=frozenset(orders),
        has_irrational_unimodular=residual_degree > 0,
        residual_degree=residual_degree,
    )

"""Independent oracles for the test suite.

Everything here is deliberately written without the package's own polynomial
or mask machinery, so expected values come from a second route: rational
long division, direct complex summation, brute-force root finding.
"""

from fractions import Fraction

import numpy as np


def poly_divmod_frac(num, den):
    """Long division over Q on coefficient lists (constant term first)."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError
    quo = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    rem = list(num)
    for i in range(len(num) - len(den), -1, -1):
        c = rem[i + len(den) - 1] / den[-1]
        quo[i] = c
        if c:
            for j, d in enumerate(den):
                rem[i + j] -= c * d
    while rem and rem[-1] == 0:
        rem.pop()
    return quo, rem


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def mask_sum(digits, theta) -> complex:
    """Direct complex summation of sum_b exp(-2*pi*i*b*theta)."""
    return complex(sum(np.exp(-2j * np.pi * float(b) * float(theta)) for b in digits))


def random_crs(rng, max_modulus=8, digit_bound=40):
    """A random complete residue system: one digit per residue class."""
    M = rng.randrange(2, max_modulus + 1)
    digits = []
    for r in range(M):
        lift_cap = (digit_bound - r) // M
        digits.append(r + M * rng.randrange(0, lift_cap + 1))
    return sorted(digits), M


def distinct_unimodular_count(coeffs, root_tol=1e-8, cluster_tol=1e-6) -> int:
    """Distinct roots on the unit circle of an integer polynomial, numerically."""
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) <= 1:
        return 0
    roots = np.roots(cs[::-1])
    uni = [r for r in roots if abs(abs(r) - 1) < root_tol]
    out = []
    for r in uni:
        if all(abs(r - s) > cluster_tol for s in out):
            out.append(r)
    return len(out)

"""Digit-set analysis: residue systems, character polynomials, mask zeros.

A digit set B with claimed modulus M drives everything downstream: whether B
hits every residue class mod M, the exact quotient polynomial f_B, the zero
set of the mask (1/#B) * sum_b exp(-2*pi*i*b*xi) on the circle, and the
uniform discrete zero property that the verdict engine hinges on.  All
decisions here are made in exact integer/rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple

from .intpoly import (
    IntPolynomial,
    cyclotomic,
    divide_exact,
    unit_circle_profile,
)


class NotCRS(ValueError):
    """Raised when an operation requires a complete residue system."""


class InternalDivisionFailure(RuntimeError):
    """Exact division failed where theory guarantees it cannot (a bug)."""


@dataclass(frozen=True)
class DigitSet:
    """Finite integer digit set with a claimed modulus.

    Elements are stored sorted and strictly increasing; the modulus is the
    claimed residue-system size (normally equal to the number of digits).
    """

    elements: Tuple[int, ...]
    modulus: int

    @staticmethod
    def of(digits: Iterable[int], modulus: Optional[int] = None) -> "DigitSet":
        elems = tuple(sorted(digits))
        if len(set(elems)) != len(elems):
            raise ValueError(f"digits must be pairwise distinct: {elems}")
        if not elems:
            raise ValueError("digit set must be nonempty")
        m = len(elems) if modulus is None else modulus
        if m < 1:
            raise ValueError("modulus must be positive")
        return DigitSet(elems, m)

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def b_star(self) -> int:
        """Smallest digit."""
        return self.elements[0]

    def translated(self, c: int) -> "DigitSet":
        return DigitSet(tuple(b + c for b in self.elements), self.modulus)

    def scaled_down(self, g: int) -> "DigitSet":
        if any(b % g for b in self.elements):
            raise ValueError(f"{g} does not divide every digit")
        return DigitSet(tuple(b // g for b in self.elements), self.modulus)


def is_complete_residue_system(B: DigitSet) -> bool:
    """True iff #B = M and the digits hit every residue class mod M once."""
    if B.size != B.modulus:
        return False
    return sorted(b % B.modulus for b in B.elements) == list(range(B.modulus))


def digit_polynomial(B: DigitSet) -> IntPolynomial:
    """sum_b x^(b - min(B)), the normalized generating polynomial of B."""
    b0 = B.b_star
    return IntPolynomial.from_exponents(b - b0 for b in B.elements)


def _require_crs(B: DigitSet) -> None:
    if not is_complete_residue_system(B):
        raise NotCRS(
            f"digits {list(B.elements)} are not a complete residue system "
            f"modulo {B.modulus}"
        )


def character_polynomial(B: DigitSet) -> IntPolynomial:
    """Exact quotient of the digit polynomial by 1 + x + ... + x^(#B-1).

    Only complete residue systems are accepted; for those the quotient is
    guaranteed to have integer coefficients and to evaluate to 1 at x = 1.
    """
    _require_crs(B)
    denom = IntPolynomial([1] * B.size)
    f = divide_exact(digit_polynomial(B), denom)
    if f is None:
        raise InternalDivisionFailure(
            f"digit polynomial of {list(B.elements)} not divisible by the "
            f"length-{B.size} geometric sum; this cannot happen for a "
            "complete residue system"
        )
    return f


@dataclass(frozen=True)
class MaskZeroSet:
    """Zero set of the mask on [0, 1), split into rational angles and an
    irrational-remainder flag.

    Each stored fraction j/n is reduced with 0 <= j < n and stands for the
    whole coset j/n + Z.  The set is closed under theta -> 1 - theta because
    integer digit sets have conjugate-symmetric masks.
    """

    rational_angles: frozenset
    has_irrational_angles: bool


def _reduced_angles(order: int):
    return (Fraction(j, order) for j in range(1, order) if math.gcd(j, order) == 1)


def mask_zero_set(B: DigitSet) -> MaskZeroSet:
    """Exact zero set of the mask of B intersected with [0, 1).

    The mask vanishes at theta iff either the geometric-sum factor vanishes
    (angles j/M, 0 < j < M) or the character polynomial does (angles read off
    its unit-circle profile).
    """
    _require_crs(B)
    M = B.modulus
    angles = {Fraction(j, M) for j in range(1, M)}
    profile = unit_circle_profile(character_polynomial(B))
    for n in profile.root_of_unity_orders:
        angles.update(_reduced_angles(n))
    return MaskZeroSet(frozenset(angles), profile.has_irrational_unimodular)


def satisfies_udz(B: DigitSet) -> Tuple[bool, Optional[Fraction]]:
    """Decide the uniform discrete zero condition for B, exactly.

    Holds iff every circle zero of the character polynomial is a fraction
    j/M with M not dividing j; equivalently no irrational unimodular zeros
    and every root-of-unity order divides M.  On failure the witness is the
    violating angle with the smallest denominator, then smallest numerator
    (None when the only violation is irrational).
    """
    _require_crs(B)
    M = B.modulus
    profile = unit_circle_profile(character_polynomial(B))
    violations = []
    for n in profile.root_of_unity_orders:
        if n == 1 or M % n != 0:
            violations.extend(_reduced_angles(n) if n > 1 else [Fraction(0)])
    if violations:
        witness = min(violations, key=lambda q: (q.denominator, q.numerator))
        return False, witness
    if profile.has_irrational_unimodular:
        return False, None
    return True, None


def mask_is_zero_at(B: DigitSet, q) -> bool:
    """Exact test of whether the mask of B vanishes at the rational q.

    Reduces the digits modulo the denominator n (the mask only sees b mod n)
    and asks whether the n-th cyclotomic polynomial divides the residue-count
    polynomial; conjugate primitive roots share a minimal polynomial, so the
    verdict does not depend on the numerator.  Integers give False.
    """
    q = Fraction(q)
    n = q.denominator
    if n == 1:
        return False
    counts = [0] * n
    for b in B.elements:
        counts[b % n] += 1
    reduced = IntPolynomial(counts)
    return divide_exact(reduced, cyclotomic(n)) is not None

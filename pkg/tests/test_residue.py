import random
from fractions import Fraction

import numpy as np
import pytest

from moranspec.intpoly import IntPolynomial
from moranspec.residue import (
    DigitSet,
    NotCRS,
    character_polynomial,
    digit_polynomial,
    is_complete_residue_system,
    mask_is_zero_at,
    mask_zero_set,
    satisfies_udz,
)
from moranspec.intpoly import unit_circle_profile

from oracles import mask_sum, poly_divmod_frac, random_crs

F = Fraction


def D(digits, modulus=None):
    return DigitSet.of(digits, modulus)


# ---- complete residue systems ----------------------------------------------

@pytest.mark.parametrize(
    "digits,modulus,expected",
    [
        ([0, 2, 4], 3, True),
        ([0, 1, 2], 3, True),
        ([0, 2], 2, False),          # both residues even
        ([0, 2, 3, 4, 5, 7], 6, True),
        ([0, 3], 2, True),
        ([-1, 0, 1], 3, True),
        ([0, 1, 2, 3], 3, False),    # size mismatch
    ],
)
def test_is_complete_residue_system(digits, modulus, expected):
    assert is_complete_residue_system(D(digits, modulus)) is expected


# ---- character polynomial ---------------------------------------------------

def test_character_polynomial_even_triple():
    assert character_polynomial(D([0, 2, 4], 3)) == IntPolynomial([1, -1, 1])


def test_character_polynomial_gapped_six():
    assert character_polynomial(D([0, 2, 3, 4, 5, 7], 6)) == IntPolynomial([1, -1, 1])


@pytest.mark.parametrize("M", [2, 3, 5, 8])
def test_character_polynomial_consecutive_is_one(M):
    assert character_polynomial(D(range(M))) == IntPolynomial([1])


def test_character_polynomial_large_lift_against_oracle():
    # {0, 1, 14} mod 3: quotient of (1 + x + x^14) by (1 + x + x^2)
    B = D([0, 1, 14], 3)
    quo, rem = poly_divmod_frac([1, 1] + [0] * 12 + [1], [1, 1, 1])
    assert rem == []
    expected = IntPolynomial([int(c) for c in quo])
    f = character_polynomial(B)
    assert f == expected
    assert f.evaluate(1) == 1


def test_character_polynomial_requires_crs():
    with pytest.raises(NotCRS):
        character_polynomial(D([0, 2], 2))


def test_character_polynomial_integer_and_one_at_one_randomized():
    rng = random.Random(11)
    for _ in range(40):
        digits, M = random_crs(rng)
        f = character_polynomial(D(digits, M))
        assert all(isinstance(c, int) for c in f.coeffs)
        assert f.evaluate(1) == 1


# ---- mask zero sets ----------------------------------------------------------

def test_mask_zero_set_consecutive():
    z = mask_zero_set(D([0, 1, 2, 3], 4))
    assert z.rational_angles == {F(1, 4), F(1, 2), F(3, 4)}
    assert not z.has_irrational_angles


def test_mask_zero_set_even_triple():
    z = mask_zero_set(D([0, 2, 4], 3))
    assert z.rational_angles == {F(1, 3), F(2, 3), F(1, 6), F(5, 6)}
    assert not z.has_irrational_angles


def test_mask_zero_set_gapped_six():
    z = mask_zero_set(D([0, 2, 3, 4, 5, 7], 6))
    assert z.rational_angles == {F(j, 6) for j in range(1, 6)}
    assert not z.has_irrational_angles


def test_mask_zero_set_symmetry():
    rng = random.Random(5)
    for _ in range(20):
        digits, M = random_crs(rng)
        z = mask_zero_set(D(digits, M))
        assert {(1 - a) % 1 for a in z.rational_angles} == set(z.rational_angles)


def test_consecutive_zero_set_is_exactly_j_over_M():
    for M in (2, 3, 4, 6, 9):
        z = mask_zero_set(D(range(M)))
        assert z.rational_angles == {F(j, M) for j in range(1, M)}


# ---- uniform discrete zero condition ----------------------------------------

def test_udz_even_triple_fails_with_witness():
    assert satisfies_udz(D([0, 2, 4], 3)) == (False, F(1, 6))


def test_udz_gapped_six_holds():
    assert satisfies_udz(D([0, 2, 3, 4, 5, 7], 6)) == (True, None)


def test_udz_binary_holds():
    assert satisfies_udz(D([0, 1], 2)) == (True, None)


def test_udz_translation_invariant():
    rng = random.Random(17)
    for _ in range(25):
        digits, M = random_crs(rng)
        B = D(digits, M)
        c = rng.randint(-7, 7)
        assert satisfies_udz(B) == satisfies_udz(B.translated(c))


def test_equal_character_polynomials_same_profile_different_verdicts():
    # same quotient polynomial, UDZ verdicts split by the claimed modulus
    B1, B2 = D([0, 2, 4], 3), D([0, 2, 3, 4, 5, 7], 6)
    f1, f2 = character_polynomial(B1), character_polynomial(B2)
    assert f1 == f2
    assert unit_circle_profile(f1) == unit_circle_profile(f2)
    assert satisfies_udz(B1)[0] is False
    assert satisfies_udz(B2)[0] is True


# ---- pointwise mask vanishing -------------------------------------------------

def test_mask_zero_binary_spread():
    assert mask_is_zero_at(D([0, 2]), F(1, 4)) is True


def test_mask_zero_even_triple_sixth():
    assert mask_is_zero_at(D([0, 2, 4], 3), F(1, 6)) is True


def test_mask_nonzero_consecutive_third():
    # |1 + w + w^2 + w^3| > 0 for w = exp(-2 pi i / 3)
    assert abs(mask_sum([0, 1, 2, 3], F(1, 3))) > 1e-9
    assert mask_is_zero_at(D([0, 1, 2, 3], 4), F(1, 3)) is False


def test_mask_integer_arguments_never_zero():
    assert mask_is_zero_at(D([0, 5, 7]), 3) is False
    assert mask_is_zero_at(D([0, 5, 7]), F(0)) is False


def test_mask_zero_matches_float_oracle_on_grid():
    rng = random.Random(99)
    for _ in range(30):
        digits, M = random_crs(rng, max_modulus=10, digit_bound=50)
        B = D(digits, M)
        for n in range(1, 61):
            thetas = np.arange(1, n) / n
            sums = np.abs(np.exp(-2j * np.pi * np.outer(thetas, digits)).sum(axis=1))
            for j, s in zip(range(1, n), sums):
                assert mask_is_zero_at(B, F(j, n)) == bool(s < 1e-9), (digits, j, n)


def test_mask_zero_negative_angle_symmetric():
    B = D([0, 2, 4], 3)
    assert mask_is_zero_at(B, F(-1, 6)) == mask_is_zero_at(B, F(1, 6))

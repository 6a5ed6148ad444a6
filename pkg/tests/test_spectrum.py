import random
import warnings
from fractions import Fraction

import pytest

from moranspec.fourier import TruncationPlan, golden_ratio_samples, orthogonality_check, q_partial
from moranspec.moran import (
    HadamardTriple,
    MoranSequence,
    PeriodicTail,
    find_hadamard_L,
    materialize,
    periodic,
    shift,
)
from moranspec.residue import DigitSet
from moranspec.spectrum import (
    ChoiceOutOfClass,
    CollisionError,
    EmptyResult,
    SpectrumTruncation,
    canonical_spectrum,
    decompose_lambda,
    gamma0,
    inhabited_classes,
    level_triples,
    pq_profile,
    project_P,
)

from oracles import mask_sum

F = Fraction
D = DigitSet.of

QUARTER = periodic([(4, [0, 2])])


def quarter_triples(depth):
    return level_triples(QUARTER, depth)


# ---- canonical spectra ---------------------------------------------------------

def test_canonical_quarter_depth2():
    lam = canonical_spectrum(quarter_triples(2), 2)
    assert lam.elements == (F(0), F(1), F(4), F(5))
    assert lam.generator == "canonical"


def test_canonical_depth1_singleton():
    t = HadamardTriple(4, D([0, 2]), (0, 1))
    lam = canonical_spectrum([HadamardTriple(4, D([0, 2]), (0,))], 1)
    assert lam.elements == (F(0),)
    assert t.verify()


def test_canonical_eight_scale_sixteen_elements():
    # (8, {0,1,2,3}) with frequencies {0,2,4,6}: all sums l1 + 8*l2
    tr = level_triples(periodic([(8, [0, 1, 2, 3])]), 2)
    assert tr[0].L == (0, 2, 4, 6)
    lam = canonical_spectrum(tr, 2)
    assert lam.size == 16
    assert lam.elements == tuple(sorted(F(a + 8 * b) for a in (0, 2, 4, 6) for b in (0, 2, 4, 6)))
    rep = orthogonality_check(periodic([(8, [0, 1, 2, 3])]), TruncationPlan(8), lam.elements)
    assert rep.certified_pairs == rep.total_pairs


def test_canonical_collision_detected():
    bad = [
        HadamardTriple(4, D([0, 2]), (0, 1)),
        HadamardTriple(4, D([0, 2]), (0, 1)),
    ]
    # forge a colliding frequency set: 4*0 + 4 == 0 + 4*1 requires L = {0, 4}
    forged = [HadamardTriple(4, D([0, 2]), (0, 4)), HadamardTriple(4, D([0, 2]), (0, 1))]
    with pytest.raises(CollisionError):
        canonical_spectrum(forged, 2)
    assert canonical_spectrum(bad, 2).size == 4


def test_canonical_elements_pairwise_certified():
    lam = canonical_spectrum(quarter_triples(3), 3)
    rep = orthogonality_check(QUARTER, TruncationPlan(6), lam.elements)
    assert rep.certified_pairs == rep.total_pairs == 28


def test_spectrum_elements_always_rational():
    lam = canonical_spectrum(quarter_triples(3), 3)
    assert all(isinstance(e, F) for e in lam.elements)
    dec = decompose_lambda(lam, 4, 2, list(inhabited_classes(lam, 4, 2)))
    assert all(isinstance(e, F) for e in dec.elements)


# ---- gamma0 ----------------------------------------------------------------------

@pytest.mark.parametrize(
    "N1,M1,expected",
    [
        (4, 2, (F(0), F(2))),
        (4, 4, (F(0), F(1), F(2), F(3))),
        (6, 3, (F(0), F(2), F(4))),
    ],
)
def test_gamma0_formula(N1, M1, expected):
    assert gamma0(N1, M1) == expected


def test_gamma0_gram_identity_for_residue_systems():
    # when the digits form a residue system and M | N, the squared masks over
    # gamma0 sum to 1 at any point
    rng = random.Random(21)
    for N, digits in ((4, [0, 1, 2, 3]), (6, [0, 1, 2]), (4, [0, 1]), (6, [0, 2, 4])):
        g0 = gamma0(N, len(digits))
        for _ in range(100):
            xi = rng.uniform(-20, 20)
            total = sum(
                abs(mask_sum(digits, (xi + float(g)) / N) / len(digits)) ** 2
                for g in g0
            )
            assert abs(total - 1) < 1e-10


def test_gamma0_rejects_bad_params():
    with pytest.raises(ValueError):
        gamma0(2, 4)


# ---- projections ------------------------------------------------------------------

def test_project_quarter_fixtures():
    lam = canonical_spectrum(quarter_triples(2), 2)
    assert project_P(lam, F(1), 4) == (0, 1)     # 1 + 4*0, 1 + 4*1
    assert project_P(lam, F(0), 4) == (0, 1)     # 0 and 4
    assert project_P(lam, F(3), 4) == ()


def test_inhabited_classes_ordering():
    lam = canonical_spectrum(quarter_triples(2), 2)
    assert inhabited_classes(lam, 4, 2) == (F(0), F(1))


# ---- decomposition -------------------------------------------------------------------

def test_decompose_quarter_choices():
    lam = canonical_spectrum(quarter_triples(2), 2)
    dec0 = decompose_lambda(lam, 4, 2, [F(0), F(1)])
    assert dec0.elements == (F(0), F(1, 4), F(1), F(5, 4))
    assert dec0.generator == "decomposed"
    # the other member of the 0-class projects to nothing on this truncation,
    # so only the 1-class contributes
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dec1 = decompose_lambda(lam, 4, 2, [F(2), F(1)])
    assert dec1.elements == (F(1, 4), F(5, 4))


def test_decompose_rejects_out_of_class_choice():
    lam = canonical_spectrum(quarter_triples(2), 2)
    with pytest.raises(ChoiceOutOfClass):
        decompose_lambda(lam, 4, 2, [F(0), F(1, 2)])
    with pytest.raises(ChoiceOutOfClass):
        decompose_lambda(lam, 4, 2, [F(0)])


def test_decompose_warns_on_empty_projection():
    lam = SpectrumTruncation((F(0), F(1), F(4)), 1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dec = decompose_lambda(lam, 4, 2, [F(0), F(3)])
    assert any("empty" in str(w.message) for w in caught)
    assert dec.elements == (F(0), F(1))      # only the 0-class contributed


def test_decompose_all_empty_is_error():
    lam = SpectrumTruncation((F(1, 3),), 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(EmptyResult):
            decompose_lambda(lam, 4, 2, [F(1, 3) + F(2)])


def test_decompose_empty_lambda_is_error():
    empty = SpectrumTruncation((), 1)
    with pytest.raises(EmptyResult):
        decompose_lambda(empty, 4, 2, [])


def test_decompose_zero_choice_matches_shifted_canonical():
    # consecutive admissible sequence: decomposing the canonical spectrum at
    # the all-zero choice reproduces the canonical spectrum of the shifted
    # sequence, truncated one level shallower
    seq = periodic([(6, [0, 1, 2]), (8, [0, 1, 2, 3])])
    depth = 4
    lam = canonical_spectrum(level_triples(seq, depth), depth)
    classes = inhabited_classes(lam, 6, 3)
    assert classes == (F(0),)
    dec = decompose_lambda(lam, 6, 3, [F(0)])
    tail = shift(seq, 1)
    lam_tail = canonical_spectrum(level_triples(tail, depth - 1), depth - 1)
    assert set(dec.elements) == set(lam_tail.elements)


# ---- p/q diagnostics ---------------------------------------------------------------

def test_pq_empty_projection_gives_zero_q():
    lam = canonical_spectrum(quarter_triples(2), 2)
    p, q = pq_profile(QUARTER, TruncationPlan(6), lam, F(3), 0.3)
    assert q == 0.0
    assert 0 <= p <= 1


def test_pq_at_zero():
    lam = canonical_spectrum(quarter_triples(2), 2)
    p, q = pq_profile(QUARTER, TruncationPlan(8), lam, F(0), 0.0)
    assert p == pytest.approx(1.0, abs=1e-15)
    assert 0 < q <= 2 + 1e-9


def test_pq_regrouping_identity():
    # summing p*q over the residue angles realized in the truncation regroups
    # exactly into the Q value at the same point and product depth
    lam = canonical_spectrum(quarter_triples(3), 3)
    plan = TruncationPlan(10)
    for xi in golden_ratio_samples(8, 1.0):
        realized = sorted(
            {F(l) % 4 for l in lam.elements},
            key=lambda g: (g.denominator, g.numerator),
        )
        total = 0.0
        for gam in realized:
            p, q = pq_profile(QUARTER, plan, lam, gam, xi)
            total += p * q
        qv = q_partial(QUARTER, plan, lam.elements, [xi]).q_values[0]
        assert total == pytest.approx(qv, abs=1e-9)

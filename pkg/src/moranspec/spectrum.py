"""Candidate spectra and the spectrum-decomposition apparatus.

Canonical spectra are digit expansions in frequency space: pick one entry of
a frequency set per level and weight it by the partial scale product.  The
decomposition side splits a spectrum by residue class modulo the first
scale, projects each class to an integer set, and reassembles candidate
spectra for the tail measure; its p/q diagnostics exhibit the finite
regrouping identity behind the Q-function.

Every element produced here is an exact rational (spectra of these measures
live in Q); floats only appear in the p/q mask evaluations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .fourier import TruncationPlan, mask_eval, mu_hat_truncated
from .moran import (
    HadamardTriple,
    MoranSequence,
    find_hadamard_L,
    materialize,
    shift,
    structural_hadamard_L,
)
from .residue import is_complete_residue_system


class CollisionError(ValueError):
    """Two digit vectors mapped to the same spectrum element."""


class ChoiceOutOfClass(ValueError):
    """A decomposition choice is not a member of its residue class."""


class EmptyResult(ValueError):
    """Every chosen class projected to the empty set."""


@dataclass(frozen=True)
class SpectrumTruncation:
    """Finite sorted rational approximation of a spectrum at some depth."""

    elements: Tuple[Fraction, ...]
    depth: int
    generator: str = "user"     # "canonical" | "decomposed" | "user"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(Fraction(e) for e in self.elements)))
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("spectrum elements must be pairwise distinct")

    @property
    def size(self) -> int:
        return len(self.elements)


def canonical_spectrum(triples: Sequence[HadamardTriple], depth: int) -> SpectrumTruncation:
    """All sums of frequency digits weighted by partial scale products.

    Element = sum over j <= depth of (N_1 ... N_{j-1}) * l_j with l_j drawn
    from the j-th frequency set (empty product 1).  Distinct digit vectors
    must give distinct values; a collision means the triple list is invalid.
    """
    if depth < 1 or depth > len(triples):
        raise ValueError(f"depth {depth} outside 1..{len(triples)}")
    values = [Fraction(0)]
    weight = Fraction(1)
    expected = 1
    for j in range(depth):
        t = triples[j]
        values = [v + weight * l for v in values for l in t.L]
        expected *= len(t.L)
        weight *= t.N
    if len(set(values)) != expected:
        raise CollisionError(
            f"{expected - len(set(values))} colliding element(s): the frequency "
            "sets do not expand uniquely"
        )
    return SpectrumTruncation(tuple(values), depth, "canonical")


def level_triples(seq: MoranSequence, depth: int,
                  search_cap: int = 512) -> Optional[List[HadamardTriple]]:
    """Hadamard triples for the first levels, or None when a level has none.

    A complete residue system whose size divides the scale gets the
    structural frequency set (N/M) * {0..M-1} without a search; everything
    else goes through the clique search (capped by scale).
    """
    out: List[HadamardTriple] = []
    for k in range(1, depth + 1):
        N, B = materialize(seq, k)
        if is_complete_residue_system(B) and N % B.size == 0:
            out.append(HadamardTriple(N, B, structural_hadamard_L(N, B.size)))
            continue
        if N > search_cap:
            return None
        t = find_hadamard_L(N, B)
        if t is None:
            return None
        out.append(t)
    return out


def gamma0(N1: int, M1: int) -> Tuple[Fraction, ...]:
    """The arithmetic progression {0, N1/M1, ..., (M1-1) N1/M1}.

    For a complete residue system of size M1 with M1 | N1 this is a spectrum
    of the single-level discrete measure (its squared masks sum to 1).
    """
    if M1 < 2 or N1 < M1:
        raise ValueError(f"need N1 >= M1 >= 2, got N1={N1}, M1={M1}")
    return tuple(Fraction(j * N1, M1) for j in range(M1))


def project_P(Lambda: SpectrumTruncation, gamma, N1: int) -> Tuple[int, ...]:
    """{omega in Z : gamma + N1*omega in Lambda}, over the finite truncation."""
    gamma = Fraction(gamma)
    out = []
    for lam in Lambda.elements:
        w = (lam - gamma) / N1
        if w.denominator == 1:
            out.append(int(w))
    return tuple(out)


def inhabited_classes(Lambda: SpectrumTruncation, N1: int, M1: int) -> Tuple[Fraction, ...]:
    """Base points in [0, N1/M1) of the residue classes met by the truncation.

    Classes are gamma + {0, N1/M1, ..., (M1-1) N1/M1}; the base point is the
    representative in [0, N1/M1).  Ordered by (denominator, numerator).
    """
    step = Fraction(N1, M1)
    bases = {(Fraction(lam) % N1) % step for lam in Lambda.elements}
    return tuple(sorted(bases, key=lambda q: (q.denominator, q.numerator)))


def decompose_lambda(Lambda: SpectrumTruncation, N1: int, M1: int,
                     choice: Sequence) -> SpectrumTruncation:
    """Reassemble a candidate tail spectrum from one pick per residue class.

    The i-th choice must lie in the i-th inhabited class (base + gamma0);
    its contribution is choice/N1 + P(choice).  Picks whose projection is
    empty only warn -- shallow truncations of genuine spectra can miss a
    residue -- but an entirely empty result is an error.
    """
    classes = inhabited_classes(Lambda, N1, M1)
    picks = [Fraction(c) for c in choice]
    if len(picks) != len(classes):
        raise ChoiceOutOfClass(
            f"need exactly one choice per inhabited class "
            f"({len(classes)} classes, {len(picks)} choices)"
        )
    g0 = gamma0(N1, M1)
    out = set()
    for base, pick in zip(classes, picks):
        if (pick - base) not in g0:
            raise ChoiceOutOfClass(f"choice {pick} is not in the class of {base}")
        proj = project_P(Lambda, pick, N1)
        if not proj:
            warnings.warn(
                f"class pick {pick} projects to an empty set on this truncation",
                stacklevel=2,
            )
            continue
        out.update(Fraction(pick, N1) + w for w in proj)
    if not out:
        raise EmptyResult("every class pick projected to the empty set")
    return SpectrumTruncation(tuple(out), Lambda.depth, "decomposed")


def pq_profile(seq: MoranSequence, plan: TruncationPlan, Lambda: SpectrumTruncation,
               gamma, xi: float) -> Tuple[float, float]:
    """(p, q) at one angle gamma: squared first-level mask at (xi+gamma)/N1,
    and the squared tail transforms summed over the projection of gamma.

    The tail factor is truncated at depth - 1 so that summing p*q over the
    residue classes realized in the truncation regroups exactly into the
    depth-deep Q value at the same xi.
    """
    gamma = Fraction(gamma)
    N1, B1 = materialize(seq, 1)
    if isinstance(xi, Fraction):
        theta = (xi + gamma) / N1
    else:
        theta = (float(xi) + float(gamma)) / N1
    p = abs(mask_eval(B1, theta)) ** 2
    proj = project_P(Lambda, gamma, N1)
    if not proj:
        return float(p), 0.0
    if plan.depth == 1:
        return float(p), float(len(proj))   # depth-0 tail product is identically 1
    tail_seq = shift(seq, 1)
    tail_plan = TruncationPlan(plan.depth - 1, plan.tail_epsilon, plan.xi_window)
    q = 0.0
    for w in proj:
        q += abs(mu_hat_truncated(tail_seq, tail_plan, theta + w)) ** 2
    return float(p), q
